import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import control_qubits, signal_qubits
from qrouter import analytics as an
from qrouter.gates import p_c
from qrouter.router import (
    ControlQubit,
    SignalQubit,
    output_fidelity,
    route_fixed,
    route_multi,
    route_tunable,
    route_uniform,
)

HALF_PI = math.pi / 2
SIG = SignalQubit(0.6, 0.8j)


def test_signal_and_control_validation():
    with pytest.raises(ValueError):
        SignalQubit(1.0, 0.1)
    with pytest.raises(ValueError):
        ControlQubit(2.0)
    with pytest.raises(ValueError):
        ControlQubit(0.1, 2 * math.pi)


# -- fixed router -----------------------------------------------------------------


def test_fixed_theta_zero():
    r = route_fixed(SIG, ControlQubit(0.0))
    assert r.p_succ == pytest.approx(1 / 8, abs=1e-15)
    assert r.fidelity_out1 == pytest.approx(1.0, abs=1e-12)
    assert r.fidelity_out2 is None and r.chi == 0.0


def test_fixed_theta_half_pi():
    r = route_fixed(SIG, ControlQubit(HALF_PI))
    assert r.p_succ == pytest.approx(1 / 24, abs=1e-15)
    assert r.fidelity_out1 is None
    assert r.chi == HALF_PI


def test_fixed_theta_pi_over_3_routes_evenly():
    assert route_fixed(SIG, ControlQubit(math.pi / 3)).chi == pytest.approx(math.pi / 4, abs=1e-12)


def test_fixed_equalized_grid():
    for th in np.linspace(0, HALF_PI, 20):
        assert route_fixed(SIG, ControlQubit(float(th)), equalize=True).p_succ == pytest.approx(1 / 24, abs=1e-15)


@given(signal_qubits(), control_qubits())
def test_fixed_amplitudes_and_phase(sig, ctrl):
    r = route_fixed(sig, ctrl)
    th = ctrl.theta
    assert abs(r.a1) == pytest.approx(math.cos(th) / (2 * math.sqrt(2)), abs=1e-12)
    assert abs(r.a2) == pytest.approx(math.sin(th) / (2 * math.sqrt(6)), abs=1e-12)
    assert r.p_succ == pytest.approx(abs(r.a1) ** 2 + abs(r.a2) ** 2, abs=1e-15)
    assert r.p_succ == pytest.approx(an.p_succ_fixed(th), abs=1e-12)
    if r.relative_phase is not None:
        # A2/A1 carries the control phase
        assert abs(cmath.exp(1j * r.relative_phase) - cmath.exp(1j * ctrl.vartheta)) < 1e-9
    for f in (r.fidelity_out1, r.fidelity_out2):
        assert f is None or f == pytest.approx(1.0, abs=1e-10)
    assert r.branch_fidelity == pytest.approx(1.0, abs=1e-12)
    assert r.p_heralded == pytest.approx(r.p_succ, abs=1e-15)


def test_fixed_p_succ_signal_independent(rng):
    for th in (0.2, 0.9, 1.4):
        ps = [route_fixed(SignalQubit.random(rng), ControlQubit(th)).p_succ for _ in range(50)]
        assert max(ps) - min(ps) < 1e-12


def test_success_identity_via_chi():
    for th in np.linspace(0, HALF_PI, 13):
        r = route_fixed(SIG, ControlQubit(float(th)))
        assert r.p_succ == pytest.approx(an.p_succ_of_chi(r.chi), abs=1e-12)


def test_output_fidelity_absent_port():
    r = route_fixed(SIG, ControlQubit(0.0))
    assert output_fidelity(r.branches[0].state, SIG)[1] is None


# -- tunable router -------------------------------------------------------------


def test_tunable_phi_pi_full_range():
    assert route_tunable(SIG, ControlQubit(HALF_PI), math.pi).chi == pytest.approx(HALF_PI, abs=1e-12)


def test_tunable_phi_zero_never_routes():
    for th in np.linspace(0, HALF_PI, 9):
        assert route_tunable(SIG, ControlQubit(float(th)), 0.0).chi == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("phi", np.linspace(0.0, math.pi, 9).tolist())
def test_tunable_chi_limit(phi):
    assert route_tunable(SIG, ControlQubit(HALF_PI), phi).chi == pytest.approx(phi / 2, abs=1e-12)
    for th in np.linspace(0, HALF_PI, 15):
        assert route_tunable(SIG, ControlQubit(float(th)), phi).chi <= phi / 2 + 1e-10


def test_tunable_domain():
    with pytest.raises(ValueError):
        route_tunable(SIG, ControlQubit(0.3), -0.1)


def test_tunable_random_draw_fidelities(rng):
    for _ in range(20):
        sig = SignalQubit.random(rng)
        ctrl = ControlQubit(rng.uniform(0, HALF_PI), rng.uniform(0, 2 * math.pi))
        r = route_tunable(sig, ctrl, rng.uniform(0, math.pi))
        for f in (r.fidelity_out1, r.fidelity_out2):
            assert f is None or abs(f - 1) <= 1e-10


@given(signal_qubits(), control_qubits(), st.floats(0.0, math.pi))
def test_tunable_matches_closed_form(sig, ctrl, phi):
    r = route_tunable(sig, ctrl, phi)
    assert r.p_succ == pytest.approx(an.p_succ_tunable(ctrl.theta, phi, ctrl.vartheta), abs=1e-12)
    assert r.chi == pytest.approx(an.chi_tunable(ctrl.theta, phi, ctrl.vartheta), abs=1e-9)


def test_tunable_p_succ_signal_independent(rng):
    for phi in (0.5, 2.0):
        ps = [route_tunable(SignalQubit.random(rng), ControlQubit(0.8), phi).p_succ for _ in range(50)]
        assert max(ps) - min(ps) < 1e-12


@pytest.mark.parametrize("phi", [math.pi / 4, math.pi / 2, math.pi])
def test_tunable_minimum_at_half_pi(phi):
    sim = route_tunable(SIG, ControlQubit(HALF_PI), phi).p_succ
    assert sim == pytest.approx(an.p_min_tunable_derived(phi), abs=1e-12)
    grid = [route_tunable(SIG, ControlQubit(float(t)), phi).p_succ for t in np.linspace(0, HALF_PI, 50)]
    assert min(grid) == pytest.approx(sim, abs=1e-15)


def test_tunable_branches_agree_only_at_pi():
    # the A outcome can be mapped onto the D outcome only for the sign gate
    assert route_tunable(SIG, ControlQubit(0.7), math.pi).branch_fidelity == pytest.approx(1.0, abs=1e-12)
    assert route_tunable(SIG, ControlQubit(0.7), math.pi / 2).branch_fidelity < 0.999


def test_uniform_router_matches_formula():
    for phi in (0.4, 2.5):
        for th in (0.0, 0.6, HALF_PI):
            r = route_uniform(SIG, ControlQubit(th), phi)
            assert r.p_succ == pytest.approx(an.p_succ_uniform(th, phi), abs=1e-13)


# -- multi-signal router ----------------------------------------------------------


def test_multi_examples():
    assert route_multi([SIG], ControlQubit(0.0)).p_total == pytest.approx(1 / 8, abs=1e-15)
    assert route_multi([SIG, SIG], ControlQubit(0.0)).p_total == pytest.approx(1 / 128, abs=1e-15)
    for n in (1, 2, 3):
        r = route_multi([SIG] * n, ControlQubit(HALF_PI))
        assert r.p_total == pytest.approx(2.0 ** (1 - 4 * n) / 9**n, rel=1e-12)


def test_multi_needs_signals():
    with pytest.raises(ValueError):
        route_multi([], ControlQubit(0.0))


def test_multi_single_equals_tunable_at_pi():
    for th in (0.0, 0.5, HALF_PI):
        m = route_multi([SIG], ControlQubit(th))
        t = route_tunable(SIG, ControlQubit(th), math.pi)
        assert m.p_total == pytest.approx(t.p_succ, abs=1e-15)
    assert route_multi([SIG], ControlQubit(HALF_PI)).p_total == pytest.approx(1 / 72, abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_multi_coherent_total_and_products(rng, n):
    sigs = [SignalQubit.random(rng) for _ in range(n)]
    for th in (0.0, 0.4, math.pi / 4, HALF_PI):
        r = route_multi(sigs, ControlQubit(th))
        assert r.p_total == pytest.approx(an.p_total_multi_derived(n, th), rel=1e-12)
        for f in (r.fidelity_out1, r.fidelity_out2):
            assert f is None or abs(f - 1) <= 1e-10


# -- detector efficiency ------------------------------------------------------------


@pytest.mark.parametrize("eta", [0.3, 0.7, 1.0])
def test_efficiency_scales_probability(eta):
    for th in (0.0, 0.8, HALF_PI):
        ref = route_fixed(SIG, ControlQubit(th))
        r = route_fixed(SIG, ControlQubit(th), eta=eta)
        assert r.p_succ == pytest.approx(eta * ref.p_succ, abs=1e-15)
        t_ref = route_tunable(SIG, ControlQubit(th), 1.2)
        t = route_tunable(SIG, ControlQubit(th), 1.2, eta=eta)
        assert t.p_succ == pytest.approx(eta * t_ref.p_succ, abs=1e-15)
        assert t.chi == pytest.approx(t_ref.chi, abs=1e-12)
        for f in (r.fidelity_out1, r.fidelity_out2, t.fidelity_out1, t.fidelity_out2):
            assert f is None or abs(f - 1) <= 1e-12
