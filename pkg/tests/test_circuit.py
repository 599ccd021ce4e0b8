import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrouter.circuit import (
    DetectorConfig,
    HeraldRule,
    apply_element,
    apply_elements,
    measure_and_branch,
    run_heralded,
)
from qrouter.elements import beam_splitter, hwp, ndf, pbs, pdbs, phase_shift, qwp
from qrouter.fock import Mode, ModeRegistry, vacuum
from qrouter.router import ControlQubit, SignalQubit, route_fixed

H1, V1, H2, V2, HC, VC = (Mode(p, q) for p in ("1", "2", "c") for q in ("H", "V"))
deg = math.radians


def photons(reg, *modes):
    s = vacuum(reg)
    for m in modes:
        s = s.create(m)
    return s


def test_identity_element_leaves_state():
    reg = ModeRegistry.from_paths("1")
    s = photons(reg, H1)
    assert apply_element(s, hwp(0.0, "1")).amplitude({H1: 1}) == 1
    assert apply_element(s, phase_shift(0.0, V1)).is_close(s)


def test_hong_ou_mandel():
    reg = ModeRegistry([Mode("a"), Mode("b")])
    out = apply_element(photons(reg, Mode("a"), Mode("b")), beam_splitter(0.5, Mode("a"), Mode("b")))
    assert abs(out.amplitude({Mode("a"): 1, Mode("b"): 1})) < 1e-16
    # bunching: |2,0> and |0,2> each with probability 1/2
    assert abs(out.amplitude({Mode("a"): 2})) ** 2 == pytest.approx(0.5)
    assert abs(out.amplitude({Mode("b"): 2})) ** 2 == pytest.approx(0.5)


def test_herald_after_half_filter():
    reg = ModeRegistry([H1, Mode("loss.1H")])
    s = apply_element(photons(reg, H1), ndf(0.5, [H1]))
    _, p = run_heralded(s, HeraldRule())
    assert p == pytest.approx(0.5)


def test_herald_zero_pattern():
    reg = ModeRegistry.from_paths("1")
    _, p = run_heralded(photons(reg, H1), HeraldRule({V1: 1}))
    assert p == 0.0


def test_threshold_herald():
    reg = ModeRegistry.from_paths("1")
    s = (photons(reg, H1, H1) + photons(reg, H1)).normalized()
    exact = run_heralded(s, HeraldRule(totals=(((H1, V1), 1),)))[1]
    thresh = run_heralded(s, HeraldRule(totals=(((H1, V1), 1),), resolving=False))[1]
    assert exact == pytest.approx(1 / 3) and thresh == pytest.approx(1.0)


def test_full_fixed_chain_at_theta_zero():
    r = route_fixed(SignalQubit(1.0, 0.0), ControlQubit(0.0))
    assert r.p_heralded == pytest.approx(1 / 8, abs=1e-15)


def test_indefinite_photon_number_rejected():
    reg = ModeRegistry.from_paths("c")
    s = (vacuum(reg) + photons(reg, HC)) * (1 / math.sqrt(2))
    with pytest.raises(ValueError, match="indefinite"):
        measure_and_branch(s, DetectorConfig(), "c")


@pytest.mark.parametrize("eta", [0.0, 1.2])
def test_detector_efficiency_domain(eta):
    with pytest.raises(ValueError):
        DetectorConfig(eta)


angles = st.floats(-math.pi, math.pi)


@given(st.lists(st.tuples(st.sampled_from(["hwp", "qwp", "bs", "pbs", "pdbs"]), angles), min_size=1, max_size=6))
def test_lossless_circuits_preserve_norm(ops):
    reg = ModeRegistry.from_paths("1", "2")
    s = (photons(reg, H1, V2) * 0.6 + photons(reg, V1, V1) * 0.8j).normalized()
    elems = []
    for kind, a in ops:
        t = (math.sin(a) + 1) / 2
        elems.append(
            {"hwp": hwp(a, "1"), "qwp": qwp(a, "2"), "bs": beam_splitter(t, H1, H2), "pbs": pbs("1", "2", a), "pdbs": pdbs(t, 1 - t, "1", "2")}[kind]
        )
    assert apply_elements(s, elems).norm_squared() == pytest.approx(1.0, abs=1e-12)


@given(st.sampled_from(["HV", "DA", "RL"]), st.sampled_from([0.3, 0.7, 1.0]), angles, angles)
def test_branch_completeness(basis, eta, a, b):
    reg = ModeRegistry.from_paths("1", "c")
    s = photons(reg, H1, HC) * math.cos(a) + photons(reg, V1, VC) * (cmath.exp(1j * b) * math.sin(a))
    s = apply_element(s, qwp(b, "c"))
    branches = measure_and_branch(s, DetectorConfig(eta, basis), "c")
    assert len(branches) == 2
    assert sum(br.probability for br in branches) == pytest.approx(eta * s.norm_squared(), abs=1e-12)


def test_efficiency_scales_probability_not_state():
    reg = ModeRegistry.from_paths("1", "c")
    s = (photons(reg, H1, HC) + photons(reg, V1, VC)) * (1 / math.sqrt(2))
    full = measure_and_branch(s, DetectorConfig(1.0), "c")
    half = measure_and_branch(s, DetectorConfig(0.5), "c")
    for f, h in zip(full, half):
        assert h.probability == pytest.approx(0.5 * f.probability)
        assert abs(f.state.inner(h.state)) ** 2 == pytest.approx(f.probability * h.probability)


def test_two_photon_detection_labels():
    reg = ModeRegistry.from_paths("c")
    s = photons(reg, HC, HC) * (1 / math.sqrt(2))
    labels = [b.outcome_label for b in measure_and_branch(s, DetectorConfig(basis="DA"), "c")]
    assert labels == ["DD", "DA", "AA"]


# -- fixed-router checkpoints -----------------------------------------------------


def _aligned(sim: np.ndarray, ref: np.ndarray) -> float:
    ov = np.vdot(ref, sim)
    return float(np.max(np.abs(sim - ov / abs(ov) * ref)))


@pytest.mark.parametrize("theta,vt", [(0.3, 0.0), (1.0, 2.0), (math.pi / 4, math.pi)])
def test_state_after_ppg(theta, vt):
    sig = SignalQubit(0.6, 0.8j)
    r = route_fixed(sig, ControlQubit(theta, vt), keep_trace=True)
    st_ = r.trace[("", "ppg")]
    a, b = sig.alpha, sig.beta
    c, s = math.cos(theta), cmath.exp(1j * vt) * math.sin(theta)
    keys = [{H1: 1, HC: 1}, {V1: 1, HC: 1}, {H2: 1, HC: 1}, {V2: 1, VC: 1}]
    ref = np.array([
        a * c / (2 * math.sqrt(2)),
        a * s / (2 * math.sqrt(6)),
        b * c / (2 * math.sqrt(2)) + b * s / (2 * math.sqrt(6)),
        -b * c / (2 * math.sqrt(2)) + b * s / (2 * math.sqrt(6)),
    ])
    sim = np.array([st_.amplitude(k) for k in keys])
    assert _aligned(sim, ref) < 1e-12
    assert st_.norm_squared() == pytest.approx(np.sum(np.abs(ref) ** 2), abs=1e-14)


@pytest.mark.parametrize("theta,vt", [(0.3, 0.0), (1.0, 2.0)])
def test_detection_branches(theta, vt):
    sig = SignalQubit(0.6, 0.8j)
    r = route_fixed(sig, ControlQubit(theta, vt), keep_trace=True)
    a, b = sig.alpha, sig.beta
    c, s = math.cos(theta), cmath.exp(1j * vt) * math.sin(theta)
    # arm 1 picks up <D|H> = 1/sqrt2; arm 2 collapses to the D-outcome form
    ref = np.array([
        a * c / 4,
        a * s / (4 * math.sqrt(3)),
        b * c / 4 + b * s / (4 * math.sqrt(3)),
        -b * c / 4 + b * s / (4 * math.sqrt(3)),
    ])
    for label in ("D", "A"):
        st_ = r.trace[(label, "detect")]
        sim = np.array([st_.amplitude({m: 1}) for m in (H1, V1, H2, V2)])
        assert _aligned(sim, ref) < 1e-12
