import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrouter.circuit import apply_element, pin_losses
from qrouter.elements import (
    OpticalElement,
    beam_splitter,
    hwp,
    jones_hwp,
    ndf,
    ndf_path,
    pbs,
    pdbs,
    phase_shift,
    qwp,
)
from qrouter.fock import Mode, ModeRegistry, vacuum

H1, V1, H2, V2 = Mode("1", "H"), Mode("1", "V"), Mode("2", "H"), Mode("2", "V")
deg = math.radians


def one(reg, *modes):
    s = vacuum(reg)
    for m in modes:
        s = s.create(m)
    return s


@pytest.fixture
def reg():
    return ModeRegistry.from_paths("1", "2")


def test_hwp_minus_30_on_h(reg):
    out = apply_element(one(reg, H1), hwp(deg(-30), "1"))
    assert out.amplitude({H1: 1}) == pytest.approx(0.5)
    assert out.amplitude({V1: 1}) == pytest.approx(-math.sqrt(3) / 2)


def test_hwp_22_5_is_hadamard_on_h(reg):
    out = apply_element(one(reg, H1), hwp(deg(22.5), "1"))
    assert out.amplitude({H1: 1}) == pytest.approx(1 / math.sqrt(2))
    assert out.amplitude({V1: 1}) == pytest.approx(1 / math.sqrt(2))


def test_hwp_0_flips_v(reg):
    out = apply_element(one(reg, V1), hwp(0.0, "1"))
    assert out.amplitude({V1: 1}) == pytest.approx(-1.0)


def test_hwp_45_swaps(reg):
    assert apply_element(one(reg, H1), hwp(deg(45), "1")).amplitude({V1: 1}) == pytest.approx(1.0)
    assert apply_element(one(reg, V1), hwp(deg(45), "1")).amplitude({H1: 1}) == pytest.approx(1.0)


def test_pbs_transmits_h_reflects_v(reg):
    e = pbs("1", "2")
    assert apply_element(one(reg, H1), e).amplitude({H1: 1}) == 1
    out = apply_element(one(reg, V1), e)
    assert abs(out.amplitude({V2: 1})) == pytest.approx(1.0)


def test_pbs_splits_signal(reg):
    a, b = 0.6, 0.8j
    s = a * one(reg, H1) + b * one(reg, V1)
    out = apply_element(s, pbs("1", "2"))
    assert out.amplitude({H1: 1}) == pytest.approx(a)
    assert out.amplitude({V2: 1}) == pytest.approx(b)


def test_pdbs_h_untouched_and_v_transmission(reg):
    e = pdbs(1.0, 1 / 3, "1", "2")
    assert apply_element(one(reg, H1), e).amplitude({H1: 1}) == pytest.approx(1.0)
    assert abs(apply_element(one(reg, V1), e).amplitude({V1: 1})) == pytest.approx(1 / math.sqrt(3))


def _two_photon_oracle(t):
    # (sqrt(t) a + i sqrt(1-t) b)(i sqrt(1-t) a + sqrt(t) b): coefficient of a*b
    pa = np.array([math.sqrt(t), 1j * math.sqrt(1 - t)])  # [a, b] image of first photon
    pb = np.array([1j * math.sqrt(1 - t), math.sqrt(t)])
    return pa[0] * pb[1] + pa[1] * pb[0]


@pytest.mark.parametrize("t", [1 / 3, 0.5, 0.2, 0.9])
def test_pdbs_vv_coincidence_matches_expansion(reg, t):
    out = apply_element(one(reg, V1, V2), pdbs(1.0, t, "1", "2"))
    assert out.amplitude({V1: 1, V2: 1}) == pytest.approx(_two_photon_oracle(t), abs=1e-14)


def test_pdbs_third_gives_minus_third(reg):
    out = apply_element(one(reg, V1, V2), pdbs(1.0, 1 / 3, "1", "2"))
    assert out.amplitude({V1: 1, V2: 1}) == pytest.approx(-1 / 3, abs=1e-15)


def test_ndf_examples():
    reg = ModeRegistry([H1, Mode("loss.1H")])
    s = one(reg, H1)
    assert pin_losses(apply_element(s, ndf(1.0, [H1]))).is_close(s)
    half = pin_losses(apply_element(s, ndf(0.5, [H1])))
    assert half.amplitude({H1: 1}) == pytest.approx(1 / math.sqrt(2))


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
def test_transmissivity_domain(bad):
    with pytest.raises(ValueError):
        ndf(bad, [H1])
    with pytest.raises(ValueError):
        pdbs(bad, 0.5, "1", "2")


def test_phase_shift_examples(reg):
    s = one(reg, H1)
    assert apply_element(s, phase_shift(0.0, H1)).is_close(s)
    assert apply_element(s, phase_shift(math.pi, H1)).amplitude({H1: 1}) == pytest.approx(-1.0)
    twice = apply_element(apply_element(s, phase_shift(math.pi / 2, H1)), phase_shift(math.pi / 2, H1))
    assert twice.is_close(apply_element(s, phase_shift(math.pi, H1)))


def test_non_contraction_rejected():
    with pytest.raises(ValueError, match="contraction"):
        OpticalElement("gain", (H1,), (H1,), np.array([[1.1]]))


def test_ndf_is_isometry_not_unitary():
    e = ndf_path(0.3, "1")
    assert e.is_isometry() and not e.is_unitary()


angles = st.floats(-math.pi, math.pi)
unit = st.floats(0.0, 1.0)


@given(angles, angles, unit, unit, unit)
def test_lossless_elements_unitary(a, b, t, th, tv):
    for e in (hwp(a, "1"), qwp(b, "1"), phase_shift(a, H1), beam_splitter(t, H1, H2), pdbs(th, tv, "1", "2"), pbs("1", "2", a)):
        m = e.matrix
        assert np.abs(m.conj().T @ m - np.eye(m.shape[1])).max() < 1e-12


@given(angles)
def test_hwp_involutive(a):
    m = jones_hwp(a)
    assert np.abs(m @ m - np.eye(2)).max() < 1e-12


def test_identities(reg):
    s = 0.6 * one(reg, H1, V2) + 0.8 * one(reg, V1, H2)
    assert apply_element(s, pdbs(1.0, 1.0, "1", "2")).is_close(s)
    lossy = ModeRegistry.from_paths("1", "2")
    lossy.add(Mode("loss.1H"))
    lossy.add(Mode("loss.1V"))
    t = 0.6 * one(lossy, H1, V2) + 0.8 * one(lossy, V1, H2)
    assert apply_element(t, ndf_path(1.0, "1")).is_close(t)


@given(angles, unit)
def test_relabeling_commutes(a, t):
    # element on path 1 then swap labels == swapped element on path 2
    reg = ModeRegistry.from_paths("1", "2")
    swap = {H1: H2, V1: V2, H2: H1, V2: V1}
    s = 0.6 * one(reg, H1, V2) + 0.8j * one(reg, V1)
    for e in (hwp(a, "1"), beam_splitter(t, H1, V2)):
        lhs = apply_element(s, e)
        relabel = lambda st_: type(st_)(reg, {tuple(o[reg.index(swap[m])] for m in reg): x for o, x in st_.items()})  # noqa: E731
        rhs = relabel(apply_element(relabel(s), e.relabel(swap)))
        assert lhs.is_close(rhs, atol=1e-12)
