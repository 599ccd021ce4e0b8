"""Linear-optical elements as mode-coupling matrices.

An element maps the creation operators of its input modes to
superpositions of creation operators on its output modes::

    a_in[k]^dagger  ->  sum_j matrix[j, k] * a_out[j]^dagger

Wave plates use the Jones convention ``[[cos 2a, sin 2a], [sin 2a, -cos 2a]]``
with ``a`` measured from the horizontal axis.  Beam splitters use the
symmetric convention (reflection amplitude ``i*sqrt(1 - T)``).  The
polarizing beam splitter transmits H and swaps V between its two paths
with reflection factor ``exp(1j * reflection_phase)``, equal for both
paths (default: no phase).  Lossy elements route the discarded amplitude
into polarization-less ``loss.*`` modes that heralds later pin to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fock import Mode, path_modes

UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class OpticalElement:
    name: str
    input_modes: tuple[Mode, ...]
    output_modes: tuple[Mode, ...]
    matrix: np.ndarray = field(repr=False, compare=False)
    loss_modes: tuple[Mode, ...] = ()
    params: tuple = ()

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (len(self.output_modes), len(self.input_modes)):
            raise ValueError(
                f"{self.name}: matrix shape {m.shape} does not match "
                f"{len(self.output_modes)} outputs x {len(self.input_modes)} inputs"
            )
        if len(set(self.input_modes)) != len(self.input_modes):
            raise ValueError(f"{self.name}: repeated input mode")
        if len(set(self.output_modes)) != len(self.output_modes):
            raise ValueError(f"{self.name}: repeated output mode")
        if not set(self.loss_modes) <= set(self.output_modes):
            raise ValueError(f"{self.name}: loss modes must be outputs")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if np.linalg.svd(m, compute_uv=False).max(initial=0.0) > 1 + UNITARY_TOL:
            raise ValueError(f"{self.name}: matrix is not a contraction")

    @property
    def modes(self) -> tuple[Mode, ...]:
        seen = dict.fromkeys(self.input_modes)
        seen.update(dict.fromkeys(self.output_modes))
        return tuple(seen)

    @property
    def is_lossless(self) -> bool:
        return not self.loss_modes

    def kept_matrix(self) -> np.ndarray:
        """Rows of the matrix for the non-loss outputs."""
        rows = [i for i, m in enumerate(self.output_modes) if m not in self.loss_modes]
        return self.matrix[rows, :]

    def is_isometry(self, tol: float = UNITARY_TOL) -> bool:
        m = self.matrix
        return bool(np.abs(m.conj().T @ m - np.eye(m.shape[1])).max() < tol)

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        m = self.matrix
        return m.shape[0] == m.shape[1] and self.is_isometry(tol)

    def relabel(self, mapping: dict[Mode, Mode]) -> "OpticalElement":
        """Same element acting on renamed modes."""
        ren = lambda ms: tuple(mapping.get(x, x) for x in ms)  # noqa: E731
        return OpticalElement(
            self.name,
            ren(self.input_modes),
            ren(self.output_modes),
            self.matrix,
            ren(self.loss_modes),
            self.params,
        )


def _in_place(name: str, modes: Sequence[Mode], matrix, params=()) -> OpticalElement:
    modes = tuple(modes)
    return OpticalElement(name, modes, modes, np.asarray(matrix, dtype=complex), (), tuple(params))


def jones_hwp(angle: float) -> np.ndarray:
    c, s = math.cos(2 * angle), math.sin(2 * angle)
    return np.array([[c, s], [s, -c]], dtype=complex)


def jones_qwp(angle: float) -> np.ndarray:
    # R(-a) diag(1, i) R(a), global phase dropped
    c, s = math.cos(angle), math.sin(angle)
    return np.array(
        [[c * c + 1j * s * s, (1 - 1j) * s * c], [(1 - 1j) * s * c, s * s + 1j * c * c]],
        dtype=complex,
    )


def hwp(angle: float, spatial: str) -> OpticalElement:
    """Half-wave plate on path ``spatial``; ``angle`` in radians."""
    return _in_place("hwp", path_modes(spatial), jones_hwp(angle), (angle, spatial))


def qwp(angle: float, spatial: str) -> OpticalElement:
    """Quarter-wave plate; fast axis at ``angle`` from horizontal."""
    return _in_place("qwp", path_modes(spatial), jones_qwp(angle), (angle, spatial))


def wave_plate(matrix, spatial: str, name: str = "jones") -> OpticalElement:
    """Arbitrary unitary Jones matrix on the (H, V) modes of a path."""
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("Jones matrix must be 2x2")
    return _in_place(name, path_modes(spatial), m, (spatial,))


def phase_shift(phi: float, mode: Mode) -> OpticalElement:
    return _in_place("phase", (mode,), [[np.exp(1j * phi)]], (phi, str(mode)))


def beam_splitter(transmissivity: float, mode_a: Mode, mode_b: Mode, name: str = "bs") -> OpticalElement:
    """Symmetric two-mode splitter with intensity transmissivity ``T``."""
    _check_unit("transmissivity", transmissivity)
    t = math.sqrt(transmissivity)
    r = 1j * math.sqrt(1.0 - transmissivity)
    return _in_place(name, (mode_a, mode_b), [[t, r], [r, t]], (transmissivity,))


def pbs(path_a: str, path_b: str, reflection_phase: float = 0.0) -> OpticalElement:
    ha, va = path_modes(path_a)
    hb, vb = path_modes(path_b)
    r = np.exp(1j * reflection_phase)
    # input / output order: (ha, va, hb, vb)
    m = np.array(
        [
            [1, 0, 0, 0],
            [0, 0, 0, r],
            [0, 0, 1, 0],
            [0, r, 0, 0],
        ],
        dtype=complex,
    )
    return _in_place("pbs", (ha, va, hb, vb), m, (path_a, path_b, reflection_phase))


def pdbs(t_h: float, t_v: float, path_a: str, path_b: str) -> OpticalElement:
    """Polarization-dependent splitter: one symmetric splitter per polarization."""
    _check_unit("T_H", t_h)
    _check_unit("T_V", t_v)
    ha, va = path_modes(path_a)
    hb, vb = path_modes(path_b)
    m = np.zeros((4, 4), dtype=complex)
    for (i, j), t in (((0, 2), t_h), ((1, 3), t_v)):
        tt, rr = math.sqrt(t), 1j * math.sqrt(1.0 - t)
        m[i, i] = m[j, j] = tt
        m[i, j] = m[j, i] = rr
    return _in_place("pdbs", (ha, va, hb, vb), m, (t_h, t_v, path_a, path_b))


def loss_mode_for(mode: Mode) -> Mode:
    return Mode(f"loss.{mode.spatial}{mode.polarization or ''}")


def ndf(transmissivity: float, modes: Sequence[Mode]) -> OpticalElement:
    """Neutral-density filter: each mode leaks ``1 - T`` into its own loss mode."""
    _check_unit("transmissivity", transmissivity)
    modes = tuple(modes)
    losses = tuple(loss_mode_for(m) for m in modes)
    k = len(modes)
    m = np.zeros((2 * k, k), dtype=complex)
    t, r = math.sqrt(transmissivity), math.sqrt(1.0 - transmissivity)
    for i in range(k):
        m[i, i] = t
        m[k + i, i] = r
    return OpticalElement("ndf", modes, modes + losses, m, losses, (transmissivity,))


def ndf_path(transmissivity: float, spatial: str) -> OpticalElement:
    return ndf(transmissivity, path_modes(spatial))


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
