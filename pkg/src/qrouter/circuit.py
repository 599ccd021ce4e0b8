"""Evolution of Fock states through elements, heralds and detections.

Elements act in the Heisenberg picture: every creation operator on an
element input is replaced by its image and the product is expanded.
Heralds keep the terms matching a detection pattern; the squared norm of
what survives is the running success probability.  A measurement splits
the run into one :class:`Branch` per outcome, each with its own
feed-forward correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .elements import OpticalElement, wave_plate
from .fock import (
    Mode,
    StateVector,
    path_modes,
    project_pattern,
    project_total,
    remove_photons,
)


def apply_element(state: StateVector, elem: OpticalElement) -> StateVector:
    """Exact linear-optical evolution of ``state`` through ``elem``."""
    reg = state.registry
    in_idx = [reg.index(m) for m in elem.input_modes]
    out_idx = [reg.index(m) for m in elem.output_modes]
    # column k: list of (output slot, coefficient) with non-zero weight
    images = [
        [(out_idx[j], complex(elem.matrix[j, k])) for j in range(len(out_idx)) if elem.matrix[j, k] != 0]
        for k in range(len(in_idx))
    ]
    result: dict[tuple, complex] = {}
    for occ, amp in state.items():
        counts = [occ[i] for i in in_idx]
        if not any(counts):
            result[occ] = result.get(occ, 0j) + amp
            continue
        base = list(occ)
        for i in in_idx:
            base[i] = 0
        norm = math.prod(math.factorial(n) for n in counts)
        partial: dict[tuple, complex] = {tuple(base): amp / math.sqrt(norm)}
        for k, n in enumerate(counts):
            for _ in range(n):
                partial = _create_superposition(partial, images[k])
        for o, a in partial.items():
            result[o] = result.get(o, 0j) + a
    return StateVector(reg, result, state.prune)


def _create_superposition(terms: dict[tuple, complex], image) -> dict[tuple, complex]:
    out: dict[tuple, complex] = {}
    for occ, amp in terms.items():
        for slot, coeff in image:
            n = occ[slot]
            new = occ[:slot] + (n + 1,) + occ[slot + 1 :]
            out[new] = out.get(new, 0j) + amp * coeff * math.sqrt(n + 1)
    return out


def apply_elements(state: StateVector, elems: Iterable[OpticalElement]) -> StateVector:
    for e in elems:
        state = apply_element(state, e)
    return state


@dataclass(frozen=True)
class HeraldRule:
    """Detection pattern a run must match to be kept.

    ``pattern`` pins exact counts on individual modes; ``totals`` pins the
    summed count over a group of modes (e.g. one photon anywhere in path c).
    Non-resolving detectors only check ``>=`` on the totals.  Every loss mode
    of the registry is always pinned to zero.  ``amplitude`` multiplies the
    surviving branch, e.g. ``1/sqrt(2)`` for a black-box gate whose own
    success probability is 1/2.
    """

    pattern: Mapping[Mode, int] = field(default_factory=dict)
    totals: tuple[tuple[tuple[Mode, ...], int], ...] = ()
    label: str = ""
    resolving: bool = True
    amplitude: float = 1.0

    def __post_init__(self):
        if any(k < 0 for k in self.pattern.values()) or any(k < 0 for _, k in self.totals):
            raise ValueError("herald counts must be non-negative")
        if not 0.0 <= self.amplitude <= 1.0:
            raise ValueError("herald amplitude must lie in [0, 1]")

    def modes(self) -> set[Mode]:
        out = set(self.pattern)
        for ms, _ in self.totals:
            out.update(ms)
        return out


def run_heralded(state: StateVector, herald: HeraldRule) -> tuple[StateVector, float]:
    """Post-select ``state`` on ``herald``; returns (residual, squared norm)."""
    pins = {m: 0 for m in state.registry.loss_modes()}
    pins.update(herald.pattern)
    out, _ = project_pattern(state, pins)
    for modes, count in herald.totals:
        out, _ = project_total(out, modes, count, at_least=not herald.resolving)
    if herald.amplitude != 1.0:
        out = out * herald.amplitude
    return out, out.norm_squared()


def pin_losses(state: StateVector) -> StateVector:
    return run_heralded(state, HeraldRule())[0]


# -- detection ---------------------------------------------------------------

_S2 = 1 / math.sqrt(2)

# outcome vectors in (H, V) components
BASES: dict[str, tuple[tuple[str, np.ndarray], tuple[str, np.ndarray]]] = {
    "HV": (("H", np.array([1, 0])), ("V", np.array([0, 1]))),
    "DA": (("D", np.array([_S2, _S2])), ("A", np.array([_S2, -_S2]))),
    "RL": (("R", np.array([_S2, -1j * _S2])), ("L", np.array([_S2, 1j * _S2]))),
}


@dataclass(frozen=True)
class DetectorConfig:
    efficiency: float = 1.0
    basis: str = "DA"

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError(f"detector efficiency must lie in (0, 1], got {self.efficiency}")
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}; choose from {sorted(BASES)}")

    @property
    def outcomes(self) -> tuple[str, str]:
        return tuple(label for label, _ in BASES[self.basis])

    def rotation(self) -> np.ndarray:
        """Matrix U with U[o, p] = <o|p>; maps outcome o onto the H (o=0) or
        V (o=1) mode of the measured path."""
        return np.array([vec.conj() for _, vec in BASES[self.basis]], dtype=complex)


@dataclass(frozen=True)
class Branch:
    outcome_label: str
    state: StateVector
    conditional_correction: tuple[OpticalElement, ...] = ()
    amplitude_weight: complex = 1.0

    @property
    def probability(self) -> float:
        return self.state.norm_squared()


def measure_and_branch(
    state: StateVector,
    detector: DetectorConfig,
    path: str,
    corrections: Mapping[str, Sequence[OpticalElement]] | None = None,
) -> list[Branch]:
    """Polarization-resolving, photon-number-resolving detection of ``path``.

    One branch per outcome pattern.  The detected photons are removed from
    the residual state, each detected photon scales the branch probability
    by the detector efficiency, and the branch's correction elements are
    applied.  The branch weight is the amplitude factor from efficiency.
    """
    corrections = corrections or {}
    h, v = path_modes(path)
    counts = {occ[state.registry.index(h)] + occ[state.registry.index(v)] for occ, _ in state.items()}
    if len(counts) > 1:
        raise ValueError(f"path {path} carries an indefinite photon number {sorted(counts)}")
    n = counts.pop() if counts else 0
    rotated = apply_element(state, wave_plate(detector.rotation(), path, name=f"basis-{detector.basis}"))
    labels = detector.outcomes
    branches = []
    for k0 in range(n, -1, -1):
        k1 = n - k0
        label = labels[0] * k0 + labels[1] * k1
        kept, _ = project_pattern(rotated, {h: k0, v: k1})
        kept = remove_photons(kept, (h, v))
        weight = detector.efficiency ** (n / 2)
        if weight != 1.0:
            kept = kept * weight
        corr = tuple(corrections.get(label, ()))
        kept = apply_elements(kept, corr)
        branches.append(Branch(label, kept, corr, weight))
    return branches


# -- circuits ------------------------------------------------------------------


@dataclass(frozen=True)
class ElementStep:
    element: OpticalElement
    tag: str = ""


@dataclass(frozen=True)
class HeraldStep:
    rule: HeraldRule
    tag: str = ""


@dataclass(frozen=True)
class MapStep:
    """Diagonal heralded map on the Fock basis: term -> factor(occ) * term."""

    name: str
    factor: Callable[[tuple], complex] = field(compare=False)
    modes: tuple[Mode, ...] = ()
    params: tuple = ()
    tag: str = ""


@dataclass(frozen=True)
class MeasureStep:
    path: str
    detector: DetectorConfig = DetectorConfig()
    corrections: Mapping[str, tuple[OpticalElement, ...]] = field(default_factory=dict)
    tag: str = ""


@dataclass(frozen=True)
class CheckpointStep:
    tag: str


Step = ElementStep | HeraldStep | MapStep | MeasureStep | CheckpointStep


@dataclass
class Circuit:
    """A frozen mode registry plus an ordered list of steps."""

    registry: object
    steps: list = field(default_factory=list)
    name: str = ""

    def modes_used(self) -> set[Mode]:
        out: set[Mode] = set()
        for s in self.steps:
            if isinstance(s, ElementStep):
                out.update(s.element.modes)
            elif isinstance(s, HeraldStep):
                out.update(s.rule.modes())
            elif isinstance(s, MapStep):
                out.update(s.modes)
            elif isinstance(s, MeasureStep):
                out.update(path_modes(s.path))
                for corr in s.corrections.values():
                    for e in corr:
                        out.update(e.modes)
        return out

    def validate(self) -> None:
        for m in sorted(self.modes_used()):
            self.registry.index(m)

    def run(
        self,
        state: StateVector,
        trace: dict | None = None,
    ) -> list[Branch]:
        """Evolve ``state``; returns one branch per measurement-outcome path.

        Loss modes are pinned to zero at the end.  If ``trace`` is given it
        receives ``{(branch_label, tag): state}`` at every tagged step.
        """
        if state.registry != self.registry:
            raise ValueError("state and circuit use different registries")
        branches = [Branch("", state)]
        for step in self.steps:
            new = []
            for b in branches:
                new.extend(_run_step(b, step))
            branches = new
            if trace is not None and getattr(step, "tag", ""):
                for b in branches:
                    trace[(b.outcome_label, step.tag)] = b.state
        return [
            Branch(b.outcome_label, pin_losses(b.state), b.conditional_correction, b.amplitude_weight)
            for b in branches
        ]


def _run_step(branch: Branch, step) -> list[Branch]:
    s = branch.state
    if isinstance(step, ElementStep):
        return [Branch(branch.outcome_label, apply_element(s, step.element), branch.conditional_correction, branch.amplitude_weight)]
    if isinstance(step, HeraldStep):
        out, _ = run_heralded(s, step.rule)
        return [Branch(branch.outcome_label, out, branch.conditional_correction, branch.amplitude_weight)]
    if isinstance(step, MapStep):
        return [Branch(branch.outcome_label, s.map_amplitudes(step.factor), branch.conditional_correction, branch.amplitude_weight)]
    if isinstance(step, MeasureStep):
        out = []
        for sub in measure_and_branch(s, step.detector, step.path, step.corrections):
            label = branch.outcome_label + sub.outcome_label
            out.append(
                Branch(
                    label,
                    sub.state,
                    branch.conditional_correction + sub.conditional_correction,
                    branch.amplitude_weight * sub.amplitude_weight,
                )
            )
        return out
    if isinstance(step, CheckpointStep):
        return [branch]
    raise TypeError(f"unknown step {step!r}")
