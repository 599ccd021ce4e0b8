"""Gate-level building blocks of the routers.

* :func:`cphase_pi` -- controlled-sign gate from one polarization-dependent
  splitter (T_H = 1, T_V = 1/3), post-selected on one photon per path.
* :func:`cphase_tunable` -- heralded conditional-amplitude map whose
  photon-entering components are damped by ``sqrt(A_C)`` each and whose
  doubly-occupied component picks up ``exp(i*phi)``.
* :func:`qnd_herald` -- black-box presence check with success probability 1/2.
* :func:`ppg` -- the programmable-phase gate realized as a single PBS plus a
  one-photon herald on the control path.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .circuit import ElementStep, HeraldRule, HeraldStep, MapStep
from .elements import ndf, pbs, pdbs
from .fock import Mode, path_modes

CSIGN_T_V = 1.0 / 3.0
QND_AMPLITUDE = 1.0 / math.sqrt(2.0)


def p_c(phi: float) -> float:
    """Optimal linear-optics success probability of a c-phase gate with
    phase ``phi`` in [0, pi] (vacuum ancillae)."""
    if not 0.0 <= phi <= math.pi:
        raise ValueError(f"phase must lie in [0, pi], got {phi}")
    s = abs(math.sin(phi / 2))
    return (1.0 + 2.0 * s + 2.0**1.5 * math.sin((math.pi - phi) / 4) * math.sqrt(s)) ** -2


@dataclass(frozen=True)
class TunableGateParams:
    phi: float
    a_c: float

    def __post_init__(self):
        if not 0.0 <= self.phi <= math.pi:
            raise ValueError(f"phase must lie in [0, pi], got {self.phi}")
        if not 0.0 < self.a_c <= 1.0:
            raise ValueError(f"A_C must lie in (0, 1], got {self.a_c}")
        if abs(self.a_c**2 - p_c(self.phi)) > 1e-12:
            raise ValueError("A_C^2 must equal p_c(phi)")

    @classmethod
    def from_phase(cls, phi: float) -> "TunableGateParams":
        return cls(phi, math.sqrt(p_c(phi)))


def cphase_pi(path_signal: str, path_control: str, balanced: bool = False) -> list:
    """Controlled-sign gate on two polarization-qubit paths.

    Without a herald of its own: the caller post-selects one photon per
    path.  The heralded action on (HH, HV, VH, VV) is
    ``diag(1, 1/sqrt3, 1/sqrt3, -1/3)``.  ``balanced`` adds the usual H
    attenuators (T = 1/3) so the map becomes ``diag(1, 1, 1, -1) / 3``.
    """
    steps = [ElementStep(pdbs(1.0, CSIGN_T_V, path_signal, path_control))]
    if balanced:
        steps.append(ElementStep(ndf(CSIGN_T_V, [Mode(path_signal, "H"), Mode(path_control, "H")])))
    return steps


def one_per_path(*paths: str) -> HeraldRule:
    return HeraldRule(totals=tuple((path_modes(p), 1) for p in paths), label="one-per-path")


def tunable_factor(params: TunableGateParams, path_signal: str, path_control: str):
    """Occupation -> amplitude factor for :func:`cphase_tunable`.

    Needs the registry indices, so returns a builder taking the registry.
    """
    root = math.sqrt(params.a_c)
    phase = cmath.exp(1j * params.phi)
    sv, cv = Mode(path_signal, "V"), Mode(path_control, "V")

    def bind(registry):
        i, j = registry.index(sv), registry.index(cv)

        def factor(occ):
            ns, nc = occ[i], occ[j]
            f = root ** (ns + nc)
            if ns and nc:
                f = f * phase ** (ns * nc)
            return f

        return factor

    return bind


def cphase_tunable(params: TunableGateParams, path_signal: str, path_control: str, registry) -> MapStep:
    """Heralded tunable c-phase acting on the signal and control paths.

    Every V photon entering the interaction interferometer contributes
    ``sqrt(A_C)``; when both enter the term also gets ``exp(i*phi)``.
    Photons in other paths pass untouched, which covers the rows for the
    other signal arm.  Diagonal with all factors <= 1, hence a contraction.
    """
    factor = tunable_factor(params, path_signal, path_control)(registry)
    return MapStep(
        "cphase",
        factor,
        (Mode(path_signal, "V"), Mode(path_control, "V")),
        (params.phi, path_signal, path_control),
    )


def cphase_uniform(params: TunableGateParams, path_signal: str, path_control: str, registry) -> MapStep:
    """State-independent variant: every component scaled by ``A_C``."""
    sv, cv = Mode(path_signal, "V"), Mode(path_control, "V")
    i, j = registry.index(sv), registry.index(cv)
    phase = cmath.exp(1j * params.phi)

    def factor(occ):
        f = params.a_c
        if occ[i] and occ[j]:
            f = f * phase
        return f

    return MapStep("cphase-uniform", factor, (sv, cv), (params.phi, path_signal, path_control))


def qnd_herald(path: str) -> HeraldStep:
    """Presence check: exactly one photon in ``path``, amplitude x 1/sqrt(2)."""
    return HeraldStep(
        HeraldRule(totals=((path_modes(path), 1),), label=f"qnd:{path}", amplitude=QND_AMPLITUDE)
    )


def ppg(path_control: str, path_partner: str) -> list:
    """PBS between the control path and ``path_partner`` plus a one-photon
    herald on the control path.  With the partner path empty this projects
    the control onto H."""
    return [
        ElementStep(pbs(path_partner, path_control)),
        HeraldStep(HeraldRule(totals=((path_modes(path_control), 1),), label=f"ppg:{path_control}")),
    ]
