"""Closed-form router formulas and the sweep tables behind the figures.

Two kinds of formulas live here.  Reference forms are reproduced verbatim
(``p_min_tunable``, ``theta_at_pmax``, ``p_total_multi``).  Where the
amplitude algebra of the tunable or multi-signal router leads somewhere
else, the re-derived form sits next to it with a ``_derived`` suffix, so
reports can show both.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .gates import p_c
from .router import (
    ControlQubit,
    SignalQubit,
    route_fixed,
    route_multi,
    route_tunable,
    route_uniform,
)

HALF_PI = math.pi / 2


def _check_theta(theta: float) -> None:
    if not -1e-15 <= theta <= HALF_PI + 1e-15:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta}")


def _check_phi(phi: float) -> None:
    if not 0.0 <= phi <= math.pi:
        raise ValueError(f"phi must lie in [0, pi], got {phi}")


def a_c(phi: float) -> float:
    return math.sqrt(p_c(phi))


# -- fixed router --------------------------------------------------------------------


def p_succ_fixed(theta: float) -> float:
    _check_theta(theta)
    return (1.0 + 2.0 * math.cos(theta) ** 2) / 24.0


def chi_of_theta(theta: float) -> float:
    """Routing ratio of the fixed router: tan(chi) = tan(theta)/sqrt(3)."""
    _check_theta(theta)
    return math.atan2(math.sin(theta), math.sqrt(3.0) * math.cos(theta))


def theta_of_chi(chi: float) -> float:
    if not 0.0 <= chi <= HALF_PI:
        raise ValueError(f"chi must lie in [0, pi/2], got {chi}")
    return math.atan2(math.sqrt(3.0) * math.sin(chi), math.cos(chi))


def p_succ_of_chi(chi: float) -> float:
    """Fixed-router success probability as a function of the routing ratio,
    written as (cos^2 + sin^2) / (8 cos^2 + 24 sin^2) to stay finite at pi/2."""
    c2, s2 = math.cos(chi) ** 2, math.sin(chi) ** 2
    return (c2 + s2) / (8.0 * c2 + 24.0 * s2)


# -- tunable router ------------------------------------------------------------------


def chi_limit(phi: float) -> float:
    """atan((1 - cos phi) / sin phi), continued to pi/2 at phi = pi."""
    _check_phi(phi)
    return math.atan2(1.0 - math.cos(phi), math.sin(phi))


def tunable_amplitudes(theta: float, phi: float, vartheta: float = 0.0) -> tuple[complex, complex]:
    """Coefficients of the matching (H1 or V2) and swapped (V1 or H2)
    components just before the second PBS, per unit signal amplitude."""
    _check_theta(theta)
    _check_phi(phi)
    a = a_c(phi)
    pre = 1.0 / (2.0 * math.sqrt(2.0 + 2.0 * a))
    e_v, e_p = cmath.exp(1j * vartheta), cmath.exp(1j * phi)
    s, c = math.sin(theta), math.cos(theta)
    keep = pre * math.sqrt(a) * (2.0 * c + a * e_v * s * (1.0 + e_p))
    swap = pre * e_v * s * a**1.5 * (1.0 - e_p)
    return keep, swap


def tan_chi_tunable(theta: float, phi: float, vartheta: float = 0.0) -> float:
    keep, swap = tunable_amplitudes(theta, phi, vartheta)
    return math.inf if keep == 0 else abs(swap) / abs(keep)


def chi_tunable(theta: float, phi: float, vartheta: float = 0.0) -> float:
    keep, swap = tunable_amplitudes(theta, phi, vartheta)
    return math.atan2(abs(swap), abs(keep))


def p_succ_tunable(theta: float, phi: float, vartheta: float = 0.0) -> float:
    """Squared norm of the pre-PBS state summed over both arms."""
    keep, swap = tunable_amplitudes(theta, phi, vartheta)
    return abs(keep) ** 2 + abs(swap) ** 2


def p_min_tunable(phi: float) -> float:
    """Reference minimum over theta: A_C^(4/3) / (2 + 2 A_C)."""
    a = a_c(phi)
    return a ** (4.0 / 3.0) / (2.0 + 2.0 * a)


def p_min_tunable_derived(phi: float) -> float:
    """Value at theta = pi/2 from the amplitude algebra: A_C^3 / (2 + 2 A_C)."""
    a = a_c(phi)
    return a**3 / (2.0 + 2.0 * a)


def theta_at_pmax(phi: float) -> float:
    """Reference optimum: (1/2) atan[A_C (1 - cos phi) / (1 - A_C^2)]."""
    a = a_c(phi)
    return 0.5 * math.atan2(a * (1.0 - math.cos(phi)), 1.0 - a * a)


def theta_at_pmax_derived(phi: float) -> float:
    """Stationary point of p_succ_tunable at vartheta = 0.

    P is proportional to cos^2 + A (1 + cos phi) sin cos + A^2 sin^2, whose
    maximum sits at tan(2 theta) = A (1 + cos phi) / (1 - A^2).
    """
    a = a_c(phi)
    return 0.5 * math.atan2(a * (1.0 + math.cos(phi)), 1.0 - a * a)


def p_max_tunable(phi: float) -> float:
    return p_succ_tunable(theta_at_pmax_derived(phi), phi)


def p_succ_uniform(theta: float, phi: float) -> float:
    """Same router with state-independent gates (A_C on every component)."""
    _check_theta(theta)
    pc = p_c(phi)
    return pc * pc / 4.0 * (1.0 + (1.0 + math.cos(phi)) * math.sin(theta) * math.cos(theta))


def p_min_uniform(phi: float) -> float:
    return p_c(phi) ** 2 / 4.0


# -- multi-signal router -------------------------------------------------------------


def p_total_multi(n: int, theta: float) -> float:
    """Reference form 2^(1-4n) (1 - 8/9 sin^2 theta)^n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    _check_theta(theta)
    return 2.0 ** (1 - 4 * n) * (1.0 - 8.0 / 9.0 * math.sin(theta) ** 2) ** n


def p_total_multi_derived(n: int, theta: float) -> float:
    """Norm of cos(theta) prod OUT1 + sin(theta) 3^-n prod OUT2, times 2^(1-4n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    _check_theta(theta)
    return 2.0 ** (1 - 4 * n) * (math.cos(theta) ** 2 + 9.0**-n * math.sin(theta) ** 2)


# -- sweeps --------------------------------------------------------------------------

COLUMNS = (
    "series",
    "theta",
    "vartheta",
    "phi",
    "chi_L",
    "n",
    "abs_A1",
    "abs_A2",
    "arg_A2_A1",
    "chi",
    "P_sim",
    "P_analytic",
    "fidelity_out1",
    "fidelity_out2",
)

_DOMAINS = {"theta": (0.0, HALF_PI), "phi": (0.0, math.pi), "chi_L": (0.0, HALF_PI), "n": (1, 64)}


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    lo: float
    hi: float
    points: int
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.parameter not in _DOMAINS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}; choose from {sorted(_DOMAINS)}")
        if self.points < 2:
            raise ValueError("a sweep needs at least 2 points")
        if not self.lo < self.hi:
            raise ValueError("sweep range must satisfy lo < hi")
        dlo, dhi = _DOMAINS[self.parameter]
        if self.lo < dlo - 1e-12 or self.hi > dhi + 1e-12:
            raise ValueError(f"{self.parameter} range [{self.lo}, {self.hi}] leaves [{dlo}, {dhi}]")

    def values(self) -> list:
        if self.parameter == "n":
            return list(range(int(self.lo), int(self.hi) + 1))
        # endpoints exactly, interior from linspace
        v = np.linspace(self.lo, self.hi, self.points).tolist()
        v[0], v[-1] = float(self.lo), float(self.hi)
        return v


def result_row(series: str, result, **params) -> dict:
    row = dict.fromkeys(COLUMNS)
    row.update(params)
    row["series"] = series
    if result is not None:
        row["abs_A1"] = abs(result.a1)
        row["abs_A2"] = abs(result.a2)
        phase = getattr(result, "relative_phase", None)
        row["arg_A2_A1"] = phase
        row["chi"] = math.atan2(abs(result.a2), abs(result.a1))
        row["P_sim"] = result.p_succ if hasattr(result, "p_succ") else result.p_total
        row["fidelity_out1"] = result.fidelity_out1
        row["fidelity_out2"] = result.fidelity_out2
    return row


DEFAULT_SIGNAL = SignalQubit(math.sqrt(0.5), 1j * math.sqrt(0.5))


def _fig3_rows(spec: SweepSpec, signal: SignalQubit) -> Iterator[dict]:
    vartheta = spec.fixed.get("vartheta", 0.0)
    for theta in spec.values():
        r = route_fixed(signal, ControlQubit(theta, vartheta))
        yield result_row("fixed", r, theta=theta, vartheta=vartheta, phi=math.pi, P_analytic=p_succ_fixed(theta))


def _fig5_rows(spec: SweepSpec, signal: SignalQubit) -> Iterator[dict]:
    for chi_l in spec.values():
        phi = min(2.0 * chi_l, math.pi)
        common = dict(vartheta=0.0, phi=phi, chi_L=chi_l)
        t_max = theta_at_pmax_derived(phi)
        yield result_row(
            "tunable_max", route_tunable(signal, ControlQubit(t_max), phi), theta=t_max,
            P_analytic=p_max_tunable(phi), **common,
        )
        yield result_row(
            "tunable_min", route_tunable(signal, ControlQubit(HALF_PI), phi), theta=HALF_PI,
            P_analytic=p_min_tunable_derived(phi), **common,
        )
        yield result_row(
            "uniform_min", route_uniform(signal, ControlQubit(0.0), phi), theta=0.0,
            P_analytic=p_min_uniform(phi), **common,
        )
        yield result_row("fixed_max", None, theta=0.0, P_analytic=1.0 / 8.0, **common)
        yield result_row("fixed_min", None, theta=HALF_PI, P_analytic=1.0 / 24.0, **common)


def _theta_rows(spec: SweepSpec, signal: SignalQubit) -> Iterator[dict]:
    phi = spec.fixed.get("phi", math.pi)
    vartheta = spec.fixed.get("vartheta", 0.0)
    for theta in spec.values():
        r = route_tunable(signal, ControlQubit(theta, vartheta), phi)
        yield result_row(
            "tunable", r, theta=theta, vartheta=vartheta, phi=phi, chi_L=chi_limit(phi),
            P_analytic=p_succ_tunable(theta, phi, vartheta),
        )


def _phi_rows(spec: SweepSpec, signal: SignalQubit) -> Iterator[dict]:
    theta = spec.fixed.get("theta", HALF_PI)
    for phi in spec.values():
        r = route_tunable(signal, ControlQubit(theta), phi)
        yield result_row(
            "tunable", r, theta=theta, vartheta=0.0, phi=phi, chi_L=chi_limit(phi),
            P_analytic=p_succ_tunable(theta, phi),
        )


def _n_rows(spec: SweepSpec, signal: SignalQubit) -> Iterator[dict]:
    theta = spec.fixed.get("theta", 0.0)
    for n in spec.values():
        r = route_multi([signal] * n, ControlQubit(theta))
        yield result_row("multi", r, theta=theta, vartheta=0.0, phi=math.pi, n=n, P_analytic=p_total_multi(n, theta))


_SWEEPS: dict[tuple[str, str], Callable] = {
    ("fig3", "theta"): _fig3_rows,
    ("fig5", "chi_L"): _fig5_rows,
    ("tunable", "theta"): _theta_rows,
    ("tunable", "phi"): _phi_rows,
    ("multi", "n"): _n_rows,
}


def sweep(spec: SweepSpec, kind: str | None = None, signal: SignalQubit = DEFAULT_SIGNAL) -> list[dict]:
    """Rows with the :data:`COLUMNS` keys; absent quantities are ``None``.

    ``kind`` picks the workload; by default it follows the parameter
    (theta -> fig3, chi_L -> fig5, phi -> tunable, n -> multi).
    """
    default = {"theta": "fig3", "chi_L": "fig5", "phi": "tunable", "n": "multi"}
    key = (kind or default[spec.parameter], spec.parameter)
    if key not in _SWEEPS:
        raise ValueError(f"no {key[0]!r} sweep over {spec.parameter!r}")
    return list(_SWEEPS[key](spec, signal))


def figure_spec(figure: int, points: int) -> SweepSpec:
    if figure == 3:
        return SweepSpec("theta", 0.0, HALF_PI, points)
    if figure == 5:
        return SweepSpec("chi_L", 0.0, HALF_PI, points)
    raise ValueError(f"no sweep for figure {figure}; choose 3 or 5")
