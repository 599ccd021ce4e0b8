"""The three router pipelines and the quantities read off their outputs.

Output conventions
------------------
After a run every accepted detection branch holds the signal photon(s) in
output path ``1`` (port 1) or ``2`` (port 2).  For each port the complex
amplitude ``A_k`` is the overlap of the port's polarization state with the
input signal state, so ``|A_k|^2`` is the port probability when the
polarization survived intact.

Detection outcomes are enumerated, never averaged.  The reported ``A_k``
are those of the reference (first) outcome scaled by the square root of the
number of outcomes: the accounting used when every outcome is accepted and
corrected to the reference form.  ``p_heralded`` is the plain sum of branch
probabilities and ``branch_fidelity`` tells whether the corrected branches
really coincide; when they do, ``p_heralded == p_succ``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .circuit import Branch, Circuit
from .circuitfmt import CircuitDoc, build_circuit, load_bundled, parse_circuit
from .fock import DEFAULT_PRUNE, Mode, StateVector, vacuum

NORM_TOL = 1e-12
# ports whose amplitude is below this (relative) carry no signal
EMPTY_PORT = 1e-12


@dataclass(frozen=True)
class SignalQubit:
    alpha: complex
    beta: complex

    def __post_init__(self):
        n = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(n - 1.0) > NORM_TOL:
            raise ValueError(f"|alpha|^2 + |beta|^2 must be 1, got {n}")

    @classmethod
    def from_angles(cls, polar: float, azimuth: float) -> "SignalQubit":
        """Bloch-sphere point: cos(polar/2)|H> + e^{i azimuth} sin(polar/2)|V>."""
        return cls(math.cos(polar / 2), cmath.exp(1j * azimuth) * math.sin(polar / 2))

    @classmethod
    def random(cls, rng) -> "SignalQubit":
        """Uniform on the Bloch sphere; ``rng`` is a numpy Generator."""
        cos_polar = rng.uniform(-1.0, 1.0)
        azimuth = rng.uniform(0.0, 2 * math.pi)
        return cls.from_angles(math.acos(cos_polar), azimuth)

    def vector(self) -> tuple[complex, complex]:
        return complex(self.alpha), complex(self.beta)


@dataclass(frozen=True)
class ControlQubit:
    theta: float
    vartheta: float = 0.0

    def __post_init__(self):
        if not -1e-15 <= self.theta <= math.pi / 2 + 1e-15:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")
        if not 0.0 <= self.vartheta < 2 * math.pi:
            raise ValueError(f"vartheta must lie in [0, 2pi), got {self.vartheta}")

    def amplitudes(self) -> tuple[complex, complex]:
        return math.cos(self.theta), cmath.exp(1j * self.vartheta) * math.sin(self.theta)


@dataclass(frozen=True)
class RouterResult:
    a1: complex
    a2: complex
    chi: float
    p_succ: float
    fidelity_out1: float | None
    fidelity_out2: float | None
    p_heralded: float
    branch_fidelity: float
    branches: tuple[Branch, ...] = field(default=(), repr=False, compare=False)
    trace: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def tan_chi(self) -> float:
        return math.inf if self.a1 == 0 else abs(self.a2) / abs(self.a1)

    @property
    def relative_phase(self) -> float | None:
        """arg(A2 / A1), or None when either port is empty."""
        if self.fidelity_out1 is None or self.fidelity_out2 is None:
            return None
        return cmath.phase(self.a2 / self.a1)


def routing_ratio(a1: complex, a2: complex) -> float:
    """chi in [0, pi/2] with tan(chi) = |A2|/|A1|; pi/2 when A1 = 0."""
    return math.atan2(abs(a2), abs(a1))


# -- state preparation and read-out -----------------------------------------------


def prepare_input(
    registry,
    signals: Sequence[tuple[SignalQubit, str]],
    control: ControlQubit,
    control_path: str,
    prune: float = DEFAULT_PRUNE,
) -> StateVector:
    state = vacuum(registry, prune)
    for sig, path in signals:
        a, b = sig.vector()
        state = a * state.create(Mode(path, "H")) + b * state.create(Mode(path, "V"))
    c, s = control.amplitudes()
    return c * state.create(Mode(control_path, "H")) + s * state.create(Mode(control_path, "V"))


def port_overlap(
    state: StateVector, signals: Sequence[SignalQubit], paths: Sequence[str]
) -> tuple[complex, float]:
    """(overlap with the product of input polarizations, sector norm^2).

    The sector is every term where signal ``k`` sits in ``paths[k]`` and no
    other photon is present.
    """
    overlap = 0j
    norm2 = 0.0
    for pols in itertools.product("HV", repeat=len(paths)):
        occ: dict[Mode, int] = {}
        ref = 1.0 + 0j
        for sig, path, pol in zip(signals, paths, pols):
            m = Mode(path, pol)
            occ[m] = occ.get(m, 0) + 1
            ref *= sig.alpha if pol == "H" else sig.beta
        amp = state.amplitude(occ)
        overlap += ref.conjugate() * amp
        norm2 += abs(amp) ** 2
    return overlap, norm2


def output_fidelity(
    state: StateVector,
    signal: SignalQubit | Sequence[SignalQubit],
    port_paths: Sequence[Sequence[str]] = (("1",), ("2",)),
) -> tuple[float | None, float | None]:
    """Squared overlap of each port's normalized polarization state with the
    input signal(s); ``None`` for a port without amplitude."""
    signals = [signal] if isinstance(signal, SignalQubit) else list(signal)
    total = state.norm()
    out = []
    for paths in port_paths:
        ov, n2 = port_overlap(state, signals, paths)
        if n2 <= (EMPTY_PORT * max(total, 1e-300)) ** 2 or n2 == 0.0:
            out.append(None)
        else:
            out.append(min(1.0, abs(ov) ** 2 / n2))
    return out[0], out[1]


def state_fidelity(a: StateVector, b: StateVector) -> float:
    na, nb = a.norm_squared(), b.norm_squared()
    if na == 0.0 or nb == 0.0:
        return 0.0 if na != nb else 1.0
    return abs(a.inner(b)) ** 2 / (na * nb)


def summarize(
    branches: Sequence[Branch],
    signals: Sequence[SignalQubit],
    port_paths: Sequence[Sequence[str]],
    trace: dict | None = None,
) -> RouterResult:
    ref = branches[0]
    ov1, _ = port_overlap(ref.state, signals, port_paths[0])
    ov2, _ = port_overlap(ref.state, signals, port_paths[1])
    scale = math.sqrt(len(branches))
    a1, a2 = ov1 * scale, ov2 * scale
    fids = [output_fidelity(b.state, signals, port_paths) for b in branches]

    def worst(k):
        vals = [f[k] for f in fids if f[k] is not None]
        return min(vals) if vals else None

    return RouterResult(
        a1=a1,
        a2=a2,
        chi=routing_ratio(a1, a2),
        p_succ=abs(a1) ** 2 + abs(a2) ** 2,
        fidelity_out1=worst(0),
        fidelity_out2=worst(1),
        p_heralded=math.fsum(b.probability for b in branches),
        branch_fidelity=min(state_fidelity(ref.state, b.state) for b in branches),
        branches=tuple(branches),
        trace=trace or {},
    )


# -- pipelines ---------------------------------------------------------------------


@lru_cache(maxsize=None)
def _bundled(name: str) -> CircuitDoc:
    return load_bundled(name)


def run_document(
    doc: CircuitDoc,
    signals: Sequence[SignalQubit],
    control: ControlQubit,
    values: dict | None = None,
    port_paths: Sequence[Sequence[str]] = (("1",), ("2",)),
    prune: float = DEFAULT_PRUNE,
    keep_trace: bool = False,
) -> RouterResult:
    circuit = build_circuit(doc, values)
    if len(doc.signals) != len(signals):
        raise ValueError(f"circuit expects {len(doc.signals)} signal(s), got {len(signals)}")
    state = prepare_input(circuit.registry, list(zip(signals, doc.signals)), control, doc.control, prune)
    trace = {} if keep_trace else None
    branches = circuit.run(state, trace)
    return summarize(branches, list(signals), port_paths, trace)


def route_fixed(
    signal: SignalQubit,
    control: ControlQubit,
    equalize: bool = False,
    eta: float = 1.0,
    prune: float = DEFAULT_PRUNE,
    keep_trace: bool = False,
) -> RouterResult:
    """Single fixed controlled-sign gate router.

    Expected: ``|A1| = cos(theta)/(2 sqrt 2)``, ``|A2| = sin(theta)/(2 sqrt 6)``
    and ``P = (1 + 2 cos^2 theta)/24``; with ``equalize`` an extra T = 1/3
    filter on port 1 fixes ``P = 1/24``.
    """
    return run_document(
        _bundled("fixed_router"),
        [signal],
        control,
        {"equalize": float(equalize), "eta": eta},
        prune=prune,
        keep_trace=keep_trace,
    )


def route_tunable(
    signal: SignalQubit,
    control: ControlQubit,
    phi: float,
    eta: float = 1.0,
    prune: float = DEFAULT_PRUNE,
    keep_trace: bool = False,
) -> RouterResult:
    """Router built from two tunable c-phase gates with phase ``phi``."""
    if not 0.0 <= phi <= math.pi:
        raise ValueError(f"phi must lie in [0, pi], got {phi}")
    return run_document(
        _bundled("tunable_router"),
        [signal],
        control,
        {"phi": phi, "eta": eta},
        prune=prune,
        keep_trace=keep_trace,
    )


def route_uniform(
    signal: SignalQubit,
    control: ControlQubit,
    phi: float,
    eta: float = 1.0,
    prune: float = DEFAULT_PRUNE,
) -> RouterResult:
    """Two-gate router with state-independent gates (every component x A_C)."""
    if not 0.0 <= phi <= math.pi:
        raise ValueError(f"phi must lie in [0, pi], got {phi}")
    return run_document(_bundled("uniform_router"), [signal], control, {"phi": phi, "eta": eta}, prune=prune)


def multi_router_text(n: int, phi_deg: float = 180.0) -> str:
    """Circuit document routing ``n`` signals with one control photon.

    Per signal: split, rebalance, two tunable gates each followed by a
    presence check, Hadamards, recombination and the port-2 swap.  Between
    signals one more presence check precedes the return of the control.
    The control is analysed once at the end.
    """
    if n < 1:
        raise ValueError("need at least one signal")
    modes = []
    for k in range(1, n + 1):
        for p in (f"1_{k}", f"2_{k}"):
            modes += [f"{p}:H", f"{p}:V"]
    lines = [
        "qrouter-circuit 1",
        f"name multi-router-{n}",
        "modes " + " ".join(modes + ["c:H", "c:V"]),
        *(f"signal 1_{k}" for k in range(1, n + 1)),
        "control c",
        f"param phi {phi_deg:g}deg",
        "param eta 1",
    ]
    for k in range(1, n + 1):
        p1, p2 = f"1_{k}", f"2_{k}"
        lines += [
            f"pbs {p1} {p2}",
            f"rebalance {p1} H $phi",
            f"rebalance {p2} V $phi",
            f"cphase {p1} c $phi",
            "qnd c",
            f"cphase {p2} c $phi",
            "qnd c",
            f"hwp {p1} 22.5deg",
            f"hwp {p2} 22.5deg",
            f"pbs {p1} {p2}",
            f"hwp {p2} 45deg @pass{k}",
        ]
        if k < n:
            lines.append("qnd c")
    lines += [
        "measure c DA eta=$eta @detect",
        "correct A phase 2_1:H 180deg",
        "correct A phase 2_1:V 180deg",
    ]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MultiResult:
    n: int
    p_total: float
    a1: complex
    a2: complex
    fidelity_out1: float | None
    fidelity_out2: float | None
    p_heralded: float
    branch_fidelity: float
    branches: tuple[Branch, ...] = field(default=(), repr=False, compare=False)


def route_multi(
    signals: Sequence[SignalQubit],
    control: ControlQubit,
    phi: float = math.pi,
    eta: float = 1.0,
    prune: float = DEFAULT_PRUNE,
) -> MultiResult:
    """Route a chain of signals with one control photon.

    ``a1``/``a2`` are the overlaps of the all-port-1 and all-port-2 sectors
    with the product of the input polarizations.
    """
    n = len(signals)
    if n == 0:
        raise ValueError("need at least one signal")
    doc = _multi_doc(n)
    ports = ([f"1_{k}" for k in range(1, n + 1)], [f"2_{k}" for k in range(1, n + 1)])
    r = run_document(doc, signals, control, {"phi": phi, "eta": eta}, ports, prune)
    return MultiResult(
        n, r.p_succ, r.a1, r.a2, r.fidelity_out1, r.fidelity_out2, r.p_heralded, r.branch_fidelity, r.branches
    )


@lru_cache(maxsize=None)
def _multi_doc(n: int) -> CircuitDoc:
    return parse_circuit(multi_router_text(n))
