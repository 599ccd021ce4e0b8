"""Sparse Fock-space state vectors over labelled bosonic modes.

A state is a map from occupation tuples to complex amplitudes.  Modes are
addressed by :class:`Mode` labels such as ``Mode("1", "H")`` or the
polarization-less loss mode ``Mode("loss.1H")``; a :class:`ModeRegistry`
fixes their order.  States may be sub-normalized: the missing norm is the
probability already spent on rejected herald outcomes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

DEFAULT_PRUNE = 1e-15
DEFAULT_TOL = 1e-9

POLARIZATIONS = ("H", "V")


class RegistryError(KeyError):
    """A mode label is unknown, duplicated, or two registries were mixed."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


@dataclass(frozen=True, order=True)
class Mode:
    spatial: str
    polarization: str | None = None

    def __post_init__(self):
        if self.polarization not in (None, *POLARIZATIONS):
            raise ValueError(f"unknown polarization {self.polarization!r}")

    def __str__(self) -> str:
        if self.polarization is None:
            return self.spatial
        return f"{self.spatial}:{self.polarization}"

    @classmethod
    def parse(cls, text: str) -> "Mode":
        """Parse ``"1:H"`` or ``"loss.1H"``."""
        spatial, sep, pol = text.partition(":")
        if not spatial:
            raise ValueError(f"empty mode label {text!r}")
        return cls(spatial, pol if sep else None)


def path_modes(spatial: str) -> tuple[Mode, Mode]:
    return Mode(spatial, "H"), Mode(spatial, "V")


class ModeRegistry:
    """Ordered, duplicate-free set of modes; index = insertion order."""

    def __init__(self, modes: Iterable[Mode] = ()):
        self._modes: list[Mode] = []
        self._index: dict[Mode, int] = {}
        for m in modes:
            self.add(m)
        self._frozen = False

    @classmethod
    def from_paths(cls, *paths: str) -> "ModeRegistry":
        return cls(m for p in paths for m in path_modes(p))

    def add(self, mode: Mode) -> int:
        if getattr(self, "_frozen", False):
            raise RegistryError("registry is frozen")
        if mode in self._index:
            raise RegistryError(f"duplicate mode {mode}")
        self._index[mode] = len(self._modes)
        self._modes.append(mode)
        return self._index[mode]

    def freeze(self) -> "ModeRegistry":
        self._frozen = True
        return self

    def index(self, mode: Mode) -> int:
        try:
            return self._index[mode]
        except KeyError:
            raise RegistryError(f"mode {mode} is not registered") from None

    def __contains__(self, mode: object) -> bool:
        return mode in self._index

    def __len__(self) -> int:
        return len(self._modes)

    def __iter__(self) -> Iterator[Mode]:
        return iter(self._modes)

    def __getitem__(self, i: int) -> Mode:
        return self._modes[i]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ModeRegistry) and self._modes == other._modes

    def __hash__(self) -> int:
        return hash(tuple(self._modes))

    def __repr__(self) -> str:
        return f"ModeRegistry([{', '.join(map(str, self._modes))}])"

    def has_path(self, spatial: str) -> bool:
        return all(m in self for m in path_modes(spatial))

    def loss_modes(self) -> list[Mode]:
        return [m for m in self._modes if m.spatial.startswith("loss.")]

    def union(self, other: "ModeRegistry") -> "ModeRegistry":
        shared = set(self._modes) & set(other._modes)
        if shared:
            raise RegistryError(f"registries overlap on {sorted(map(str, shared))}")
        return ModeRegistry([*self._modes, *other._modes])


FockState = tuple  # tuple[int, ...], one occupation per registered mode


class StateVector:
    """Immutable sparse superposition of Fock states.

    Amplitudes whose magnitude is at or below ``prune`` are dropped on
    construction.
    """

    __slots__ = ("registry", "_terms", "prune")

    def __init__(
        self,
        registry: ModeRegistry,
        terms: Mapping[tuple, complex] | None = None,
        prune: float = DEFAULT_PRUNE,
    ):
        if len(registry) == 0:
            raise RegistryError("registry has no modes")
        self.registry = registry
        self.prune = prune
        n = len(registry)
        clean: dict[tuple, complex] = {}
        for occ, amp in (terms or {}).items():
            if len(occ) != n:
                raise ValueError(f"occupation {occ} does not match {n} modes")
            if any(k < 0 for k in occ):
                raise ValueError(f"negative occupation in {occ}")
            if abs(amp) > prune:
                clean[tuple(occ)] = complex(amp)
        self._terms = clean

    # -- construction -----------------------------------------------------

    @classmethod
    def vacuum(cls, registry: ModeRegistry, prune: float = DEFAULT_PRUNE) -> "StateVector":
        return cls(registry, {(0,) * len(registry): 1.0}, prune)

    @classmethod
    def zero(cls, registry: ModeRegistry, prune: float = DEFAULT_PRUNE) -> "StateVector":
        return cls(registry, {}, prune)

    def _new(self, terms: Mapping[tuple, complex]) -> "StateVector":
        return StateVector(self.registry, terms, self.prune)

    # -- container protocol -------------------------------------------------

    @property
    def terms(self) -> dict[tuple, complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __getitem__(self, occ: Sequence[int]) -> complex:
        return self._terms.get(tuple(occ), 0j)

    def amplitude(self, occupations: Mapping[Mode, int]) -> complex:
        """Amplitude of the basis state with the given non-zero occupations."""
        occ = [0] * len(self.registry)
        for m, k in occupations.items():
            occ[self.registry.index(m)] = k
        return self[occ]

    def __repr__(self) -> str:
        return f"StateVector({self.ket()})"

    def ket(self, digits: int = 6) -> str:
        if not self._terms:
            return "0"
        parts = []
        for occ, amp in sorted(self._terms.items()):
            label = " ".join(
                f"{self.registry[i]}" + (f"^{k}" if k > 1 else "")
                for i, k in enumerate(occ)
                if k
            )
            parts.append(f"({amp.real:.{digits}g}{amp.imag:+.{digits}g}j)|{label or 'vac'}>")
        return " + ".join(parts)

    # -- linear structure --------------------------------------------------

    def _check(self, other: "StateVector") -> None:
        if self.registry != other.registry:
            raise RegistryError("states live on different registries")

    def __add__(self, other: "StateVector") -> "StateVector":
        self._check(other)
        out = dict(self._terms)
        for occ, amp in other._terms.items():
            out[occ] = out.get(occ, 0j) + amp
        return self._new(out)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "StateVector":
        return self._new({occ: scalar * amp for occ, amp in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "StateVector":
        return -1.0 * self

    def inner(self, other: "StateVector") -> complex:
        """<self|other>, conjugate-linear in ``self``."""
        self._check(other)
        small, big = (self._terms, other._terms)
        return sum(
            (amp.conjugate() * big[occ] for occ, amp in small.items() if occ in big),
            0j,
        )

    def norm_squared(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self._terms.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize the zero state")
        return self * (1.0 / n)

    def photon_numbers(self) -> set[int]:
        return {sum(occ) for occ in self._terms}

    def is_close(self, other: "StateVector", atol: float = 1e-12) -> bool:
        self._check(other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    # -- bosonic operators --------------------------------------------------

    def create(self, mode: Mode) -> "StateVector":
        """Apply the creation operator a^dagger of ``mode``."""
        i = self.registry.index(mode)
        out: dict[tuple, complex] = {}
        for occ, amp in self._terms.items():
            n = occ[i]
            new = occ[:i] + (n + 1,) + occ[i + 1 :]
            out[new] = out.get(new, 0j) + amp * math.sqrt(n + 1)
        return self._new(out)

    def annihilate(self, mode: Mode) -> "StateVector":
        i = self.registry.index(mode)
        out: dict[tuple, complex] = {}
        for occ, amp in self._terms.items():
            n = occ[i]
            if n == 0:
                continue
            new = occ[:i] + (n - 1,) + occ[i + 1 :]
            out[new] = out.get(new, 0j) + amp * math.sqrt(n)
        return self._new(out)

    def map_amplitudes(self, factor) -> "StateVector":
        """Multiply each term by ``factor(occupation)``; a diagonal map."""
        return self._new({occ: amp * factor(occ) for occ, amp in self._terms.items()})

    def with_prune(self, prune: float) -> "StateVector":
        return StateVector(self.registry, self._terms, prune)


def vacuum(registry: ModeRegistry, prune: float = DEFAULT_PRUNE) -> StateVector:
    return StateVector.vacuum(registry, prune)


def create_photon(state: StateVector, mode: Mode) -> StateVector:
    return state.create(mode)


def inner_product(a: StateVector, b: StateVector) -> complex:
    return a.inner(b)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product state over the concatenation of two disjoint registries."""
    reg = a.registry.union(b.registry)
    terms = {
        oa + ob: xa * xb for oa, xa in a.items() for ob, xb in b.items()
    }
    return StateVector(reg, terms, min(a.prune, b.prune))


def _pattern_indices(
    registry: ModeRegistry, pattern: Mapping[Mode, int]
) -> list[tuple[int, int]]:
    out = []
    for mode, count in pattern.items():
        if count < 0:
            raise ValueError(f"negative count for {mode}")
        out.append((registry.index(mode), count))
    return out


def project_pattern(
    state: StateVector, pattern: Mapping[Mode, int]
) -> tuple[StateVector, float]:
    """Keep the terms whose occupations equal ``pattern`` on its modes.

    Returns the unnormalized residual and its squared norm.  The pinned
    modes stay in the registry with their pinned counts.
    """
    idx = _pattern_indices(state.registry, pattern)
    kept = {
        occ: amp for occ, amp in state.items() if all(occ[i] == k for i, k in idx)
    }
    out = StateVector(state.registry, kept, state.prune)
    return out, out.norm_squared()


def project_total(
    state: StateVector, modes: Iterable[Mode], count: int, at_least: bool = False
) -> tuple[StateVector, float]:
    """Keep terms whose summed occupation over ``modes`` equals ``count``.

    With ``at_least`` the test is ``>= count`` (threshold detection).
    """
    idx = [state.registry.index(m) for m in modes]
    if at_least:
        keep = lambda occ: sum(occ[i] for i in idx) >= count  # noqa: E731
    else:
        keep = lambda occ: sum(occ[i] for i in idx) == count  # noqa: E731
    out = StateVector(state.registry, {o: a for o, a in state.items() if keep(o)}, state.prune)
    return out, out.norm_squared()


def remove_photons(state: StateVector, modes: Iterable[Mode]) -> StateVector:
    """Empty ``modes`` in every term once the photons there were absorbed by
    a detector.  Only meaningful after projecting onto a definite count
    pattern on ``modes``; otherwise orthogonal outcomes would be summed."""
    idx = [state.registry.index(m) for m in modes]
    out: dict[tuple, complex] = {}
    for occ, amp in state.items():
        new = list(occ)
        for i in idx:
            new[i] = 0
        key = tuple(new)
        out[key] = out.get(key, 0j) + amp
    return StateVector(state.registry, out, state.prune)
