"""Line-oriented text format for router circuits.

Example::

    qrouter-circuit 1
    name demo
    modes 1:H 1:V 2:H 2:V c:H c:V
    signal 1
    control c
    param phi 180deg
    pbs 1 2
    hwp 1 -30deg
    cphase 1 c $phi @gate
    qnd c
    measure c DA
    correct A hwp 2 0deg
    ndf 1 1/3 if equalize

Every line is ``keyword arg ... [@tag] [if flag]``; ``#`` starts a comment.
``correct <outcome> <element ...>`` attaches a feed-forward element to the
preceding ``measure``.  Numbers accept fractions (``1/3``) and the angle
units ``deg``/``rad``; ``$name`` refers to a ``param``.  Loss modes of
filters are added to the registry automatically.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

from . import elements as el
from . import gates
from .circuit import (
    CheckpointStep,
    Circuit,
    DetectorConfig,
    ElementStep,
    HeraldRule,
    HeraldStep,
    MeasureStep,
)
from .fock import Mode, ModeRegistry, RegistryError, path_modes

FORMAT_HEADER = "qrouter-circuit"
FORMAT_VERSION = 1


class CircuitFormatError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message, self.line, self.column = message, line, column
        loc = f"line {line}, column {column}: " if line else ""
        super().__init__(loc + message)


@dataclass(frozen=True)
class Op:
    keyword: str
    args: tuple[str, ...] = ()
    tag: str = ""
    condition: str = ""
    corrections: tuple[tuple[str, str, tuple[str, ...]], ...] = ()
    line: int = field(default=0, compare=False)
    columns: tuple[int, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class CircuitDoc:
    name: str
    modes: tuple[str, ...]
    signals: tuple[str, ...]
    control: str
    params: tuple[tuple[str, str], ...] = ()
    ops: tuple[Op, ...] = ()
    version: int = FORMAT_VERSION


ELEMENT_KEYWORDS = {
    "pbs", "pdbs", "hwp", "qwp", "phase", "ndf", "rebalance",
}
STEP_KEYWORDS = ELEMENT_KEYWORDS | {
    "cphase-pi", "cphase", "cphase-uniform", "qnd", "ppg", "herald", "measure", "checkpoint",
}
HEADER_KEYWORDS = {"name", "modes", "signal", "control", "param"}


def _tokens(line: str) -> list[tuple[str, int]]:
    body = line.split("#", 1)[0]
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", body)]


def parse_circuit(text: str) -> CircuitDoc:
    lines = text.splitlines()
    header_seen = False
    name, modes, signals, control = "", [], [], ""
    params: list[tuple[str, str]] = []
    ops: list[Op] = []
    for lineno, raw in enumerate(lines, start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        word, col = toks[0]
        if not header_seen:
            if word != FORMAT_HEADER:
                raise CircuitFormatError(f"expected '{FORMAT_HEADER} <version>' header", lineno, col)
            if len(toks) != 2 or toks[1][0] != str(FORMAT_VERSION):
                c = toks[1][1] if len(toks) > 1 else col
                raise CircuitFormatError(f"unsupported format version (expected {FORMAT_VERSION})", lineno, c)
            header_seen = True
            continue
        rest = toks[1:]
        if word == "name":
            name = " ".join(t for t, _ in rest)
        elif word == "modes":
            for t, c in rest:
                _check_mode_syntax(t, lineno, c)
                modes.append(t)
        elif word == "signal":
            _expect(rest, 1, word, lineno, col)
            signals.append(rest[0][0])
        elif word == "control":
            _expect(rest, 1, word, lineno, col)
            control = rest[0][0]
        elif word == "param":
            _expect(rest, 2, word, lineno, col)
            _parse_number(rest[1][0], {}, lineno, rest[1][1])
            params.append((rest[0][0], rest[1][0]))
        elif word == "correct":
            if not ops or ops[-1].keyword != "measure":
                raise CircuitFormatError("'correct' must follow 'measure'", lineno, col)
            if len(rest) < 2:
                raise CircuitFormatError("'correct' needs an outcome and an element", lineno, col)
            kw, kcol = rest[1]
            if kw not in ELEMENT_KEYWORDS:
                raise CircuitFormatError(f"unknown element '{kw}'", lineno, kcol)
            m = ops[-1]
            ops[-1] = Op(
                m.keyword, m.args, m.tag, m.condition,
                m.corrections + ((rest[0][0], kw, tuple(t for t, _ in rest[2:])),),
                m.line, m.columns,
            )
        elif word in STEP_KEYWORDS:
            args, cols, tag, cond = [], [], "", ""
            i = 0
            while i < len(rest):
                t, c = rest[i]
                if t.startswith("@"):
                    tag = t[1:]
                elif t == "if":
                    if i + 1 >= len(rest):
                        raise CircuitFormatError("'if' needs a flag name", lineno, c)
                    cond = rest[i + 1][0]
                    i += 1
                else:
                    args.append(t)
                    cols.append(c)
                i += 1
            ops.append(Op(word, tuple(args), tag, cond, (), lineno, tuple(cols)))
        else:
            raise CircuitFormatError(f"unknown element '{word}'", lineno, col)
    if not header_seen:
        raise CircuitFormatError("no modes declared")
    if not modes:
        raise CircuitFormatError("no modes declared")
    return CircuitDoc(name, tuple(modes), tuple(signals), control, tuple(params), tuple(ops))


def serialize(doc: CircuitDoc) -> str:
    out = [f"{FORMAT_HEADER} {doc.version}"]
    if doc.name:
        out.append(f"name {doc.name}")
    out.append("modes " + " ".join(doc.modes))
    out.extend(f"signal {s}" for s in doc.signals)
    if doc.control:
        out.append(f"control {doc.control}")
    out.extend(f"param {k} {v}" for k, v in doc.params)
    for op in doc.ops:
        parts = [op.keyword, *op.args]
        if op.tag:
            parts.append("@" + op.tag)
        if op.condition:
            parts += ["if", op.condition]
        out.append(" ".join(parts))
        for label, kw, args in op.corrections:
            out.append(" ".join(["correct", label, kw, *args]))
    return "\n".join(out) + "\n"


def _expect(rest, n, word, line, col):
    if len(rest) != n:
        raise CircuitFormatError(f"'{word}' takes {n} argument(s)", line, col)


def _check_mode_syntax(text: str, line: int, col: int) -> None:
    try:
        Mode.parse(text)
    except ValueError as exc:
        raise CircuitFormatError(str(exc), line, col) from None


_NUM = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?:/(\d+\.?\d*))?(deg|rad)?$")


def _parse_number(text: str, values: Mapping[str, float], line: int, col: int) -> float:
    if text.startswith("$"):
        key = text[1:]
        if key not in values:
            raise CircuitFormatError(f"unknown parameter '{key}'", line, col)
        return float(values[key])
    if text.startswith("-$"):
        return -_parse_number(text[1:], values, line, col + 1)
    m = _NUM.match(text)
    if not m:
        raise CircuitFormatError(f"malformed number '{text}'", line, col)
    value = float(m.group(1))
    if m.group(2):
        den = float(m.group(2))
        if den == 0:
            raise CircuitFormatError(f"malformed number '{text}'", line, col)
        value /= den
    if m.group(3) == "deg":
        value = math.radians(value)
    return value


def default_params(doc: CircuitDoc) -> dict[str, float]:
    return {k: _parse_number(v, {}, 0, 0) for k, v in doc.params}


def build_circuit(doc: CircuitDoc, values: Mapping[str, float] | None = None, prune: float | None = None) -> Circuit:
    """Compile a parsed document into a runnable :class:`Circuit`.

    ``values`` override the declared ``param`` defaults.
    """
    vals = default_params(doc)
    vals.update(values or {})
    declared = [Mode.parse(m) for m in doc.modes]
    try:
        reg = ModeRegistry(declared)
    except RegistryError as exc:
        raise CircuitFormatError(str(exc)) from None

    # first pass: element objects (needs no registry) to learn loss modes
    pending = []
    for op in doc.ops:
        if op.condition and not vals.get(op.condition, 0.0):
            continue
        pending.append(op)
    extra: list[Mode] = []
    for op in pending:
        for kw, args in [(op.keyword, op.args)] + [(k, a) for _, k, a in op.corrections]:
            if kw == "ndf" or (kw == "cphase-pi" and "balanced" in args):
                for e in _element_list(kw, args, vals, op):
                    for m in e.loss_modes:
                        if m not in reg and m not in extra:
                            extra.append(m)
    for m in extra:
        reg.add(m)
    reg.freeze()

    def check_modes(modes, op, col):
        for m in modes:
            if m not in reg:
                raise CircuitFormatError(f"mode {m} is not registered", op.line, col)

    steps = []
    for op in pending:
        col = op.columns[0] if op.columns else 0
        kw, a = op.keyword, op.args
        if kw in ELEMENT_KEYWORDS:
            for e in _element_list(kw, a, vals, op):
                check_modes(e.modes, op, col)
                steps.append(ElementStep(e, op.tag))
        elif kw == "cphase-pi":
            _nargs(op, 2, 3)
            sub = gates.cphase_pi(a[0], a[1], balanced="balanced" in a[2:])
            for s in sub:
                check_modes(s.element.modes, op, col)
            steps.extend(sub[:-1])
            steps.append(ElementStep(sub[-1].element, op.tag))
        elif kw in ("cphase", "cphase-uniform"):
            _nargs(op, 3, 3)
            check_modes([*path_modes(a[0]), *path_modes(a[1])], op, col)
            phi = _parse_number(a[2], vals, op.line, op.columns[2])
            try:
                params = gates.TunableGateParams.from_phase(phi)
            except ValueError as exc:
                raise CircuitFormatError(str(exc), op.line, op.columns[2]) from None
            make = gates.cphase_tunable if kw == "cphase" else gates.cphase_uniform
            step = make(params, a[0], a[1], reg)
            steps.append(type(step)(step.name, step.factor, step.modes, step.params, op.tag))
        elif kw == "qnd":
            _nargs(op, 1, 1)
            check_modes(path_modes(a[0]), op, col)
            steps.append(HeraldStep(gates.qnd_herald(a[0]).rule, op.tag))
        elif kw == "ppg":
            _nargs(op, 2, 2)
            check_modes([*path_modes(a[0]), *path_modes(a[1])], op, col)
            first, herald = gates.ppg(a[0], a[1])
            steps += [first, HeraldStep(herald.rule, op.tag)]
        elif kw == "herald":
            steps.append(HeraldStep(_herald_rule(op, vals, check_modes), op.tag))
        elif kw == "measure":
            _nargs(op, 1, 3)
            check_modes(path_modes(a[0]), op, col)
            basis, eta = "DA", 1.0
            for t, c in zip(a[1:], op.columns[1:]):
                if t.startswith("eta="):
                    eta = _parse_number(t[4:], vals, op.line, c + 4)
                else:
                    basis = t
            try:
                det = DetectorConfig(eta, basis)
            except ValueError as exc:
                raise CircuitFormatError(str(exc), op.line, col) from None
            corr: dict[str, tuple] = {}
            for label, ckw, cargs in op.corrections:
                if label not in det.outcomes:
                    raise CircuitFormatError(f"outcome '{label}' not in basis {basis}", op.line, col)
                es = _element_list(ckw, cargs, vals, op)
                for e in es:
                    check_modes(e.modes, op, col)
                corr[label] = corr.get(label, ()) + tuple(es)
            steps.append(MeasureStep(a[0], det, corr, op.tag))
        elif kw == "checkpoint":
            steps.append(CheckpointStep(op.tag or (a[0] if a else "")))
    return Circuit(reg, steps, doc.name)


def _nargs(op: Op, lo: int, hi: int) -> None:
    if not lo <= len(op.args) <= hi:
        want = str(lo) if lo == hi else f"{lo}-{hi}"
        raise CircuitFormatError(f"'{op.keyword}' takes {want} argument(s)", op.line, op.columns[0] if op.columns else 0)


def _element_list(kw: str, a: tuple[str, ...], vals, op: Op) -> list:
    line = op.line
    col = op.columns[0] if op.columns else 0
    cols = op.columns if kw == op.keyword and len(op.columns) == len(a) else ()

    def num(i):
        return _parse_number(a[i], vals, line, cols[i] if cols else col)

    def need(n):
        if len(a) != n:
            raise CircuitFormatError(f"'{kw}' takes {n} argument(s)", line, col)

    try:
        if kw == "pbs":
            if len(a) not in (2, 3):
                raise CircuitFormatError("'pbs' takes 2-3 argument(s)", line, col)
            return [el.pbs(a[0], a[1], num(2) if len(a) == 3 else 0.0)]
        if kw == "pdbs":
            need(4)
            return [el.pdbs(num(2), num(3), a[0], a[1])]
        if kw == "hwp":
            need(2)
            return [el.hwp(num(1), a[0])]
        if kw == "qwp":
            need(2)
            return [el.qwp(num(1), a[0])]
        if kw == "phase":
            need(2)
            return [el.phase_shift(num(1), _mode(a[0], line, col))]
        if kw == "ndf":
            need(2)
            t = num(1)
            if ":" in a[0]:
                return [el.ndf(t, [_mode(a[0], line, col)])]
            return [el.ndf_path(t, a[0])]
        if kw == "rebalance":
            need(3)
            a_c = math.sqrt(gates.p_c(num(2)))
            return [el.hwp(rebalance_angle(a_c, a[1]), a[0])]
        if kw == "cphase-pi":
            return [s.element for s in gates.cphase_pi(a[0], a[1], balanced="balanced" in a[2:])]
    except ValueError as exc:
        if isinstance(exc, CircuitFormatError):
            raise
        raise CircuitFormatError(str(exc), line, col) from None
    raise CircuitFormatError(f"unknown element '{kw}'", line, col)


def rebalance_angle(a_c: float, polarization: str) -> float:
    """Half-wave-plate angle of the signal-rebalancing transform.

    ``H``: |H> -> (sqrt(A)|H> + |V>)/sqrt(1+A);
    ``V``: |V> -> (sqrt(A)|H> - |V>)/sqrt(1+A).
    """
    r = math.sqrt(a_c)
    if polarization == "H":
        return 0.5 * math.atan2(1.0, r)
    if polarization == "V":
        return 0.5 * math.atan2(r, 1.0)
    raise ValueError(f"rebalance polarization must be H or V, got {polarization!r}")


def _mode(text: str, line: int, col: int) -> Mode:
    try:
        return Mode.parse(text)
    except ValueError as exc:
        raise CircuitFormatError(str(exc), line, col) from None


def _herald_rule(op: Op, vals, check_modes) -> HeraldRule:
    """``herald total <path>=<n> ...`` or ``herald pattern <mode>=<n> ...``;
    ``threshold`` switches to non-resolving detection."""
    if not op.args or op.args[0] not in ("total", "pattern"):
        raise CircuitFormatError("herald needs 'total' or 'pattern'", op.line, op.columns[0] if op.columns else 0)
    pattern, totals, resolving = {}, [], True
    for t, c in zip(op.args[1:], op.columns[1:]):
        if t == "threshold":
            resolving = False
            continue
        key, sep, count = t.partition("=")
        if not sep:
            raise CircuitFormatError(f"expected <mode>=<count>, got '{t}'", op.line, c)
        n = _parse_number(count, vals, op.line, c + len(key) + 1)
        if n != int(n) or n < 0:
            raise CircuitFormatError(f"count must be a non-negative integer, got '{count}'", op.line, c)
        if op.args[0] == "total":
            ms = path_modes(key)
            check_modes(ms, op, c)
            totals.append((ms, int(n)))
        else:
            m = _mode(key, op.line, c)
            check_modes([m], op, c)
            pattern[m] = int(n)
    return HeraldRule(pattern, tuple(totals), op.tag, resolving)


def bundled_names() -> list[str]:
    return sorted(
        p.name.removesuffix(".circ")
        for p in resources.files("qrouter.data").iterdir()
        if p.name.endswith(".circ")
    )


def load_bundled(name: str) -> CircuitDoc:
    path = resources.files("qrouter.data") / f"{name}.circ"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled circuit named {name!r}; have {bundled_names()}")
    return parse_circuit(path.read_text())
