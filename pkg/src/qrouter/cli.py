"""``qrouter`` command line: run routers, sweeps and the acceptance suite.

Angles are read in degrees unless ``--radians`` is given.  Every command
writes CSV (see :data:`qrouter.analytics.COLUMNS`) to stdout or ``--output``.
Exit status: 0 success, 1 verification failure, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import analytics as an
from .circuitfmt import CircuitFormatError, parse_circuit
from .fock import RegistryError
from .router import (
    ControlQubit,
    SignalQubit,
    route_fixed,
    route_multi,
    route_tunable,
    run_document,
)
from .table import format_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _angle(args, value: float | None) -> float | None:
    if value is None:
        return None
    return value if args.radians else math.radians(value)


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _signals(args, count: int = 1) -> list[SignalQubit]:
    """Explicit (alpha, beta), explicit Bloch angles, or seeded random draws."""
    if args.alpha is not None or args.beta is not None:
        if args.alpha is None or args.beta is None:
            raise UsageError("--alpha and --beta go together")
        return [SignalQubit(args.alpha, args.beta)] * count
    if args.polar is not None:
        return [SignalQubit.from_angles(_angle(args, args.polar), _angle(args, args.azimuth or 0.0))] * count
    rng = np.random.default_rng(args.seed)
    return [SignalQubit.random(rng) for _ in range(count)]


def _draws(args) -> int:
    explicit = args.alpha is not None or args.beta is not None or args.polar is not None
    return 1 if explicit else args.draws


def _control(args) -> ControlQubit:
    vt = _angle(args, args.vartheta) % (2 * math.pi)
    return ControlQubit(_angle(args, args.theta), vt)


def _emit(args, rows) -> None:
    text = format_csv(rows, args.seed)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _params(pairs) -> dict[str, float]:
    out = {}
    for item in pairs or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects name=value, got {item!r}")
        out[name] = float(value)
    return out


def _custom(args, params: dict) -> list[dict]:
    doc = parse_circuit(Path(args.circuit).read_text())
    ctrl = _control(args)
    rows = []
    for _ in range(args.draws):
        sigs = _signals(args, len(doc.signals))
        r = run_document(doc, sigs, ctrl, params)
        rows.append(an.result_row(doc.name or "circuit", r, theta=ctrl.theta, vartheta=ctrl.vartheta, n=len(sigs)))
    return rows


def cmd_route(args) -> int:
    if args.circuit:
        _emit(args, _custom(args, _params(args.param)))
        return EXIT_OK
    ctrl = _control(args)
    rows = []
    for sig in _signals(args, _draws(args)):
        r = route_fixed(sig, ctrl, equalize=args.equalize, eta=args.eta)
        p_an = (1 / 24 if args.equalize else an.p_succ_fixed(ctrl.theta)) * args.eta
        rows.append(an.result_row("fixed", r, theta=ctrl.theta, vartheta=ctrl.vartheta, phi=math.pi, P_analytic=p_an))
    _emit(args, rows)
    return EXIT_OK


def cmd_tunable(args) -> int:
    phi = _angle(args, args.phi)
    if args.circuit:
        _emit(args, _custom(args, {"phi": phi, **_params(args.param)}))
        return EXIT_OK
    ctrl = _control(args)
    rows = []
    for sig in _signals(args, _draws(args)):
        r = route_tunable(sig, ctrl, phi, eta=args.eta)
        rows.append(
            an.result_row(
                "tunable", r, theta=ctrl.theta, vartheta=ctrl.vartheta, phi=phi, chi_L=an.chi_limit(phi),
                P_analytic=an.p_succ_tunable(ctrl.theta, phi, ctrl.vartheta) * args.eta,
            )
        )
    _emit(args, rows)
    return EXIT_OK


def cmd_multi(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    ctrl = _control(args)
    phi = _angle(args, args.phi)
    r = route_multi(_signals(args, args.n), ctrl, phi, eta=args.eta)
    p_an = an.p_total_multi(args.n, ctrl.theta) * args.eta if math.isclose(phi, math.pi) else None
    _emit(args, [an.result_row("multi", r, theta=ctrl.theta, vartheta=ctrl.vartheta, phi=phi, n=args.n, P_analytic=p_an)])
    return EXIT_OK


def cmd_sweep(args) -> int:
    sig = _signals(args)[0]
    if args.figure is not None:
        spec = an.figure_spec(args.figure, args.points)
        kind = None
    else:
        if args.parameter is None:
            raise UsageError("give --figure or --parameter")
        angular = args.parameter in ("theta", "phi", "chi_L")
        lo = _angle(args, args.lo) if angular else args.lo
        hi = _angle(args, args.hi) if angular else args.hi
        fixed = {k: _angle(args, v) for k, v in (("theta", args.theta), ("phi", args.phi)) if v is not None}
        spec = an.SweepSpec(args.parameter, lo, hi, args.points, fixed)
        kind = "tunable" if args.parameter == "theta" and "phi" in fixed else None
    rows = an.sweep(spec, kind, signal=sig)
    _emit(args, rows)
    if args.plot:
        from .plotting import plot_fig3, plot_fig5

        if args.figure == 5:
            plot_fig5(rows, Path(args.plot))
        elif args.figure == 3:
            plot_fig3(rows, Path(args.plot))
        else:
            raise UsageError("--plot needs --figure 3 or 5")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_all

    out = Path(args.out) if args.out else None
    results = run_all(seed=args.seed, points=args.points, out_dir=out, figures=not args.no_figures)
    for c in results:
        print(c.line())
    failed = [c.number for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
    return EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qrouter", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--radians", action="store_true", help="read angles in radians instead of degrees")
    common.add_argument("--seed", type=int, default=0, help="seed for random signal draws (default 0)")
    common.add_argument("--output", "-o", help="write CSV here instead of stdout")

    qubits = argparse.ArgumentParser(add_help=False)
    qubits.add_argument("--theta", type=float, default=0.0, help="control polar angle, in [0, 90] deg")
    qubits.add_argument("--vartheta", type=float, default=0.0, help="control relative phase")
    qubits.add_argument("--alpha", type=_complex, help="signal H amplitude, e.g. 0.6 or 0.6+0.1j")
    qubits.add_argument("--beta", type=_complex, help="signal V amplitude")
    qubits.add_argument("--polar", type=float, help="signal Bloch polar angle (alternative to alpha/beta)")
    qubits.add_argument("--azimuth", type=float, help="signal Bloch azimuth")
    qubits.add_argument("--draws", type=int, default=1, help="random signal draws when no signal is given")
    qubits.add_argument("--eta", type=float, default=1.0, help="detector efficiency in (0, 1]")
    qubits.add_argument("--circuit", help="run this circuit document instead of the bundled one")
    qubits.add_argument("--param", action="append", help="circuit parameter name=value (radians)")

    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("route", parents=[common, qubits], help="fixed controlled-sign router")
    r.add_argument("--equalize", action="store_true", help="add the T=1/3 filter on port 1")
    r.set_defaults(func=cmd_route)

    t = sub.add_parser("tunable", parents=[common, qubits], help="router with two tunable c-phase gates")
    t.add_argument("--phi", type=float, default=180.0, help="gate phase in [0, 180] deg")
    t.set_defaults(func=cmd_tunable)

    m = sub.add_parser("multi", parents=[common, qubits], help="route n signals with one control")
    m.add_argument("--n", type=int, default=2)
    m.add_argument("--phi", type=float, default=180.0)
    m.set_defaults(func=cmd_multi)

    s = sub.add_parser("sweep", parents=[common], help="parameter sweeps behind the figures")
    s.add_argument("--figure", type=int, choices=(3, 5))
    s.add_argument("--parameter", choices=("theta", "phi", "chi_L", "n"))
    s.add_argument("--lo", type=float)
    s.add_argument("--hi", type=float)
    s.add_argument("--theta", type=float, help="fixed theta for phi sweeps")
    s.add_argument("--phi", type=float, help="fixed phi for theta sweeps of the tunable router")
    s.add_argument("--points", type=int, default=101)
    s.add_argument("--plot", help="also render the figure to this PNG")
    s.add_argument("--alpha", type=_complex)
    s.add_argument("--beta", type=_complex)
    s.add_argument("--polar", type=float)
    s.add_argument("--azimuth", type=float)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run the acceptance criteria and write artifacts")
    v.add_argument("--seed", type=int, default=20130)
    v.add_argument("--points", type=int, default=101)
    v.add_argument("--out", help="directory for CSV artifacts, figures and report.txt")
    v.add_argument("--no-figures", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "lo", None) is not None and args.hi is None:
            raise UsageError("--lo needs --hi")
        if getattr(args, "param", None) and not args.circuit:
            raise UsageError("--param only applies with --circuit")
        return args.func(args)
    except (UsageError, ValueError, CircuitFormatError, RegistryError, OSError) as exc:
        print(f"qrouter: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
