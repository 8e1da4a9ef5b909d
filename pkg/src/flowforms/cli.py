"""Command line entry point: ``flowforms verify|hierarchy|helicity-integral|catalog``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import expr as ex
from .fluid import ScenarioError, abc_flow, build_hierarchy, helicity_integral
from .forms import VectorField, residual_norm
from .harness import CATALOG, CHECK_GROUPS, emit_report, load_scenario, run_checks
from .report import STRUCTURAL

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _tolerance(text):
    try:
        t = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not t > 0 or t == float("inf"):
        raise argparse.ArgumentTypeError("tolerance must be positive and finite")
    return t


def _abc_coefficients(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected A,B,C") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("expected three coefficients A,B,C")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flowforms", description="Residual checks for symmetry-generated flow invariants.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run check groups on a scenario and emit a report")
    v.add_argument("--scenario", required=True, help="catalog name or scenario file")
    v.add_argument("--checks", default="all",
                   help=f"'all' or a comma-separated subset of: {', '.join(CHECK_GROUPS)}")
    v.add_argument("--depth", type=_positive_int, default=2)
    v.add_argument("--grid", type=_positive_int, default=None, help="points per spatial axis")
    v.add_argument("--tol", type=_tolerance, default=None, help="override every residual tolerance")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None, help="write the report here instead of stdout")
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.add_argument("--no-timestamps", action="store_true", help="omit elapsed_ms from JSON")

    h = sub.add_parser("hierarchy", help="print u0, W_k, h_k and xi_k")
    h.add_argument("--scenario", required=True)
    h.add_argument("--depth", type=_positive_int, default=2)

    hi = sub.add_parser("helicity-integral", help="midpoint-rule value of the integral of v . curl v")
    src = hi.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario")
    src.add_argument("--abc", type=_abc_coefficients, metavar="A,B,C")
    hi.add_argument("--resolution", type=_positive_int, default=64)

    c = sub.add_parser("catalog", help="list or show built-in scenarios")
    c.add_argument("action", nargs="?", choices=("list", "show"), default="list")
    c.add_argument("name", nargs="?")
    return p


def _scenario_text(fields) -> str:
    lines = []
    for key, value in fields.items():
        lines.append(f"{key} = {json.dumps(value)}")
    return "\n".join(lines) + "\n"


def _cmd_verify(args, out) -> int:
    rep = run_checks(args.scenario, args.checks, args.depth, args.grid, args.tol, args.seed)
    text = emit_report(rep, args.format, timestamps=not args.no_timestamps)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"{len(rep.checks)} checks, {len(rep.failures)} failed; report written to {args.out}",
              file=out)
    else:
        out.write(text)
        if not text.endswith("\n"):
            out.write("\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def _expand(e):
    try:
        return ex.expand(e)
    except ex.ExpansionTooLarge:
        return e


def _show(obj, s) -> str:
    if isinstance(obj, VectorField):
        obj = obj.map(_expand)
        text = str(obj)
    else:
        obj = _expand(obj)
        text = ex.to_text(obj)
    if text == "0":
        return text
    if residual_norm(obj, s.grid)[0] <= STRUCTURAL:
        return f"{text}  (vanishes on the sample grid)"
    return text


def _cmd_hierarchy(args, out) -> int:
    s = load_scenario(args.scenario)
    H = build_hierarchy(s, args.depth)
    print(f"scenario: {s.name}", file=out)
    print(f"sign: {H.sign:+d}", file=out)
    if H.sign_note:
        print(f"  ({H.sign_note})", file=out)
    print(f"u0 = {H.u0}", file=out)
    for k in range(1, H.depth + 1):
        print(f"W_{k} = {_show(H.field(k), s)}", file=out)
        print(f"h_{k} = {_show(H.hamiltonian(k), s)}", file=out)
        print(f"xi_{k} = {_show(H.xi[k - 1], s)}", file=out)
    return EXIT_OK if all(c.ok for c in H.checks) else EXIT_FAIL


def _cmd_helicity(args, out) -> int:
    v = abc_flow(*args.abc) if args.abc else load_scenario(args.scenario).v
    value = helicity_integral(v, args.resolution)
    print(repr(value), file=out)
    return EXIT_OK


def _cmd_catalog(args, out) -> int:
    if args.action == "list":
        for name in CATALOG:
            print(name, file=out)
        return EXIT_OK
    if args.name is None:
        raise ScenarioError("catalog show needs a scenario name")
    if args.name not in CATALOG:
        raise ScenarioError(f"no catalog scenario {args.name!r}; choose from {', '.join(CATALOG)}")
    out.write(_scenario_text(CATALOG[args.name]))
    return EXIT_OK


_COMMANDS = {
    "verify": _cmd_verify,
    "hierarchy": _cmd_hierarchy,
    "helicity-integral": _cmd_helicity,
    "catalog": _cmd_catalog,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except (ScenarioError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
