"""Scenario files, the built-in flow catalog, check orchestration and report
emission."""

from __future__ import annotations

import ast
import io
import math
import os
import sys
import time
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import expr as ex
from .expr import ExpressionSyntaxError
from .fluid import (
    FlowScenario,
    ScenarioError,
    bracket_closure,
    build_hierarchy,
    build_symplectic,
    euler_check,
    nambu_bracket,
    verify_scenario,
)
from .forms import SampleGrid, VectorField
from .helicity import (
    density_checks,
    helicity_three_form,
    invariant_two_form,
    potential_one_form,
    sigma_form,
)
from .jacobi import extend_symplectic, extension_identity, hamiltonian_vector_field, jacobi_identity, jacobi_pair
from .randomfields import random_conserved, random_polynomial, random_scalar
from .report import PIPELINE, STRUCTURAL, Check, VerificationReport, residual_check

__all__ = [
    "CATALOG",
    "CHECK_GROUPS",
    "ScenarioFileError",
    "parse_scenario_text",
    "scenario_from_fields",
    "load_scenario",
    "run_checks",
    "emit_report",
]

CATALOG: dict = {
    "shear": {
        "name": "shear",
        "v": ["sin(z)", "0", "0"],
        "B": ["1", "1", "0"],
        "phi": "y",
        "h1": "z",
        "p": "0",
        "lambda": ["x"],
    },
    "rotation": {
        "name": "rotation",
        "v": ["-y", "x", "0"],
        "B": ["0", "0", "1"],
        "phi": "z",
        "h1": "(x^2 + y^2)*z",
        "p": "(x^2 + y^2)/2",
        "lambda": ["x"],
        "phi_k": ["x*cos(t) + y*sin(t) + 10"],
    },
    # the integrable C = 0 member of the ABC family; a Beltrami field
    "abc": {
        "name": "abc",
        "v": ["sin(z)", "sin(x) + cos(z)", "cos(x)"],
        "B": ["0", "1", "0"],
        "phi": "y - t*(sin(x) + cos(z))",
        "h1": "(y - t*(sin(x) + cos(z)))*(sin(x) + cos(z))",
        "p": "-sin(x)*cos(z)",
        "lambda": ["x"],
    },
}

CHECK_GROUPS = ("scenario", "symplectic", "hierarchy", "closure", "euler", "helicity",
                "gauge", "sigma", "extension", "jacobi")

_REQUIRED = ("v", "B", "phi", "h1")
_OPTIONAL = ("name", "p", "lambda", "phi_k", "grid_n", "t_values", "rho_floor",
             "tol_structural", "tol_pipeline")


class ScenarioFileError(ScenarioError):
    """Malformed scenario file; ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 source: str = "<scenario>"):
        where = source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


def _strip_comment(line: str) -> str:
    quote = None
    for i, ch in enumerate(line):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "#":
            return line[:i]
    return line


def parse_scenario_text(text: str, source: str = "<scenario>") -> tuple:
    """Parse ``key = value`` lines into ``(fields, positions)``.

    ``positions`` maps each key to the 1-based ``(line, column)`` of its value.
    """
    fields: dict = {}
    positions: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if "=" not in line:
            raise ScenarioFileError("expected 'key = value'", lineno, 1, source)
        key, _, value = line.partition("=")
        key = key.strip()
        col = len(line) - len(line.lstrip()) + 1
        if not key.isidentifier():
            raise ScenarioFileError(f"invalid key {key!r}", lineno, col, source)
        if key not in _REQUIRED and key not in _OPTIONAL:
            raise ScenarioFileError(f"unknown field {key}", lineno, col, source)
        if key in fields:
            raise ScenarioFileError(f"duplicate field {key}", lineno, col, source)
        eq = line.index("=")
        rest = line[eq + 1:]
        vcol = eq + 2 + len(rest) - len(rest.lstrip())
        try:
            fields[key] = ast.literal_eval(value.strip())
        except (SyntaxError, ValueError) as err:
            off = getattr(err, "offset", None)
            raise ScenarioFileError(f"cannot parse value of {key}: {err.msg if hasattr(err, 'msg') else err}",
                                    lineno, vcol + (off - 1 if off else 0), source) from None
        positions[key] = (lineno, vcol)
    return fields, positions


def _expression(value, key, pos, source, index=None):
    label = key if index is None else f"{key}[{index}]"
    if isinstance(value, bool) or not isinstance(value, (str, int, float)):
        raise ScenarioFileError(f"{label} must be an expression string", *pos, source)
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise ScenarioFileError(f"non-finite constant in {label}", *pos, source)
        value = repr(float(value))
    try:
        return ex.parse_expression(value)
    except ExpressionSyntaxError as err:
        line, col = pos if pos else (None, None)
        # column of the offending character inside the quoted string
        col = None if col is None or index is not None else col + 1 + err.position
        raise ScenarioFileError(f"{label}: {err}", line, col, source) from None
    except ValueError as err:
        raise ScenarioFileError(f"{label}: {err}", *(pos or (None, None)), source) from None


def _expressions(value, key, pos, source, n=None):
    if not isinstance(value, (list, tuple)):
        raise ScenarioFileError(f"{key} must be a list of expression strings", *pos, source)
    if n is not None and len(value) != n:
        raise ScenarioFileError(f"{key} needs {n} components, got {len(value)}", *pos, source)
    return [_expression(v, key, pos, source, i) for i, v in enumerate(value)]


def _number(value, key, pos, source, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFileError(f"{key} must be a number", *pos, source)
    if not math.isfinite(value):
        raise ScenarioFileError(f"non-finite constant in {key}", *pos, source)
    if integer:
        if int(value) != value or value < 1:
            raise ScenarioFileError(f"{key} must be a positive integer", *pos, source)
        return int(value)
    return float(value)


def scenario_from_fields(fields: Mapping, positions: Mapping | None = None,
                         source: str = "<scenario>", grid_n: int | None = None,
                         tolerances: Mapping | None = None) -> FlowScenario:
    positions = positions or {}
    for key in _REQUIRED:
        if key not in fields:
            raise ScenarioFileError(f"missing field {key}", source=source)
    pos = lambda k: positions.get(k, (None, None))
    v = _expressions(fields["v"], "v", pos("v"), source, 3)
    B = _expressions(fields["B"], "B", pos("B"), source, 3)
    phi = _expression(fields["phi"], "phi", pos("phi"), source)
    h1 = _expression(fields["h1"], "h1", pos("h1"), source)
    p = _expression(fields["p"], "p", pos("p"), source) if "p" in fields else None
    gauges = _expressions(fields.get("lambda", []), "lambda", pos("lambda"), source)
    phi_k = _expressions(fields.get("phi_k", []), "phi_k", pos("phi_k"), source)
    n = grid_n or (_number(fields["grid_n"], "grid_n", pos("grid_n"), source, True) if "grid_n" in fields else 8)
    t_values = fields.get("t_values", (0.0, 0.5, 1.0))
    if not isinstance(t_values, (list, tuple)) or not t_values:
        raise ScenarioFileError("t_values must be a nonempty list of numbers", *pos("t_values"), source)
    t_values = [_number(t, "t_values", pos("t_values"), source) for t in t_values]
    tol = {}
    for key, cls in (("tol_structural", "structural"), ("tol_pipeline", "pipeline")):
        if key in fields:
            tol[cls] = _number(fields[key], key, pos(key), source)
    tol.update(tolerances or {})
    kw = {}
    if "rho_floor" in fields:
        kw["rho_floor"] = _number(fields["rho_floor"], "rho_floor", pos("rho_floor"), source)
    name = fields.get("name", Path(source).stem if source != "<scenario>" else "scenario")
    if not isinstance(name, str):
        raise ScenarioFileError("name must be a string", *pos("name"), source)
    return FlowScenario(name, VectorField.spatial(*v), VectorField.spatial(*B), phi, h1, p,
                        tuple(gauges), tuple(phi_k), SampleGrid.uniform(n, t_values),
                        tolerances=tol, **kw)


def load_scenario(where, grid_n: int | None = None, tolerances: Mapping | None = None) -> FlowScenario:
    """A catalog name (``shear``, ``rotation``, ``abc``) or a scenario file path."""
    if isinstance(where, FlowScenario):
        return where
    where = str(where)
    if where in CATALOG:
        return scenario_from_fields(CATALOG[where], source=where, grid_n=grid_n, tolerances=tolerances)
    path = Path(where)
    if not path.is_file():
        raise ScenarioFileError(f"no catalog entry or file named {where!r}", source=where)
    fields, positions = parse_scenario_text(path.read_text(), str(path))
    return scenario_from_fields(fields, positions, str(path), grid_n, tolerances)


# ---------------------------------------------------------------------------
# orchestration


def _select(checks) -> list:
    if checks is None or checks == "all":
        return list(CHECK_GROUPS)
    if isinstance(checks, str):
        checks = [c.strip() for c in checks.split(",")]
    out = []
    for c in checks:
        if not c:
            continue
        if c not in CHECK_GROUPS:
            raise ValueError(f"unknown check group {c!r}; choose from {', '.join(CHECK_GROUPS)}")
        if c not in out:
            out.append(c)
    return [g for g in CHECK_GROUPS if g in out]


class _Context:
    def __init__(self, s, depth, rng):
        self.s = s
        self.depth = depth
        self.rng = rng
        self._cache = {}

    def get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def hierarchy(self):
        return self.get("H", lambda: build_hierarchy(self.s, self.depth))

    def two_form(self, k):
        return self.get(("T", k), lambda: invariant_two_form(self.s, self.hierarchy, k))

    def extensions(self):
        def build():
            H = self.hierarchy
            out = [extend_symplectic(self.s, H, 0)]
            for k, phk in enumerate(self.s.phi_k, start=1):
                if k > H.depth:
                    break
                out.append(extend_symplectic(self.s, H, k, phk))
            return out
        return self.get("ext", build)


def _group_scenario(c, rep):
    rep.extend(verify_scenario(c.s).checks)


def _group_symplectic(c, rep):
    rep.extend(build_symplectic(c.s).checks)


def _group_hierarchy(c, rep):
    H = c.hierarchy
    rep.extend(H.checks)
    for k in range(1, H.depth + 1):
        rep.add(residual_check(f"hierarchy.nambu_casimir[{k}]", "brm",
                               nambu_bracket(c.s.phi, H.hamiltonian(k), c.s), c.s.retained,
                               c.s.tol(STRUCTURAL)))
    # Jacobi identity of the Nambu bracket on seeded random triples
    f, g, h = (random_polynomial(c.rng) for _ in range(3))
    br = lambda a, b: nambu_bracket(a, b, c.s)
    cyc = ex.add(ex.add(br(f, br(g, h)), br(h, br(f, g))), br(g, br(h, f)))
    rep.add(residual_check("hierarchy.nambu_jacobi", "brm", cyc, c.s.retained, c.s.tol(PIPELINE)))


def _group_closure(c, rep):
    H = c.hierarchy
    for k in range(1, H.depth + 1):
        for l in range(k, H.depth + 1):
            rep.extend(bracket_closure(c.s, H, k, l)[2].checks)


def _group_euler(c, rep):
    if c.s.p is None:
        return
    rep.extend(euler_check(c.s)[1].checks)


def _group_helicity(c, rep):
    H = c.hierarchy
    for k in range(0, H.depth + 1):
        rep.extend(c.two_form(k).checks)
    for k in range(1, H.depth + 1):
        for orient in ("plus", "minus"):
            P = potential_one_form(c.s, H, k, orient)
            rep.extend(P.checks)
            for l in range(1, H.depth + 1):
                D = helicity_three_form(P, c.two_form(l))
                rep.extend(D.checks)
                lag = density_checks(D)[0]
                rep.add(lag)


def _group_gauge(c, rep):
    s, H = c.s, c.hierarchy
    gauges = list(s.gauges)
    # seeded draws: a conserved gauge and a generic one
    gauges.append(random_conserved(c.rng, [s.phi, s.h1]))
    gauges.append(random_polynomial(c.rng))
    seen = set()
    for lam in gauges:
        if lam in seen:
            continue
        seen.add(lam)
        for k in range(1, H.depth + 1):
            P = potential_one_form(s, H, k, "plus", lam)
            rep.extend(P.checks[-2:])
            for l in range(1, H.depth + 1):
                if l == k:
                    continue
                rep.extend(density_checks(helicity_three_form(P, c.two_form(l))))


def _group_sigma(c, rep):
    H = c.hierarchy
    for k in range(1, H.depth + 1):
        rep.extend(sigma_form(c.s, H, k)[1])


def _group_extension(c, rep):
    exts = c.extensions()
    for e in exts:
        rep.extend(e.checks)
    for a in exts[1:]:
        for b in exts:
            if a is not b:
                rep.add(extension_identity(a, b))


def _group_jacobi(c, rep):
    exts = c.extensions()
    if len(exts) < 2:
        return
    s = c.s
    for ek in exts[1:]:
        for el in exts:
            J = jacobi_pair(ek, el)
            rep.extend(J.conformal.checks)
            rep.extend(J.checks)
            tag = f"[{ek.k},{el.k}]"
            f, g, h = (random_polynomial(c.rng) for _ in range(3))
            rep.add(residual_check("jacobi.identity" + tag, "fgh", jacobi_identity(f, g, h, J), J.grid,
                                   s.tol(PIPELINE)))
            fr = random_scalar(c.rng)
            rep.add(residual_check("jacobi.hamiltonian_field" + tag, "jacvec",
                                   hamiltonian_vector_field(fr, J)[1], J.grid, s.tol(PIPELINE)))


_GROUPS = {
    "scenario": _group_scenario,
    "symplectic": _group_symplectic,
    "hierarchy": _group_hierarchy,
    "closure": _group_closure,
    "euler": _group_euler,
    "helicity": _group_helicity,
    "gauge": _group_gauge,
    "sigma": _group_sigma,
    "extension": _group_extension,
    "jacobi": _group_jacobi,
}


def run_checks(s, checks="all", depth: int = 2, grid: SampleGrid | int | None = None,
               tolerances: Mapping | float | None = None, seed: int = 0) -> VerificationReport:
    """Run the selected check groups and assemble a report.

    Errors raised by a group are recorded as a failed ``<group>.error`` check.
    """
    start = time.perf_counter()
    if isinstance(tolerances, (int, float)):
        tolerances = {"structural": float(tolerances), "pipeline": float(tolerances)}
    s = load_scenario(s, tolerances=tolerances)
    if tolerances:
        s = FlowScenario(s.name, s.v, s.B, s.phi, s.h1, s.p, s.gauges, s.phi_k, s.grid, s.rho_floor,
                         {**s.tolerances, **tolerances})
    if isinstance(grid, int):
        grid = SampleGrid.uniform(grid, s.grid.t_values)
    if grid is not None:
        s = s.with_grid(grid)
    groups = _select(checks)
    rep = VerificationReport(s.name, seed=seed)
    ctx = _Context(s, depth, np.random.default_rng(seed))
    for name in groups:
        try:
            _GROUPS[name](ctx, rep)
        except Exception as err:  # recorded, never aborts the run
            rep.add(Check(f"{name}.error", "-", None, None, 0.0, 0, note=f"{type(err).__name__}: {err}"))
    if "H" in ctx._cache:
        rep.sign = ctx._cache["H"].sign
    rep.elapsed_ms = (time.perf_counter() - start) * 1e3
    return rep


def emit_report(report: VerificationReport, format: str = "json", out=None,
                timestamps: bool = True) -> str:
    """Write ``report`` as ``json`` or ``text`` to a path, a stream, or nowhere.

    Returns the rendered text.
    """
    if format == "json":
        text = report.to_json(timestamps)
    elif format == "text":
        text = report.to_text()
    else:
        raise ValueError(f"unknown format {format!r}")
    if out is None:
        return text
    if isinstance(out, (str, os.PathLike)):
        Path(out).write_text(text)
    else:
        out.write(text)
    return text
