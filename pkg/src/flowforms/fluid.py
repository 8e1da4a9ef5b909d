"""Flow scenarios, the symplectic structure of a frozen-in pair, the symmetry
hierarchy, Nambu brackets, Euler-flow checks and the helicity integral."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from . import expr as ex
from .expr import Expression, ONE, ZERO, as_expression
from .forms import (
    Form,
    SampleGrid,
    VectorField,
    cross,
    curl,
    d,
    d_spatial,
    divergence,
    dot,
    dt,
    evaluate_components,
    gradient,
    interior_product,
    lie_bracket,
    lie_derivative_form,
    musical_flat,
    spacetime_volume,
    spatial_volume,
    wedge,
)
from .report import PIPELINE, STRUCTURAL, Check, VerificationReport, residual_check

__all__ = [
    "ScenarioError",
    "DegenerateScenarioError",
    "NotConservedError",
    "FlowScenario",
    "SymplecticStructure",
    "Hierarchy",
    "advective_derivative",
    "curl_field",
    "verify_scenario",
    "build_symplectic",
    "check_symmetry",
    "build_hierarchy",
    "nambu_bracket",
    "bracket_closure",
    "euler_check",
    "helicity_integral",
    "abc_flow",
]


class ScenarioError(ValueError):
    pass


class DegenerateScenarioError(ScenarioError):
    pass


class NotConservedError(ScenarioError):
    pass


@dataclass(frozen=True, eq=False)
class FlowScenario:
    """A flow ``v`` with a frozen-in field ``B`` and an advected function ``phi``.

    ``gauges`` are optional gauge functions for potential one-forms and
    ``phi_k`` optional conserved Hamiltonians for symplectic extensions.
    """

    name: str
    v: VectorField
    B: VectorField
    phi: Expression
    h1: Expression
    p: Expression | None = None
    gauges: tuple = ()
    phi_k: tuple = ()
    grid: SampleGrid = field(default_factory=SampleGrid)
    rho_floor: float = 1e-6
    tolerances: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for name in ("v", "B"):
            f = getattr(self, name)
            if not isinstance(f, VectorField):
                f = VectorField.spatial(*(as_expression(c) for c in f))
                object.__setattr__(self, name, f)
            if not f.is_spatial:
                raise ScenarioError(f"{name} must be a spatial vector field")
        object.__setattr__(self, "phi", as_expression(self.phi))
        object.__setattr__(self, "h1", as_expression(self.h1))
        if self.p is not None:
            object.__setattr__(self, "p", as_expression(self.p))
        object.__setattr__(self, "gauges", tuple(as_expression(g) for g in self.gauges))
        object.__setattr__(self, "phi_k", tuple(as_expression(g) for g in self.phi_k))
        if not (self.rho_floor >= 0 and math.isfinite(self.rho_floor)):
            raise ScenarioError("rho_floor must be a finite non-negative number")

    @classmethod
    def from_strings(cls, name: str, v: Sequence[str], B: Sequence[str], phi: str, h1: str,
                     p: str | None = None, gauges: Sequence[str] = (),
                     phi_k: Sequence[str] = (), grid_n: int = 8, **kw) -> "FlowScenario":
        parse = ex.parse_expression
        return cls(
            name,
            VectorField.spatial(*(parse(c) for c in v)),
            VectorField.spatial(*(parse(c) for c in B)),
            parse(phi),
            parse(h1),
            None if p is None else parse(p),
            tuple(parse(g) for g in gauges),
            tuple(parse(g) for g in phi_k),
            SampleGrid.uniform(grid_n),
            **kw,
        )

    def tol(self, kind: float) -> float:
        """Tolerance of a class, honoring overrides keyed by class name."""
        key = {STRUCTURAL: "structural", PIPELINE: "pipeline"}.get(kind)
        return float(self.tolerances.get(key, kind)) if key else kind

    @cached_property
    def suspended(self) -> VectorField:
        return VectorField.suspended(self.v)

    @cached_property
    def rho(self) -> Expression:
        """``rho_phi = B(phi)``."""
        return self.B(self.phi)

    @cached_property
    def retained(self) -> SampleGrid:
        """The sample grid without points where ``|rho_phi|`` is below the floor."""
        vals = evaluate_components([self.rho], self.grid)[0]
        g = self.grid.exclude(~(np.abs(vals) >= self.rho_floor))
        if g.size == 0:
            raise DegenerateScenarioError(
                f"rho_phi = {ex.to_text(self.rho)} is below {self.rho_floor:g} at every sample point")
        return g

    @cached_property
    def mu_M(self) -> Form:
        return spatial_volume(self.rho)

    def conserved(self, f) -> Expression:
        """``(d_t + v)(f)``; zero for conserved functions."""
        return self.suspended(f)

    def with_grid(self, grid: SampleGrid) -> "FlowScenario":
        return FlowScenario(self.name, self.v, self.B, self.phi, self.h1, self.p, self.gauges,
                            self.phi_k, grid, self.rho_floor, self.tolerances)


def advective_derivative(s: FlowScenario, f) -> Expression:
    return s.conserved(f)


def curl_field(s: FlowScenario, f) -> VectorField:
    """``rho^-1 grad(phi) x grad(f)``: the field whose action is ``{f, .}``."""
    c = cross(gradient(s.phi), gradient(f))
    return VectorField.spatial(*(ex.div(ci, s.rho) for ci in c))


# ---------------------------------------------------------------------------
# scenario validation


def verify_scenario(s: FlowScenario) -> VerificationReport:
    """Residuals of the incompressibility and frozen-field conditions."""
    rep = VerificationReport(s.name)
    g = s.grid
    ts = s.tol(STRUCTURAL)
    tp = s.tol(PIPELINE)
    frozen_B = lie_bracket(s.suspended, s.B)
    rep.extend([
        residual_check("scenario.div_v", "pro2", divergence(s.v), g, ts),
        residual_check("scenario.div_B", "pro2", divergence(s.B), g, ts),
        residual_check("scenario.frozen_B", "beq", frozen_B, g, tp),
        residual_check("scenario.frozen_phi", "beq", s.conserved(s.phi), g, tp),
    ])
    try:
        kept = s.retained
        note = f"{kept.excluded} of {g.size} points below rho floor {s.rho_floor:g}"
        rep.add(Check("scenario.rho_floor", "vol", 0.0, 0.0, ts, kept.excluded, note=note))
    except DegenerateScenarioError as err:
        rep.add(Check("scenario.rho_floor", "vol", None, None, ts, g.size, note=str(err)))
    return rep


# ---------------------------------------------------------------------------
# the symplectic structure


@dataclass(frozen=True, eq=False)
class SymplecticStructure:
    """``Omega = omega + sigma ^ dt`` with its volume forms.

    Iterating yields ``(Omega, rho, mu, mu_M)``.
    """

    Omega: Form
    rho: Expression
    mu: Form
    mu_M: Form
    omega: Form
    sigma: Form
    checks: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.Omega, self.rho, self.mu, self.mu_M))


def _symplectic_from(B: VectorField, v: VectorField, phi: Expression) -> tuple:
    omega = Form.spatial_two_form(B.spatial_components)
    sigma = interior_product(v, omega) - d_spatial(Form.scalar(phi))
    return omega, sigma, omega + wedge(sigma, dt)


def build_symplectic(s: FlowScenario) -> SymplecticStructure:
    g = s.retained
    omega, sigma, Omega = _symplectic_from(s.B, s.v, s.phi)
    mu = wedge(Omega, Omega).scale(ex.const(0.5))
    mu_M = interior_product(VectorField.coordinate("t"), mu)
    ts, tp = s.tol(STRUCTURAL), s.tol(PIPELINE)
    ham = interior_product(s.suspended, Omega)
    dphi = d(Form.scalar(s.phi))
    plus = residual_check("symplectic.hamiltonian", "symp2", ham - dphi, g, ts)
    minus = residual_check("symplectic.hamiltonian", "symp2", ham + dphi, g, ts)
    if minus.max is not None and plus.max is not None and minus.max < plus.max:
        ham_check, sgn = minus, -1
    else:
        ham_check, sgn = plus, +1
    ham_check.note = f"i(d_t+v)Omega = {'+' if sgn > 0 else '-'}d(phi)"
    checks = [
        residual_check("symplectic.closed", "symp2", d(Omega), g, ts),
        ham_check,
        residual_check("symplectic.volume", "vol", mu - spacetime_volume(s.rho), g, ts),
        residual_check("symplectic.spatial_volume", "mum", mu_M - spatial_volume(s.rho), g, ts),
        residual_check("symplectic.invariant", "vol", lie_derivative_form(s.suspended, Omega), g, tp),
    ]
    return SymplecticStructure(Omega, s.rho, mu, mu_M, omega, sigma, checks)


def check_symmetry(U: VectorField, s: FlowScenario) -> VerificationReport:
    """Is ``U = xi d_t + u`` an infinitesimal symmetry of ``d_t + v``?"""
    X = s.suspended
    xi = U.t
    rate = ex.add(ex.differentiate(xi, "t"), s.v(xi))
    residual = lie_bracket(X, U) - X.scale(rate)
    rep = VerificationReport(s.name)
    c = residual_check("symmetry.bracket", "symm", residual, s.grid, s.tol(PIPELINE))
    c.note = "symmetry" if c.passed else "not a symmetry"
    rep.add(c)
    return rep


# ---------------------------------------------------------------------------
# the symmetry hierarchy


@dataclass(frozen=True, eq=False)
class Hierarchy:
    """``u0`` and the lists ``W[k-1], h[k-1], xi[k-1]`` for ``k = 1..depth``.

    ``sign`` is the orientation ``s`` with ``W_k = s rho^-1 grad(phi) x grad(h_k)``.
    """

    scenario: FlowScenario
    u0: VectorField
    W: tuple
    h: tuple
    xi: tuple
    sign: int
    checks: list = field(default_factory=list)
    sign_note: str = ""

    @property
    def depth(self) -> int:
        return len(self.W)

    def field(self, k: int) -> VectorField:
        """``W_k`` for ``k >= 1`` and ``u0`` for ``k = 0``."""
        if k == 0:
            return self.u0
        if not 1 <= k <= self.depth:
            raise IndexError(f"k={k} outside 0..{self.depth}")
        return self.W[k - 1]

    def hamiltonian(self, k: int) -> Expression:
        if not 1 <= k <= self.depth:
            raise IndexError(f"k={k} outside 1..{self.depth}")
        return self.h[k - 1]

    def oriented(self, f) -> VectorField:
        """``W_f = s rho^-1 grad(phi) x grad(f)`` for a function ``f``."""
        return curl_field(self.scenario, f).scale(ex.const(self.sign))


def _max_abs(obj, grid) -> float:
    from .forms import residual_norm
    return residual_norm(obj, grid)[0]


def _spatial_divergence(W: VectorField, mu_M: Form) -> Form:
    """Spatial Lie derivative ``d_M i(W) mu_M`` of the spatial volume."""
    return d_spatial(interior_product(W, mu_M))


def build_hierarchy(s: FlowScenario, depth: int = 2) -> Hierarchy:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    g = s.retained
    tp = s.tol(PIPELINE)
    cons = _max_abs(s.conserved(s.h1), g)
    if cons > tp:
        raise NotConservedError(f"h1 = {ex.to_text(s.h1)} is not conserved (residual {cons:.3e})")
    rho = s.rho
    u0 = s.B.scale(ex.neg(ex.div(ONE, rho)))
    gh1 = gradient(s.h1)
    W1 = VectorField.spatial(*(ex.div(c, rho) for c in cross(gh1, gradient(s.phi))))
    W = [W1]
    xi1 = ex.neg(u0(s.h1))
    h = [s.h1]
    for k in range(2, depth + 1):
        W.append(lie_bracket(W1, W[-1] if k > 2 else u0))
        h.append(xi1 if k == 2 else W1(h[-1]))
    xi = [ex.neg(u0(hk)) for hk in h]

    # the orientation comes from the first nonzero bracket-generated field
    sign, note = -1, "default: no nonzero bracket-generated field"
    for k in range(2, depth + 1):
        Wk, Xk = W[k - 1], curl_field(s, h[k - 1])
        if _max_abs(Wk, g) <= tp:
            continue
        plus, minus = _max_abs(Wk - Xk, g), _max_abs(Wk + Xk, g)
        sign = 1 if plus < minus else -1
        note = f"resolved from W_{k}"
        break

    H = Hierarchy(s, u0, tuple(W), tuple(h), tuple(xi), sign, [], note)
    X = s.suspended
    mu_M = s.mu_M
    checks = H.checks
    checks.append(residual_check("hierarchy.symmetry[0]", "fluid", lie_bracket(X, u0), g, tp))
    checks.append(residual_check("hierarchy.divfree[0]", "mum", _spatial_divergence(u0, mu_M), g, tp))
    for k in range(1, depth + 1):
        Wk, hk, xik = W[k - 1], h[k - 1], xi[k - 1]
        curl_k = H.oriented(hk)
        clebsch = cross(gradient(s.phi), gradient(hk))
        clebsch = VectorField.spatial(*(ex.mul(ex.const(sign), c) for c in clebsch))
        omega_k = d_spatial(Form.spatial_one_form(
            [ex.mul(ex.const(-sign), ex.mul(s.phi, c)) for c in gradient(hk)]))
        checks += [
            residual_check(f"hierarchy.symmetry[{k}]", "uvw", lie_bracket(X, Wk), g, tp),
            residual_check(f"hierarchy.divfree[{k}]", "mum", _spatial_divergence(Wk, mu_M), g, tp),
            residual_check(f"hierarchy.curl[{k}]", "vert", Wk - curl_k, g, tp),
            residual_check(f"hierarchy.clebsch[{k}]", "cle", Wk.scale(rho) - clebsch, g, tp),
            residual_check(f"hierarchy.curl_by_volume[{k}]", "hamw",
                           interior_product(Wk, mu_M) + omega_k, g, tp),
            residual_check(f"hierarchy.h_conserved[{k}]", "hwk", s.conserved(hk), g, tp),
            residual_check(f"hierarchy.xi_conserved[{k}]", "hwk", s.conserved(xik), g, tp),
        ]
    return H


def nambu_bracket(f, g, s: FlowScenario) -> Expression:
    """``{f, g}_phi = rho^-1 grad(phi) . (grad f x grad g)``."""
    f, g = as_expression(f), as_expression(g)
    trip = dot(gradient(s.phi), cross(gradient(f), gradient(g)))
    return ex.div(trip, s.rho)


def bracket_closure(s: FlowScenario, H: Hierarchy, k: int, l: int) -> tuple:
    """``(W_kl, h_kl, report)`` with ``h_kl = {h_k, h_l}`` and ``W_kl = W_{h_kl}``.

    The report checks ``[W_k, W_l] + W_kl = 0``, antisymmetry of ``h_kl`` and
    conservation of ``h_kl``.
    """
    g = s.retained
    tp = s.tol(PIPELINE)
    hk, hl = H.hamiltonian(k), H.hamiltonian(l)
    h_kl = nambu_bracket(hk, hl, s)
    h_lk = nambu_bracket(hl, hk, s)
    W_kl = H.oriented(h_kl)
    rep = VerificationReport(s.name, sign=H.sign)
    tag = f"[{k},{l}]"
    rep.extend([
        residual_check("closure.lie_algebra" + tag, "lai",
                       lie_bracket(H.field(k), H.field(l)) + W_kl, g, tp),
        residual_check("closure.antisymmetry" + tag, "hkl", ex.add(h_kl, h_lk), g, s.tol(STRUCTURAL)),
        residual_check("closure.conserved" + tag, "hkl", s.conserved(h_kl), g, tp),
    ])
    return W_kl, h_kl, rep


# ---------------------------------------------------------------------------
# Euler flows


@dataclass(frozen=True, eq=False)
class EulerData:
    theta: Form
    Omega: Form
    chi: Expression
    vorticity: VectorField


def euler_check(s: FlowScenario) -> tuple:
    """Potential ``theta`` of the Euler symplectic form and its report.

    The frozen-in field is the vorticity ``w = curl v``; ``phi`` is reused as
    the conserved function.  The relative invariance primitive is
    ``chi = p - v^2/2``.
    """
    if s.p is None:
        raise ScenarioError("euler checks need a pressure p")
    v, p, phi = s.v, s.p, s.phi
    g = s.grid
    tp = s.tol(PIPELINE)
    X = s.suspended
    w = curl(v)
    vsq = dot(v.spatial_components, v.spatial_components)
    half_vsq = ex.mul(ex.const(0.5), vsq)
    vflat = musical_flat(v)
    theta = Form.one_form([ex.add(ex.add(phi, p), half_vsq), *(ex.neg(c) for c in v.spatial_components)])
    _, _, Omega = _symplectic_from(w, v, phi)
    chi = ex.sub(p, half_vsq)

    accel = [ex.add(ex.add(ex.differentiate(vi, "t"), v(vi)), gp)
             for vi, gp in zip(v.spatial_components, gradient(p))]
    TO = wedge(theta, Omega)
    checks = [
        residual_check("euler.momentum", "rel", accel, g, tp),
        residual_check("euler.vorticity_frozen", "vort",
                       VectorField([ZERO, *(ex.differentiate(c, "t") for c in w.spatial_components)])
                       + lie_bracket(v, w), g, tp),
        residual_check("euler.curl", "vort",
                       d_spatial(vflat) - interior_product(w, spatial_volume()), g, s.tol(STRUCTURAL)),
        residual_check("euler.omega_invariant", "prop4", lie_derivative_form(X, Omega), g, tp),
        residual_check("euler.potential", "prop4", Omega + d(theta), g, tp),
        residual_check("euler.helicity_identity", "prop4", d(TO) + wedge(Omega, Omega), g, tp),
        residual_check("euler.relative_theta", "echi",
                       lie_derivative_form(X, theta) - d(Form.scalar(chi)), g, tp,
                       note="primitive p - v^2/2"),
        residual_check("euler.relative_theta_omega", "echi",
                       lie_derivative_form(X, TO) - d(Omega.scale(chi)), g, tp),
    ]
    rep = VerificationReport(s.name)
    rep.extend(checks)
    return theta, rep


# ---------------------------------------------------------------------------
# helicity integral


def abc_flow(A: float = 1.0, B: float = 1.0, C: float = 1.0) -> VectorField:
    """Arnold-Beltrami-Childress field; ``curl v = v``."""
    s, c = ex.sin, ex.cos
    X, Y, Z = ex.X, ex.Y, ex.Z
    a, b, cc = ex.const(A), ex.const(B), ex.const(C)
    return VectorField.spatial(
        ex.add(ex.mul(a, s(Z)), ex.mul(cc, c(Y))),
        ex.add(ex.mul(b, s(X)), ex.mul(a, c(Z))),
        ex.add(ex.mul(cc, s(Y)), ex.mul(b, c(X))),
    )


def helicity_integral(v, resolution: int = 64, t: float = 0.0) -> float:
    """Midpoint-rule value of ``int v . curl v dV`` over the periodic box ``[0, 2 pi)^3``."""
    if isinstance(v, FlowScenario):
        v = v.v
    if int(resolution) != resolution or resolution < 16:
        raise ValueError("resolution must be an integer >= 16")
    resolution = int(resolution)
    h = 2 * math.pi / resolution
    axis = (np.arange(resolution) + 0.5) * h
    X, Y, Z = np.meshgrid(axis, axis, axis, indexing="ij")
    env = {"t": np.full(X.shape, float(t)), "x": X, "y": Y, "z": Z}
    density = dot(v.spatial_components, curl(v).spatial_components)
    vals = np.broadcast_to(ex.evaluate_array(density, env), X.shape)
    return float(vals.sum() * h ** 3)
