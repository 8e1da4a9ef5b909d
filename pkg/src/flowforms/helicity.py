"""Invariant two-forms, their potentials, gauge classes and helicity densities."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .expr import Expression, ZERO, as_expression
from .fluid import FlowScenario, Hierarchy, build_symplectic
from .forms import (
    Form,
    SampleGrid,
    VectorField,
    cross,
    d,
    d_spatial,
    dot,
    dt,
    evaluate_components,
    gradient,
    interior_product,
    lie_derivative_form,
    residual_norm,
    wedge,
)
from .report import PIPELINE, STRUCTURAL, Check, residual_check

__all__ = [
    "RelativeClassWarning",
    "InvariantTwoForm",
    "PotentialOneForm",
    "HelicityDensity",
    "invariant_two_form",
    "potential_one_form",
    "gauge_transform",
    "helicity_three_form",
    "lagrangian_residual",
    "eulerian_residual",
    "advective_residual",
    "tangency_residual",
    "density_checks",
    "sigma_form",
]


class RelativeClassWarning(UserWarning):
    """A Lagrangian residual was requested for a relatively invariant potential."""


@dataclass(frozen=True, eq=False)
class InvariantTwoForm:
    k: int
    Theta: Form
    omega: Form
    W: VectorField
    checks: list = field(default_factory=list)


def _bigt(s: FlowScenario, W: VectorField) -> Form:
    """``-rho (W . dS + (W x v) . dx ^ dt)``."""
    Wc = W.spatial_components
    spatial = Form.spatial_two_form(Wc)
    mixed = wedge(Form.spatial_one_form(cross(Wc, s.v.spatial_components)), dt)
    return (spatial + mixed).scale(ex.neg(s.rho))


def invariant_two_form(s: FlowScenario, H: Hierarchy, k: int) -> InvariantTwoForm:
    """``Theta_k = omega_k + i(v)(omega_k) ^ dt`` with ``omega_k = -i(W_k)(mu_M)``.

    ``k = 0`` uses ``W_0 = u0``, for which ``omega_0`` is the frozen-in
    two-form itself.  The three equivalent constructions are cross-checked.
    """
    g = s.retained
    ts, tp = s.tol(STRUCTURAL), s.tol(PIPELINE)
    W = H.field(k)
    omega = -interior_product(W, s.mu_M)
    Theta = omega + wedge(interior_product(s.v, omega), dt)
    X = s.suspended
    tag = f"[{k}]"
    checks = [residual_check("theta2.components" + tag, "bigt", Theta - _bigt(s, W), g, tp)]
    if k >= 1:
        clebsch = wedge(d(Form.scalar(s.phi)), d(Form.scalar(H.hamiltonian(k)))).scale(ex.const(-H.sign))
        checks.append(residual_check("theta2.clebsch" + tag, "bigtot", Theta - clebsch, g, tp))
    checks += [
        residual_check("theta2.closed" + tag, "bigto", d(Theta), g, ts),
        residual_check("theta2.annihilates" + tag, "bigto", interior_product(X, Theta), g, tp),
        residual_check("theta2.invariant" + tag, "bigto", lie_derivative_form(X, Theta), g, tp),
        residual_check("theta2.spatial_closed" + tag, "hamw", d_spatial(omega), g, ts),
    ]
    for l in range(1, H.depth + 1):
        other = Theta if l == k else _clebsch_theta(s, H, l)
        checks.append(residual_check(f"theta2.degenerate[{k},{l}]", "deg", wedge(Theta, other), g, ts))
    return InvariantTwoForm(k, Theta, omega, W, checks)


def _clebsch_theta(s, H, l):
    return wedge(d(Form.scalar(s.phi)), d(Form.scalar(H.hamiltonian(l)))).scale(ex.const(-H.sign))


@dataclass(frozen=True, eq=False)
class PotentialOneForm:
    """``theta = -(psi dt + A) + d lambda`` for one of the canonical solutions."""

    k: int
    orientation: str
    psi: Expression
    A: tuple
    gauge: Expression
    chi: Expression
    theta: Form
    W: VectorField
    scenario: FlowScenario = field(repr=False)
    checks: list = field(default_factory=list)

    @property
    def a(self) -> tuple:
        """``grad(lambda) - A``."""
        return tuple(ex.sub(gl, Ai) for gl, Ai in zip(gradient(self.gauge), self.A))

    @property
    def chi_residual(self) -> float:
        return _class_residual(self.chi, self.scenario.retained)

    @property
    def gauge_class(self) -> str:
        return "absolute" if self.chi_residual <= self.scenario.tol(PIPELINE) else "relative"


def _class_residual(chi: Expression, grid: SampleGrid) -> float:
    """Max deviation of ``chi`` from its grid mean.

    Conserved functions differing by a constant (or a term linear in ``t``
    that integrates to one) are identified.
    """
    if chi.is_number(0.0):
        return 0.0
    vals = evaluate_components([chi], grid)[0]
    return float(np.max(np.abs(vals - vals.mean())))


def potential_one_form(s: FlowScenario, H: Hierarchy, k: int, orientation: str = "plus",
                       gauge=None) -> PotentialOneForm:
    """Canonical potentials ``theta_k^+ = phi dh_k`` and ``theta_k^- = -h_k dphi``.

    Both are scaled by ``-s`` so that ``d theta = Theta_k`` for the
    resolved orientation ``s``; an optional gauge function is added.
    """
    if orientation not in ("plus", "minus"):
        raise ValueError("orientation must be 'plus' or 'minus'")
    phi, hk = s.phi, H.hamiltonian(k)
    c = ex.const(-H.sign)
    if orientation == "plus":
        psi = ex.mul(c, ex.neg(ex.mul(phi, ex.differentiate(hk, "t"))))
        A = tuple(ex.mul(c, ex.neg(ex.mul(phi, gk))) for gk in gradient(hk))
    else:
        psi = ex.mul(c, ex.mul(hk, ex.differentiate(phi, "t")))
        A = tuple(ex.mul(c, ex.mul(hk, gp)) for gp in gradient(phi))
    base = -Form.one_form([psi, *A])
    P = PotentialOneForm(k, orientation, psi, A, ZERO, ZERO, base, H.field(k), s, [])
    g = s.retained
    X = s.suspended
    tag = f"[{k},{orientation}]"
    P.checks.extend([
        residual_check("potential.exact" + tag, "steta", d(base) - _clebsch_theta(s, H, k), g, s.tol(STRUCTURAL)),
        residual_check("potential.kernel" + tag, "kerv", interior_product(X, base), g, s.tol(PIPELINE)),
        residual_check("potential.clebsch" + tag, "psi",
                       [ex.sub(ex.mul(s.rho, w), cc) for w, cc in
                        zip(P.W.spatial_components, _curl3(A))], g, s.tol(PIPELINE)),
    ])
    if gauge is not None:
        return gauge_transform(P, gauge)
    return P


def _curl3(A):
    ax, ay, az = A
    D = ex.differentiate
    return (ex.sub(D(az, "y"), D(ay, "z")), ex.sub(D(ax, "z"), D(az, "x")), ex.sub(D(ay, "x"), D(ax, "y")))


def gauge_transform(P: PotentialOneForm, lam) -> PotentialOneForm:
    """``theta + d lambda`` with ``chi = lambda_t + v(lambda)`` accumulated."""
    lam = as_expression(lam)
    s = P.scenario
    gauge = ex.add(P.gauge, lam)
    chi = s.conserved(gauge)
    theta = P.theta + d(Form.scalar(lam))
    Q = PotentialOneForm(P.k, P.orientation, P.psi, P.A, gauge, chi, theta, P.W, s, list(P.checks))
    g = s.retained
    tag = f"[{P.k},{P.orientation},{ex.to_text(gauge)}]"
    Q.checks.append(residual_check("gauge.relative" + tag, "chi",
                                   lie_derivative_form(s.suspended, theta) - d(Form.scalar(chi)),
                                   g, s.tol(PIPELINE)))
    c = Check("gauge.class" + tag, "aclass" if Q.gauge_class == "absolute" else "rclass",
              Q.chi_residual, None, s.tol(PIPELINE), g.excluded,
              expect="zero" if Q.gauge_class == "absolute" else "nonzero",
              note=f"class {Q.gauge_class}")
    Q.checks.append(c)
    return Q


@dataclass(frozen=True, eq=False)
class HelicityDensity:
    k: int
    l: int
    H: Expression
    three_form: Form
    potential: PotentialOneForm
    W_l: VectorField
    checks: list = field(default_factory=list)

    @property
    def gauge_class(self) -> str:
        return self.potential.gauge_class


def helicity_three_form(P: PotentialOneForm, T: InvariantTwoForm) -> HelicityDensity:
    """``theta_k ^ Theta_l`` and ``H_kl = rho a_k . W_l``.

    ``H_kl`` is minus the ``dx^dy^dz`` coefficient of the three-form.
    """
    s = P.scenario
    g = s.retained
    TF = wedge(P.theta, T.Theta)
    H = ex.neg(TF[(1, 2, 3)])
    heden = ex.mul(s.rho, dot(P.a, T.W.spatial_components))
    heden_split = ex.mul(s.rho, ex.sub(T.W(P.gauge), dot(P.A, T.W.spatial_components)))
    tag = f"[{P.k},{T.k},{P.orientation}]"
    checks = [
        residual_check("density.formula" + tag, "heden", ex.sub(H, heden), g, s.tol(PIPELINE)),
        residual_check("density.split" + tag, "heden", ex.sub(H, heden_split), g, s.tol(PIPELINE)),
        residual_check("density.closed" + tag, "hec", d(TF), g, s.tol(STRUCTURAL)),
    ]
    if P.orientation == "minus" and P.gauge.is_number(0.0):
        checks.append(residual_check("density.minus_vanishes" + tag, "three", TF, g, 1e-12))
    return HelicityDensity(P.k, T.k, H, TF, P, T.W, checks)


def lagrangian_residual(D: HelicityDensity, s: FlowScenario | None = None) -> tuple:
    """``(max, rms)`` of ``H_t + v . grad H``."""
    s = s or D.potential.scenario
    if D.gauge_class == "relative":
        warnings.warn(f"density [{D.k},{D.l}] comes from a relatively invariant potential; "
                      "its Lagrangian residual is expected to be nonzero", RelativeClassWarning,
                      stacklevel=2)
    return residual_norm(s.conserved(D.H), s.retained)


def _eulerian(D, s):
    chi = D.potential.chi
    flux = [ex.sub(ex.mul(D.H, vi), ex.mul(ex.mul(s.rho, chi), wi))
            for vi, wi in zip(s.v.spatial_components, D.W_l.spatial_components)]
    out = ex.differentiate(D.H, "t")
    for f, c in zip(flux, ("x", "y", "z")):
        out = ex.add(out, ex.differentiate(f, c))
    return out


def _advective(D, s):
    return ex.sub(s.conserved(D.H), ex.mul(s.rho, D.W_l(D.potential.chi)))


def eulerian_residual(D: HelicityDensity, s: FlowScenario | None = None) -> tuple:
    """``(max, rms)`` of ``H_t + div(H v - rho chi W_l)``."""
    s = s or D.potential.scenario
    return residual_norm(_eulerian(D, s), s.retained)


def advective_residual(D: HelicityDensity, s: FlowScenario | None = None) -> tuple:
    """``(max, rms)`` of ``H_t + v . grad H - rho W_l(chi)``."""
    s = s or D.potential.scenario
    return residual_norm(_advective(D, s), s.retained)


def tangency_residual(D: HelicityDensity, s: FlowScenario | None = None) -> tuple:
    """``(max of |W_l(chi)|, max of the Lagrangian residual of W_l(lambda))``.

    When ``W_l`` is tangent to the level sets of ``chi`` both vanish.
    """
    s = s or D.potential.scenario
    g = s.retained
    P = D.potential
    return residual_norm(D.W_l(P.chi), g)[0], residual_norm(s.conserved(D.W_l(P.gauge)), g)[0]


def density_checks(D: HelicityDensity, s: FlowScenario | None = None) -> list:
    """Conservation-law checks of a density, classified by its gauge class."""
    s = s or D.potential.scenario
    g = s.retained
    tp = s.tol(PIPELINE)
    P = D.potential
    tag = f"[{D.k},{D.l},{P.orientation}" + ("]" if P.gauge.is_number(0.0) else f",{ex.to_text(P.gauge)}]")
    absolute = D.gauge_class == "absolute"
    # a relative density stays Lagrangian where W_l is tangent to the level sets of chi
    source = residual_norm(ex.mul(s.rho, D.W_l(D.potential.chi)), g)[0]
    tangent = source <= tp
    lag = residual_check("density.lagrangian" + tag, "laco", s.conserved(D.H), g, tp,
                         expect="zero" if absolute or tangent else "nonzero")
    eul = residual_check("density.eulerian" + tag, "eco", _eulerian(D, s), g, tp)
    adv = residual_check("density.advective" + tag, "ecoo", _advective(D, s), g, tp)
    if not absolute:
        if tangent:
            lag.note = "W_l tangent to level sets of chi"
        elif lag.max is not None and lag.max > tp and eul.passed:
            eul.note = "kinematical distinction verified"
    return [lag, eul, adv]


def sigma_form(s: FlowScenario, H: Hierarchy, k: int) -> tuple:
    """``(Sigma_k, checks)`` with ``Sigma_k = L_{W_k}(Omega) = dphi ^ dxi_k``."""
    Omega = build_symplectic(s).Omega
    g = s.retained
    Sigma = lie_derivative_form(H.field(k), Omega)
    xi = H.xi[k - 1]
    expected = wedge(d(Form.scalar(s.phi)), d(Form.scalar(xi)))
    tag = f"[{k}]"
    checks = [
        residual_check("sigma.formula" + tag, "sigma", Sigma - expected, g, s.tol(PIPELINE)),
        residual_check("sigma.closed" + tag, "sigma", d(Sigma), g, s.tol(STRUCTURAL)),
        residual_check("sigma.invariant" + tag, "sigma", lie_derivative_form(s.suspended, Sigma), g,
                       s.tol(PIPELINE)),
    ]
    return Sigma, checks
