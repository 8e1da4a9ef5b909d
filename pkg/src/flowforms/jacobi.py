"""Symplectic extensions of the invariant two-forms, their bivectors, and the
conformally symplectic / Jacobi structures built from them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .expr import Expression, ONE, ZERO, as_expression
from .fluid import FlowScenario, Hierarchy, NotConservedError, ScenarioError, build_symplectic
from .forms import (
    Form,
    Multivector,
    SampleGrid,
    VectorField,
    bivector_from_matrix,
    bivector_matrix,
    bivector_pair,
    contract_bivector,
    cross,
    d,
    d_spatial,
    dot,
    dt,
    evaluate_components,
    form_matrix,
    gradient,
    interior_product,
    inverse_bivector,
    lie_derivative_bivector,
    lie_derivative_form,
    pfaffian,
    residual_norm,
    spacetime_volume,
    vector_wedge_bivector,
    wedge,
)
from .helicity import invariant_two_form, potential_one_form
from .report import PIPELINE, STRUCTURAL, Check, residual_check

__all__ = [
    "DegenerateExtensionError",
    "SingularMatrixError",
    "SymplecticExtension",
    "ConformalPair",
    "JacobiPair",
    "extend_symplectic",
    "extension_identity",
    "invert_to_bivector",
    "bivector_checks",
    "closed_form_bivector",
    "conformal_pair",
    "jacobi_pair",
    "schouten_bracket",
    "schouten_vector",
    "jacobi_bracket",
    "hamiltonian_vector_field",
    "leibniz_defect",
    "jacobi_identity",
]


class DegenerateExtensionError(ScenarioError):
    pass


class SingularMatrixError(ArithmeticError):
    def __init__(self, message: str, point: dict | None = None):
        super().__init__(message)
        self.point = point


@dataclass(frozen=True, eq=False)
class SymplecticExtension:
    """``Omega_k = Theta_k + eta_k ^ dt`` with ``eta_k = -d_M phi_k``.

    ``grid`` is the retained scenario grid minus the points where
    ``|W_k . n_k|`` is below the non-degeneracy floor.  ``theta_tilde`` is
    ``phi_k dt - theta_k`` (absent for ``k = 0``).
    """

    scenario: FlowScenario
    hierarchy: Hierarchy
    k: int
    phi_k: Expression
    Theta: Form
    Omega: Form
    eta: Form
    n: tuple
    W: VectorField
    theta: Form | None
    theta_tilde: Form | None
    P: Multivector
    grid: SampleGrid
    checks: list = field(default_factory=list)

    @property
    def nondegeneracy(self) -> Expression:
        """``W_k . n_k``."""
        return dot(self.W.spatial_components, self.n)


def extend_symplectic(s: FlowScenario, H: Hierarchy, k: int, phi_k=None,
                      floor: float = 1e-6) -> SymplecticExtension:
    """Extend ``Theta_k`` by a conserved Hamiltonian ``phi_k``.

    ``k = 0`` with ``phi_0 = phi`` reproduces the frozen-in symplectic form.
    Without ``phi_k`` the scenario's ``phi_k[k-1]`` is used.
    """
    if phi_k is None:
        if k == 0:
            phi_k = s.phi
        elif k <= len(s.phi_k):
            phi_k = s.phi_k[k - 1]
        else:
            raise ScenarioError(f"no extension Hamiltonian phi_{k} given")
    phi_k = as_expression(phi_k)
    g0 = s.retained
    tp, ts = s.tol(PIPELINE), s.tol(STRUCTURAL)
    cons = residual_norm(s.conserved(phi_k), g0)[0]
    if cons > tp:
        raise NotConservedError(f"phi_{k} = {ex.to_text(phi_k)} is not conserved (residual {cons:.3e})")
    T = invariant_two_form(s, H, k)
    eta = -d_spatial(Form.scalar(phi_k))
    n = tuple(ex.neg(c) for c in gradient(phi_k))
    Omega = T.Theta + wedge(eta, dt)
    W = H.field(k)
    wn = dot(W.spatial_components, n)
    vals = evaluate_components([wn], g0)[0]
    low = ~(np.abs(vals) >= floor)
    if low.all():
        raise DegenerateExtensionError(
            f"W_{k} . n_{k} is below {floor:g} at every sample point; phi_{k} = {ex.to_text(phi_k)} "
            "is not independent of phi and h_k")
    grid = g0.exclude(low)
    X = s.suspended
    if k >= 1:
        theta = potential_one_form(s, H, k, "plus").theta
        theta_tilde = Form.one_form([phi_k, ZERO, ZERO, ZERO]) - theta
    else:
        theta = theta_tilde = None
    P = inverse_bivector(Omega)
    ext = SymplecticExtension(s, H, k, phi_k, T.Theta, Omega, eta, n, W, theta, theta_tilde, P, grid)
    tag = f"[{k}]"
    checks = ext.checks
    checks += [
        Check("extension.nondegenerate" + tag, "omek", 0.0, 0.0, ts, grid.excluded,
              note=f"|W.n| >= {floor:g} on {grid.size} points, min {np.abs(vals[~low]).min():.3e}"),
        residual_check("extension.pfaffian" + tag, "omek",
                       wedge(Omega, Omega).scale(ex.const(0.5)) - spacetime_volume(ex.mul(s.rho, wn)),
                       grid, tp, note="1/2 Omega_k^Omega_k = rho W.n dt^dx^dy^dz"),
        residual_check("extension.closed" + tag, "omk", d(Omega), grid, ts),
        residual_check("extension.hamiltonian" + tag, "hamk",
                       interior_product(X, Omega) - d(Form.scalar(phi_k)), grid, tp),
        residual_check("extension.invariant" + tag, "cinv", lie_derivative_form(X, Omega), grid, tp),
    ]
    if k == 0:
        checks.append(residual_check("extension.reproduces[0]", "hamk",
                                     Omega - build_symplectic(s).Omega, grid, ts))
    else:
        checks += [
            residual_check("extension.potential" + tag, "omk", Omega + d(theta_tilde), grid, tp),
            residual_check("extension.same_invariance" + tag, "omk",
                           lie_derivative_form(X, theta_tilde) - lie_derivative_form(X, theta), grid, ts),
        ]
        checks.append(extension_identity(ext, ext))
    checks += bivector_checks(ext)
    return ext


def extension_identity(ext_k: SymplecticExtension, ext_l: SymplecticExtension) -> Check:
    """``d(theta~_k ^ Omega_l) + Omega_k ^ Omega_l = 0``."""
    s = ext_k.scenario
    if ext_k.theta_tilde is None:
        raise ValueError("k = 0 has no canonical one-form")
    res = d(wedge(ext_k.theta_tilde, ext_l.Omega)) + wedge(ext_k.Omega, ext_l.Omega)
    return residual_check(f"extension.identity[{ext_k.k},{ext_l.k}]", "omk", res, s.retained,
                          s.tol(PIPELINE))


# ---------------------------------------------------------------------------
# bivectors


def _matrices(M, grid: SampleGrid) -> np.ndarray:
    """Numeric values of a 4x4 expression matrix, shape ``(points, 4, 4)``."""
    flat = [M[i][j] for i in range(4) for j in range(4)]
    vals = evaluate_components(flat, grid)
    return vals.T.reshape(grid.size, 4, 4)


def invert_to_bivector(a, grid: SampleGrid | None = None, floor: float = 1e-12) -> Multivector:
    """Symbolic bivector inverse of a non-degenerate two-form.

    ``a`` is a :class:`SymplecticExtension` or a plain two-form.  The
    Pfaffian is sampled on ``grid`` and a :class:`SingularMatrixError`
    names the first point where it vanishes.
    """
    if isinstance(a, SymplecticExtension):
        grid = grid or a.grid
        a = a.Omega
    if grid is None:
        grid = SampleGrid()
    pf = evaluate_components([pfaffian(a)], grid)[0]
    bad = ~(np.abs(pf) > floor)
    if bad.any():
        pts = grid.points()
        i = int(np.flatnonzero(bad)[0])
        point = {c: float(pts[c][i]) for c in pts}
        raise SingularMatrixError(f"two-form is degenerate at {point}", point)
    return inverse_bivector(a)


def closed_form_bivector(ext: SymplecticExtension) -> Multivector:
    """``-(W.n)^-1 [W.grad ^ d_t + (W x v - n/rho) . grad ^ grad]``."""
    s = ext.scenario
    Wc = ext.W.spatial_components
    U = [ex.sub(c, ex.div(ni, s.rho)) for c, ni in zip(cross(Wc, s.v.spatial_components), ext.n)]
    comps = {(i + 1, 0): Wc[i] for i in range(3)}
    comps.update({(2, 3): U[0], (3, 1): U[1], (1, 2): U[2]})
    return Multivector(2, comps).scale(ex.neg(ex.div(ONE, ext.nondegeneracy)))


def bivector_checks(ext: SymplecticExtension) -> list:
    """Cross-validate the symbolic inverse against numeric inversion and the
    closed form, and check the Hamiltonian relation ``P_k(dphi_k) = d_t + v``."""
    g = ext.grid
    s = ext.scenario
    tp = s.tol(PIPELINE)
    tag = f"[{ext.k}]"
    A = _matrices(form_matrix(ext.Omega), g)
    Psym = _matrices(bivector_matrix(ext.P), g)
    checks = []
    try:
        Pnum = np.linalg.inv(A)
        scale = 1.0 + np.abs(Pnum)
        err = np.abs(Psym - Pnum) / scale
        checks.append(Check("bivector.numeric" + tag, "bik", float(err.max()),
                            float(np.sqrt(np.mean(err ** 2))), tp, g.excluded,
                            note="relative to 1 + |P|"))
    except np.linalg.LinAlgError as e:
        checks.append(Check("bivector.numeric" + tag, "bik", None, None, tp, g.excluded, note=str(e)))
    eye = np.abs(np.einsum("nij,njk->nik", A, Psym) - np.eye(4))
    checks.append(Check("bivector.identity" + tag, "bik", float(eye.max()),
                        float(np.sqrt(np.mean(eye ** 2))), tp, g.excluded))
    closed = _matrices(bivector_matrix(closed_form_bivector(ext)), g)
    rel = np.abs(closed - Psym) / (1.0 + np.abs(Psym))
    checks.append(Check("bivector.closed_form" + tag, "bik", float(rel.max()),
                        float(np.sqrt(np.mean(rel ** 2))), tp, g.excluded, note="relative to 1 + |P|"))
    ham = contract_bivector(ext.P, d(Form.scalar(ext.phi_k))) - s.suspended
    checks.append(residual_check("bivector.hamiltonian" + tag, "hamk", ham, g, tp))
    return checks


def schouten_bracket(L1: Multivector, L2: Multivector) -> Multivector:
    """Schouten bracket of two bivectors.

    ``[L, L]^{abc} = 2 cyc(L^{ab}_{,l} L^{lc})`` at ``a < b < c``, which makes a
    Jacobi pair satisfy ``[L, L] = 2 E ^ L``.
    """
    D = ex.differentiate
    names = ex.COORDINATES

    def term(A, B, a, b, c):
        out = ZERO
        for l in range(4):
            Bl = B[(l, c)]
            if Bl.is_number(0.0):
                continue
            out = ex.add(out, ex.mul(D(A[(a, b)], names[l]), Bl))
        return out

    comps = {}
    for a, b, c in itertools.combinations(range(4), 3):
        val = ZERO
        for i, j, k in ((a, b, c), (b, c, a), (c, a, b)):
            val = ex.add(val, ex.add(term(L1, L2, i, j, k), term(L2, L1, i, j, k)))
        comps[(a, b, c)] = val
    return Multivector(3, comps)


def schouten_vector(L: Multivector, E: VectorField) -> Multivector:
    """``[L, E] = L_E(L)``."""
    return lie_derivative_bivector(E, L)


# ---------------------------------------------------------------------------
# conformal and Jacobi pairs


def _level(phi_k):
    if isinstance(phi_k, SymplecticExtension):
        return phi_k.phi_k, phi_k.k
    return as_expression(phi_k), None


def _positive(phi, grid: SampleGrid, auto_shift: bool) -> tuple:
    vals = evaluate_components([phi], grid)[0]
    grads = evaluate_components(list(gradient(phi)) + [ex.differentiate(phi, "t")], grid)
    if not ex.free_variables(phi) or np.abs(grads).max() == 0.0:
        raise ScenarioError(f"phi_k = {ex.to_text(phi)} is constant")
    lo = float(vals.min())
    if lo > 0:
        return phi, 0.0
    if not auto_shift:
        raise ScenarioError(f"phi_k = {ex.to_text(phi)} is not positive on the grid (min {lo:.3e})")
    shift = float(np.ceil(1.0 - lo))
    return ex.add(phi, ex.const(shift)), shift


@dataclass(frozen=True, eq=False)
class ConformalPair:
    k: int | None
    l: int
    phi_k: Expression
    Omega: Form
    alpha: Form
    shift: float
    checks: list = field(default_factory=list)


def conformal_pair(ext_k, ext_l: SymplecticExtension, auto_shift: bool = True,
                   seed: int = 0, samples: int = 4) -> ConformalPair:
    """``Omega_kl = phi_k Omega_l`` and ``alpha_k = d log phi_k``.

    ``ext_k`` may be an extension or a bare conserved function.  A
    non-positive ``phi_k`` is shifted by a constant when ``auto_shift``.
    """
    s = ext_l.scenario
    g = ext_l.grid
    phi, k = _level(ext_k)
    phi, shift = _positive(phi, g, auto_shift)
    Omega_kl = ext_l.Omega.scale(phi)
    alpha = d(Form.scalar(ex.ln(phi)))
    tp, ts = s.tol(PIPELINE), s.tol(STRUCTURAL)
    tag = f"[{'f' if k is None else k},{ext_l.k}]"
    note = f"shift {shift:g}" if shift else ""
    checks = [
        residual_check("conformal.structure" + tag, "consym", d(Omega_kl) - wedge(alpha, Omega_kl), g, tp,
                       note=note),
        residual_check("conformal.alpha_closed" + tag, "consym", d(alpha), g, ts),
    ]
    # tangents to the level sets of phi_k: project random directions off grad(phi_k)
    rng = np.random.default_rng(seed)
    grad4 = [ex.differentiate(phi, c) for c in ex.COORDINATES]
    norm2 = dot(grad4, grad4)
    tangents = []
    for _ in range(samples):
        Y = [ex.const(float(c)) for c in rng.integers(-3, 4, size=4)]
        coef = ex.div(dot(Y, grad4), norm2)
        tangents.append(interior_product(VectorField([ex.sub(y, ex.mul(coef, gi)) for y, gi in zip(Y, grad4)]),
                                         alpha))
    checks.append(residual_check("conformal.level_sets" + tag, "okl",
                                 tangents, g, tp,
                                 note="alpha_k on level-set tangents"))
    return ConformalPair(k, ext_l.k, phi, Omega_kl, alpha, shift, checks)


@dataclass(frozen=True, eq=False)
class JacobiPair:
    """``Lambda = P_l / phi_k`` and ``E = -phi_k^-2 P_l(dphi_k)``."""

    k: int | None
    l: int
    phi_k: Expression
    Lambda: Multivector
    E: VectorField
    P_l: Multivector
    conformal: ConformalPair
    checks: list = field(default_factory=list)
    grid: SampleGrid | None = None


def jacobi_pair(ext_k, ext_l: SymplecticExtension, auto_shift: bool = True) -> JacobiPair:
    C = conformal_pair(ext_k, ext_l, auto_shift)
    s = ext_l.scenario
    g = ext_l.grid
    phi = C.phi_k
    P_l = ext_l.P
    Lam = P_l.scale(ex.div(ONE, phi))
    E = contract_bivector(P_l, d(Form.scalar(phi))).scale(ex.neg(ex.div(ONE, ex.power(phi, 2))))
    pair = JacobiPair(C.k, C.l, phi, Lam, E, P_l, C, [], g)
    tp = s.tol(PIPELINE)
    tag = f"[{'f' if C.k is None else C.k},{C.l}]"
    V1, _ = hamiltonian_vector_field(ONE, pair)
    pair.checks.extend([
        residual_check("jacobi.schouten" + tag, "jjac",
                       schouten_bracket(Lam, Lam) - vector_wedge_bivector(E, Lam).scale(ex.const(2.0)),
                       g, tp),
        residual_check("jacobi.schouten_vector" + tag, "jjac", schouten_vector(Lam, E), g, tp),
        residual_check("jacobi.unit_hamiltonian" + tag, "jacvec", V1 - E, g, tp),
        residual_check("jacobi.duality" + tag, "consym",
                       interior_product(E, C.Omega) + C.alpha, g, tp,
                       note="i(E)(Omega_kl) = -alpha_k"),
    ])
    return pair


def jacobi_bracket(f, g, pair: JacobiPair) -> Expression:
    """``{f, g} = Lambda(df, dg) + f E(g) - g E(f)``."""
    f, g = as_expression(f), as_expression(g)
    df, dg = d(Form.scalar(f)), d(Form.scalar(g))
    out = bivector_pair(pair.Lambda, df, dg)
    return ex.add(out, ex.sub(ex.mul(f, pair.E(g)), ex.mul(g, pair.E(f))))


def hamiltonian_vector_field(f, pair: JacobiPair) -> tuple:
    """``(V, residual)`` with ``V = Lambda(df) + f E`` and the residual
    ``V - P_l(d(f / phi_k))``."""
    f = as_expression(f)
    V = contract_bivector(pair.Lambda, d(Form.scalar(f))) + pair.E.scale(f)
    other = contract_bivector(pair.P_l, d(Form.scalar(ex.div(f, pair.phi_k))))
    return V, V - other


def leibniz_defect(f, g, h, pair: JacobiPair) -> Expression:
    """``{f, gh} - g{f, h} - h{f, g} - g h E(f)``; zero for every Jacobi pair."""
    f, g, h = (as_expression(a) for a in (f, g, h))
    lhs = ex.sub(ex.sub(jacobi_bracket(f, ex.mul(g, h), pair), ex.mul(g, jacobi_bracket(f, h, pair))),
                 ex.mul(h, jacobi_bracket(f, g, pair)))
    return ex.sub(lhs, ex.mul(ex.mul(g, h), pair.E(f)))


def jacobi_identity(f, g, h, pair: JacobiPair) -> Expression:
    """Cyclic sum ``{f,{g,h}} + {h,{f,g}} + {g,{h,f}}``."""
    br = lambda a, b: jacobi_bracket(a, b, pair)
    return ex.add(ex.add(br(f, br(g, h)), br(h, br(f, g))), br(g, br(h, f)))
