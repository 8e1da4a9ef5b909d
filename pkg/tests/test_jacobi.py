import numpy as np
import pytest

from flowforms import expr as ex
from flowforms.fluid import ScenarioError, build_hierarchy, build_symplectic
from flowforms.forms import (
    Form,
    Multivector,
    SampleGrid,
    VectorField,
    bivector_matrix,
    bivector_pair,
    contract_bivector,
    d,
    dt,
    dx,
    dy,
    dz,
    evaluate_components,
    form_matrix,
    interior_product,
    residual_norm,
    vector_wedge_bivector,
    wedge,
)
from flowforms.harness import load_scenario
from flowforms.jacobi import (
    DegenerateExtensionError,
    SingularMatrixError,
    conformal_pair,
    extend_symplectic,
    extension_identity,
    hamiltonian_vector_field,
    invert_to_bivector,
    jacobi_bracket,
    jacobi_identity,
    jacobi_pair,
    leibniz_defect,
    schouten_bracket,
    schouten_vector,
)
from flowforms.randomfields import random_polynomial, random_scalar

ROTATION = load_scenario("rotation")
H_ROT = build_hierarchy(ROTATION, 2)
EXT0 = extend_symplectic(ROTATION, H_ROT, 0)
EXT1 = extend_symplectic(ROTATION, H_ROT, 1)
PAIR = jacobi_pair(EXT1, EXT0)
SMALL = SampleGrid.uniform(4)


def rmax(obj, grid):
    return residual_norm(obj, grid)[0]


def scalar_max(e, grid):
    return rmax(Form.scalar(e), grid)


def random_bivector(rng):
    comps = {}
    for i in range(4):
        for j in range(i + 1, 4):
            if rng.random() < 0.6:
                comps[(i, j)] = random_polynomial(rng, degree=2, terms=3)
    return Multivector(2, comps)


# extensions


def test_zero_extension_reproduces_frozen_in_form():
    Omega = build_symplectic(ROTATION).Omega
    assert rmax(EXT0.Omega - Omega, ROTATION.grid) == 0
    assert all(c.ok for c in EXT0.checks), [c.line() for c in EXT0.checks if not c.ok]


def test_rotation_extension_invariants():
    g = EXT1.grid
    assert all(c.ok for c in EXT1.checks), [c.line() for c in EXT1.checks if not c.ok]
    assert rmax(d(EXT1.Omega), g) <= 1e-10
    ham = interior_product(ROTATION.suspended, EXT1.Omega) - d(Form.scalar(EXT1.phi_k))
    assert rmax(ham, g) <= 1e-9
    assert rmax(EXT1.Omega + d(EXT1.theta_tilde), g) <= 1e-9
    vals = evaluate_components([EXT1.nondegeneracy], g)[0]
    assert np.abs(vals).min() >= 1e-6


def test_extension_identity_pairs():
    for a, b in ((EXT1, EXT0), (EXT1, EXT1)):
        c = extension_identity(a, b)
        assert c.max <= 1e-9


def test_dependent_hamiltonian_is_degenerate():
    with pytest.raises(DegenerateExtensionError):
        extend_symplectic(ROTATION, H_ROT, 1, H_ROT.hamiltonian(1))


def test_paraboloid_hamiltonian_is_degenerate():
    # grad(z + x^2 + y^2) is orthogonal to the horizontal rotation W_1
    with pytest.raises(DegenerateExtensionError):
        extend_symplectic(ROTATION, H_ROT, 1, "z + x^2 + y^2")


def test_non_conserved_hamiltonian():
    with pytest.raises(ScenarioError):
        extend_symplectic(ROTATION, H_ROT, 1, "x")


def test_missing_hamiltonian():
    shear = load_scenario("shear")
    with pytest.raises(ScenarioError):
        extend_symplectic(shear, build_hierarchy(shear, 2), 1)


# bivectors


def test_canonical_form_inverse():
    Omega = wedge(dy, dz) + wedge(dz, dx) - wedge(dy, dt)
    P = invert_to_bivector(Omega, SMALL)
    A = evaluate_components([c for row in form_matrix(Omega) for c in row], SMALL)[:, 0].reshape(4, 4)
    B = evaluate_components([c for row in bivector_matrix(P) for c in row], SMALL)[:, 0].reshape(4, 4)
    assert np.allclose(B, np.linalg.inv(A), atol=1e-14)
    assert np.allclose(A @ B, np.eye(4), atol=1e-14)


def test_degenerate_form_has_no_inverse():
    with pytest.raises(SingularMatrixError) as err:
        invert_to_bivector(wedge(dx, dy), SMALL)
    assert err.value.point is not None


def test_extension_bivector_is_hamiltonian():
    P = invert_to_bivector(EXT1)
    V = contract_bivector(P, d(Form.scalar(EXT1.phi_k)))
    assert rmax(Form.one_form(list((V - ROTATION.suspended).comps)), EXT1.grid) <= 1e-9


# Schouten brackets


def test_constant_bivectors_commute():
    L = Multivector(2, {(0, 1): ex.const(2), (2, 3): ex.ONE})
    assert schouten_bracket(L, L).is_zero


def test_hand_expanded_schouten():
    # L = x d_t^d_y + d_x^d_z: only L^{ty}_{,x} L^{xz} = 1 contributes
    L = Multivector(2, {(0, 2): ex.X, (1, 3): ex.ONE})
    S = schouten_bracket(L, L)
    assert dict(S.items()) == {(0, 2, 3): ex.const(2)}


@pytest.mark.parametrize("seed", range(6))
def test_schouten_matches_poisson_jacobiator(seed):
    rng = np.random.default_rng(seed)
    L = random_bivector(rng)
    S = schouten_bracket(L, L)
    def br(f, g):
        return bivector_pair(L, d(Form.scalar(f)), d(Form.scalar(g)))

    for a, b, c in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        xa, xb, xc = (ex.var(ex.COORDINATES[i]) for i in (a, b, c))
        jac = ex.add(ex.add(br(xa, br(xb, xc)), br(xb, br(xc, xa))), br(xc, br(xa, xb)))
        assert scalar_max(ex.add(jac, ex.mul(ex.const(0.5), S[(a, b, c)])), SMALL) <= 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_schouten_is_symmetric_and_polarised(seed):
    rng = np.random.default_rng(50 + seed)
    A, B = random_bivector(rng), random_bivector(rng)
    ab, ba = schouten_bracket(A, B), schouten_bracket(B, A)
    assert rmax(ab - ba, SMALL) == 0
    total = schouten_bracket(A + B, A + B)
    parts = schouten_bracket(A, A) + ab.scale(ex.const(2)) + schouten_bracket(B, B)
    assert rmax(total - parts, SMALL) <= 1e-9 * max(1.0, rmax(total, SMALL))


@pytest.mark.parametrize("seed", range(4))
def test_schouten_vector_is_lie_derivative(seed):
    rng = np.random.default_rng(70 + seed)
    L = random_bivector(rng)
    E = VectorField([random_polynomial(rng, terms=2) for _ in range(4)])
    R = schouten_vector(L, E)
    D = ex.differentiate
    for i in range(4):
        for j in range(i + 1, 4):
            ref = ex.ZERO
            for l, c in enumerate(ex.COORDINATES):
                ref = ex.add(ref, ex.mul(E.comps[l], D(L[(i, j)], c)))
                ref = ex.sub(ref, ex.mul(L[(l, j)], D(E.comps[i], c)))
                ref = ex.sub(ref, ex.mul(L[(i, l)], D(E.comps[j], c)))
            assert scalar_max(ex.sub(R[(i, j)], ref), SMALL) <= 1e-9


# conformal and Jacobi pairs


def test_conformal_pair_checks():
    C = PAIR.conformal
    assert all(c.ok for c in C.checks), [c.line() for c in C.checks]
    assert C.shift == 0.0


def test_exponential_level_function():
    C = conformal_pair("exp(z)", EXT0)
    assert rmax(C.alpha - dz, ROTATION.grid) <= 1e-12
    assert all(c.ok for c in C.checks)


def test_constant_level_function_is_rejected():
    with pytest.raises(ScenarioError):
        conformal_pair("2", EXT0)


def test_non_positive_level_function_is_shifted():
    C = conformal_pair("x*cos(t) + y*sin(t)", EXT0)
    assert C.shift > 0
    assert all(c.ok for c in C.checks)
    with pytest.raises(ScenarioError):
        conformal_pair("x*cos(t) + y*sin(t)", EXT0, auto_shift=False)


def test_jacobi_pair_checks():
    assert all(c.ok for c in PAIR.checks), [c.line() for c in PAIR.checks]
    L, E = PAIR.Lambda, PAIR.E
    g = PAIR.grid
    two_e_wedge = vector_wedge_bivector(E, L).scale(ex.const(2))
    assert rmax(schouten_bracket(L, L) - two_e_wedge, g) <= 1e-9
    assert rmax(schouten_vector(L, E), g) <= 1e-9


def test_poisson_specialisation():
    # a constant level function gives E = 0 and [P, P] = 0
    P = EXT0.P
    assert rmax(schouten_bracket(P, P), EXT0.grid) <= 1e-9


def test_bracket_examples():
    g = PAIR.grid
    assert scalar_max(jacobi_bracket("x*y", "x*y", PAIR), g) <= 1e-15
    one_g = jacobi_bracket("1", "x", PAIR)
    assert scalar_max(ex.sub(one_g, PAIR.E(ex.X)), g) <= 1e-12
    assert scalar_max(one_g, g) > 1e-3


@pytest.mark.parametrize("seed", range(5))
def test_bracket_jacobi_identity(seed):
    rng = np.random.default_rng(100 + seed)
    f, g, h = (random_polynomial(rng, degree=2, terms=3) for _ in range(3))
    assert scalar_max(jacobi_identity(f, g, h, PAIR), PAIR.grid) <= 1e-9


@pytest.mark.parametrize("seed", range(3))
def test_bracket_is_not_a_derivation(seed):
    rng = np.random.default_rng(200 + seed)
    f, g, h = (random_polynomial(rng, degree=2, terms=3) for _ in range(3))
    assert scalar_max(leibniz_defect(f, g, h, PAIR), PAIR.grid) <= 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_hamiltonian_vector_field_equivalence(seed):
    f = random_scalar(np.random.default_rng(300 + seed))
    V, residual = hamiltonian_vector_field(f, PAIR)
    assert rmax(Form.one_form(list(residual.comps)), PAIR.grid) <= 1e-9


def test_unit_and_level_hamiltonians():
    g = PAIR.grid
    V1, _ = hamiltonian_vector_field("1", PAIR)
    assert rmax(Form.one_form(list((V1 - PAIR.E).comps)), g) <= 1e-12
    Vphi, _ = hamiltonian_vector_field(PAIR.phi_k, PAIR)
    assert rmax(Form.one_form(list(Vphi.comps)), g) <= 1e-12
