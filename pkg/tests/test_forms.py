import itertools

import numpy as np
import pytest

from flowforms import expr as ex
from flowforms.forms import (
    DegenerateVolumeError,
    Form,
    SampleGrid,
    VectorField,
    curl,
    d,
    d_spatial,
    dt,
    dx,
    dy,
    dz,
    interior_product,
    lie_bracket,
    lie_derivative_form,
    musical_flat,
    residual_norm,
    spatial_volume,
    two_form_to_vector,
    vector_by_volume,
    wedge,
)
from flowforms.fluid import abc_flow
from flowforms.randomfields import random_form, random_polynomial, random_vector_field

GRID = SampleGrid()
SMALL = SampleGrid.uniform(5)


def rmax(obj, grid=SMALL):
    return residual_norm(obj, grid)[0]


def scale(obj, grid=SMALL):
    return max(1.0, rmax(obj, grid))


# wedge


def test_wedge_basis():
    w = wedge(dx, dy)
    assert dict(w.items()) == {(1, 2): ex.ONE}
    assert wedge(dx, dx).is_zero


def test_wedge_of_repeated_spatial_two_form_vanishes():
    a = Form(2, {(2, 3): ex.ONE, (1, 3): ex.const(-1)})  # dy^dz + dz^dx
    assert wedge(a, a).is_zero


def test_wedge_degree_overflow_is_zero():
    assert wedge(wedge(dx, dy), wedge(dz, dt)).degree == 4
    assert wedge(wedge(dx, dy), wedge(wedge(dz, dt), dx)).is_zero


@pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 2), (1, 3)])
def test_wedge_graded_commutative(p, q):
    rng = np.random.default_rng(p * 10 + q)
    a, b = random_form(rng, p), random_form(rng, q)
    diff = wedge(a, b) - wedge(b, a).scale(ex.const((-1) ** (p * q)))
    assert rmax(diff) <= 1e-12 * scale(wedge(a, b))


# exterior derivative


def test_d_examples():
    assert d(Form.one_form([0, 0, "x", 0])) == wedge(dx, dy)
    phi_dh = Form.one_form([0, 0, 0, "y"])  # y dz
    assert d_spatial(phi_dh) == wedge(dy, dz)


def test_d_spatial_drops_time_derivatives():
    a = Form.one_form([0, "t*y", 0, 0])
    assert rmax(d_spatial(a) - wedge(dy, dx).scale(ex.T)) == 0
    assert rmax(d(a) - d_spatial(a) - wedge(dt, dx).scale(ex.Y)) == 0


@pytest.mark.parametrize("seed", range(50))
def test_d_squared_vanishes(seed):
    rng = np.random.default_rng(seed)
    a = random_form(rng, int(rng.integers(0, 3)))
    assert rmax(d(d(a)), GRID) <= 1e-12 * scale(d(a), GRID)
    assert rmax(d_spatial(d_spatial(a)), GRID) <= 1e-12 * scale(d_spatial(a), GRID)


@pytest.mark.parametrize("seed", range(20))
def test_leibniz_rule(seed):
    rng = np.random.default_rng(100 + seed)
    p = int(rng.integers(0, 3))
    q = int(rng.integers(0, 4 - p))
    a, b = random_form(rng, p), random_form(rng, q)
    lhs = d(wedge(a, b))
    rhs = wedge(d(a), b) + wedge(a, d(b)).scale(ex.const((-1) ** p))
    assert rmax(lhs - rhs) <= 1e-12 * scale(lhs)


# interior product


def test_interior_examples():
    assert interior_product(VectorField.coordinate("x"), wedge(dx, dy)) == dy
    v = VectorField.spatial("sin(z)", 0, 0)
    assert interior_product(v, wedge(dy, dz)).is_zero
    assert interior_product(VectorField.suspended(v), dt).value is ex.ONE


@pytest.mark.parametrize("seed", range(10))
def test_interior_twice_vanishes(seed):
    rng = np.random.default_rng(200 + seed)
    X = random_vector_field(rng)
    a = random_form(rng, int(rng.integers(2, 5)))
    assert rmax(interior_product(X, interior_product(X, a))) <= 1e-10 * scale(a) * scale_field(X) ** 2


def scale_field(X):
    return max(1.0, max(rmax(Form.scalar(c)) for c in X.comps))


def test_interior_on_function_is_zero():
    assert interior_product(VectorField.coordinate("x"), Form.scalar(ex.X)).is_zero


# Lie derivative and bracket


def test_lie_derivative_example():
    assert lie_derivative_form(VectorField.coordinate("x"), Form.one_form([0, 0, "x", 0])) == dy


@pytest.mark.parametrize("seed", range(20))
def test_lie_derivative_commutes_with_d(seed):
    rng = np.random.default_rng(300 + seed)
    X = random_vector_field(rng)
    a = random_form(rng, int(rng.integers(0, 3)))
    r = lie_derivative_form(X, d(a)) - d(lie_derivative_form(X, a))
    assert rmax(r) <= 1e-9 * scale(d(lie_derivative_form(X, a)))


@pytest.mark.parametrize("seed", range(20))
def test_lie_derivative_is_a_derivation(seed):
    rng = np.random.default_rng(400 + seed)
    X = random_vector_field(rng)
    a, b = random_form(rng, 1), random_form(rng, int(rng.integers(1, 3)))
    lhs = lie_derivative_form(X, wedge(a, b))
    rhs = wedge(lie_derivative_form(X, a), b) + wedge(a, lie_derivative_form(X, b))
    assert rmax(lhs - rhs) <= 1e-9 * scale(lhs)


@pytest.mark.parametrize("seed", range(20))
def test_interior_of_bracket(seed):
    rng = np.random.default_rng(500 + seed)
    X, Y = random_vector_field(rng), random_vector_field(rng)
    a = random_form(rng, 2)
    lhs = interior_product(lie_bracket(X, Y), a)
    rhs = lie_derivative_form(X, interior_product(Y, a)) - interior_product(Y, lie_derivative_form(X, a))
    assert rmax(lhs - rhs) <= 1e-9 * scale(lhs)


def test_bracket_examples():
    assert lie_bracket(VectorField.spatial("-y", "x", 0), VectorField.spatial(0, 0, 1)).is_zero
    X = VectorField.spatial("x*y", "sin(z)", "t")
    assert lie_bracket(X, X).is_zero
    assert lie_bracket(VectorField.spatial("sin(z)", 0, 0), VectorField.spatial(1, 1, 0)).is_zero


@pytest.mark.parametrize("seed", range(10))
def test_bracket_jacobi_identity(seed):
    rng = np.random.default_rng(600 + seed)
    X, Y, Z = (random_vector_field(rng) for _ in range(3))
    total = VectorField([0, 0, 0, 0])
    for A, B, C in ((X, Y, Z), (Y, Z, X), (Z, X, Y)):
        total = total + lie_bracket(A, lie_bracket(B, C))
    ref = max(scale_field(lie_bracket(X, lie_bracket(Y, Z))), 1.0)
    assert max(rmax(Form.scalar(c)) for c in total.comps) <= 1e-9 * ref


# volume duality and the flat operator


def test_vector_by_volume_example():
    assert vector_by_volume(VectorField.coordinate("z"), spatial_volume()) == wedge(dx, dy)


@pytest.mark.parametrize("seed", range(5))
def test_volume_round_trip(seed):
    rng = np.random.default_rng(700 + seed)
    W = VectorField.spatial(*(random_polynomial(rng) for _ in range(3)))
    vol = spatial_volume(ex.parse_expression("2 + sin(x)"))
    back = two_form_to_vector(vector_by_volume(W, vol), vol, SMALL)
    assert all(rmax(Form.scalar(ex.sub(a, b))) <= 1e-12 * scale_field(W)
               for a, b in zip(back.comps, W.comps))


def test_degenerate_volume_is_reported():
    vol = spatial_volume(ex.X)
    with pytest.raises(DegenerateVolumeError):
        two_form_to_vector(wedge(dx, dy), vol, SampleGrid.uniform(4))


def test_flat_examples():
    assert musical_flat(VectorField.spatial("sin(z)", 0, 0)) == Form.one_form([0, "sin(z)", 0, 0])
    assert musical_flat(VectorField.spatial(0, 0, 0)).is_zero


def test_beltrami_curl_by_volume():
    v = abc_flow(1, 1, 1)
    lhs = d_spatial(musical_flat(v))
    rhs = vector_by_volume(curl(v), spatial_volume())
    assert rmax(lhs - rhs, GRID) <= 1e-12
    assert rmax(rhs - vector_by_volume(v, spatial_volume()), GRID) <= 1e-12


# grid norms


def test_residual_norm_examples():
    assert residual_norm(Form.zero(2), GRID) == (0.0, 0.0)
    assert residual_norm(dx, GRID) == (1.0, 1.0)


def test_residual_norm_on_empty_grid():
    empty = GRID.exclude(np.ones(GRID.total, dtype=bool))
    with pytest.raises(ValueError):
        residual_norm(dx, empty)


def test_default_grid_layout():
    assert GRID.t_values == (0.0, 0.5, 1.0)
    assert GRID.size == 3 * 8 ** 3
    xs = np.asarray(GRID.x_values)
    assert xs[0] == 0 and xs[-1] < 2 * np.pi


def test_index_order_is_fixed():
    for k in range(5):
        for key in itertools.combinations(range(4), k):
            f = Form(k, {key: ex.ONE})
            assert list(dict(f.items())) == [key]
    f = Form(2, {(2, 1): ex.ONE})
    assert dict(f.items()) == {(1, 2): ex.const(-1)}
