"""Seeded random expressions, forms and vector fields for property checks."""

from __future__ import annotations

import itertools

import numpy as np

from . import expr as ex
from .expr import Expression, ZERO
from .forms import Form, VectorField

__all__ = ["random_polynomial", "random_scalar", "random_form", "random_vector_field",
           "random_conserved"]

_VARS = ex.COORDINATES


def random_polynomial(rng: np.random.Generator, degree: int = 2, terms: int = 4,
                      variables=_VARS) -> Expression:
    """Sum of ``terms`` monomials with small nonzero integer coefficients, collected."""
    out = ZERO
    for _ in range(terms):
        c = int(rng.choice([-3, -2, -1, 1, 2, 3]))
        m = ex.const(c)
        for _ in range(int(rng.integers(0, degree + 1))):
            m = ex.mul(m, ex.var(str(rng.choice(variables))))
        out = ex.add(out, m)
    return ex.expand(out)


def random_scalar(rng: np.random.Generator, variables=_VARS) -> Expression:
    """A polynomial plus an optional trigonometric or exponential term."""
    e = random_polynomial(rng, variables=variables)
    kind = int(rng.integers(0, 4))
    if kind:
        arg = ex.mul(ex.const(int(rng.integers(1, 3))), ex.var(str(rng.choice(variables))))
        fn = (ex.sin, ex.cos, lambda a: ex.exp(ex.mul(ex.const(0.25), a)))[kind - 1]
        e = ex.add(e, ex.mul(ex.const(int(rng.integers(1, 3))), fn(arg)))
    return e


def random_form(rng: np.random.Generator, degree: int, density: float = 0.7) -> Form:
    comps = {}
    for k in itertools.combinations(range(4), degree):
        if degree == 0 or rng.random() < density:
            comps[k] = random_scalar(rng)
    return Form(degree, comps)


def random_vector_field(rng: np.random.Generator, spatial: bool = False) -> VectorField:
    comps = [random_scalar(rng) for _ in range(4)]
    if spatial:
        comps[0] = ZERO
    return VectorField(comps)


def random_conserved(rng: np.random.Generator, invariants) -> Expression:
    """A polynomial in the given conserved functions (itself conserved), collected."""
    out = ex.const(int(rng.integers(-2, 3)))
    for f in invariants:
        c = int(rng.choice([-2, -1, 1, 2]))
        p = int(rng.integers(1, 3))
        out = ex.add(out, ex.mul(ex.const(c), ex.power(f, p)))
    return ex.expand(out)
