"""Differential forms, vector fields and multivectors on time-extended space.

Coordinates are indexed ``0, 1, 2, 3 = t, x, y, z``.  A degree-k form stores
one expression per strictly increasing multi-index; missing entries are
zero.  Multivectors use the same storage with basis ``d_i ^ d_j ^ ...``.

Conventions (used consistently by every module):

* ``dx ^ dy (d_x, d_y) = 1``.
* the interior product contracts the first slot,
  ``i(X)(dx^i ^ dx^j) = X^i dx^j - X^j dx^i``.
* a bivector acts on a one-form through its first slot,
  ``P(a)^j = a_i P^{ij}``, and ``P(a, b) = P^{ij} a_i b_j``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import expr as ex
from .expr import Expression, ONE, ZERO, as_expression

__all__ = [
    "COORDS",
    "Form",
    "VectorField",
    "Multivector",
    "SampleGrid",
    "DegenerateVolumeError",
    "dt",
    "dx",
    "dy",
    "dz",
    "basis_form",
    "wedge",
    "exterior_derivative",
    "d",
    "d_spatial",
    "interior_product",
    "lie_derivative_form",
    "lie_bracket",
    "vector_by_volume",
    "two_form_to_vector",
    "musical_flat",
    "spatial_volume",
    "spacetime_volume",
    "gradient",
    "curl",
    "divergence",
    "cross",
    "dot",
    "bivector_from_matrix",
    "bivector_matrix",
    "contract_bivector",
    "bivector_pair",
    "vector_wedge_bivector",
    "lie_derivative_bivector",
    "inverse_bivector",
    "pfaffian",
    "form_matrix",
    "evaluate_components",
    "residual_norm",
]

COORDS = ex.COORDINATES
_NAMES = {c: i for i, c in enumerate(COORDS)}


class DegenerateVolumeError(ValueError):
    pass


def _perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if an index repeats."""
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    s = list(seq)
    for i in range(len(s)):
        for j in range(len(s) - 1 - i):
            if s[j] > s[j + 1]:
                s[j], s[j + 1] = s[j + 1], s[j]
                sign = -sign
    return sign


def _key(k) -> tuple:
    if isinstance(k, str):
        return tuple(_NAMES[c] for c in k)
    return tuple(int(i) for i in k)


def _normalize(degree: int, comps) -> dict:
    out: dict = {}
    items = comps.items() if isinstance(comps, Mapping) else comps
    for k, v in items:
        k = _key(k)
        if len(k) != degree:
            raise ValueError(f"index {k} does not match degree {degree}")
        if any(i < 0 or i > 3 for i in k):
            raise ValueError(f"index {k} out of range")
        s = _perm_sign(k)
        if s == 0:
            continue
        v = as_expression(v)
        key = tuple(sorted(k))
        term = v if s > 0 else ex.neg(v)
        out[key] = ex.add(out[key], term) if key in out else term
    return {k: v for k, v in out.items() if not v.is_number(0.0)}


class _Alternating:
    """Shared storage for forms and multivectors."""

    __slots__ = ("degree", "comps")
    _symbol = "d"

    def __init__(self, degree: int, comps=None):
        if not 0 <= degree:
            raise ValueError("negative degree")
        object.__setattr__(self, "degree", int(degree))
        if degree > 4:
            comps = {}
        object.__setattr__(self, "comps", _normalize(degree, comps or {}))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def _new(self, degree, comps):
        return type(self)(degree, comps)

    def __eq__(self, other):
        # structural: equal trees, not equal values
        if type(other) is not type(self):
            return NotImplemented
        return self.degree == other.degree and self.comps == other.comps

    def __hash__(self):
        return hash((type(self).__name__, self.degree, tuple(sorted(self.comps.items(), key=lambda kv: kv[0]))))

    def __getitem__(self, k) -> Expression:
        k = _key(k)
        s = _perm_sign(k)
        if s == 0:
            return ZERO
        v = self.comps.get(tuple(sorted(k)), ZERO)
        return v if s > 0 else ex.neg(v)

    def items(self):
        return sorted(self.comps.items())

    def __iter__(self):
        return iter(self.items())

    def __len__(self):
        return len(self.comps)

    @property
    def is_zero(self) -> bool:
        return not self.comps

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} and {type(other).__name__}")
        if self.is_zero or other.is_zero:
            return
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch {self.degree} vs {other.degree}")

    def __add__(self, other):
        self._check(other)
        if self.is_zero:
            return other
        comps = dict(self.comps)
        for k, v in other.comps.items():
            comps[k] = ex.add(comps[k], v) if k in comps else v
        return self._new(self.degree, comps)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._new(self.degree, {k: ex.neg(v) for k, v in self.comps.items()})

    def scale(self, f):
        f = as_expression(f)
        return self._new(self.degree, {k: ex.mul(f, v) for k, v in self.comps.items()})

    def __mul__(self, f):
        if isinstance(f, _Alternating):
            return NotImplemented
        return self.scale(f)

    __rmul__ = __mul__

    def map(self, fn):
        return self._new(self.degree, {k: fn(v) for k, v in self.comps.items()})

    def simplify(self):
        return self.map(ex.simplify)

    def __repr__(self):
        return f"{type(self).__name__}({self.degree}, {str(self)!r})"

    def __str__(self):
        if self.is_zero:
            return "0"
        terms = []
        for k, v in self.items():
            basis = "^".join(f"{self._symbol}{COORDS[i]}" for i in k)
            coef = ex.to_text(v)
            if not basis:
                terms.append(coef)
            elif v.is_number(1.0):
                terms.append(basis)
            else:
                terms.append(f"({coef}) {basis}")
        return " + ".join(terms)


class Form(_Alternating):
    """A differential form of degree 0..4 on (t, x, y, z)."""

    __slots__ = ()

    @classmethod
    def scalar(cls, f) -> "Form":
        return cls(0, {(): as_expression(f)})

    @classmethod
    def zero(cls, degree: int) -> "Form":
        return cls(degree, {})

    @classmethod
    def one_form(cls, components: Sequence) -> "Form":
        """One-form from four coefficients ordered (t, x, y, z)."""
        if len(components) != 4:
            raise ValueError("a one-form needs four components")
        return cls(1, {(i,): c for i, c in enumerate(components)})

    @classmethod
    def spatial_one_form(cls, components: Sequence) -> "Form":
        if len(components) != 3:
            raise ValueError("a spatial one-form needs three components")
        return cls(1, {(i + 1,): c for i, c in enumerate(components)})

    @classmethod
    def spatial_two_form(cls, components: Sequence) -> "Form":
        """``J . (dy^dz, dz^dx, dx^dy)`` for a vector of coefficients ``J``."""
        jx, jy, jz = components
        return cls(2, {(2, 3): jx, (3, 1): jy, (1, 2): jz})

    @property
    def value(self) -> Expression:
        """The coefficient of a 0-form (or of the top form for degree 4)."""
        if self.degree == 0:
            return self.comps.get((), ZERO)
        if self.degree == 4:
            return self.comps.get((0, 1, 2, 3), ZERO)
        raise ValueError("value is defined for degree 0 and 4 forms only")

    def spatial_part(self) -> "Form":
        """Components without a dt factor."""
        return Form(self.degree, {k: v for k, v in self.comps.items() if 0 not in k})

    def __xor__(self, other):
        return wedge(self, other)


def basis_form(name: str) -> Form:
    return Form(1, {(_NAMES[name],): ONE})


dt, dx, dy, dz = (basis_form(c) for c in COORDS)


class VectorField:
    """A vector field with components ordered (t, x, y, z)."""

    __slots__ = ("comps",)

    def __init__(self, components: Sequence):
        if len(components) != 4:
            raise ValueError("a vector field on time-extended space has four components")
        object.__setattr__(self, "comps", tuple(as_expression(c) for c in components))

    def __setattr__(self, name, value):
        raise AttributeError("VectorField is immutable")

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    @classmethod
    def spatial(cls, vx, vy, vz) -> "VectorField":
        return cls((ZERO, vx, vy, vz))

    @classmethod
    def from_strings(cls, components: Sequence[str]) -> "VectorField":
        """Spatial field from three expression strings."""
        return cls.spatial(*(ex.parse_expression(c) for c in components))

    @classmethod
    def suspended(cls, v: "VectorField") -> "VectorField":
        """``d_t + v`` for a spatial field ``v``."""
        return cls((ONE, *v.comps[1:]))

    @classmethod
    def coordinate(cls, name: str) -> "VectorField":
        comps = [ZERO] * 4
        comps[_NAMES[name]] = ONE
        return cls(comps)

    @property
    def t(self):
        return self.comps[0]

    @property
    def spatial_components(self) -> tuple:
        return self.comps[1:]

    @property
    def is_spatial(self) -> bool:
        return self.comps[0].is_number(0.0)

    @property
    def is_suspended(self) -> bool:
        return self.comps[0].is_number(1.0)

    @property
    def is_zero(self) -> bool:
        return all(c.is_number(0.0) for c in self.comps)

    def __getitem__(self, i):
        return self.comps[_NAMES[i] if isinstance(i, str) else i]

    def __iter__(self):
        return iter(self.comps)

    def __call__(self, f) -> Expression:
        """Directional derivative ``X(f)``."""
        f = as_expression(f)
        out = ZERO
        for c, name in zip(self.comps, COORDS):
            if c.is_number(0.0):
                continue
            out = ex.add(out, ex.mul(c, ex.differentiate(f, name)))
        return out

    def __add__(self, other):
        return VectorField([ex.add(a, b) for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return VectorField([ex.sub(a, b) for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return VectorField([ex.neg(a) for a in self.comps])

    def scale(self, f):
        f = as_expression(f)
        return VectorField([ex.mul(f, a) for a in self.comps])

    def __mul__(self, f):
        return self.scale(f)

    __rmul__ = __mul__

    def map(self, fn):
        return VectorField([fn(a) for a in self.comps])

    def simplify(self):
        return self.map(ex.simplify)

    def __repr__(self):
        return f"VectorField({str(self)!r})"

    def __str__(self):
        terms = [
            (f"d_{n}" if c.is_number(1.0) else f"({ex.to_text(c)}) d_{n}")
            for c, n in zip(self.comps, COORDS)
            if not c.is_number(0.0)
        ]
        return " + ".join(terms) if terms else "0"


class Multivector(_Alternating):
    """Antisymmetric contravariant tensor (bivector, trivector, ...)."""

    __slots__ = ()
    _symbol = "d_"


# ---------------------------------------------------------------------------
# exterior algebra


def wedge(a: Form, b: Form) -> Form:
    deg = a.degree + b.degree
    if deg > 4:
        return Form.zero(deg)
    comps: dict = {}
    for ka, va in a.comps.items():
        for kb, vb in b.comps.items():
            k = ka + kb
            s = _perm_sign(k)
            if s == 0:
                continue
            key = tuple(sorted(k))
            term = ex.mul(va, vb)
            if s < 0:
                term = ex.neg(term)
            comps[key] = ex.add(comps[key], term) if key in comps else term
    return Form(deg, comps)


def exterior_derivative(a: Form, spatial_only: bool = False) -> Form:
    """``d a`` on time-extended space, or ``d_M a`` (x, y, z only)."""
    if a.degree >= 4:
        return Form.zero(a.degree + 1)
    axes = (1, 2, 3) if spatial_only else (0, 1, 2, 3)
    comps: dict = {}
    for k, v in a.comps.items():
        for i in axes:
            if i in k:
                continue
            dv = ex.differentiate(v, COORDS[i])
            if dv.is_number(0.0):
                continue
            full = (i,) + k
            s = _perm_sign(full)
            key = tuple(sorted(full))
            term = dv if s > 0 else ex.neg(dv)
            comps[key] = ex.add(comps[key], term) if key in comps else term
    return Form(a.degree + 1, comps)


def d(a: Form) -> Form:
    return exterior_derivative(a)


def d_spatial(a: Form) -> Form:
    return exterior_derivative(a, spatial_only=True)


def interior_product(X: VectorField, a: Form) -> Form:
    if a.degree == 0:
        return Form.zero(0)
    comps: dict = {}
    for k, v in a.comps.items():
        for pos, i in enumerate(k):
            xi = X.comps[i]
            if xi.is_number(0.0):
                continue
            rest = k[:pos] + k[pos + 1:]
            term = ex.mul(xi, v)
            if pos % 2:
                term = ex.neg(term)
            comps[rest] = ex.add(comps[rest], term) if rest in comps else term
    return Form(a.degree - 1, comps)


def lie_derivative_form(X: VectorField, a: Form) -> Form:
    """``L_X a = i(X) d a + d i(X) a`` (Cartan)."""
    if a.degree == 0:
        return Form.scalar(X(a.value))
    out = d(interior_product(X, a))
    if a.degree < 4:
        out = out + interior_product(X, d(a))
    return out


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """``[X, Y]^i = X(Y^i) - Y(X^i)``."""
    return VectorField([ex.sub(X(yi), Y(xi)) for xi, yi in zip(X.comps, Y.comps)])


def spatial_volume(density=ONE) -> Form:
    """``density dx^dy^dz``."""
    return Form(3, {(1, 2, 3): density})


def spacetime_volume(density=ONE) -> Form:
    return Form(4, {(0, 1, 2, 3): density})


def vector_by_volume(W: VectorField, vol: Form) -> Form:
    """The two-form ``i(W)(vol)`` for a spatial volume three-form."""
    if vol.degree != 3:
        raise ValueError("volume must be a three-form")
    return interior_product(W, vol)


def two_form_to_vector(beta: Form, vol: Form, grid: "SampleGrid | None" = None) -> VectorField:
    """Recover the spatial field ``W`` with ``i(W)(vol) = beta``.

    ``vol`` must be ``rho dx^dy^dz``; if a grid is given, ``rho`` is checked
    to be nonvanishing there.
    """
    if vol.degree != 3 or set(vol.comps) - {(1, 2, 3)}:
        raise ValueError("volume must be a spatial three-form")
    rho = vol[(1, 2, 3)]
    if rho.is_number(0.0):
        raise DegenerateVolumeError("volume form vanishes identically")
    if grid is not None:
        vals = evaluate_components([rho], grid)[0]
        bad = np.abs(vals) < 1e-300
        if np.any(bad):
            pts = grid.points()
            i = int(np.flatnonzero(bad)[0])
            where = {c: float(pts[c][i]) for c in COORDS}
            raise DegenerateVolumeError(f"volume degenerate at {where}")
    bx, by, bz = beta[(2, 3)], beta[(3, 1)], beta[(1, 2)]
    return VectorField.spatial(ex.div(bx, rho), ex.div(by, rho), ex.div(bz, rho))


def musical_flat(v: VectorField) -> Form:
    """Lower indices with the Euclidean metric on space."""
    return Form.spatial_one_form(v.spatial_components)


# vector calculus helpers, expressed on spatial components


def gradient(f) -> tuple:
    f = as_expression(f)
    return tuple(ex.differentiate(f, c) for c in ("x", "y", "z"))


def cross(a: Sequence, b: Sequence) -> tuple:
    ax, ay, az = a
    bx, by, bz = b
    return (
        ex.sub(ex.mul(ay, bz), ex.mul(az, by)),
        ex.sub(ex.mul(az, bx), ex.mul(ax, bz)),
        ex.sub(ex.mul(ax, by), ex.mul(ay, bx)),
    )


def dot(a: Sequence, b: Sequence) -> Expression:
    out = ZERO
    for p, q in zip(a, b):
        out = ex.add(out, ex.mul(p, q))
    return out


def curl(v: VectorField) -> VectorField:
    _, vx, vy, vz = v.comps
    D = ex.differentiate
    return VectorField.spatial(
        ex.sub(D(vz, "y"), D(vy, "z")),
        ex.sub(D(vx, "z"), D(vz, "x")),
        ex.sub(D(vy, "x"), D(vx, "y")),
    )


def divergence(v: VectorField) -> Expression:
    out = ZERO
    for c, name in zip(v.comps[1:], ("x", "y", "z")):
        out = ex.add(out, ex.differentiate(c, name))
    return out


# ---------------------------------------------------------------------------
# multivectors


def form_matrix(a: Form) -> list:
    """4x4 antisymmetric matrix ``A[i][j] = a(d_i, d_j)`` of a two-form."""
    if a.degree != 2:
        raise ValueError("need a two-form")
    return [[a[(i, j)] if i != j else ZERO for j in range(4)] for i in range(4)]


def bivector_matrix(P: Multivector) -> list:
    if P.degree != 2:
        raise ValueError("need a bivector")
    return [[P[(i, j)] if i != j else ZERO for j in range(4)] for i in range(4)]


def bivector_from_matrix(M) -> Multivector:
    return Multivector(2, {(i, j): M[i][j] for i in range(4) for j in range(i + 1, 4)})


def pfaffian(a: Form) -> Expression:
    """Pfaffian of a two-form, i.e. the coefficient of ``1/2 a^a``."""
    A = form_matrix(a)
    return ex.add(
        ex.sub(ex.mul(A[0][1], A[2][3]), ex.mul(A[0][2], A[1][3])),
        ex.mul(A[0][3], A[1][2]),
    )


def inverse_bivector(a: Form) -> Multivector:
    """Symbolic bivector ``P`` with ``P = A^{-1}`` for the matrix of ``a``.

    Uses the Pfaffian dual: for a 4x4 antisymmetric ``A``, ``A^{-1} = -A*/Pf``
    where ``A*_{ij} = 1/2 eps_{ijkl} A_{kl}``.  With this inverse,
    ``i(P(df))(a) = df``.
    """
    A = form_matrix(a)
    pf = pfaffian(a)
    comps = {}
    for i, j in itertools.combinations(range(4), 2):
        k, l = [m for m in range(4) if m not in (i, j)]
        eps = _perm_sign((i, j, k, l))
        dual = A[k][l] if eps > 0 else ex.neg(A[k][l])
        comps[(i, j)] = ex.neg(ex.div(dual, pf))
    return Multivector(2, comps)


def contract_bivector(P: Multivector, a: Form) -> VectorField:
    """``P(a)^j = a_i P^{ij}`` (first-slot contraction)."""
    if a.degree != 1:
        raise ValueError("need a one-form")
    comps = []
    for j in range(4):
        s = ZERO
        for i in range(4):
            if i == j:
                continue
            ai = a.comps.get((i,))
            if ai is None:
                continue
            s = ex.add(s, ex.mul(ai, P[(i, j)]))
        comps.append(s)
    return VectorField(comps)


def bivector_pair(P: Multivector, a: Form, b: Form) -> Expression:
    """``P(a, b) = P^{ij} a_i b_j``."""
    V = contract_bivector(P, a)
    out = ZERO
    for j in range(4):
        bj = b.comps.get((j,))
        if bj is not None:
            out = ex.add(out, ex.mul(V.comps[j], bj))
    return out


def vector_wedge_bivector(E: VectorField, P: Multivector) -> Multivector:
    """Trivector ``E ^ P``."""
    comps: dict = {}
    for i in range(4):
        if E.comps[i].is_number(0.0):
            continue
        for k, v in P.comps.items():
            full = (i,) + k
            s = _perm_sign(full)
            if s == 0:
                continue
            key = tuple(sorted(full))
            term = ex.mul(E.comps[i], v)
            if s < 0:
                term = ex.neg(term)
            comps[key] = ex.add(comps[key], term) if key in comps else term
    return Multivector(3, comps)


def lie_derivative_bivector(E: VectorField, P: Multivector) -> Multivector:
    """``(L_E P)^{ij} = E(P^{ij}) - P^{lj} d_l E^i - P^{il} d_l E^j``."""
    comps = {}
    for i, j in itertools.combinations(range(4), 2):
        val = E(P[(i, j)])
        for l in range(4):
            val = ex.sub(val, ex.mul(P[(l, j)], ex.differentiate(E.comps[i], COORDS[l])))
            val = ex.sub(val, ex.mul(P[(i, l)], ex.differentiate(E.comps[j], COORDS[l])))
        comps[(i, j)] = val
    return Multivector(2, comps)


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """Tensor-product sample grid with an optional exclusion mask.

    The default grid takes ``t in {0, 0.5, 1}`` and 8 uniform points per
    spatial axis over ``[0, 2 pi)``.
    """

    t_values: tuple = (0.0, 0.5, 1.0)
    x_values: tuple = tuple(np.linspace(0.0, 2 * math.pi, 8, endpoint=False))
    y_values: tuple = tuple(np.linspace(0.0, 2 * math.pi, 8, endpoint=False))
    z_values: tuple = tuple(np.linspace(0.0, 2 * math.pi, 8, endpoint=False))
    keep: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def uniform(cls, n: int = 8, t_values: Iterable[float] = (0.0, 0.5, 1.0),
                lo: float = 0.0, hi: float = 2 * math.pi) -> "SampleGrid":
        if n < 1:
            raise ValueError("grid needs at least one point per axis")
        axis = tuple(float(v) for v in np.linspace(lo, hi, n, endpoint=False))
        return cls(tuple(float(t) for t in t_values), axis, axis, axis)

    @property
    def shape(self) -> tuple:
        return (len(self.t_values), len(self.x_values), len(self.y_values), len(self.z_values))

    @property
    def total(self) -> int:
        return int(np.prod(self.shape))

    def _full(self) -> dict:
        mesh = np.meshgrid(self.t_values, self.x_values, self.y_values, self.z_values, indexing="ij")
        return {c: m.ravel().astype(float) for c, m in zip(COORDS, mesh)}

    def points(self) -> dict:
        """Coordinates of the retained points as flat arrays."""
        cache = self.__dict__.get("_points")
        if cache is None:
            full = self._full()
            if self.keep is not None:
                full = {c: v[self.keep] for c, v in full.items()}
            for v in full.values():
                v.setflags(write=False)
            object.__setattr__(self, "_points", full)
            cache = full
        return cache

    @property
    def size(self) -> int:
        return self.total if self.keep is None else int(np.count_nonzero(self.keep))

    @property
    def excluded(self) -> int:
        return self.total - self.size

    def exclude(self, drop: np.ndarray) -> "SampleGrid":
        """New grid dropping the retained points flagged in ``drop``."""
        drop = np.asarray(drop, dtype=bool)
        if drop.shape != (self.size,):
            raise ValueError("mask must have one entry per retained point")
        keep = np.ones(self.total, dtype=bool) if self.keep is None else self.keep.copy()
        idx = np.flatnonzero(keep)
        keep[idx[drop]] = False
        return SampleGrid(self.t_values, self.x_values, self.y_values, self.z_values, keep)

    def memo(self) -> dict:
        """Evaluation cache shared by everything evaluated on this grid."""
        cache = self.__dict__.get("_memo")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_memo", cache)
        return cache


def _components(obj) -> list:
    if isinstance(obj, Expression):
        return [obj]
    if isinstance(obj, VectorField):
        return list(obj.comps)
    if isinstance(obj, _Alternating):
        return [v for _, v in obj.items()]
    if isinstance(obj, (int, float)):
        return [ex.const(obj)]
    if isinstance(obj, (list, tuple)):
        out = []
        for o in obj:
            out.extend(_components(o))
        return out
    raise TypeError(f"cannot sample {type(obj).__name__}")


def evaluate_components(exprs: Sequence[Expression], grid: SampleGrid) -> np.ndarray:
    """Array of shape ``(len(exprs), grid.size)``."""
    pts = grid.points()
    memo = grid.memo()
    out = np.empty((len(exprs), grid.size))
    for i, e in enumerate(exprs):
        out[i] = np.broadcast_to(ex.evaluate_array(e, pts, memo), (grid.size,))
    return out


def residual_norm(obj, grid: SampleGrid) -> tuple:
    """``(max, rms)`` of the absolute component values over the grid.

    Only stored (structurally nonzero) components enter the rms; a zero
    object gives ``(0.0, 0.0)``.
    """
    comps = _components(obj)
    comps = [c for c in comps if not c.is_number(0.0)]
    if grid.size == 0:
        raise ValueError("empty sample grid")
    if not comps:
        return 0.0, 0.0
    vals = np.abs(evaluate_components(comps, grid))
    return float(vals.max()), float(np.sqrt(np.mean(vals * vals)))
