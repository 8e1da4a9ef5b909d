"""Symbolic scalar expressions over the coordinates ``t, x, y, z``.

Expressions are immutable, hash-consed trees: two structurally equal trees
are the same Python object, so ``==`` is identity and subtrees are shared
freely.  The module provides a text parser, an exact differentiator, a light
simplifier and a vectorised numpy evaluator.

Grammar accepted by :func:`parse_expression`::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' atom)?
    atom   := number | ident | func '(' expr ')' | '(' expr ')' | '-' atom
    func   := sin | cos | exp | ln | sqrt
    ident  := t | x | y | z
"""

from __future__ import annotations

import math
import re
import threading
import weakref
from typing import Mapping, NamedTuple, Union

import numpy as np

__all__ = [
    "COORDINATES",
    "Expression",
    "ExpressionError",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "EvaluationDomainError",
    "Point4",
    "ZERO",
    "ONE",
    "T",
    "X",
    "Y",
    "Z",
    "const",
    "var",
    "node",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "power",
    "sin",
    "cos",
    "exp",
    "ln",
    "sqrt",
    "as_expression",
    "parse_expression",
    "to_text",
    "differentiate",
    "simplify",
    "expand",
    "ExpansionTooLarge",
    "evaluate",
    "evaluate_array",
    "free_variables",
    "count_nodes",
]

COORDINATES = ("t", "x", "y", "z")
UNARY_OPS = ("neg", "sin", "cos", "exp", "ln", "sqrt")
BINARY_OPS = ("add", "sub", "mul", "div")
FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")


class ExpressionError(Exception):
    """Base class for expression errors."""


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownIdentifierError(ExpressionSyntaxError):
    def __init__(self, name: str, position: int, text: str = ""):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", position, text)


class EvaluationDomainError(ExpressionError, ArithmeticError):
    """Raised when a subexpression leaves the real domain at some point."""

    def __init__(self, reason: str, subexpression: "Expression", point: Mapping[str, float]):
        self.reason = reason
        self.subexpression = subexpression
        self.point = dict(point)
        where = ", ".join(f"{k}={v:.6g}" for k, v in self.point.items())
        super().__init__(f"{reason} in {to_text(subexpression)!s} at ({where})")


class Point4(NamedTuple):
    t: float
    x: float
    y: float
    z: float

    @classmethod
    def of(cls, t=0.0, x=0.0, y=0.0, z=0.0) -> "Point4":
        p = cls(float(t), float(x), float(y), float(z))
        if not all(math.isfinite(c) for c in p):
            raise ValueError(f"non-finite coordinate in {p}")
        return p


_PRETTY = {
    "const": "Const",
    "var": "Var",
    "neg": "Neg",
    "sin": "Sin",
    "cos": "Cos",
    "exp": "Exp",
    "ln": "Ln",
    "sqrt": "Sqrt",
    "add": "Add",
    "sub": "Sub",
    "mul": "Mul",
    "div": "Div",
    "pow": "Pow",
}

_intern: "weakref.WeakValueDictionary[tuple, Expression]" = weakref.WeakValueDictionary()
_intern_lock = threading.Lock()


class Expression:
    """A node of an interned expression tree.

    ``op`` is one of ``const, var, neg, sin, cos, exp, ln, sqrt, add, sub,
    mul, div, pow``.  ``value`` holds the constant, the variable name or the
    (constant) exponent of a ``pow`` node.  Build nodes through the module
    constructors, never directly.
    """

    __slots__ = ("op", "args", "value", "_hash", "_derivs", "__weakref__")

    op: str
    args: tuple
    value: Union[float, str, None]

    def __setattr__(self, name, value):
        raise AttributeError("Expression nodes are immutable")

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (_rebuild, (self.op, self.args, self.value))

    def __repr__(self):
        name = _PRETTY[self.op]
        if self.op == "const":
            return f"Const({_format_number(self.value)})"
        if self.op == "var":
            return f"Var({self.value})"
        if self.op == "pow":
            return f"Pow({self.args[0]!r}, {_format_number(self.value)})"
        return f"{name}({', '.join(repr(a) for a in self.args)})"

    def __str__(self):
        return to_text(self)

    # arithmetic sugar; these go through the simplifying constructors
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    def is_number(self, c: float) -> bool:
        return self.op == "const" and self.value == c

    def diff(self, variable: str) -> "Expression":
        return differentiate(self, variable)

    def __call__(self, t=0.0, x=0.0, y=0.0, z=0.0) -> float:
        return evaluate(self, Point4.of(t, x, y, z))


def _rebuild(op, args, value):
    return _make(op, args, value)


def _make(op: str, args: tuple = (), value=None) -> Expression:
    key = (op, value, args)
    with _intern_lock:
        hit = _intern.get(key)
        if hit is not None:
            return hit
        e = object.__new__(Expression)
        object.__setattr__(e, "op", op)
        object.__setattr__(e, "args", args)
        object.__setattr__(e, "value", value)
        object.__setattr__(e, "_hash", hash(key))
        object.__setattr__(e, "_derivs", {})
        _intern[key] = e
        return e


def const(c) -> Expression:
    c = float(c)
    if not math.isfinite(c):
        raise ValueError(f"non-finite constant {c!r}")
    if c == 0.0:
        c = 0.0  # fold -0.0
    return _make("const", (), c)


def var(name: str) -> Expression:
    if name not in COORDINATES:
        raise UnknownIdentifierError(name, 0)
    return _make("var", (), name)


ZERO = const(0)
ONE = const(1)
T, X, Y, Z = (var(c) for c in COORDINATES)


def as_expression(e) -> Expression:
    if isinstance(e, Expression):
        return e
    if isinstance(e, str):
        return parse_expression(e)
    if isinstance(e, (int, float, np.integer, np.floating)):
        return const(e)
    raise TypeError(f"cannot convert {type(e).__name__} to Expression")


def node(op: str, *args, value=None) -> Expression:
    """Build a raw node with no simplification (what the parser produces)."""
    args = tuple(as_expression(a) for a in args)
    if op in ("const", "var"):
        return const(value) if op == "const" else var(value)
    if op in UNARY_OPS:
        if len(args) != 1:
            raise ValueError(f"{op} takes one argument")
        return _make(op, args)
    if op in BINARY_OPS:
        if len(args) != 2:
            raise ValueError(f"{op} takes two arguments")
        return _make(op, args)
    if op == "pow":
        if len(args) != 1 or value is None:
            raise ValueError("pow takes a base and a constant exponent")
        value = float(value)
        if not math.isfinite(value):
            raise ValueError("non-finite exponent")
        return _make("pow", args, value)
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# simplifying constructors


def _fold_ok(v: float) -> bool:
    return math.isfinite(v)


def neg(a) -> Expression:
    a = as_expression(a)
    if a.op == "const":
        return const(-a.value)
    if a.op == "neg":
        return a.args[0]
    if a.op == "sub":
        return _make("sub", (a.args[1], a.args[0]))
    return _make("neg", (a,))


def add(a, b) -> Expression:
    a, b = as_expression(a), as_expression(b)
    if a.is_number(0.0):
        return b
    if b.is_number(0.0):
        return a
    if a.op == "const" and b.op == "const":
        return const(a.value + b.value)
    if b.op == "neg":
        return sub(a, b.args[0])
    if a.op == "neg":
        return sub(b, a.args[0])
    if a is b:
        return mul(2.0, a)
    return _make("add", (a, b))


def sub(a, b) -> Expression:
    a, b = as_expression(a), as_expression(b)
    if a is b:
        return ZERO
    if b.is_number(0.0):
        return a
    if a.is_number(0.0):
        return neg(b)
    if a.op == "const" and b.op == "const":
        return const(a.value - b.value)
    if b.op == "neg":
        return add(a, b.args[0])
    return _make("sub", (a, b))


def mul(a, b) -> Expression:
    a, b = as_expression(a), as_expression(b)
    if a.is_number(0.0) or b.is_number(0.0):
        return ZERO
    if a.is_number(1.0):
        return b
    if b.is_number(1.0):
        return a
    if b.op == "const" and a.op != "const":
        a, b = b, a
    if a.op == "const":
        if b.op == "const":
            return const(a.value * b.value)
        if a.value == -1.0:
            return neg(b)
        if b.op == "mul" and b.args[0].op == "const":
            return mul(a.value * b.args[0].value, b.args[1])
        if b.op == "neg":
            return mul(-a.value, b.args[0])
    if a.op == "neg" and b.op == "neg":
        return mul(a.args[0], b.args[0])
    if a.op == "neg":
        return neg(mul(a.args[0], b))
    if b.op == "neg":
        return neg(mul(a, b.args[0]))
    if a is b:
        return power(a, 2.0)
    return _make("mul", (a, b))


def div(a, b) -> Expression:
    a, b = as_expression(a), as_expression(b)
    if a.is_number(0.0):
        return ZERO
    if b.is_number(1.0):
        return a
    if b.is_number(-1.0):
        return neg(a)
    if b.op == "const" and b.value != 0.0:
        if a.op == "const":
            return const(a.value / b.value)
        return mul(1.0 / b.value, a)
    if a.op == "neg":
        return neg(div(a.args[0], b))
    if b.op == "neg":
        return neg(div(a, b.args[0]))
    return _make("div", (a, b))


def power(a, n) -> Expression:
    a = as_expression(a)
    n = float(n.value if isinstance(n, Expression) and n.op == "const" else n)
    if n == 0.0:
        return ONE
    if n == 1.0:
        return a
    if a.op == "const":
        try:
            v = _pow_scalar(a.value, n)
        except (ValueError, ZeroDivisionError, OverflowError):
            v = None
        if v is not None and _fold_ok(v):
            return const(v)
    if a.op == "pow" and float(n).is_integer() and float(a.value).is_integer():
        return power(a.args[0], a.value * n)
    return _make("pow", (a,), n)


def _pow_scalar(base: float, n: float) -> float:
    if base < 0 and not float(n).is_integer():
        raise ValueError("negative base with non-integer exponent")
    if base == 0 and n < 0:
        raise ZeroDivisionError("zero to negative power")
    return float(base) ** n


def _unary(op: str, fold):
    def build(a) -> Expression:
        a = as_expression(a)
        if a.op == "const":
            try:
                v = fold(a.value)
            except (ValueError, OverflowError):
                v = None
            if v is not None and _fold_ok(v):
                return const(v)
        return _make(op, (a,))

    build.__name__ = op
    build.__doc__ = f"{op}(a) with constant folding."
    return build


def _ln(c):
    if c <= 0:
        raise ValueError("ln of non-positive")
    return math.log(c)


def _sqrt(c):
    if c < 0:
        raise ValueError("sqrt of negative")
    return math.sqrt(c)


sin = _unary("sin", math.sin)
cos = _unary("cos", math.cos)
exp = _unary("exp", math.exp)
ln = _unary("ln", _ln)
sqrt = _unary("sqrt", _sqrt)

_SMART = {"neg": neg, "sin": sin, "cos": cos, "exp": exp, "ln": ln, "sqrt": sqrt,
          "add": add, "sub": sub, "mul": mul, "div": div}


def simplify(e) -> Expression:
    """Rebuild ``e`` bottom-up through the simplifying constructors.

    Guarantees constant folding, removal of additive zeros and multiplicative
    ones, ``a - a -> 0`` and ``0 * a -> 0``.  It is not a canonical form:
    ``sin(x)^2 + cos(x)^2`` stays as it is.
    """
    e = as_expression(e)
    memo: dict = {}
    for n in _postorder(e):
        if n.op in ("const", "var"):
            memo[n] = n
        elif n.op == "pow":
            memo[n] = power(memo[n.args[0]], n.value)
        else:
            memo[n] = _SMART[n.op](*(memo[a] for a in n.args))
    return memo[e]


class ExpansionTooLarge(ExpressionError):
    pass


def expand(e, max_terms: int = 4000) -> Expression:
    """Distribute products and collect like terms.

    Function applications and non-integer powers are opaque atoms with
    expanded arguments; division by a single monomial cancels powers, so
    removable singularities such as ``x/x`` are dropped.  Output order is
    fixed by the rendered text of the atoms.  Raises ``ExpansionTooLarge``
    when an intermediate sum exceeds ``max_terms`` terms.
    """
    e = as_expression(e)
    atoms: dict = {}
    memo: dict = {}

    def atom(a: Expression) -> dict:
        key = to_text(a)
        atoms.setdefault(key, a)
        return {((key, 1.0),): 1.0}

    def times(p: dict, q: dict) -> dict:
        out: dict = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                powers = dict(m1)
                for k, n in m2:
                    powers[k] = powers.get(k, 0.0) + n
                m = tuple(sorted((k, n) for k, n in powers.items() if n != 0.0))
                out[m] = out.get(m, 0.0) + c1 * c2
        return _prune(out)

    def _prune(p: dict) -> dict:
        p = {m: c for m, c in p.items() if c != 0.0}
        if len(p) > max_terms:
            raise ExpansionTooLarge(f"more than {max_terms} terms")
        return p

    def plus(p: dict, q: dict, sign: float = 1.0) -> dict:
        out = dict(p)
        for m, c in q.items():
            out[m] = out.get(m, 0.0) + sign * c
        return _prune(out)

    def back(p: dict) -> Expression:
        out = ZERO
        for m in sorted(p, key=lambda m: (-sum(n for _, n in m), m)):
            c = p[m]
            negate = c < 0 and out is not ZERO
            term = const(-c if negate else c)
            for k, n in m:
                term = mul(term, power(atoms[k], n))
            out = sub(out, term) if negate else add(out, term)
        return out

    for n in _postorder(e):
        op = n.op
        if op == "const":
            memo[n] = {(): n.value} if n.value != 0.0 else {}
        elif op == "var":
            memo[n] = atom(n)
        elif op == "neg":
            memo[n] = {m: -c for m, c in memo[n.args[0]].items()}
        elif op in ("add", "sub"):
            memo[n] = plus(memo[n.args[0]], memo[n.args[1]], 1.0 if op == "add" else -1.0)
        elif op == "mul":
            memo[n] = times(memo[n.args[0]], memo[n.args[1]])
        elif op == "div":
            q = memo[n.args[1]]
            if len(q) == 1:
                (m, c), = q.items()
                memo[n] = times(memo[n.args[0]], {tuple((k, -p) for k, p in m): 1.0 / c})
            else:
                memo[n] = times(memo[n.args[0]], atom(power(back(q), -1.0)))
        elif op == "pow" and float(n.value).is_integer() and 0 < n.value <= 16:
            out = {(): 1.0}
            for _ in range(int(n.value)):
                out = times(out, memo[n.args[0]])
            memo[n] = out
        elif op == "pow":
            memo[n] = atom(power(back(memo[n.args[0]]), n.value))
        else:
            memo[n] = atom(_SMART[op](back(memo[n.args[0]])))
    return back(memo[e])


# ---------------------------------------------------------------------------
# differentiation


def differentiate(e, variable: str) -> Expression:
    """Exact derivative of ``e`` with respect to one coordinate."""
    if variable not in COORDINATES:
        raise ValueError(f"cannot differentiate with respect to {variable!r}")
    e = as_expression(e)
    # iterative, so deep trees do not hit the recursion limit
    for n in _postorder(e):
        if variable not in n._derivs:
            n._derivs[variable] = _derivative_rule(n, variable)
    return e._derivs[variable]


def _derivative_rule(n: Expression, v: str) -> Expression:
    op = n.op
    if op == "const":
        return ZERO
    if op == "var":
        return ONE if n.value == v else ZERO
    a = n.args[0]
    da = a._derivs[v]
    if op == "neg":
        return neg(da)
    if op in ("add", "sub"):
        db = n.args[1]._derivs[v]
        return add(da, db) if op == "add" else sub(da, db)
    if op == "mul":
        b = n.args[1]
        db = b._derivs[v]
        return add(mul(da, b), mul(a, db))
    if op == "div":
        b = n.args[1]
        db = b._derivs[v]
        if db.is_number(0.0):
            return div(da, b)
        return div(sub(mul(da, b), mul(a, db)), power(b, 2.0))
    if da.is_number(0.0):
        return ZERO
    if op == "pow":
        return mul(mul(n.value, power(a, n.value - 1.0)), da)
    if op == "sin":
        return mul(cos(a), da)
    if op == "cos":
        return neg(mul(sin(a), da))
    if op == "exp":
        return mul(n, da)
    if op == "ln":
        return div(da, a)
    if op == "sqrt":
        return div(da, mul(2.0, n))
    raise AssertionError(op)


# ---------------------------------------------------------------------------
# evaluation


def _postorder(e: Expression):
    seen = set()
    out = []
    stack = [(e, False)]
    while stack:
        n, expanded = stack.pop()
        if expanded:
            out.append(n)
            continue
        if n in seen:
            continue
        seen.add(n)
        stack.append((n, True))
        for a in n.args:
            if a not in seen:
                stack.append((a, False))
    return out


def free_variables(e) -> frozenset:
    return frozenset(n.value for n in _postorder(as_expression(e)) if n.op == "var")


def count_nodes(e) -> int:
    """Number of distinct nodes in the shared DAG."""
    return len(_postorder(as_expression(e)))


def evaluate_array(e, env: Mapping[str, np.ndarray], memo: dict | None = None) -> np.ndarray:
    """Evaluate ``e`` elementwise on arrays of coordinates.

    ``env`` maps coordinate names to equally shaped arrays (missing names
    default to zero).  ``memo`` may be shared across calls on the same
    ``env`` so that common subtrees are computed once.
    """
    e = as_expression(e)
    if memo is None:
        memo = {}
    if e in memo:
        return memo[e]
    shape = np.shape(next(iter(env.values()))) if env else ()
    with np.errstate(all="ignore"):
        for n in _postorder(e):
            if n in memo:
                continue
            memo[n] = _eval_node(n, memo, env, shape)
    return memo[e]


def _bad(n: Expression, reason: str, mask, env, shape):
    idx = np.flatnonzero(np.broadcast_to(mask, shape) if shape else np.atleast_1d(mask))[0]
    point = {}
    for c in COORDINATES:
        arr = env.get(c)
        if arr is None:
            point[c] = 0.0
        else:
            point[c] = float(np.broadcast_to(arr, shape).ravel()[idx]) if shape else float(arr)
    raise EvaluationDomainError(reason, n, point)


def _eval_node(n: Expression, memo, env, shape):
    op = n.op
    if op == "const":
        return np.full(shape, n.value) if shape else n.value
    if op == "var":
        v = env.get(n.value)
        if v is None:
            return np.zeros(shape) if shape else 0.0
        return np.asarray(v, dtype=float)
    a = memo[n.args[0]]
    if op == "neg":
        return -a
    if op in BINARY_OPS:
        b = memo[n.args[1]]
        if op == "add":
            return a + b
        if op == "sub":
            return a - b
        if op == "mul":
            return a * b
        bad = np.asarray(b) == 0
        if np.any(bad):
            _bad(n, "division by zero", bad, env, shape)
        return a / b
    if op == "sin":
        return np.sin(a)
    if op == "cos":
        return np.cos(a)
    if op == "exp":
        return np.exp(a)
    if op == "ln":
        bad = np.asarray(a) <= 0
        if np.any(bad):
            _bad(n, "logarithm of non-positive value", bad, env, shape)
        return np.log(a)
    if op == "sqrt":
        bad = np.asarray(a) < 0
        if np.any(bad):
            _bad(n, "square root of negative value", bad, env, shape)
        return np.sqrt(a)
    if op == "pow":
        p = n.value
        arr = np.asarray(a)
        if not float(p).is_integer():
            bad = arr < 0
            if np.any(bad):
                _bad(n, "negative base with non-integer exponent", bad, env, shape)
        if p < 0:
            bad = arr == 0
            if np.any(bad):
                _bad(n, "zero raised to a negative power", bad, env, shape)
        if p == 2.0:
            return a * a
        return np.power(a, p)
    raise AssertionError(op)


def evaluate(e, p) -> float:
    """Evaluate at one point; ``p`` is a :class:`Point4` or a mapping."""
    if isinstance(p, Point4):
        env = p._asdict()
    elif isinstance(p, Mapping):
        env = {k: float(v) for k, v in p.items()}
    else:
        env = Point4.of(*p)._asdict()
    env = {k: np.array([v], dtype=float) for k, v in env.items()}
    return float(evaluate_array(e, env)[0])


# ---------------------------------------------------------------------------
# printing


def _format_number(c: float) -> str:
    if float(c).is_integer() and abs(c) < 1e16:
        return str(int(c))
    return repr(float(c))


def _is_atom_text(e: Expression) -> bool:
    return e.op in ("var", "const", "neg") or e.op in FUNCTIONS


def to_text(e) -> str:
    """Render ``e`` in the parser grammar; parsing the result gives ``e`` back."""
    e = as_expression(e)
    memo: dict = {}
    for n in _postorder(e):
        memo[n] = _render(n, memo)
    return memo[e]


def _wrap(s: str) -> str:
    return f"({s})"


def _render(n: Expression, memo) -> str:
    op = n.op
    if op == "const":
        return _format_number(n.value)
    if op == "var":
        return n.value
    if op in FUNCTIONS:
        return f"{op}({memo[n.args[0]]})"
    if op == "neg":
        a = n.args[0]
        inner = memo[a]
        # "-2" would re-parse as a negative literal, so parenthesise constants
        if a.op == "var" or a.op in FUNCTIONS or a.op == "neg":
            return "-" + inner
        return "-" + _wrap(inner)
    if op == "pow":
        a = n.args[0]
        # (-x)^2, never -x^2, so the text reads the way it parses
        plain = _is_atom_text(a) and a.op != "neg" and not (a.op == "const" and a.value < 0)
        base = memo[a] if plain else _wrap(memo[a])
        return f"{base}^{_format_number(n.value)}"
    a, b = n.args
    sa, sb = memo[a], memo[b]
    if op in ("add", "sub"):
        if b.op in ("add", "sub"):
            sb = _wrap(sb)
        return f"{sa} {'+' if op == 'add' else '-'} {sb}"
    if a.op in ("add", "sub"):
        sa = _wrap(sa)
    if b.op in ("add", "sub", "mul", "div"):
        sb = _wrap(sb)
    return f"{sa}{'*' if op == 'mul' else '/'}{sb}"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionSyntaxError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value or kind != "op":
            found = "end of input" if kind == "end" else repr(val)
            raise ExpressionSyntaxError(f"expected {value!r}, found {found}", pos, self.text)

    def fail(self, message, pos):
        raise ExpressionSyntaxError(message, pos, self.text)

    def parse(self) -> Expression:
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            self.fail(f"unexpected {val!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, _ = self.take()
            e = node("add" if op == "+" else "sub", e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, _ = self.take()
            e = node("mul" if op == "*" else "div", e, self.factor())
        return e

    def factor(self):
        base = self.atom()
        if self.peek() == ("op", "^", self.peek()[2]):
            self.take()
            pos = self.peek()[2]
            exponent = simplify(self.atom())
            if exponent.op != "const":
                self.fail("exponent must be a constant", pos)
            return node("pow", base, value=exponent.value)
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return const(float(val))
        if kind == "ident":
            if val in FUNCTIONS:
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return node(val, inner)
            if val in COORDINATES:
                return var(val)
            raise UnknownIdentifierError(val, pos, self.text)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "op" and val == "-":
            if self.peek()[0] == "num":
                _, num, _ = self.take()
                return const(-float(num))
            return node("neg", self.atom())
        found = "end of input" if kind == "end" else repr(val)
        self.fail(f"unexpected {found}", pos)


def parse_expression(text: str) -> Expression:
    """Parse ``text`` into an unsimplified expression tree."""
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    return _Parser(text).parse()
