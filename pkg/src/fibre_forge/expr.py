"""Expression language for complex-valued functions of two chart coordinates.

Expressions are immutable, hash-consed trees (structurally equal nodes are
the same object) over the variables ``x`` and ``y``.  They support exact
symbolic partial differentiation and vectorised numerical evaluation.

The concrete grammar is documented in ``docs/dsl.md``.
"""

from __future__ import annotations

import math
import weakref
from fractions import Fraction
from numbers import Number

import numpy as np

__all__ = [
    "Expr", "Const", "Var", "Add", "Sub", "Mul", "Div", "Neg", "Pow",
    "Exp", "Sqrt", "Atan2", "SmoothStep",
    "DSLError", "ParseError", "DomainError",
    "parse", "differentiate", "evaluate", "evaluate_many", "compile_exprs",
    "substitute", "to_source", "as_expr", "node_count",
    "ZERO", "ONE", "I", "X", "Y",
    "smoothstep_derivative",
]

VARIABLES = ("x", "y")


class DSLError(Exception):
    """Base class for errors raised by the expression language."""


class ParseError(DSLError):
    """Malformed source text.  ``offset`` is the byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


class DomainError(DSLError, ArithmeticError):
    """Evaluation left the domain of an operation (pole, negative sqrt...)."""

    def __init__(self, message, point=None):
        if point is not None:
            message = f"{message} at point {tuple(float(v) for v in point)}"
        super().__init__(message)
        self.point = point


# ---------------------------------------------------------------------------
# Nodes
# ---------------------------------------------------------------------------

_INTERN = weakref.WeakValueDictionary()


class Expr:
    """Base expression node.

    Nodes are interned: constructing a node equal to a live one returns
    the existing object, so identity is structural equality.
    """

    __slots__ = ("args", "_deriv", "__weakref__")

    def __new__(cls, *args):
        key = (cls,) + args
        node = _INTERN.get(key)
        if node is None:
            node = object.__new__(cls)
            node.args = args
            node._deriv = {}
            _INTERN[key] = node
        return node

    def children(self):
        return tuple(a for a in self.args if isinstance(a, Expr))

    # arithmetic builds folded expressions
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        return power(self, n)

    def __str__(self):
        return to_source(self)

    def __repr__(self):
        name = type(self).__name__
        return f"{name}({', '.join(repr(a) for a in self.args)})"

    def __reduce__(self):
        return (type(self), self.args)


def _to_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("constants must be finite")
        return Fraction(repr(v))
    return Fraction(v)


class Const(Expr):
    """Complex constant with rational real and imaginary parts."""

    __slots__ = ()

    def __new__(cls, re, im=0):
        return super().__new__(cls, _to_fraction(re), _to_fraction(im))

    @property
    def re(self):
        return self.args[0]

    @property
    def im(self):
        return self.args[1]

    @property
    def value(self):
        return complex(float(self.args[0]), float(self.args[1]))

    def is_zero(self):
        return self.args[0] == 0 and self.args[1] == 0

    def is_one(self):
        return self.args[0] == 1 and self.args[1] == 0


class Var(Expr):
    __slots__ = ()

    def __new__(cls, name):
        if name not in VARIABLES:
            raise ValueError(f"unknown variable {name!r}")
        return super().__new__(cls, name)

    @property
    def name(self):
        return self.args[0]


class Add(Expr):
    __slots__ = ()


class Sub(Expr):
    __slots__ = ()


class Mul(Expr):
    __slots__ = ()


class Div(Expr):
    __slots__ = ()


class Neg(Expr):
    __slots__ = ()


class Pow(Expr):
    """Integer power ``base ^ n``."""

    __slots__ = ()

    def __new__(cls, base, n):
        if not isinstance(n, int) or isinstance(n, bool):
            raise TypeError("exponent must be an int")
        return super().__new__(cls, base, n)


class Exp(Expr):
    __slots__ = ()


class Sqrt(Expr):
    """Principal square root; negative real arguments are a domain error."""

    __slots__ = ()


class Atan2(Expr):
    """``atan2(y, x)`` of two real-valued arguments."""

    __slots__ = ()


class SmoothStep(Expr):
    """Order-``k`` derivative of the smooth step sigma(t; a, b).

    sigma is 0 for t <= a, 1 for t >= b and monotone in between, built from
    the glue f(s) = exp(-1/s): sigma = f(s) / (f(s) + f(1 - s)) with
    s = (t - a) / (b - a).  It is C-infinity and every derivative vanishes
    exactly outside (a, b).
    """

    __slots__ = ()

    def __new__(cls, arg, lo, hi, order=0):
        lo, hi = _to_fraction(lo), _to_fraction(hi)
        if not lo < hi:
            raise ValueError("smoothstep needs a < b")
        if not isinstance(order, int) or order < 0:
            raise ValueError("smoothstep order must be a non-negative int")
        return super().__new__(cls, arg, lo, hi, order)


ZERO = Const(0)
ONE = Const(1)
I = Const(0, 1)
X = Var("x")
Y = Var("y")


def as_expr(v):
    if isinstance(v, Expr):
        return v
    if isinstance(v, complex):
        return Const(v.real, v.imag)
    if isinstance(v, (Number, Fraction)):
        return Const(v)
    if isinstance(v, str):
        return parse(v)
    raise TypeError(f"cannot convert {type(v).__name__} to Expr")


# ---------------------------------------------------------------------------
# Folding constructors (constant folding only, no other simplification)
# ---------------------------------------------------------------------------

def _cval(c):
    return c.re, c.im


def _cmul(a, b):
    ar, ai = a
    br, bi = b
    return ar * br - ai * bi, ar * bi + ai * br


def _cdiv(a, b):
    br, bi = b
    den = br * br + bi * bi
    r, i = _cmul(a, (br, -bi))
    return r / den, i / den


def add(a, b):
    if isinstance(a, Const) and a.is_zero():
        return b
    if isinstance(b, Const) and b.is_zero():
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.re + b.re, a.im + b.im)
    return Add(a, b)


def sub(a, b):
    if isinstance(b, Const) and b.is_zero():
        return a
    if isinstance(a, Const) and a.is_zero():
        return neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.re - b.re, a.im - b.im)
    if a is b:
        return ZERO
    return Sub(a, b)


def mul(a, b):
    if isinstance(a, Const):
        if a.is_zero():
            return ZERO
        if a.is_one():
            return b
        if isinstance(b, Const):
            return Const(*_cmul(_cval(a), _cval(b)))
    if isinstance(b, Const):
        if b.is_zero():
            return ZERO
        if b.is_one():
            return a
    return Mul(a, b)


def div(a, b):
    if isinstance(b, Const):
        if b.is_zero():
            raise DomainError("division by constant zero")
        if b.is_one():
            return a
        if isinstance(a, Const):
            return Const(*_cdiv(_cval(a), _cval(b)))
    if isinstance(a, Const) and a.is_zero():
        return ZERO
    return Div(a, b)


def neg(a):
    if isinstance(a, Const):
        return Const(-a.re, -a.im)
    if isinstance(a, Neg):
        return a.args[0]
    return Neg(a)


def power(a, n):
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const):
        if a.is_zero() and n < 0:
            raise DomainError("zero to a negative power")
        v = (Fraction(1), Fraction(0))
        base = _cval(a) if n > 0 else _cdiv((Fraction(1), Fraction(0)), _cval(a))
        for _ in range(abs(n)):
            v = _cmul(v, base)
        return Const(*v)
    return Pow(a, n)


def exp(a):
    if isinstance(a, Const) and a.is_zero():
        return ONE
    return Exp(a)


def sqrt(a):
    if isinstance(a, Const) and (a.is_zero() or a.is_one()):
        return a
    return Sqrt(a)


def atan2(a, b):
    return Atan2(a, b)


def smoothstep(t, lo, hi, order=0):
    return SmoothStep(t, lo, hi, order)


# ---------------------------------------------------------------------------
# Differentiation and substitution
# ---------------------------------------------------------------------------

def differentiate(e, var):
    """Exact partial derivative of ``e`` with respect to ``"x"`` or ``"y"``."""
    if isinstance(var, Var):
        var = var.name
    if var not in VARIABLES:
        raise ValueError(f"unknown variable {var!r}")
    return _diff(e, var)


def _diff(e, v):
    cached = e._deriv.get(v)
    if cached is not None:
        return cached
    # iterative post-order so deep trees do not hit the recursion limit
    stack = [e]
    while stack:
        node = stack[-1]
        if v in node._deriv:
            stack.pop()
            continue
        pending = [c for c in node.children() if v not in c._deriv]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        node._deriv[v] = _diff_node(node, v)
    return e._deriv[v]


def _diff_node(e, v):
    t = type(e)
    if t is Const:
        return ZERO
    if t is Var:
        return ONE if e.name == v else ZERO
    args = e.args
    if t is Add:
        return add(args[0]._deriv[v], args[1]._deriv[v])
    if t is Sub:
        return sub(args[0]._deriv[v], args[1]._deriv[v])
    if t is Neg:
        return neg(args[0]._deriv[v])
    if t is Mul:
        a, b = args
        return add(mul(a._deriv[v], b), mul(a, b._deriv[v]))
    if t is Div:
        a, b = args
        da, db = a._deriv[v], b._deriv[v]
        return sub(div(da, b), div(mul(a, db), power(b, 2)))
    if t is Pow:
        a, n = args
        if n == 0:
            return ZERO
        return mul(mul(Const(n), power(a, n - 1)), a._deriv[v])
    if t is Exp:
        return mul(e, args[0]._deriv[v])
    if t is Sqrt:
        return div(args[0]._deriv[v], mul(Const(2), e))
    if t is Atan2:
        yy, xx = args
        num = sub(mul(xx, yy._deriv[v]), mul(yy, xx._deriv[v]))
        return div(num, add(power(xx, 2), power(yy, 2)))
    if t is SmoothStep:
        arg, lo, hi, k = args
        return mul(SmoothStep(arg, lo, hi, k + 1), arg._deriv[v])
    raise TypeError(f"unknown node {t.__name__}")


_REBUILD = {
    Add: add, Sub: sub, Mul: mul, Div: div, Neg: neg, Exp: exp, Sqrt: sqrt,
    Atan2: atan2,
}


def substitute(e, mapping):
    """Replace variables by expressions, e.g. ``{"x": X + 1}``."""
    memo = {}
    for name, val in mapping.items():
        memo[Var(name)] = as_expr(val)
    for node in _postorder([e]):
        if node in memo:
            continue
        t = type(node)
        if t is Const or t is Var:
            memo[node] = node
        elif t is Pow:
            memo[node] = power(memo[node.args[0]], node.args[1])
        elif t is SmoothStep:
            arg, lo, hi, k = node.args
            memo[node] = SmoothStep(memo[arg], lo, hi, k)
        else:
            memo[node] = _REBUILD[t](*(memo[a] for a in node.args))
    return memo[e]


def _postorder(roots):
    seen = set()
    order = []
    for root in roots:
        if id(root) in seen:
            continue
        stack = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for c in reversed(node.children()):
                if id(c) not in seen:
                    stack.append((c, False))
    return order


def node_count(*roots):
    """Number of distinct nodes in the DAG spanned by ``roots``."""
    return len(_postorder(roots))


# ---------------------------------------------------------------------------
# Smooth step evaluation
# ---------------------------------------------------------------------------

_GLUE_POLYS = [np.polynomial.Polynomial([1.0])]


def _glue_poly(k):
    # d^k/du^k exp(-1/u) = P_k(1/u) exp(-1/u),  P_{k+1}(w) = w^2 (P_k(w) - P_k'(w))
    w2 = np.polynomial.Polynomial([0.0, 0.0, 1.0])
    while len(_GLUE_POLYS) <= k:
        p = _GLUE_POLYS[-1]
        _GLUE_POLYS.append(w2 * (p - p.deriv()))
    return _GLUE_POLYS[k]


def _glue_taylor(u, order):
    """Taylor coefficients f^(j)(u)/j! of f(u) = exp(-1/u), u in (0, 1)."""
    out = np.zeros((order + 1,) + u.shape)
    ok = u > 1.0 / 700.0
    w = np.where(ok, 1.0 / np.where(ok, u, 1.0), 0.0)
    ew = np.where(ok, np.exp(-w), 0.0)
    for j in range(order + 1):
        out[j] = np.where(ok, _glue_poly(j)(w) * ew, 0.0) / math.factorial(j)
    return out


def smoothstep_derivative(t, lo, hi, order=0):
    """Evaluate the ``order``-th derivative of sigma(t; lo, hi) on a real array."""
    t = np.asarray(t, dtype=float)
    lo, hi = float(lo), float(hi)
    width = hi - lo
    s = (t - lo) / width
    inside = (s > 0.0) & (s < 1.0)
    result = np.zeros_like(s)
    if order == 0:
        result[s >= 1.0] = 1.0
    if not inside.any():
        return result
    si = s[inside]
    g = _glue_taylor(si, order)
    h = _glue_taylor(1.0 - si, order)
    for j in range(1, order + 1, 2):
        h[j] = -h[j]
    den = g + h
    # series division q = g / den
    q = np.empty_like(g)
    q[0] = g[0] / den[0]
    for j in range(1, order + 1):
        acc = g[j].copy()
        for l in range(1, j + 1):
            acc -= den[l] * q[j - l]
        q[j] = acc / den[0]
    result[inside] = q[order] * math.factorial(order) / width ** order
    return result


# ---------------------------------------------------------------------------
# Compiled vectorised evaluation
# ---------------------------------------------------------------------------

class Program:
    """A DAG of expressions flattened into straight-line register code.

    Registers are released after their last use, so memory stays bounded
    by the width of the DAG rather than its size.
    """

    def __init__(self, roots):
        self.roots = tuple(roots)
        order = _postorder(self.roots)
        index = {id(n): k for k, n in enumerate(order)}
        self.nodes = order
        self.args = [tuple(index[id(c)] for c in n.children()) for n in order]
        self.outputs = [index[id(r)] for r in self.roots]
        last = {}
        for k, a in enumerate(self.args):
            for j in a:
                last[j] = k
        keep = set(self.outputs)
        self.release = [[] for _ in order]
        for j, k in last.items():
            if j not in keep:
                self.release[k].append(j)
        self.consts = {k: n.value for k, n in enumerate(order) if type(n) is Const}

    def __len__(self):
        return len(self.nodes)

    def run(self, xs, ys, chunk=16384):
        """Evaluate all roots at the points ``(xs[i], ys[i])``.

        Returns a complex array of shape ``(len(roots), npts)``.
        """
        xs = np.asarray(xs, dtype=float).ravel()
        ys = np.asarray(ys, dtype=float).ravel()
        npts = xs.size
        out = np.empty((len(self.roots), npts), dtype=complex)
        for start in range(0, npts, chunk):
            stop = min(start + chunk, npts)
            vals = self._run_chunk(xs[start:stop], ys[start:stop])
            for r, k in enumerate(self.outputs):
                out[r, start:stop] = vals[k]
        return out

    def _run_chunk(self, xs, ys):
        regs = {}
        nodes, args, release = self.nodes, self.args, self.release
        shape = xs.shape
        with np.errstate(all="ignore"):
            for k, node in enumerate(nodes):
                t = type(node)
                if t is Const:
                    val = self.consts[k]
                elif t is Var:
                    val = (xs if node.name == "x" else ys).astype(complex)
                else:
                    a = [regs[j] for j in args[k]]
                    val = _apply(node, a, xs, ys)
                regs[k] = val
                for j in release[k]:
                    del regs[j]
        out = {}
        for k in self.outputs:
            v = regs[k]
            if np.ndim(v) == 0:
                v = np.full(shape, v, dtype=complex)
            out[k] = v
        return out


def _first_bad(mask, xs, ys):
    idx = int(np.flatnonzero(np.broadcast_to(mask, xs.shape))[0])
    return (xs[idx], ys[idx])


def _is_real(v):
    return np.abs(np.imag(v)) <= 1e-12 * (1.0 + np.abs(np.real(v)))


def _apply(node, a, xs, ys):
    t = type(node)
    if t is Add:
        return a[0] + a[1]
    if t is Sub:
        return a[0] - a[1]
    if t is Mul:
        return a[0] * a[1]
    if t is Neg:
        return -a[0]
    if t is Div:
        bad = a[1] == 0
        if np.any(bad):
            raise DomainError("division by zero", _first_bad(bad, xs, ys))
        return a[0] / a[1]
    if t is Pow:
        n = node.args[1]
        if n < 0:
            bad = a[0] == 0
            if np.any(bad):
                raise DomainError("pole of negative power", _first_bad(bad, xs, ys))
            return 1.0 / a[0] ** (-n)
        return a[0] ** n
    if t is Exp:
        return np.exp(a[0])
    if t is Sqrt:
        v = a[0]
        bad = _is_real(v) & (np.real(v) < 0)
        if np.any(bad):
            raise DomainError("sqrt of negative real", _first_bad(bad, xs, ys))
        return np.sqrt(np.where(_is_real(v), np.real(v) + 0j, v))
    if t is Atan2:
        yy, xx = a
        bad = ~(_is_real(yy) & _is_real(xx))
        if np.any(bad):
            raise DomainError("atan2 of non-real arguments", _first_bad(bad, xs, ys))
        both0 = (np.real(yy) == 0) & (np.real(xx) == 0)
        if np.any(both0):
            raise DomainError("atan2(0, 0)", _first_bad(both0, xs, ys))
        return np.arctan2(np.real(yy), np.real(xx)) + 0j
    if t is SmoothStep:
        v = a[0]
        _, lo, hi, k = node.args
        bad = ~_is_real(v)
        if np.any(bad):
            raise DomainError("smoothstep of non-real argument", _first_bad(bad, xs, ys))
        return smoothstep_derivative(np.real(v), lo, hi, k) + 0j
    raise TypeError(f"cannot evaluate {t.__name__}")


def compile_exprs(exprs):
    """Compile a sequence of expressions into one shared :class:`Program`."""
    return Program(tuple(as_expr(e) for e in exprs))


def evaluate_many(e, xs, ys):
    """Evaluate one expression on arrays of coordinates (complex result)."""
    xs = np.asarray(xs, dtype=float)
    return compile_exprs([e]).run(xs, ys)[0].reshape(xs.shape)


def evaluate(e, point):
    """Evaluate ``e`` at a single point ``(x, y)`` (``y`` may be omitted)."""
    e = as_expr(e)
    if np.ndim(point) == 0:
        point = (point, 0.0)
    x, y = (tuple(point) + (0.0,))[:2]
    return complex(evaluate_many(e, np.array([x], float), np.array([y], float))[0])


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_FUNCTIONS = {"exp": (1, 1), "sqrt": (1, 1), "atan2": (2, 2), "smoothstep": (3, 4)}


class _Tok:
    __slots__ = ("kind", "text", "offset")

    def __init__(self, kind, text, offset):
        self.kind, self.text, self.offset = kind, text, offset


def _tokenize(src):
    toks = []
    i = 0
    n = len(src)

    def boff(k):
        return len(src[:k].encode("utf-8"))

    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    while k < n and src[k].isdigit():
                        k += 1
                    j = k
            text = src[i:j]
            if text.count(".") > 1:
                raise ParseError(f"malformed number {text!r}", boff(i))
            toks.append(_Tok("num", text, boff(i)))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(_Tok("name", src[i:j], boff(i)))
            i = j
            continue
        if c in "+-*/^(),":
            toks.append(_Tok(c, c, boff(i)))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", boff(i))
    toks.append(_Tok("end", "", len(src.encode("utf-8"))))
    return toks


class _Parser:
    def __init__(self, src):
        self.toks = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None):
        tok = self.toks[self.pos]
        if kind is not None and tok.kind != kind:
            what = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"expected {kind!r}, found {what}", tok.offset)
        self.pos += 1
        return tok

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.offset)
        return e

    def expr(self):
        e = self.term()
        while self.peek().kind in "+-":
            op = self.take().kind
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.take().kind
            rhs = self.unary()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def unary(self):
        if self.peek().kind == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        e = self.atom()
        while self.peek().kind == "^":
            self.take()
            e = Pow(e, self.exponent())
        return e

    def exponent(self):
        paren = self.peek().kind == "("
        if paren:
            self.take()
        sign = 1
        if self.peek().kind == "-":
            self.take()
            sign = -1
        tok = self.peek()
        if tok.kind != "num" or not tok.text.isdigit():
            raise ParseError("exponent must be an integer literal", tok.offset)
        self.take()
        if paren:
            self.take(")")
        return sign * int(tok.text)

    def signed_number(self):
        sign = 1
        if self.peek().kind == "-":
            self.take()
            sign = -1
        tok = self.peek()
        if tok.kind != "num":
            raise ParseError("expected a number literal", tok.offset)
        self.take()
        return sign * Fraction(tok.text)

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            return Const(Fraction(tok.text))
        if tok.kind == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if tok.kind == "name":
            self.take()
            name = tok.text
            if name in VARIABLES:
                return Var(name)
            if name == "i":
                return I
            if name in _FUNCTIONS:
                return self.call(name, tok)
            raise ParseError(f"unknown identifier {name!r}", tok.offset)
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {what}", tok.offset)

    def call(self, name, name_tok):
        lo_arity, hi_arity = _FUNCTIONS[name]
        self.take("(")
        if name == "smoothstep":
            args = [self.expr()]
            for _ in range(2):
                self.take(",")
                args.append(self.signed_number())
            if self.peek().kind == ",":
                self.take(",")
                tok = self.peek()
                if tok.kind != "num" or not tok.text.isdigit():
                    raise ParseError("smoothstep order must be an integer", tok.offset)
                self.take()
                args.append(int(tok.text))
            if self.peek().kind == ",":
                raise ParseError(
                    f"{name} takes {lo_arity} or {hi_arity} arguments", name_tok.offset)
            self.take(")")
            if not args[1] < args[2]:
                raise ParseError("smoothstep needs a < b", name_tok.offset)
            return SmoothStep(*args)
        args = [self.expr()]
        while self.peek().kind == ",":
            self.take()
            args.append(self.expr())
        self.take(")")
        if not lo_arity <= len(args) <= hi_arity:
            raise ParseError(
                f"{name} takes {lo_arity} argument(s), got {len(args)}", name_tok.offset)
        return {"exp": Exp, "sqrt": Sqrt, "atan2": Atan2}[name](*args)


def parse(source):
    """Parse DSL source text into an :class:`Expr` (no folding)."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

def _decimal(q):
    """Exact decimal text for a rational with a terminating expansion."""
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    digits = max(twos, fives)
    scaled = abs(q.numerator) * 10 ** digits // q.denominator
    s = str(scaled)
    if digits:
        s = s.rjust(digits + 1, "0")
        s = s[:-digits] + "." + s[-digits:]
    return s


def _real_text(q):
    s = _decimal(abs(q))
    if s is None:
        s = f"({abs(q.numerator)}/{q.denominator})"
    return s


def _const_text(c):
    re, im = c.re, c.im
    if im == 0:
        s = _real_text(re)
        return (s, 5) if re >= 0 else ("-" + s, 3)
    imag = "i" if abs(im) == 1 else _real_text(im) + "*i"
    if re == 0:
        if im > 0:
            return imag, (5 if imag == "i" else 2)
        return "-" + imag, 3
    op = "+" if im > 0 else "-"
    return f"{'-' if re < 0 else ''}{_real_text(re)} {op} {imag}", 1


_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def to_source(e):
    """Render an expression as DSL text that re-parses to the same tree."""
    memo = {}
    for node in _postorder([e]):
        memo[node] = _render(node, memo)
    return memo[e][0]


def _render(node, memo):
    t = type(node)
    if t is Const:
        return _const_text(node)
    if t is Var:
        return node.name, 5
    if t in (Exp, Sqrt, Atan2):
        name = {Exp: "exp", Sqrt: "sqrt", Atan2: "atan2"}[t]
        return f"{name}({', '.join(memo[a][0] for a in node.args)})", 5
    if t is SmoothStep:
        arg, lo, hi, k = node.args
        parts = [memo[arg][0], _signed(lo), _signed(hi)]
        if k:
            parts.append(str(k))
        return f"smoothstep({', '.join(parts)})", 5

    def wrap(child, min_prec):
        text, prec = memo[child]
        return text if prec >= min_prec else f"({text})"

    if t in (Add, Sub):
        op = " + " if t is Add else " - "
        return wrap(node.args[0], 1) + op + wrap(node.args[1], 2), 1
    if t in (Mul, Div):
        op = "*" if t is Mul else "/"
        return wrap(node.args[0], 2) + op + wrap(node.args[1], 3), 2
    if t is Neg:
        return "-" + wrap(node.args[0], 3), 3
    if t is Pow:
        base, n = node.args
        exp_text = str(n) if n >= 0 else f"(-{-n})"
        return wrap(base, 4) + "^" + exp_text, 4
    raise TypeError(t.__name__)


def _signed(q):
    s = _decimal(abs(q))
    if s is None:
        raise DSLError("smoothstep bounds must be terminating decimals")
    return ("-" if q < 0 else "") + s
