"""Differential forms with expression coefficients, and matrices of them.

A form of degree q on a chart with ``dim`` coordinates is stored as a map
from strictly increasing index tuples (``(0,)`` is dx, ``(0, 1)`` is
dx^dy) to coefficient expressions.  Missing keys are zero.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .expr import ZERO, ONE, as_expr, compile_exprs, differentiate

VARS = ("x", "y")


def components(dim, degree):
    """Basis monomials of the given degree, in canonical order."""
    return list(combinations(range(dim), degree))


def _merge_sign(first, second):
    """Sign of the permutation sorting ``first + second`` (0 if they overlap)."""
    if set(first) & set(second):
        return 0
    inversions = sum(1 for a in first for b in second if a > b)
    return -1 if inversions % 2 else 1


class Form:
    """A differential form: ``degree``, ``dim`` and coefficients ``terms``."""

    __slots__ = ("dim", "degree", "terms")

    def __init__(self, dim, degree, terms=None):
        self.dim = dim
        self.degree = degree
        clean = {}
        for key, coeff in (terms or {}).items():
            key = tuple(key)
            if len(key) != degree or list(key) != sorted(set(key)):
                raise ValueError(f"bad monomial {key} for degree {degree}")
            if key and max(key) >= dim:
                raise ValueError(f"monomial {key} exceeds dimension {dim}")
            coeff = as_expr(coeff)
            if coeff is not ZERO:
                clean[key] = coeff
        self.terms = clean

    @classmethod
    def function(cls, dim, expr):
        return cls(dim, 0, {(): expr})

    @classmethod
    def zero(cls, dim, degree):
        return cls(dim, degree)

    def coeff(self, key):
        return self.terms.get(tuple(key), ZERO)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        _check_same(self, other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, ZERO) + v
        return Form(self.dim, self.degree, terms)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, factor):
        factor = as_expr(factor)
        return Form(self.dim, self.degree, {k: factor * v for k, v in self.terms.items()})

    def wedge(self, other):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                sign = _merge_sign(k1, k2)
                if sign == 0:
                    continue
                key = tuple(sorted(k1 + k2))
                term = c1 * c2
                if sign < 0:
                    term = -term
                out[key] = out.get(key, ZERO) + term
        return Form(self.dim, self.degree + other.degree, out)

    __xor__ = wedge

    def d(self):
        """Exterior derivative, computed symbolically."""
        out = {}
        for key, coeff in self.terms.items():
            for a in range(self.dim):
                if a in key:
                    continue
                sign = -1 if sum(1 for b in key if b < a) % 2 else 1
                deriv = differentiate(coeff, VARS[a])
                if deriv is ZERO:
                    continue
                new = tuple(sorted(key + (a,)))
                term = deriv if sign > 0 else -deriv
                out[new] = out.get(new, ZERO) + term
        return Form(self.dim, self.degree + 1, out)

    def component_exprs(self):
        return [self.coeff(k) for k in components(self.dim, self.degree)]

    def evaluate(self, pts):
        """Component values, shape ``(npts, ncomponents)``."""
        exprs = self.component_exprs()
        return evaluate_exprs(exprs, pts).T

    def __repr__(self):
        return f"Form(dim={self.dim}, degree={self.degree}, terms={self.terms!r})"


def _check_same(a, b):
    if a.dim != b.dim or a.degree != b.degree:
        raise ValueError("forms of different dimension/degree")


def evaluate_exprs(exprs, pts):
    """Evaluate a list of expressions at points ``pts`` of shape ``(npts, d)``.

    Returns a complex array of shape ``(len(exprs), npts)``.
    """
    pts = np.asarray(pts, dtype=float)
    xs = pts[:, 0]
    ys = pts[:, 1] if pts.shape[1] > 1 else np.zeros_like(xs)
    if not exprs:
        return np.zeros((0, len(xs)), dtype=complex)
    return compile_exprs(exprs).run(xs, ys)


class MatrixForm:
    """An ``n x n`` matrix whose entries are forms of a common degree."""

    __slots__ = ("dim", "degree", "n", "entries")

    def __init__(self, dim, degree, entries):
        self.dim = dim
        self.degree = degree
        self.entries = tuple(tuple(row) for row in entries)
        self.n = len(self.entries)
        for row in self.entries:
            if len(row) != self.n:
                raise ValueError("matrix forms must be square")
            for f in row:
                if f.dim != dim or f.degree != degree:
                    raise ValueError("entry has wrong dimension/degree")

    @classmethod
    def from_functions(cls, dim, matrix):
        return cls(dim, 0, [[Form.function(dim, e) for e in row] for row in matrix])

    @classmethod
    def zero(cls, dim, degree, n):
        return cls(dim, degree, [[Form.zero(dim, degree)] * n for _ in range(n)])

    @classmethod
    def identity(cls, dim, n):
        return cls.from_functions(dim, [[ONE if i == j else ZERO for j in range(n)]
                                        for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other):
        """Matrix product with wedge-multiplied entries."""
        if self.n != other.n:
            raise ValueError("size mismatch")
        n = self.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = Form.zero(self.dim, self.degree + other.degree)
                for k in range(n):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a.terms and b.terms:
                        acc = acc + a.wedge(b)
                row.append(acc)
            rows.append(row)
        return MatrixForm(self.dim, self.degree + other.degree, rows)

    def __add__(self, other):
        return MatrixForm(self.dim, self.degree,
                          [[a + b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, factor):
        return MatrixForm(self.dim, self.degree,
                          [[f.scale(factor) for f in row] for row in self.entries])

    def d(self):
        return MatrixForm(self.dim, self.degree + 1,
                          [[f.d() for f in row] for row in self.entries])

    def trace(self):
        acc = Form.zero(self.dim, self.degree)
        for i in range(self.n):
            acc = acc + self.entries[i][i]
        return acc

    def power(self, k):
        """k-fold wedge power (identity for k = 0)."""
        if k == 0:
            return MatrixForm.identity(self.dim, self.n)
        out = self
        for _ in range(k - 1):
            out = out @ self
        return out

    def is_zero(self):
        return all(f.is_zero() for row in self.entries for f in row)

    def evaluate(self, pts):
        """Values of shape ``(npts, ncomponents, n, n)``."""
        comps = components(self.dim, self.degree)
        n = self.n
        exprs = [self.entries[i][j].coeff(c) for c in comps for i in range(n) for j in range(n)]
        vals = evaluate_exprs(exprs, pts)
        npts = np.asarray(pts).shape[0]
        return vals.T.reshape(npts, len(comps), n, n)


def scalar_matrix_form(dim, matrix):
    """Wrap a matrix of expressions as a degree-0 :class:`MatrixForm`."""
    return MatrixForm.from_functions(dim, [[as_expr(e) for e in row] for row in matrix])


def matrix_d(dim, matrix):
    """Entrywise differential of an expression matrix: a degree-1 MatrixForm."""
    return scalar_matrix_form(dim, matrix).d()


# -- symbolic matrix algebra on expression matrices --------------------------

def expr_matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = ZERO
            for k in range(m):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def expr_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    acc = ZERO
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * expr_det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def expr_inverse(m):
    """Symbolic inverse by the adjugate formula."""
    n = len(m)
    m = [[as_expr(e) for e in row] for row in m]
    if n == 1:
        return [[ONE / m[0][0]]]
    det = expr_det(m)
    out = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            cof = expr_det(minor)
            if (i + j) % 2:
                cof = -cof
            out[j][i] = cof / det
    return out


def pullback_components(values, jac, degree):
    """Pull back form components through a coordinate change.

    ``values``: ``(npts, ncomp, ...)`` components in the target chart;
    ``jac``: ``(npts, d, d)`` with ``jac[:, b, a] = d x_target^b / d x_source^a``.
    Returns components in the source chart (same layout).
    """
    values = np.asarray(values)
    d = jac.shape[1]
    if degree == 0:
        return values
    if degree == d:
        det = np.linalg.det(jac) if d > 1 else jac[:, 0, 0]
        return values * det.reshape((-1, 1) + (1,) * (values.ndim - 2))
    if degree == 1:
        return np.einsum("pb...,pba->pa...", values, jac)
    raise ValueError("unsupported degree for pullback")


__all__ = [
    "Form", "MatrixForm", "components", "evaluate_exprs", "scalar_matrix_form",
    "matrix_d", "expr_matmul", "expr_det", "expr_inverse", "pullback_components",
]
