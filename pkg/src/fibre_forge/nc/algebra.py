"""Finite-dimensional unital associative algebras over Q.

An algebra is given by structure constants ``e_i e_j = sum_k c_ij^k e_k``
and the coordinates of its unit.  Internally the basis is changed so that
basis vector 0 is the unit; the remaining basis vectors then represent
A / Q.1 (the "barred" algebra) directly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

CATALOG = ("rationals", "rationals-squared", "dual-numbers", "matrix-2x2", "upper-triangular")


class AlgebraError(ValueError):
    pass


class AssociativityError(AlgebraError):
    def __init__(self, triple, labels=None):
        self.triple = tuple(triple)
        names = [labels[t] for t in triple] if labels else list(triple)
        super().__init__("associativity fails: ({0}*{1})*{2} != {0}*({1}*{2})".format(*names))


class UnitError(AlgebraError):
    pass


def _q(v):
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        raise AlgebraError(f"structure constants must be exact rationals, got float {v!r}")
    return Fraction(v)


def _solve(mat, rhs):
    """Solve a small square rational system by Gauss-Jordan (None if singular)."""
    n = len(mat)
    aug = [list(row) + [r] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


class FiniteDimAlgebra:
    """A validated unital associative algebra over Q.

    ``table[i][j]`` is the coordinate list of e_i e_j in the given basis.
    After construction ``mul[a][b]`` holds the product of rebased basis
    vectors as a sparse dict, with basis vector 0 the unit.
    """

    def __init__(self, table, unit, labels=None, name=""):
        m = len(table)
        if m == 0:
            raise AlgebraError("empty structure-constant table")
        self.name = name
        self.dim = m
        self.labels = list(labels) if labels else [f"e{i}" for i in range(m)]
        if len(self.labels) != m:
            raise AlgebraError("label count does not match the dimension")
        try:
            self.table = [[[_q(v) for v in table[i][j]] for j in range(m)] for i in range(m)]
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise AlgebraError(f"bad structure constant: {exc}") from exc
        for i in range(m):
            if len(table[i]) != m or any(len(v) != m for v in self.table[i]):
                raise AlgebraError("the structure-constant table must be m x m x m")
        self.unit = [_q(v) for v in unit]
        if len(self.unit) != m:
            raise AlgebraError("unit has the wrong length")
        self._check_associative()
        self._check_unit()
        self._rebase()

    # -- validation -------------------------------------------------------

    def _prod_old(self, x, y):
        m = self.dim
        out = [Fraction(0)] * m
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj:
                    continue
                c = xi * yj
                for k, v in enumerate(self.table[i][j]):
                    if v:
                        out[k] += c * v
        return out

    def _e(self, i):
        return [Fraction(int(k == i)) for k in range(self.dim)]

    def _check_associative(self):
        m = self.dim
        for i in range(m):
            for j in range(m):
                ij = self.table[i][j]
                for k in range(m):
                    jk = self.table[j][k]
                    if self._prod_old(ij, self._e(k)) != self._prod_old(self._e(i), jk):
                        raise AssociativityError((i, j, k), self.labels)

    def _check_unit(self):
        for i in range(self.dim):
            e = self._e(i)
            if self._prod_old(self.unit, e) != e or self._prod_old(e, self.unit) != e:
                raise UnitError(f"declared unit does not act as identity on {self.labels[i]}")

    # -- rebasing -----------------------------------------------------------

    def _rebase(self):
        m = self.dim
        s = next(i for i, v in enumerate(self.unit) if v)
        others = [i for i in range(m) if i != s]
        # columns of P: new basis vectors in old coordinates
        cols = [self.unit] + [self._e(i) for i in others]
        self.P = [[cols[c][r] for c in range(m)] for r in range(m)]
        self.new_labels = ["1"] + [self.labels[i] for i in others]
        self.mul = []
        for a in range(m):
            row = []
            for b in range(m):
                row.append(self.to_new(self._prod_old(cols[a], cols[b])))
            self.mul.append(row)

    def to_new(self, old):
        """Rebased sparse coordinates of an element given in the original basis."""
        old = [_q(v) for v in old]
        if len(old) != self.dim:
            raise AlgebraError("element has the wrong length")
        x = _solve(self.P, old)
        return {k: v for k, v in enumerate(x) if v}

    def to_old(self, new):
        out = [Fraction(0)] * self.dim
        for k, v in new.items():
            for r in range(self.dim):
                out[r] += self.P[r][k] * v
        return out

    # -- arithmetic on rebased sparse elements -----------------------------

    def multiply(self, x, y):
        out = {}
        for a, xa in x.items():
            for b, yb in y.items():
                for k, v in self.mul[a][b].items():
                    nv = out.get(k, 0) + xa * yb * v
                    if nv:
                        out[k] = nv
                    else:
                        out.pop(k, None)
        return out

    @property
    def one(self):
        return {0: Fraction(1)}

    def is_commutative(self):
        m = self.dim
        return all(self.mul[a][b] == self.mul[b][a] for a in range(m) for b in range(m))

    def __repr__(self):
        return f"<FiniteDimAlgebra {self.name or '?'} dim={self.dim}>"


def algebra_from_structure_constants(table, unit, labels=None, name=""):
    return FiniteDimAlgebra(table, unit, labels, name)


def algebra_from_json(data):
    """Build an algebra from the catalog JSON layout.

    ``{"name", "basis": [labels], "unit": [coords], "products": [[coords]]}``
    where ``products[i][j]`` is e_i e_j; coordinates are ints or "p/q" strings.
    """
    try:
        return FiniteDimAlgebra(data["products"], data["unit"], data.get("basis"),
                                data.get("name", ""))
    except KeyError as exc:
        raise AlgebraError(f"algebra description lacks {exc}") from exc


def load_algebra(name):
    """One of the shipped catalog algebras."""
    if name not in CATALOG:
        raise AlgebraError(f"unknown catalog algebra {name!r}; known: {', '.join(CATALOG)}")
    text = resources.files("fibre_forge.data.algebras").joinpath(f"{name}.json").read_text()
    return algebra_from_json(json.loads(text))


def matrix_algebra_table(r):
    """Structure constants of M_r(Q) in the basis e_11, e_12, ..., e_rr."""
    idx = [(i, j) for i in range(r) for j in range(r)]
    table = []
    for (i, j) in idx:
        row = []
        for (k, l) in idx:
            v = [0] * len(idx)
            if j == k:
                v[idx.index((i, l))] = 1
            row.append(v)
        table.append(row)
    unit = [int(i == j) for (i, j) in idx]
    labels = [f"e{i + 1}{j + 1}" for (i, j) in idx]
    return table, unit, labels


__all__ = [
    "FiniteDimAlgebra", "AlgebraError", "AssociativityError", "UnitError", "CATALOG",
    "algebra_from_structure_constants", "algebra_from_json", "load_algebra",
    "matrix_algebra_table",
]
