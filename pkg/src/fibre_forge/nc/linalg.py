"""Exact sparse linear algebra over Q by fraction-free integer elimination.

Vectors are dicts ``{column: int}``; rational input is cleared of
denominators first, which changes no span.  :class:`Echelon` keeps a
semi-echelon basis (each row's smallest column is its pivot, pivots
distinct) and can carry a *tag* per row: a sparse record of which input
combination the row stands for.  Tags give kernels and coordinates.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


def _denominator(vec):
    den = 1
    for v in vec.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            den = lcm(den, v.denominator)
    return den


def integral(vec):
    """Scale a rational sparse vector to an integer vector."""
    den = _denominator(vec)
    out = {}
    for k, v in vec.items():
        if v:
            iv = v * den
            out[k] = int(iv)
    return out


def _content(vec):
    g = 0
    for v in vec.values():
        g = gcd(g, v)
        if g == 1:
            return 1
    return g


def _axpy(a, x, b, y):
    """a*x - b*y on sparse integer vectors."""
    out = {k: a * v for k, v in x.items()} if a != 1 else dict(x)
    for k, v in y.items():
        nv = out.get(k, 0) - b * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


class Echelon:
    """A growing semi-echelon basis of a subspace of Q^N."""

    def __init__(self):
        self.rows = {}

    @property
    def rank(self):
        return len(self.rows)

    def copy(self):
        e = Echelon()
        e.rows = dict(self.rows)
        return e

    def reduce(self, vec, tag=None):
        """Reduce ``vec`` until its leading column is not a pivot.

        Returns ``(residual, tag, scale)`` with
        ``residual = scale * vec - sum(rows)`` and the tag transformed alike.
        An empty residual means ``vec`` lies in the span.
        """
        tag = dict(tag) if tag else {}
        scale = 1
        if _all_int(vec):
            vec = dict(vec)
        else:
            scale = _denominator(vec)
            vec = {k: int(v * scale) for k, v in vec.items() if v}
            tag = {k: v * scale for k, v in tag.items()}
        rows = self.rows
        while vec:
            c = min(vec)
            row = rows.get(c)
            if row is None:
                break
            rvec, rtag = row
            p, v = rvec[c], vec[c]
            g = gcd(p, v)
            a, b = p // g, v // g
            if a < 0:
                a, b = -a, -b
            vec = _axpy(a, vec, b, rvec)
            if rtag or tag:
                tag = _axpy(a, tag, b, rtag)
            scale *= a
            g = _content(vec)
            if tag:
                g = gcd(g, _content(tag))
            g = gcd(g, scale)
            if g > 1:
                vec = {k: x // g for k, x in vec.items()}
                tag = {k: x // g for k, x in tag.items()}
                scale //= g
        return vec, tag, scale

    def add(self, vec, tag=None):
        """Insert a vector; returns ``(independent, residual_tag, scale)``.

        When the vector is dependent, ``residual_tag / scale`` records the
        combination of tags that reproduces it (with sign), which is how
        kernels are read off.
        """
        res, t, scale = self.reduce(vec, tag)
        if not res:
            return False, t, scale
        g = gcd(_content(res), _content(t)) if t else _content(res)
        if g > 1:
            res = {k: x // g for k, x in res.items()}
            t = {k: x // g for k, x in t.items()}
        self.rows[min(res)] = (res, t)
        return True, t, scale

    def contains(self, vec):
        res, _, _ = self.reduce(vec)
        return not res


def _all_int(vec):
    return all(type(v) is int for v in vec.values())


def rank_of(vectors):
    e = Echelon()
    for v in vectors:
        if v:
            e.add(v)
    return e.rank


def span(vectors):
    e = Echelon()
    for v in vectors:
        if v:
            e.add(v)
    return e


def kernel(columns, base=None):
    """Kernel of the map sending basis vector j to ``columns[j]``.

    ``base`` optionally holds an :class:`Echelon` of a target subspace W
    (untagged); the kernel is then that of the induced map into the
    quotient by W.  Returns primitive integer vectors ``{j: coeff}``.
    """
    e = base.copy() if base is not None else Echelon()
    out = []
    for j, col in enumerate(columns):
        if not col:
            out.append({j: 1})
            continue
        indep, t, _ = e.add(col, {j: 1})
        if not indep:
            out.append(_primitive(t))
    return out


def induced_rank(columns, base):
    """Rank of the map into the quotient of the target by ``span(base)``."""
    e = base.copy()
    r = 0
    for col in columns:
        if col and e.add(col)[0]:
            r += 1
    return r


def _primitive(vec):
    g = _content(vec)
    if g > 1:
        vec = {k: v // g for k, v in vec.items()}
    if vec and vec[min(vec)] < 0:
        vec = {k: -v for k, v in vec.items()}
    return vec


def coordinates(vec, base, reps):
    """Coordinates of ``vec`` on ``reps`` modulo ``span(base)``.

    Returns a list of Fractions, or None when ``vec`` is not in
    ``span(base) + span(reps)``.  ``reps`` must be independent modulo
    ``base``.
    """
    e = base.copy()
    for r, rep in enumerate(reps):
        indep, _, _ = e.add(rep, {r: 1})
        if not indep:
            raise ValueError("representatives are dependent modulo the base")
    res, tag, scale = e.reduce(vec, {})
    if res:
        return None
    return [Fraction(-tag.get(r, 0), scale) for r in range(len(reps))]


def sub_scaled(x, y, c=1):
    """x - c*y for sparse rational vectors."""
    out = dict(x)
    for k, v in y.items():
        nv = out.get(k, 0) - c * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def add_scaled(x, y, c=1):
    return sub_scaled(x, y, -c)


def scale_vec(x, c):
    if not c:
        return {}
    return {k: c * v for k, v in x.items()}


def dense_rows(vectors, n):
    """Rational dense matrix (list of rows) from sparse vectors, for small checks."""
    return [[Fraction(v.get(k, 0)) for k in range(n)] for v in vectors]


__all__ = [
    "Echelon", "integral", "rank_of", "span", "kernel", "induced_rank", "coordinates",
    "sub_scaled", "add_scaled", "scale_vec", "dense_rows",
]
