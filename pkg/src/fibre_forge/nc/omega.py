"""The universal differential envelope Omega*(A) and its commutator quotient.

With basis vector 0 the unit, Omega^n(A) = A (x) Abar^{(x) n} has basis
tuples ``(a0, a1, ..., an)`` with ``a0`` any basis index and ``a1..an``
non-unit indices; the tuple stands for a0 da1 ... dan.  Elements are sparse
dicts ``{tuple: Fraction}``.

The product is determined by Leibniz: moving b to the left through the da_i
with da.b = d(ab) - a db gives

    (a0 da1..dap) b = sum_{i=1}^{p} (-1)^{p-i} a0 da1..d(a_i a_{i+1})..da_{p+1}
                      + (-1)^p a0 a1 da2..da_{p+1},        a_{p+1} = b,

and (w) (b0 db1..dbq) = (w b0) db1..dbq.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .linalg import Echelon, coordinates, induced_rank, kernel, span

DEFAULT_SIZE_CAP = 3000


class SizeCapError(RuntimeError):
    """A chain space would exceed the configured size cap."""


def size_cap():
    """Largest permitted chain-space dimension (env FIBRE_FORGE_SIZE_CAP)."""
    raw = os.environ.get("FIBRE_FORGE_SIZE_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_SIZE_CAP


def _acc(out, key, val):
    nv = out.get(key, 0) + val
    if nv:
        out[key] = nv
    else:
        out.pop(key, None)


class UniversalForms:
    """Bases, differential and product of Omega*(A) for one algebra."""

    def __init__(self, algebra, cap=None):
        self.A = algebra
        self.m = algebra.dim
        self.cap = cap if cap is not None else size_cap()
        self._bases = {}
        self._index = {}
        self._comm = {}
        self._dcols = {}
        self.right_mul = lru_cache(maxsize=None)(self._right_mul)

    # -- bases ---------------------------------------------------------------

    def dim(self, n):
        return self.m * (self.m - 1) ** n

    def check_cap(self, n, what="Omega"):
        d = self.dim(n)
        if d > self.cap:
            raise SizeCapError(f"{what}^{n} has dimension {d}, above the size cap {self.cap}")

    def basis(self, n):
        if n not in self._bases:
            self.check_cap(n)
            bar = range(1, self.m)
            self._bases[n] = [(a0,) + rest for a0 in range(self.m)
                              for rest in product(bar, repeat=n)]
            self._index[n] = {t: k for k, t in enumerate(self._bases[n])}
        return self._bases[n]

    def index(self, n):
        self.basis(n)
        return self._index[n]

    def to_vector(self, elem, n):
        idx = self.index(n)
        return {idx[t]: c for t, c in elem.items()}

    def from_vector(self, vec, n):
        b = self.basis(n)
        return {b[k]: Fraction(c) for k, c in vec.items() if c}

    # -- algebra structure -------------------------------------------------

    def _right_mul(self, t, b):
        if b == 0:
            return {t: 1}
        mul = self.A.mul
        p = len(t) - 1
        a = t + (b,)
        out = {}
        for i in range(1, p + 1):
            sign = -1 if (p - i) % 2 else 1
            for c, v in mul[a[i]][a[i + 1]].items():
                if c == 0:
                    continue
                _acc(out, a[:i] + (c,) + a[i + 2:], sign * v)
        sign = -1 if p % 2 else 1
        for c, v in mul[a[0]][a[1]].items():
            _acc(out, (c,) + a[2:], sign * v)
        return out

    def multiply(self, x, y):
        """Product of two forms given as sparse dicts."""
        out = {}
        for t1, c1 in x.items():
            for t2, c2 in y.items():
                head = t2[1:]
                for t, c in self.right_mul(t1, t2[0]).items():
                    _acc(out, t + head, c1 * c2 * c)
        return out

    def d(self, x):
        out = {}
        for t, c in x.items():
            if t[0] != 0:
                _acc(out, (0,) + t, c)
        return out

    def commutator(self, x, p, y, q):
        """Graded commutator x y - (-1)^{pq} y x."""
        out = self.multiply(x, y)
        sign = -1 if (p * q) % 2 == 0 else 1
        for t, c in self.multiply(y, x).items():
            _acc(out, t, sign * c)
        return out

    def element(self, a):
        """The degree-0 form of a rebased algebra element."""
        return {(k,): Fraction(v) for k, v in a.items() if v}

    def basis_form(self, t):
        return {t: Fraction(1)}

    # -- matrices ----------------------------------------------------------

    def d_columns(self, n):
        """Images d(e_t) for the basis of Omega^n, as index vectors in degree n+1."""
        if n not in self._dcols:
            self.basis(n + 1)
            idx = self.index(n + 1)
            cols = []
            for t in self.basis(n):
                cols.append({idx[(0,) + t]: 1} if t[0] != 0 else {})
            self._dcols[n] = cols
        return self._dcols[n]

    def commutator_generators(self, n):
        """Spanning set of the graded-commutator subspace of Omega^n.

        Commutators with the algebra generators e_k and de_k suffice, by
        [uv, w] = [u, vw] + (-1)^{|u|(|v|+|w|)} [v, wu].
        """
        gens = []
        bar = range(1, self.m)
        for t in self.basis(n):
            w = {t: 1}
            for k in bar:
                gens.append(self.commutator({(k,): 1}, 0, w, n))
        if n >= 1:
            for t in self.basis(n - 1):
                w = {t: 1}
                for k in bar:
                    gens.append(self.commutator({(0, k): 1}, 1, w, n - 1))
        return [self.to_vector(g, n) for g in gens if g]

    def full_commutator_generators(self, n):
        """[w, v] over all pairs of basis forms with degrees summing to n."""
        gens = []
        for p in range(n + 1):
            for t1 in self.basis(p):
                for t2 in self.basis(n - p):
                    g = self.commutator({t1: 1}, p, {t2: 1}, n - p)
                    if g:
                        gens.append(self.to_vector(g, n))
        return gens

    def commutator_span(self, n):
        if n not in self._comm:
            self._comm[n] = span(self.commutator_generators(n))
        return self._comm[n]


def forms_of(algebra):
    """The (cached) :class:`UniversalForms` engine of an algebra."""
    eng = getattr(algebra, "_forms", None)
    if eng is None or eng.cap != size_cap():
        eng = UniversalForms(algebra)
        algebra._forms = eng
    return eng


# ---------------------------------------------------------------------------
# Spec-level views
# ---------------------------------------------------------------------------

@dataclass
class FormSpaceBasis:
    """Basis of Omega^n(A) with its differential and multiplication maps."""

    degree: int
    basis: list
    d: list
    left: list
    right: list
    engine: UniversalForms = field(repr=False)

    @property
    def dim(self):
        return len(self.basis)

    def product(self, s, t):
        """Product of basis forms ``s`` (degree p) and ``t`` (degree q)."""
        return self.engine.multiply({s: 1}, {t: 1})


def omega_space(A, n):
    """Omega^n(A) with exact d, left and right multiplication by basis elements."""
    eng = forms_of(A)
    basis = eng.basis(n)
    d = eng.d_columns(n)
    left, right = [], []
    for k in range(A.dim):
        left.append([eng.to_vector(eng.multiply({(k,): 1}, {t: 1}), n) for t in basis])
        right.append([eng.to_vector(eng.multiply({t: 1}, {(k,): 1}), n) for t in basis])
    return FormSpaceBasis(n, basis, d, left, right, eng)


@dataclass
class ReducedComplexSlice:
    """Omega-bar^n = Omega^n / C_n, with C_n the graded-commutator subspace."""

    degree: int
    omega_dim: int
    commutator: Echelon = field(repr=False)
    complement: list = field(repr=False)

    @property
    def commutator_dim(self):
        return self.commutator.rank

    @property
    def dim(self):
        return self.omega_dim - self.commutator.rank


def reduced_complex(A, n_max):
    """Commutator subspaces and quotient bases for degrees 0..n_max."""
    eng = forms_of(A)
    out = []
    for n in range(n_max + 1):
        comm = eng.commutator_span(n)
        pivots = set(comm.rows)
        complement = [k for k in range(eng.dim(n)) if k not in pivots]
        out.append(ReducedComplexSlice(n, eng.dim(n), comm, complement))
    return out


def commutator_d_stable(A, n):
    """Exact check that d(C_n) lies in C_{n+1}."""
    eng = forms_of(A)
    target = eng.commutator_span(n + 1)
    for gen in eng.commutator_generators(n):
        img = eng.to_vector(eng.d(eng.from_vector(gen, n)), n + 1)
        if img and not target.contains(img):
            return False
    return True


def dbar_matrix(A, n):
    """Matrix of d-bar: Omega-bar^n -> Omega-bar^{n+1} on the complement bases.

    Columns are indexed by the complement of degree n; entries are the
    coordinates, modulo C_{n+1}, on the complement of degree n+1.
    """
    eng = forms_of(A)
    src = reduced_complex(A, n + 1)
    comp_n, comp_n1 = src[n].complement, src[n + 1].complement
    pos = {k: r for r, k in enumerate(comp_n1)}
    comm = src[n + 1].commutator
    cols = []
    for k in comp_n:
        col = eng.d_columns(n)[k]
        vec, scale = normal_form(comm, col)
        cols.append({pos[c]: Fraction(v, scale) for c, v in vec.items()})
    return cols


def normal_form(ech, vec):
    """Fully reduce ``vec`` against every pivot of ``ech``.

    Returns ``(vec, scale)``: ``vec`` is supported off the pivot columns and
    equals ``scale * input`` modulo the span.
    """
    import heapq
    from math import gcd

    from .linalg import _axpy, integral

    vec = integral(vec)
    scale = 1
    heap = list(vec)
    heapq.heapify(heap)
    seen = set()
    while heap:
        c = heapq.heappop(heap)
        if c in seen:
            continue
        seen.add(c)
        if c not in vec or c not in ech.rows:
            continue
        rvec, _ = ech.rows[c]
        p, v = rvec[c], vec[c]
        g = gcd(p, v)
        a, b = p // g, v // g
        if a < 0:
            a, b = -a, -b
        vec = _axpy(a, vec, b, rvec)
        scale *= a
        for k in rvec:
            if k > c and k not in seen:
                heapq.heappush(heap, k)
    return vec, scale


@dataclass
class NCHomology:
    """H-bar_n(A) = Ker d-bar_n / Im d-bar_{n-1} for n <= n_max."""

    dims: list
    omega_dims: list
    quotient_dims: list
    reduced_dim0: int
    unit_class_nonzero: bool
    representatives: dict = field(repr=False, default_factory=dict)
    boundaries: dict = field(repr=False, default_factory=dict)

    def as_dict(self):
        return {
            "dims": self.dims,
            "reduced_dim0": self.reduced_dim0,
            "omega_dims": self.omega_dims,
            "quotient_dims": self.quotient_dims,
        }


def _dbar_rank(eng, n):
    """Rank of d-bar_n: Omega^n -> Omega^{n+1} / C_{n+1} (0 for n < 0)."""
    if n < 0:
        return 0
    return induced_rank(eng.d_columns(n), eng.commutator_span(n + 1))


def boundary_span(eng, n):
    """C_n + d(Omega^{n-1}), the preimage of Im d-bar in Omega^n."""
    b = eng.commutator_span(n).copy()
    if n >= 1:
        for col in eng.d_columns(n - 1):
            if col:
                b.add(col)
    return b


def cycle_vectors(eng, n):
    """Vectors spanning Ker d-bar_n modulo nothing (they include C_n)."""
    return kernel(eng.d_columns(n), base=eng.commutator_span(n + 1))


def nc_homology(A, n_max, representatives=True):
    """Exact dimensions (and representatives) of H-bar_n(A), n = 0..n_max."""
    eng = forms_of(A)
    dims, omega_dims, qdims = [], [], []
    reps, bounds = {}, {}
    ranks = {}
    for n in range(-1, n_max + 1):
        ranks[n] = _dbar_rank(eng, n)
    for n in range(n_max + 1):
        q = eng.dim(n) - eng.commutator_span(n).rank
        omega_dims.append(eng.dim(n))
        qdims.append(q)
        dims.append(q - ranks[n] - ranks[n - 1])
        if representatives:
            bnd = boundary_span(eng, n)
            ech = bnd.copy()
            found = []
            for z in cycle_vectors(eng, n):
                if ech.add(z)[0]:
                    found.append(z)
            if len(found) != dims[n]:
                raise ArithmeticError(f"representative count {len(found)} != dimension {dims[n]}")
            reps[n] = found
            bounds[n] = bnd
    unit = eng.to_vector({(0,): 1}, 0)
    unit_nonzero = not boundary_span(eng, 0).contains(unit)
    reduced0 = dims[0] - (1 if unit_nonzero else 0)
    return NCHomology(dims, omega_dims, qdims, reduced0, unit_nonzero, reps, bounds)


def class_coordinates(A, elem, n, hom=None):
    """Coordinates of a d-bar-closed form on the H-bar_n representatives."""
    eng = forms_of(A)
    if hom is None or n not in hom.representatives:
        hom = nc_homology(A, n)
    vec = eng.to_vector(elem, n)
    return coordinates(vec, hom.boundaries[n], hom.representatives[n])


__all__ = [
    "UniversalForms", "FormSpaceBasis", "ReducedComplexSlice", "NCHomology", "SizeCapError",
    "DEFAULT_SIZE_CAP", "size_cap", "forms_of", "omega_space", "reduced_complex",
    "commutator_d_stable", "dbar_matrix", "normal_form", "nc_homology", "class_coordinates",
    "boundary_span", "cycle_vectors",
]
