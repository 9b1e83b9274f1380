"""Chern character of an idempotent matrix over a finite-dimensional algebra.

For Q = Q^2 in M_r(A) the form Tr(Q (dQ)^{2p}) lies in Omega^{2p}(A); its
image in the commutator quotient is d-bar-closed and defines a class in
H-bar_{2p}(A).  The normalisation 1/((2 pi i)^p p!) is a nonzero scalar and
is carried only as a label.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import AlgebraError, _solve
from .linalg import coordinates
from .omega import boundary_span, forms_of, nc_homology


class IdempotentError(AlgebraError):
    pass


# Idempotent matrices over the catalog algebras, each with conjugating units.
# Entries use the labels of the catalog JSON files.
IDEMPOTENT_CATALOG = {
    "rationals": [
        ([[{"1": 1}]], [[[{"1": 2}]]]),
    ],
    "rationals-squared": [
        ([[{"p": 1}]], [[[{"p": 2, "q": 1}]]]),
        ([[{"p": 1}, {}], [{}, {"q": 1}]],
         [[[{}, {"p": 1, "q": 1}], [{"p": 1, "q": 1}, {}]]]),
    ],
    "dual-numbers": [
        ([[{"1": 1}]], [[[{"1": 1, "eps": 1}]]]),
        ([[{"1": 1}, {}], [{}, {}]],
         [[[{"1": 1}, {"eps": 1}], [{}, {"1": 1}]], [[{"1": 1}, {"eps": 1}], [{"eps": 1}, {"1": 1}]]]),
    ],
    "matrix-2x2": [
        ([[{"e11": 1}]],
         [[[{"e11": 1, "e12": 1, "e22": 1}]], [[{"e12": 1, "e21": 1}]]]),
    ],
    "upper-triangular": [
        ([[{"e11": 1}]], [[[{"e11": 1, "e12": 1, "e22": 1}]]]),
        ([[{"e22": 1}]], [[[{"e11": 2, "e12": 1, "e22": 1}]]]),
    ],
}


def catalog_idempotents(A):
    """Rebased ``(Q, [u, ...])`` pairs for a catalog algebra (empty for others)."""
    out = []
    for q, us in IDEMPOTENT_CATALOG.get(A.name, []):
        out.append((algebra_matrix(A, q), [algebra_matrix(A, u) for u in us]))
    return out


def _acc(out, key, val):
    nv = out.get(key, 0) + val
    if nv:
        out[key] = nv
    else:
        out.pop(key, None)


def algebra_matrix(A, entries):
    """Rebase a square matrix of algebra elements given in original coordinates.

    Each entry is a coordinate list or a ``{label: value}`` dict.
    """
    out = []
    for row in entries:
        new_row = []
        for e in row:
            if isinstance(e, dict):
                coords = [0] * A.dim
                for label, v in e.items():
                    if label not in A.labels:
                        raise AlgebraError(f"unknown basis label {label!r}")
                    coords[A.labels.index(label)] = Fraction(v) if not isinstance(v, str) else Fraction(v)
                e = coords
            new_row.append(A.to_new(e))
        out.append(new_row)
    if any(len(r) != len(out) for r in out):
        raise AlgebraError("matrix over A must be square")
    return out


def mat_mul_A(A, x, y):
    r = len(x)
    return [[_sum_A(A.multiply(x[i][k], y[k][j]) for k in range(r)) for j in range(r)]
            for i in range(r)]


def _sum_A(parts):
    out = {}
    for p in parts:
        for k, v in p.items():
            _acc(out, k, v)
    return out


def is_idempotent(A, q):
    return mat_mul_A(A, q, q) == [[dict(e) for e in row] for row in q]


def identity_A(r):
    return [[{0: Fraction(1)} if i == j else {} for j in range(r)] for i in range(r)]


def invert_A(A, u):
    """Exact inverse in M_r(A) by solving the regular-representation system."""
    r, m = len(u), A.dim
    n = r * r * m

    def pos(i, j, a):
        return (i * r + j) * m + a

    # columns: u times basis element E_{kl} e_b
    mat = [[Fraction(0)] * n for _ in range(n)]
    for k in range(r):
        for l in range(r):
            for b in range(m):
                col = pos(k, l, b)
                for i in range(r):
                    for a, c in A.multiply(u[i][k], {b: Fraction(1)}).items():
                        mat[pos(i, l, a)][col] += c
    rhs = [Fraction(0)] * n
    for i in range(r):
        rhs[pos(i, i, 0)] = Fraction(1)
    sol = _solve(mat, rhs)
    if sol is None:
        raise IdempotentError("the matrix is not invertible over A")
    v = [[{a: sol[pos(i, j, a)] for a in range(m) if sol[pos(i, j, a)]} for j in range(r)]
         for i in range(r)]
    if mat_mul_A(A, v, u) != identity_A(r):
        raise IdempotentError("the matrix has a right inverse only")
    return v


def _form_matmul(eng, x, y):
    r = len(x)
    out = []
    for i in range(r):
        row = []
        for j in range(r):
            acc = {}
            for k in range(r):
                if x[i][k] and y[k][j]:
                    for t, c in eng.multiply(x[i][k], y[k][j]).items():
                        _acc(acc, t, c)
            row.append(acc)
        out.append(row)
    return out


def _trace(x):
    acc = {}
    for i in range(len(x)):
        for t, c in x[i][i].items():
            _acc(acc, t, c)
    return acc


def chern_trace(A, q, p, odd=False):
    """Tr(Q (dQ)^{2p}) in Omega^{2p}(A), or Tr((dQ)^{2p+1}) when ``odd``."""
    eng = forms_of(A)
    eng.check_cap(2 * p + 1)
    qf = [[eng.element(e) for e in row] for row in q]
    dq = [[eng.d(e) for e in row] for row in qf]
    if odd:
        acc = dq
        for _ in range(2 * p):
            acc = _form_matmul(eng, acc, dq)
        return _trace(acc)
    acc = qf
    for _ in range(2 * p):
        acc = _form_matmul(eng, acc, dq)
    return _trace(acc)


@dataclass
class IdempotentChern:
    p: int
    representative: dict
    closed: bool
    odd_trace_vanishes: bool
    in_commutators: bool
    class_coordinates: list | None
    normalization: str

    @property
    def class_is_zero(self):
        return self.class_coordinates is not None and not any(self.class_coordinates)

    def as_dict(self, A=None):
        rep = {" ".join(map(str, t)): str(c) for t, c in sorted(self.representative.items())}
        return {
            "p": self.p,
            "normalization": self.normalization,
            "representative": rep,
            "closed": self.closed,
            "odd_trace_vanishes": self.odd_trace_vanishes,
            "zero_in_quotient": self.in_commutators,
            "class_coordinates": None if self.class_coordinates is None
            else [str(c) for c in self.class_coordinates],
        }


def _normalization_label(p):
    return "1" if p == 0 else f"1/((2*pi*i)^{p} * {p}!)"


def chern_idempotent(A, q, p, hom=None):
    """Class data of Ch_p(Q) in H-bar_{2p}(A) (``q`` already rebased)."""
    if not is_idempotent(A, q):
        raise IdempotentError("Q is not idempotent")
    eng = forms_of(A)
    n = 2 * p
    rep = chern_trace(A, q, p)
    comm_next = eng.commutator_span(n + 1)
    d_rep = eng.to_vector(eng.d(rep), n + 1)
    closed = not d_rep or comm_next.contains(d_rep)
    odd = eng.to_vector(chern_trace(A, q, p, odd=True), n + 1)
    odd_ok = not odd or comm_next.contains(odd)
    vec = eng.to_vector(rep, n)
    in_comm = not vec or eng.commutator_span(n).contains(vec)
    coords = None
    if closed:
        hom = hom if hom is not None and n in hom.representatives else nc_homology(A, n)
        coords = coordinates(vec, hom.boundaries[n], hom.representatives[n])
        if coords is None:
            raise ArithmeticError("closed form has no class coordinates")
    return IdempotentChern(p, rep, closed, odd_ok, in_comm, coords, _normalization_label(p))


@dataclass
class AlgebraicInvarianceReport:
    p: int
    difference_zero: bool
    in_commutators: bool
    in_image: bool

    @property
    def passed(self):
        return self.in_image

    def as_dict(self):
        return {"p": self.p, "difference_zero": self.difference_zero,
                "in_commutators": self.in_commutators, "boundary": self.in_image,
                "pass": self.passed}


def verify_chern_invariance_alg(A, q, u, p):
    """Is Ch_p(u Q u^-1) - Ch_p(Q) in C_{2p} + d Omega^{2p-1}?  Decided exactly."""
    if not is_idempotent(A, q):
        raise IdempotentError("Q is not idempotent")
    uinv = invert_A(A, u)
    q2 = mat_mul_A(A, mat_mul_A(A, u, q), uinv)
    eng = forms_of(A)
    n = 2 * p
    diff = dict(chern_trace(A, q2, p))
    for t, c in chern_trace(A, q, p).items():
        _acc(diff, t, -c)
    vec = eng.to_vector(diff, n)
    zero = not vec
    in_comm = zero or eng.commutator_span(n).contains(vec)
    in_img = zero or boundary_span(eng, n).contains(vec)
    return AlgebraicInvarianceReport(p, zero, in_comm, in_img)


__all__ = [
    "IDEMPOTENT_CATALOG", "catalog_idempotents", "IdempotentChern", "AlgebraicInvarianceReport", "IdempotentError", "algebra_matrix",
    "chern_idempotent", "chern_trace", "verify_chern_invariance_alg", "invert_A",
    "is_idempotent", "mat_mul_A",
]
