"""Hochschild and cyclic homology, Connes' B, and the comparison with H-bar.

* Hochschild: the normalised complex C-bar_n = A (x) Abar^{(x) n} (same basis
  as Omega^n) with
  b(a0..an) = sum_{i<n} (-1)^i (.. a_i a_{i+1} ..) + (-1)^n (a_n a_0, a1, .., a_{n-1}).
* Cyclic: Connes' complex C^lambda_n = A^{(x)(n+1)} / (1 - t),
  t(a0..an) = (-1)^n (an, a0, .., a_{n-1}), with the unnormalised b.
  Valid over Q.
* B(a0..an) = sum_i (-1)^{ni} (1, a_i, .., a_n, a_0, .., a_{i-1}) into the
  normalised complex.  Since B kills (1 - t)-images it is defined on
  lambda-chains and induces B_*: HC_n -> HH_{n+1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .linalg import induced_rank, kernel, span
from .omega import SizeCapError, forms_of, nc_homology


def _acc(out, key, val):
    nv = out.get(key, 0) + val
    if nv:
        out[key] = nv
    else:
        out.pop(key, None)


class CyclicEngine:
    """Chain complexes of one algebra, with cached bases and boundary matrices."""

    def __init__(self, algebra):
        self.A = algebra
        self.m = algebra.dim
        self.forms = forms_of(algebra)
        self._lam = {}
        self._hb = {}
        self._lb = {}

    @property
    def cap(self):
        return self.forms.cap

    # -- normalised Hochschild complex ----------------------------------------

    def hbasis(self, n):
        return self.forms.basis(n)

    def hochschild_b(self, t):
        """Normalised b of a basis tuple, as a dict of tuples."""
        mul = self.A.mul
        n = len(t) - 1
        out = {}
        if n == 0:
            return out
        for c, v in mul[t[0]][t[1]].items():
            _acc(out, (c,) + t[2:], v)
        for i in range(1, n):
            sign = -1 if i % 2 else 1
            for c, v in mul[t[i]][t[i + 1]].items():
                if c:
                    _acc(out, t[:i] + (c,) + t[i + 2:], sign * v)
        sign = -1 if n % 2 else 1
        for c, v in mul[t[n]][t[0]].items():
            _acc(out, (c,) + t[1:n], sign * v)
        return out

    def hochschild_columns(self, n):
        """Matrix of b: C-bar_n -> C-bar_{n-1} (empty columns for n = 0)."""
        if n not in self._hb:
            basis = self.hbasis(n)
            if n == 0:
                self._hb[n] = [{} for _ in basis]
            else:
                idx = self.forms.index(n - 1)
                self._hb[n] = [{idx[k]: v for k, v in self.hochschild_b(t).items()}
                               for t in basis]
        return self._hb[n]

    # -- Connes lambda complex ----------------------------------------------------

    def lambda_basis(self, n):
        """Canonical orbit representatives with nonzero class, and the tuple map.

        Returns ``(reps, lookup)`` where ``lookup[tuple] = (index, sign)`` or
        is absent when the tuple's class vanishes.
        """
        if n in self._lam:
            return self._lam[n]
        size = self.m ** (n + 1)
        if size > 2 * self.cap:
            raise SizeCapError(f"A^(x){n + 1} has dimension {size}, above the size cap")
        reps, lookup = [], {}
        for x in product(range(self.m), repeat=n + 1):
            if x in lookup:
                continue
            # right rotations rot^j; in the quotient [rot^j c] = (-1)^{nj} [c]
            canon = min(x[n + 1 - j:] + x[:n + 1 - j] for j in range(n + 1))
            signs, vanish = {}, False
            for j in range(n + 1):
                y = canon[n + 1 - j:] + canon[:n + 1 - j]
                s = -1 if (n * j) % 2 else 1
                if signs.setdefault(y, s) != s:
                    vanish = True
            if vanish:
                for y in signs:
                    lookup[y] = None
                continue
            k = len(reps)
            reps.append(canon)
            for y, s in signs.items():
                lookup[y] = (k, s)
        clean = {y: v for y, v in lookup.items() if v is not None}
        self._lam[n] = (reps, clean)
        return self._lam[n]

    def lambda_class(self, elem, n):
        """Coordinates in C^lambda_n of a chain given on tuples."""
        _, lookup = self.lambda_basis(n)
        out = {}
        for t, c in elem.items():
            hit = lookup.get(t)
            if hit is not None:
                _acc(out, hit[0], hit[1] * c)
        return out

    def full_b(self, t):
        """Unnormalised Hochschild boundary of a tuple in A^{(x)(n+1)}."""
        mul = self.A.mul
        n = len(t) - 1
        out = {}
        if n == 0:
            return out
        for i in range(n):
            sign = -1 if i % 2 else 1
            for c, v in mul[t[i]][t[i + 1]].items():
                _acc(out, t[:i] + (c,) + t[i + 2:], sign * v)
        sign = -1 if n % 2 else 1
        for c, v in mul[t[n]][t[0]].items():
            _acc(out, (c,) + t[1:n], sign * v)
        return out

    def lambda_columns(self, n):
        """Matrix of b on C^lambda_n -> C^lambda_{n-1}."""
        if n not in self._lb:
            reps, _ = self.lambda_basis(n)
            if n == 0:
                self._lb[n] = [{} for _ in reps]
            else:
                self._lb[n] = [self.lambda_class(self.full_b(c), n - 1) for c in reps]
        return self._lb[n]

    # -- Connes B ---------------------------------------------------------------

    def connes_B(self, t):
        """B of a tuple (a0..an) into the normalised complex of degree n+1."""
        n = len(t) - 1
        out = {}
        if any(a == 0 for a in t):
            return out
        for i in range(n + 1):
            sign = -1 if (n * i) % 2 else 1
            _acc(out, (0,) + t[i:] + t[:i], sign)
        return out

    def B_columns_normalized(self, n):
        """Matrix of B: C-bar_n -> C-bar_{n+1}."""
        idx = self.forms.index(n + 1)
        return [{idx[k]: v for k, v in self.connes_B(t).items()} for t in self.hbasis(n)]


def cyclic_engine(A):
    eng = getattr(A, "_cyclic", None)
    if eng is None or eng.forms is not forms_of(A):
        eng = CyclicEngine(A)
        A._cyclic = eng
    return eng


def _rank(cols):
    return span([c for c in cols if c]).rank


# ---------------------------------------------------------------------------
# Homology dimensions
# ---------------------------------------------------------------------------

@dataclass
class HochschildResult:
    dims: list
    chain_dims: list
    ranks: list

    def as_dict(self):
        return {"dims": self.dims, "chain_dims": self.chain_dims}


def hochschild(A, n_max):
    """dim HH_n(A) for n = 0..n_max from the normalised complex."""
    eng = cyclic_engine(A)
    ranks = [_rank(eng.hochschild_columns(n)) for n in range(n_max + 2)]
    chain = [eng.forms.dim(n) for n in range(n_max + 1)]
    dims = [chain[n] - ranks[n] - ranks[n + 1] for n in range(n_max + 1)]
    return HochschildResult(dims, chain, ranks)


@dataclass
class CyclicResult:
    dims: list
    reduced_dims: list
    chain_dims: list
    unit_class_nonzero: list

    def as_dict(self):
        return {"dims": self.dims, "reduced_dims": self.reduced_dims,
                "chain_dims": self.chain_dims}


def cyclic(A, n_max):
    """dim HC_n(A) (lambda complex) and dim HC-bar_n(A), n = 0..n_max."""
    eng = cyclic_engine(A)
    cols = [eng.lambda_columns(n) for n in range(n_max + 2)]
    ranks = [_rank(c) for c in cols]
    chain = [len(eng.lambda_basis(n)[0]) for n in range(n_max + 1)]
    dims, reduced, unit_flags = [], [], []
    for n in range(n_max + 1):
        dims.append(chain[n] - ranks[n] - ranks[n + 1])
        unit = eng.lambda_class({(0,) * (n + 1): 1}, n)
        nonzero = bool(unit) and not span([c for c in cols[n + 1] if c]).contains(unit)
        unit_flags.append(nonzero)
        reduced.append(dims[n] - (1 if nonzero else 0))
    return CyclicResult(dims, reduced, chain, unit_flags)


def lambda_cycles(A, n):
    """Kernel of b on C^lambda_n (vectors over the orbit basis)."""
    return kernel(cyclic_engine(A).lambda_columns(n))


def B_on_lambda(A, n, vec, B=None):
    """Apply Connes' B to a lambda-chain; result as an index vector of C-bar_{n+1}."""
    eng = cyclic_engine(A)
    reps, _ = eng.lambda_basis(n)
    idx = eng.forms.index(n + 1)
    Bfun = B or eng.connes_B
    out = {}
    for k, c in vec.items():
        for t, v in Bfun(reps[k]).items():
            _acc(out, idx[t], c * v)
    return out


@dataclass
class BKernelResult:
    degree: int
    reduced_cyclic_dim: int
    rank: int

    @property
    def kernel_dim(self):
        return self.reduced_cyclic_dim - self.rank


def connes_B_kernel(A, n, B=None, hc=None):
    """dim Ker(B_*: HC-bar_n -> HH_{n+1}).

    The unit class lies in the kernel (B kills tensors containing 1), so
    the rank of B_* on HC_n equals its rank on HC-bar_n.
    """
    eng = cyclic_engine(A)
    hc = hc or cyclic(A, n)
    zs = lambda_cycles(A, n)
    images = [B_on_lambda(A, n, z, B) for z in zs]
    if B is None:
        for z, img in zip(zs, images):
            bimg = _apply(eng.hochschild_columns(n + 1), img)
            if bimg:
                raise ArithmeticError("B of a cyclic cycle is not a Hochschild cycle")
    bound = span([c for c in eng.hochschild_columns(n + 2) if c])
    rank = induced_rank(images, bound)
    return BKernelResult(n, hc.reduced_dims[n], rank)


def _apply(cols, vec):
    out = {}
    for k, c in vec.items():
        for r, v in cols[k].items():
            _acc(out, r, c * v)
    return out


@dataclass
class ComparisonRow:
    degree: int
    hbar_dim: int
    kernel_dim: int
    reduced: bool = False

    @property
    def passed(self):
        return self.hbar_dim == self.kernel_dim

    def as_dict(self):
        return {"n": self.degree, "hbar": self.hbar_dim, "ker_B": self.kernel_dim,
                "reduced": self.reduced, "pass": self.passed}


@dataclass
class ComparisonReport:
    rows: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def as_dict(self):
        return {"rows": [r.as_dict() for r in self.rows], "pass": self.passed}


def verify_kernel_comparison(A, n_max, B=None, include_degree0=True):
    """Compare dim H-bar_n with dim Ker(B_*: HC-bar_n -> HH_{n+1}).

    Degree 0 uses H-bar_0 modulo the class of 1.  ``B`` replaces the chain
    map on tuples (fault injection); failures are reported, never raised.
    """
    hbar = nc_homology(A, n_max, representatives=False)
    hc = cyclic(A, n_max)
    rows = []
    start = 0 if include_degree0 else 1
    for n in range(start, n_max + 1):
        k = connes_B_kernel(A, n, B, hc).kernel_dim
        h = hbar.reduced_dim0 if n == 0 else hbar.dims[n]
        rows.append(ComparisonRow(n, h, k, reduced=(n == 0)))
    return ComparisonReport(rows)


# ---------------------------------------------------------------------------
# Exact chain-level identities
# ---------------------------------------------------------------------------

def compose(outer, inner):
    return [_apply(outer, col) for col in inner]


def check_identities(A, n_max):
    """b^2 = 0 (both complexes), B^2 = 0 and bB + Bb = 0, exactly."""
    eng = cyclic_engine(A)
    ok = {"b2_hochschild": True, "b2_lambda": True, "B2": True, "bB+Bb": True}
    for n in range(2, n_max + 1):
        if any(compose(eng.hochschild_columns(n - 1), eng.hochschild_columns(n))):
            ok["b2_hochschild"] = False
        if any(compose(eng.lambda_columns(n - 1), eng.lambda_columns(n))):
            ok["b2_lambda"] = False
    for n in range(0, n_max):
        Bn = eng.B_columns_normalized(n)
        if any(compose(eng.B_columns_normalized(n + 1), Bn)):
            ok["B2"] = False
        bB = compose(eng.hochschild_columns(n + 1), Bn)
        Bb = compose(eng.B_columns_normalized(n - 1), eng.hochschild_columns(n)) if n >= 1 \
            else [{} for _ in Bn]
        for x, y in zip(bB, Bb):
            s = dict(x)
            for k, v in y.items():
                _acc(s, k, v)
            if s:
                ok["bB+Bb"] = False
                break
    return ok


__all__ = [
    "CyclicEngine", "cyclic_engine", "hochschild", "cyclic", "lambda_cycles", "B_on_lambda",
    "connes_B_kernel", "verify_kernel_comparison", "check_identities", "HochschildResult", "CyclicResult",
    "BKernelResult", "ComparisonRow", "ComparisonReport", "compose",
]
