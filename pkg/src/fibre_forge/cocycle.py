"""Transition-function cocycles, coboundaries and refinement.

A cocycle of rank n assigns to every ordered overlap (j, i) an n x n
matrix ``g_ji`` of expressions in chart-i coordinates, taking fibre
coordinates of chart i to those of chart j.  The cocycle condition reads
``g_ki = g_kj g_ji`` on triple overlaps, where ``g_kj`` is evaluated at the
chart-j image of the point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import I, ONE, X, Y, ZERO, Const, SmoothStep, as_expr, exp, power
from .forms import evaluate_exprs, expr_inverse, expr_matmul
from .geometry import Atlas, Chart, GeometryError, PeriodicAtlas, SampleGrid, step_shift

COCYCLE_TOL = 1e-10
DET_TOL = 1e-10


class CocycleError(GeometryError):
    pass


class ContainmentError(CocycleError):
    pass


def _as_matrix(m):
    if isinstance(m, (str, int, float, complex)) or hasattr(m, "args"):
        m = [[m]]
    return tuple(tuple(as_expr(e) for e in row) for row in m)


def identity_matrix(n):
    return tuple(tuple(ONE if a == b else ZERO for b in range(n)) for a in range(n))


def evaluate_matrix(mat, pts):
    """Values of an expression matrix at points, shape ``(npts, n, n)``."""
    n = len(mat)
    vals = evaluate_exprs([e for row in mat for e in row], pts)
    return vals.T.reshape(len(pts), n, n)


class Cocycle:
    """Transition matrices ``g_ji`` on the ordered overlaps of an atlas.

    ``maps[(j, i)]`` is given in chart-i coordinates.  Missing reverse
    directions are filled in with the symbolic inverse, re-expressed in the
    other chart's coordinates.
    """

    def __init__(self, atlas, rank, maps, name=""):
        self.atlas = atlas
        self.rank = rank
        self.name = name
        full = {}
        for (j, i), m in maps.items():
            m = _as_matrix(m)
            if len(m) != rank or any(len(row) != rank for row in m):
                raise CocycleError(f"g_{j}{i} is not a {rank}x{rank} matrix")
            if j == i:
                continue
            full[(j, i)] = m
        for (j, i) in atlas.overlaps():
            if (j, i) in full:
                continue
            if (i, j) not in full:
                raise CocycleError(f"no transition function for overlap ({j}, {i})")
            inv = expr_inverse(full[(i, j)])
            full[(j, i)] = tuple(tuple(atlas.pullback(e, j, i) for e in row) for row in inv)
        self.maps = full

    def g(self, j, i):
        if j == i:
            return identity_matrix(self.rank)
        return self.maps[(j, i)]

    def values(self, j, i, pts):
        """g_ji at chart-i points, shape ``(npts, n, n)``."""
        return evaluate_matrix(self.g(j, i), pts)

    def __repr__(self):
        return f"<Cocycle {self.name or '?'} rank={self.rank} on {self.atlas.manifold_id}>"


@dataclass(frozen=True)
class CocycleReport:
    cocycle_residual: float
    inverse_residual: float
    min_abs_det: float
    tolerance: float = COCYCLE_TOL
    samples: int = 0

    @property
    def passed(self):
        return (self.cocycle_residual < self.tolerance
                and self.inverse_residual < self.tolerance
                and self.min_abs_det > DET_TOL)

    def as_dict(self):
        return {
            "cocycle_residual": self.cocycle_residual,
            "inverse_residual": self.inverse_residual,
            "min_abs_det": self.min_abs_det,
            "samples": self.samples,
            "passed": self.passed,
        }


def verify_cocycle(atlas, c, tol=COCYCLE_TOL):
    """Check invertibility, g_ij g_ji = I and g_ki = g_kj g_ji by sampling."""
    n = c.rank
    eye = np.eye(n)
    inv_res, min_det, count = 0.0, np.inf, 0
    for (j, i) in atlas.overlaps():
        pts = atlas.overlap_points(i, j)
        if not len(pts):
            continue
        gji = c.values(j, i, pts)
        gij = c.values(i, j, atlas.transition(i, j, pts))
        inv_res = max(inv_res, float(np.max(np.abs(gij @ gji - eye))))
        min_det = min(min_det, float(np.min(np.abs(np.linalg.det(gji)))))
        count += len(pts)
    coc_res = 0.0
    for (k, j, i) in atlas.triple_overlaps():
        pts = atlas.overlap_points(i, j, k)
        if not len(pts):
            continue
        lhs = c.values(k, i, pts)
        rhs = c.values(k, j, atlas.transition(i, j, pts)) @ c.values(j, i, pts)
        coc_res = max(coc_res, float(np.max(np.abs(lhs - rhs))))
        count += len(pts)
    if min_det == np.inf:
        min_det = 1.0
    return CocycleReport(coc_res, inv_res, min_det, tol, count)


@dataclass(frozen=True)
class CoboundaryWitness:
    """Per-chart invertible matrices lambda_i (chart-i coordinates)."""

    lambdas: tuple

    @classmethod
    def of(cls, lambdas):
        return cls(tuple(_as_matrix(m) for m in lambdas))


def gauge_transform(c, witness, name=""):
    """The cocycle h_ji = lambda_j^{-1} g_ji lambda_i."""
    atlas = c.atlas
    lam = witness.lambdas
    if len(lam) != atlas.n_charts:
        raise CocycleError("witness needs one matrix per chart")
    maps = {}
    for (j, i) in atlas.overlaps():
        inv_j = expr_inverse(lam[j])
        inv_j = [[atlas.pullback(e, j, i) for e in row] for row in inv_j]
        maps[(j, i)] = expr_matmul(expr_matmul(inv_j, c.g(j, i)), lam[i])
    return Cocycle(atlas, c.rank, maps, name or f"{c.name}-gauged")


@dataclass(frozen=True)
class CohomologyReport:
    residual: float
    tolerance: float = COCYCLE_TOL

    @property
    def passed(self):
        return self.residual < self.tolerance

    def as_dict(self):
        return {"residual": self.residual, "passed": self.passed}


def verify_cohomologous(atlas, g, h, w, tol=COCYCLE_TOL):
    """Residual of h_ji = lambda_j^{-1} g_ji lambda_i for the supplied witness."""
    if g.rank != h.rank:
        raise CocycleError("rank mismatch")
    lam = w.lambdas
    if len(lam) != atlas.n_charts or any(len(m) != g.rank for m in lam):
        raise CocycleError("witness does not match the atlas and rank")
    for i in range(atlas.n_charts):
        pts = atlas.sample_points(i)
        det = np.abs(np.linalg.det(evaluate_matrix(lam[i], pts)))
        if np.min(det) <= DET_TOL:
            p = pts[int(np.argmin(det))]
            raise CocycleError(f"lambda_{i} is singular near {tuple(p)}")
    res = 0.0
    for (j, i) in atlas.overlaps():
        pts = atlas.overlap_points(i, j)
        if not len(pts):
            continue
        lam_i = evaluate_matrix(lam[i], pts)
        lam_j = evaluate_matrix(lam[j], atlas.transition(i, j, pts))
        expected = np.linalg.solve(lam_j, g.values(j, i, pts) @ lam_i)
        res = max(res, float(np.max(np.abs(h.values(j, i, pts) - expected))))
    return CohomologyReport(res, tol)


# ---------------------------------------------------------------------------
# Catalog cocycles
# ---------------------------------------------------------------------------

def trivial_cocycle(atlas, rank=1):
    eye = identity_matrix(rank)
    return Cocycle(atlas, rank, {ji: eye for ji in atlas.overlaps()}, "trivial")


def make_clutching(atlas, degree, rank=1):
    """Line bundle on S^2 with g_10 = (x + i y)^k in north coordinates.

    In south coordinates g_01 = (x + i y)^k as well, since w = 1/z.
    Higher rank pads with an identity block.
    """
    if atlas.manifold_id != "sphere2":
        raise CocycleError("clutching cocycles live on sphere2")
    z = X + I * Y
    zk = power(z, int(degree))
    maps = {}
    for key in ((1, 0), (0, 1)):
        m = [list(row) for row in identity_matrix(rank)]
        m[0][0] = zk
        maps[key] = m
    return Cocycle(atlas, rank, maps, f"clutching({degree})")


def direct_sum(*cocycles):
    """Block-diagonal sum of cocycles on a common atlas."""
    atlas = cocycles[0].atlas
    rank = sum(c.rank for c in cocycles)
    maps = {}
    for key in atlas.overlaps():
        m = [[ZERO] * rank for _ in range(rank)]
        off = 0
        for c in cocycles:
            if c.atlas is not atlas:
                raise CocycleError("direct sum needs a common atlas")
            g = c.g(*key)
            for a in range(c.rank):
                for b in range(c.rank):
                    m[off + a][off + b] = g[a][b]
            off += c.rank
        maps[key] = m
    return Cocycle(atlas, rank, maps, "+".join(c.name for c in cocycles))


def locally_constant(var, comps, values):
    """Expression equal to ``values[c]`` on the c-th of the sorted components.

    Values may be scalars or equal-shape matrices; the switch between
    neighbouring components is a smooth step inside the gap.
    """
    comps = sorted(comps)
    vals = [np.atleast_2d(np.asarray(v, dtype=complex)) for v in values]
    n = vals[0].shape[0]
    out = [[as_expr(complex(vals[0][a, b])) for b in range(n)] for a in range(n)]
    for c in range(1, len(comps)):
        delta = vals[c] - vals[c - 1]
        if not np.any(delta):
            continue
        gap = comps[c][0] - comps[c - 1][1]
        lo = comps[c - 1][1] + 0.1 * gap
        hi = comps[c][0] - 0.1 * gap
        step = SmoothStep(var, _dec(lo), _dec(hi))
        for a in range(n):
            for b in range(n):
                if delta[a, b]:
                    out[a][b] = out[a][b] + as_expr(complex(delta[a, b])) * step
    return out


def _dec(v):
    from fractions import Fraction
    return Fraction(repr(float(v)))


def flat_circle_cocycle(atlas, holonomy, perturb=None):
    """Flat bundle on circle3 with monodromy ``holonomy`` around the circle.

    g_ji = H^m on the overlap component where chart-j coordinates are the
    chart-i ones shifted by 2 pi m.  ``perturb=((j, i), component, factor)``
    multiplies one direction on one component by ``factor`` (fault injection;
    the reverse direction is left untouched).
    """
    if atlas.manifold_id != "circle3":
        raise CocycleError("flat circle cocycles live on circle3")
    hol = np.atleast_2d(np.asarray(holonomy, dtype=complex))
    n = hol.shape[0]
    maps = {}
    for (j, i) in atlas.overlaps():
        comps = atlas.axis_components(i, j, 0)
        vals = [np.linalg.matrix_power(hol, m) for _, _, m in comps]
        if perturb is not None and perturb[0] == (j, i):
            vals[perturb[1]] = vals[perturb[1]] * perturb[2]
        maps[(j, i)] = locally_constant(X, comps, vals)
    return Cocycle(atlas, n, maps, "flat")


def torus_line_bundle(atlas, degree):
    """Degree-k line bundle on T^2: g_ji = exp(i k m_ji(x) y).

    m_ji is the x-shift from chart i to chart j, so crossing the x-period
    twists the fibre by exp(i k y).
    """
    if not isinstance(atlas, PeriodicAtlas) or atlas.manifold_id != "torus4":
        raise CocycleError("torus line bundles live on torus4")
    maps = {}
    for (j, i) in atlas.overlaps():
        m = step_shift(X, atlas.axis_components(i, j, 0))
        maps[(j, i)] = [[exp(I * Const(int(degree)) * m * Y)]]
    return Cocycle(atlas, 1, maps, f"torus-line({degree})")


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Patch:
    """A patch of a finer cover, in the coordinates of its assigned chart.

    The domain is the open box ``lower < p < upper``, intersected with the
    disk of ``radius`` about the origin when a radius is given.
    """

    chart: int
    lower: tuple
    upper: tuple
    radius: float | None = None

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        mask = np.all((pts > lo) & (pts < hi), axis=1)
        if self.radius is not None:
            mask &= np.hypot(pts[:, 0], pts[:, 1] if pts.shape[1] > 1 else 0.0) < self.radius
        return mask

    def closure_probe(self, n=201):
        axes = [np.linspace(lo, hi, n) for lo, hi in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([m.ravel() for m in mesh])
        if self.radius is not None:
            r = np.hypot(pts[:, 0], pts[:, 1] if pts.shape[1] > 1 else 0.0)
            pts = pts[r <= self.radius]
        return pts


def _closed_contains(chart, pts, slack=1e-12):
    if chart.shape == "disk":
        return np.hypot(pts[:, 0], pts[:, 1]) <= chart.radius + slack
    lo, hi = np.asarray(chart.lower), np.asarray(chart.upper)
    return np.all((pts >= lo - slack) & (pts <= hi + slack), axis=1)


class RefinedAtlas(Atlas):
    """The finer cover V_a, each patch inside chart i(a) of a base atlas.

    Overlap maps, Jacobians and symbolic coordinate changes are the base
    atlas's maps between the assigned charts.
    """

    def __init__(self, base, patches):
        self.base = base
        self.patches = tuple(patches)
        self.manifold_id = base.manifold_id
        self.dim = base.dim
        for a, patch in enumerate(self.patches):
            if not 0 <= patch.chart < base.n_charts:
                raise ContainmentError(f"patch {a} is assigned to unknown chart {patch.chart}")
            if len(patch.lower) != base.dim:
                raise ContainmentError(f"patch {a} has the wrong dimension")
            probe = self.patches[a].closure_probe()
            if not len(probe) or not _closed_contains(base.charts[patch.chart], probe).all():
                raise ContainmentError(f"patch {a} is not contained in chart {patch.chart}")
        charts = [Chart(a, "box", tuple(p.lower), tuple(p.upper), p.radius)
                  for a, p in enumerate(self.patches)]
        self.charts = tuple(charts)
        self.resolution = base.resolution
        grids = []
        for p in self.patches:
            g = base.grids[p.chart]
            keep = p.contains(g.points)
            grids.append(SampleGrid(g.points[keep], g.weights[keep]))
        self.grids = tuple(grids)
        self._overlaps = None

    def assigned(self, a):
        return self.patches[a].chart

    def _probe(self, a):
        pts = self.patches[a].closure_probe(97 if self.dim == 2 else 2049)
        return pts[self.patches[a].contains(pts)]

    def contains(self, b, a, pts):
        pts = np.asarray(pts, dtype=float)
        ia, ib = self.assigned(a), self.assigned(b)
        mask = self.patches[a].contains(pts) & self.base.contains(ib, ia, pts)
        if not mask.any():
            return mask
        img = self.base.transition(ia, ib, pts[mask])
        sub = self.patches[b].contains(img)
        mask[np.flatnonzero(mask)[~sub]] = False
        return mask

    def transition(self, a, b, pts):
        return self.base.transition(self.assigned(a), self.assigned(b), pts)

    def jacobian(self, a, b, pts):
        return self.base.jacobian(self.assigned(a), self.assigned(b), pts)

    def coordinate_change(self, a, b):
        return self.base.coordinate_change(self.assigned(a), self.assigned(b))


def refine_cocycle(atlas, c, patches):
    """Restrict a cocycle to a finer cover: theta_ba = g_{i(b) i(a)}.

    ``patches`` is a list of :class:`Patch` (or ``(chart, lower, upper[, radius])``
    tuples).  Returns the refined cocycle; its ``atlas`` is the
    :class:`RefinedAtlas`.
    """
    patches = [p if isinstance(p, Patch) else Patch(p[0], tuple(p[1]), tuple(p[2]),
                                                     p[3] if len(p) > 3 else None)
               for p in patches]
    fine = RefinedAtlas(atlas, patches)
    maps = {}
    for (b, a) in fine.overlaps():
        maps[(b, a)] = c.g(fine.assigned(b), fine.assigned(a))
    return Cocycle(fine, c.rank, maps, f"{c.name}-refined")


__all__ = [
    "Cocycle", "CocycleReport", "CoboundaryWitness", "CohomologyReport", "CocycleError",
    "ContainmentError", "Patch", "RefinedAtlas", "verify_cocycle", "verify_cohomologous",
    "gauge_transform", "trivial_cocycle", "make_clutching", "direct_sum",
    "flat_circle_cocycle", "torus_line_bundle", "refine_cocycle", "locally_constant",
    "evaluate_matrix", "identity_matrix",
]
