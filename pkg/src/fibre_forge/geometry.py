"""Catalog atlases, partitions of unity and quadrature of top-degree forms.

Three manifolds are built in:

``sphere2``
    S^2 with two stereographic disk charts of radius 2; chart 0 is the
    north chart with coordinate z, chart 1 the south chart with
    w = conj(z) / |z|^2 = 1/z.  The overlap is the annulus 1/2 < |z| < 2.
``circle3``
    S^1 = R / 2 pi Z covered by three arcs of half-width 3 pi / 4 centred at
    0, 2 pi / 3 and 4 pi / 3.  Every pair of arcs meets in two components
    and the triple overlap is nonempty.
``torus4``
    T^2 = R^2 / (2 pi Z)^2 covered by four boxes of half-width 0.7 pi
    centred at (0, 0), (pi, 0), (0, pi) and (pi, pi).

Chart coordinates on the periodic manifolds are lifts: a point of chart i
has chart-j coordinates ``p + 2 pi m`` for an integer vector m that depends
on the overlap component.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .expr import (ONE, X, Y, ZERO, Const, SmoothStep, as_expr, sqrt,
                   substitute)
from .forms import Form, evaluate_exprs

MANIFOLDS = ("sphere2", "circle3", "torus4")
MIN_RESOLUTION = 8
TWO_PI = 2.0 * math.pi

_threads = os.cpu_count() or 1


def set_threads(n):
    """Number of worker threads used for quadrature (results do not depend on it)."""
    global _threads
    if n < 1:
        raise ValueError("thread count must be positive")
    _threads = int(n)


def get_threads():
    return _threads


class GeometryError(ValueError):
    """Invalid atlas, partition or integration request."""


class UnknownManifold(GeometryError):
    pass


class PartitionError(GeometryError):
    pass


class DegreeError(GeometryError):
    pass


@dataclass(frozen=True)
class Chart:
    """A chart domain: an open disk about the origin or an open box."""

    index: int
    shape: str
    lower: tuple
    upper: tuple
    radius: float | None = None

    @property
    def dim(self):
        return len(self.lower)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        if self.shape == "disk":
            return np.hypot(pts[:, 0], pts[:, 1]) < self.radius
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        return np.all((pts > lo) & (pts < hi), axis=1)

    def boundary_points(self, count=256):
        if self.shape == "disk":
            t = np.linspace(0.0, TWO_PI, count, endpoint=False)
            return np.column_stack([self.radius * np.cos(t), self.radius * np.sin(t)])
        if self.dim == 1:
            return np.array([[self.lower[0]], [self.upper[0]]])
        (x0, y0), (x1, y1) = self.lower, self.upper
        s = np.linspace(0.0, 1.0, count)
        xs = x0 + (x1 - x0) * s
        ys = y0 + (y1 - y0) * s
        return np.concatenate([
            np.column_stack([xs, np.full_like(xs, y0)]),
            np.column_stack([xs, np.full_like(xs, y1)]),
            np.column_stack([np.full_like(ys, x0), ys]),
            np.column_stack([np.full_like(ys, x1), ys]),
        ])


@dataclass(frozen=True)
class SampleGrid:
    """Midpoint-rule nodes of a chart and their weights (cell volumes)."""

    points: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)


def _box_grid(lower, upper, n):
    axes = []
    for lo, hi in zip(lower, upper):
        h = (hi - lo) / n
        axes.append(lo + h * (np.arange(n) + 0.5))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    vol = np.prod([(hi - lo) / n for lo, hi in zip(lower, upper)])
    return pts, np.full(len(pts), vol)


class Atlas:
    """A catalog atlas.  Construct with :func:`build_atlas`.

    Subclasses provide the overlap geometry: membership, transition maps,
    their Jacobians and their symbolic form.
    """

    manifold_id: str
    dim: int

    def __init__(self, charts, resolution):
        self.charts = tuple(charts)
        self.resolution = resolution
        self.grids = tuple(self._make_grid(c, resolution) for c in self.charts)
        self._overlaps = None

    def __repr__(self):
        return f"<Atlas {self.manifold_id} charts={len(self.charts)} resolution={self.resolution}>"

    @property
    def n_charts(self):
        return len(self.charts)

    def sample_points(self, i):
        return self.grids[i].points

    # -- overlap structure -------------------------------------------------

    def contains(self, j, i, pts):
        """Mask of points (chart-i coordinates, inside U_i) that also lie in U_j."""
        raise NotImplementedError

    def transition(self, i, j, pts):
        """Chart-j coordinates of points given in chart-i coordinates."""
        raise NotImplementedError

    def jacobian(self, i, j, pts):
        """``J[p, b, a] = d x_j^b / d x_i^a`` at the points."""
        raise NotImplementedError

    def coordinate_change(self, i, j):
        """Chart-j coordinates as expressions in chart-i variables.

        Valid on the overlap U_i n U_j only.
        """
        raise NotImplementedError

    def pullback(self, expr, src, dst):
        """Re-express a chart-``src`` expression in chart-``dst`` variables.

        Only meaningful on U_src n U_dst.
        """
        expr = as_expr(expr)
        if src == dst:
            return expr
        new = self.coordinate_change(dst, src)
        return substitute(expr, dict(zip(("x", "y"), new)))

    def pullback_function(self, expr, src, dst):
        """Pull back a function on chart ``src`` that vanishes outside U_src.

        The result is valid on all of chart ``dst``.
        """
        return self.pullback(expr, src, dst)

    def _probe(self, i):
        return _box_grid(self.charts[i].lower, self.charts[i].upper, 96)[0]

    def overlaps(self):
        """Ordered pairs ``(j, i)``, j != i, with nonempty overlap."""
        if self._overlaps is None:
            pairs = []
            for i in range(self.n_charts):
                probe = self._probe(i)
                probe = probe[self.charts[i].contains(probe)]
                for j in range(self.n_charts):
                    if j != i and self.contains(j, i, probe).any():
                        pairs.append((j, i))
            self._overlaps = tuple(sorted(pairs))
        return self._overlaps

    def triple_overlaps(self):
        """Ordered triples ``(k, j, i)`` of distinct charts meeting in a point."""
        out = []
        for i in range(self.n_charts):
            probe = self._probe(i)
            probe = probe[self.charts[i].contains(probe)]
            for j in range(self.n_charts):
                for k in range(self.n_charts):
                    if len({i, j, k}) < 3:
                        continue
                    if (self.contains(j, i, probe) & self.contains(k, i, probe)).any():
                        out.append((k, j, i))
        return tuple(sorted(out))

    def overlap_points(self, i, *others):
        """Sample points of chart i lying in every chart of ``others``."""
        pts = self.sample_points(i)
        mask = np.ones(len(pts), dtype=bool)
        for j in others:
            mask &= self.contains(j, i, pts)
        return pts[mask]


class SphereAtlas(Atlas):
    manifold_id = "sphere2"
    dim = 2
    radius = 2.0

    def __init__(self, resolution):
        r = self.radius
        charts = [Chart(k, "disk", (-r, -r), (r, r), r) for k in range(2)]
        super().__init__(charts, resolution)

    def _make_grid(self, chart, n):
        # even n keeps the coordinate origin off the grid
        n += n % 2
        pts, w = _box_grid(chart.lower, chart.upper, n)
        keep = chart.contains(pts)
        return SampleGrid(pts[keep], w[keep])

    def contains(self, j, i, pts):
        pts = np.asarray(pts, dtype=float)
        inside = self.charts[i].contains(pts)
        if i == j:
            return inside
        r = np.hypot(pts[:, 0], pts[:, 1])
        return inside & (r > 1.0 / self.radius)

    def transition(self, i, j, pts):
        pts = np.asarray(pts, dtype=float)
        if i == j:
            return pts.copy()
        r2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
        return np.column_stack([pts[:, 0] / r2, -pts[:, 1] / r2])

    def jacobian(self, i, j, pts):
        pts = np.asarray(pts, dtype=float)
        n = len(pts)
        if i == j:
            return np.broadcast_to(np.eye(2), (n, 2, 2)).copy()
        z = pts[:, 0] + 1j * pts[:, 1]
        c = -1.0 / z ** 2
        jac = np.empty((n, 2, 2))
        jac[:, 0, 0] = c.real
        jac[:, 0, 1] = -c.imag
        jac[:, 1, 0] = c.imag
        jac[:, 1, 1] = c.real
        return jac

    def coordinate_change(self, i, j):
        if i == j:
            return (X, Y)
        r2 = X ** 2 + Y ** 2
        return (X / r2, -Y / r2)


class PeriodicAtlas(Atlas):
    """Box charts on a quotient of R^d by (2 pi Z)^d, coordinates are lifts."""

    period = TWO_PI

    def __init__(self, manifold_id, centers, half_width, resolution):
        self.manifold_id = manifold_id
        self.dim = len(centers[0])
        charts = [
            Chart(k, "box", tuple(c - half_width for c in ctr), tuple(c + half_width for c in ctr))
            for k, ctr in enumerate(centers)
        ]
        super().__init__(charts, resolution)

    def _make_grid(self, chart, n):
        return SampleGrid(*_box_grid(chart.lower, chart.upper, n))

    def _probe(self, i):
        n = 96 if self.dim == 2 else 2048
        return _box_grid(self.charts[i].lower, self.charts[i].upper, n)[0]

    def axis_components(self, i, j, axis):
        """Overlap components along one axis, as ``(lo, hi, shift)`` in chart-i units.

        A chart-i coordinate t in (lo, hi) has chart-j coordinate t + 2 pi shift.
        """
        lo_i, hi_i = self.charts[i].lower[axis], self.charts[i].upper[axis]
        lo_j, hi_j = self.charts[j].lower[axis], self.charts[j].upper[axis]
        out = []
        for m in range(-3, 4):
            a = max(lo_i, lo_j - self.period * m)
            b = min(hi_i, hi_j - self.period * m)
            if a < b:
                out.append((a, b, m))
        return sorted(out)

    def _shifts(self, i, j, pts):
        pts = np.asarray(pts, dtype=float)
        shifts = np.zeros(pts.shape, dtype=int)
        found = np.ones(len(pts), dtype=bool)
        for axis in range(self.dim):
            hit = np.zeros(len(pts), dtype=bool)
            for a, b, m in self.axis_components(i, j, axis):
                sel = (pts[:, axis] > a) & (pts[:, axis] < b)
                shifts[sel, axis] = m
                hit |= sel
            found &= hit
        return shifts, found

    def contains(self, j, i, pts):
        pts = np.asarray(pts, dtype=float)
        inside = self.charts[i].contains(pts)
        if i == j:
            return inside
        return inside & self._shifts(i, j, pts)[1]

    def transition(self, i, j, pts):
        pts = np.asarray(pts, dtype=float)
        if i == j:
            return pts.copy()
        shifts, _ = self._shifts(i, j, pts)
        return pts + self.period * shifts

    def jacobian(self, i, j, pts):
        return np.broadcast_to(np.eye(self.dim), (len(pts), self.dim, self.dim)).copy()

    def coordinate_change(self, i, j):
        variables = (X, Y)[: self.dim]
        if i == j:
            return variables
        out = []
        for axis, var in enumerate(variables):
            out.append(var + Const(self.period) * step_shift(
                var, self.axis_components(i, j, axis)))
        return tuple(out)

    def pullback_function(self, expr, src, dst):
        # catalog bumps on periodic manifolds are written periodically
        return as_expr(expr)


def step_shift(var, comps):
    """Locally constant integer function equal to ``shift`` on each component.

    Transitions are smooth steps placed inside the gaps between components,
    so the value is exact on every component.
    """
    if not comps:
        return ZERO
    comps = sorted(comps)
    out = Const(comps[0][2])
    for (a0, b0, m0), (a1, b1, m1) in zip(comps, comps[1:]):
        if m1 == m0:
            continue
        gap = a1 - b0
        lo, hi = b0 + 0.1 * gap, a1 - 0.1 * gap
        out = out + Const(m1 - m0) * SmoothStep(var, _dec(lo), _dec(hi))
    return out


def _dec(v):
    return Fraction(repr(float(v)))


def build_atlas(manifold_id, grid_resolution):
    """Build a catalog atlas sampled at ``grid_resolution`` nodes per axis."""
    if manifold_id not in MANIFOLDS:
        raise UnknownManifold(f"unknown manifold id {manifold_id!r}; known: {', '.join(MANIFOLDS)}")
    if not isinstance(grid_resolution, (int, np.integer)) or grid_resolution < MIN_RESOLUTION:
        raise GeometryError(f"resolution must be an integer >= {MIN_RESOLUTION}")
    n = int(grid_resolution)
    if manifold_id == "sphere2":
        return SphereAtlas(n)
    if manifold_id == "circle3":
        centers = [(0.0,), (TWO_PI / 3,), (2 * TWO_PI / 3,)]
        return PeriodicAtlas("circle3", centers, 0.75 * math.pi, n)
    centers = [(0.0, 0.0), (math.pi, 0.0), (0.0, math.pi), (math.pi, math.pi)]
    return PeriodicAtlas("torus4", centers, 0.7 * math.pi, n)


# ---------------------------------------------------------------------------
# Partitions of unity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionOfUnity:
    """alpha_k and the squared partition beta_k, in every chart's variables.

    ``alphas[i][k]`` is alpha_k written in chart-i coordinates; likewise
    ``betas``.  ``bumps[k]`` is the generating bump in chart-k coordinates.
    """

    atlas: Atlas
    bumps: tuple
    alphas: tuple
    betas: tuple
    name: str = field(default="")

    def alpha(self, k, chart):
        return self.alphas[chart][k]

    def beta(self, k, chart):
        return self.betas[chart][k]


def normalize_bumps(rhos):
    """alpha_k = rho_k / sum_j rho_j for bumps already in one chart's variables."""
    rhos = [as_expr(r) for r in rhos]
    total = ZERO
    for r in rhos:
        total = total + r
    return [r / total for r in rhos]


def square_partition(alphas):
    """beta_k = alpha_k / sqrt(sum_j alpha_j^2)."""
    norm2 = ZERO
    for a in alphas:
        norm2 = norm2 + a * a
    root = sqrt(norm2)
    return [a / root for a in alphas]


def build_partition(atlas, bumps, name=""):
    """Normalise per-chart bumps into a partition of unity on ``atlas``.

    ``bumps[k]`` is a DSL expression (or string) in chart-k coordinates,
    non-negative and vanishing on the boundary of chart k.
    """
    bumps = tuple(as_expr(b) for b in bumps)
    r = atlas.n_charts
    if len(bumps) != r:
        raise PartitionError(f"expected {r} bumps, got {len(bumps)}")

    for k, bump in enumerate(bumps):
        edge = atlas.charts[k].boundary_points()
        vals = evaluate_exprs([bump], edge)[0]
        if np.max(np.abs(vals)) > 1e-14:
            raise PartitionError(f"bump {k} does not vanish on the boundary of chart {k}")

    alphas, betas = [], []
    for i in range(r):
        rho_i = [atlas.pullback_function(bumps[k], k, i) for k in range(r)]
        pts = atlas.sample_points(i)
        vals = evaluate_exprs(rho_i, pts)
        for k in range(r):
            v = vals[k]
            if np.any(np.abs(v.imag) > 1e-12) or np.any(v.real < -1e-14):
                raise PartitionError(f"bump {k} takes negative or non-real values on chart {i}")
            if k != i:
                outside = ~atlas.contains(k, i, pts)
                if np.any(np.abs(v[outside]) > 1e-14):
                    raise PartitionError(f"bump {k} is not supported inside chart {k}")
        total = vals.real.sum(axis=0)
        if np.any(total <= 0.0):
            p = pts[int(np.argmin(total))]
            raise PartitionError(f"bumps have a common zero near chart-{i} point {tuple(p)}")
        _check_pullbacks(atlas, bumps, rho_i, i)
        a = normalize_bumps(rho_i)
        alphas.append(tuple(a))
        betas.append(tuple(square_partition(a)))
    return PartitionOfUnity(atlas, bumps, tuple(alphas), tuple(betas), name)


def _check_pullbacks(atlas, bumps, rho_i, i):
    for k in range(atlas.n_charts):
        if k == i:
            continue
        pts = atlas.overlap_points(i, k)
        if not len(pts):
            continue
        here = evaluate_exprs([rho_i[k]], pts)[0]
        there = evaluate_exprs([bumps[k]], atlas.transition(i, k, pts))[0]
        if np.max(np.abs(here - there)) > 1e-10:
            raise PartitionError(
                f"bump {k} is not consistent with the overlap map into chart {i}")


def _cos_shift(var, center):
    # cos(t - c) written with exponentials so the result is periodic
    e_plus = complex(math.cos(center), -math.sin(center))
    e_minus = e_plus.conjugate()
    from .expr import I, exp
    return (as_expr(e_plus) * exp(I * var) + as_expr(e_minus) * exp(-(I * var))) / 2


def _periodic_bump(var, center, inner, outer):
    """1 within ``inner`` of the centre, 0 beyond ``outer`` (angles, mod 2 pi)."""
    u = (ONE - _cos_shift(var, center)) / 2
    lo = math.sin(inner / 2) ** 2
    hi = math.sin(outer / 2) ** 2
    return ONE - SmoothStep(u, _dec(lo), _dec(hi))


# half-widths of the height band where the two sphere bumps cross over
_HEIGHT = {"A": 0.5, "B": 0.35}
_CIRCLE = {"A": (0.4 * math.pi, 0.6 * math.pi), "B": (0.3 * math.pi, 0.7 * math.pi)}
_TORUS = {"A": (0.35 * math.pi, 0.6 * math.pi), "B": (0.3 * math.pi, 0.65 * math.pi)}


def catalog_bumps(atlas, variant="A"):
    """Standard bump functions for the catalog manifolds (variants A and B)."""
    mid = atlas.manifold_id
    if mid == "sphere2":
        if variant not in _HEIGHT:
            raise PartitionError(f"unknown partition variant {variant!r}")
        # v is the height coordinate of the sphere, odd under w = 1/z, so the
        # two bumps already sum to 1 and the crossover band is wide in both charts
        c = _HEIGHT[variant]
        r2 = X ** 2 + Y ** 2
        v = (r2 - ONE) / (r2 + ONE)
        bump = ONE - SmoothStep(v, _dec(-c), _dec(c))
        return [bump, bump]
    table = _CIRCLE if mid == "circle3" else _TORUS
    if variant not in table:
        raise PartitionError(f"unknown partition variant {variant!r}")
    inner, outer = table[variant]
    out = []
    for chart in atlas.charts:
        centre = [(lo + hi) / 2 for lo, hi in zip(chart.lower, chart.upper)]
        bump = _periodic_bump(X, centre[0], inner, outer)
        if atlas.dim == 2:
            bump = bump * _periodic_bump(Y, centre[1], inner, outer)
        out.append(bump)
    return out


def catalog_partition(atlas, variant="A"):
    return build_partition(atlas, catalog_bumps(atlas, variant), name=variant)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def _chart_forms(atlas, form):
    forms = list(form)
    if len(forms) != atlas.n_charts:
        raise GeometryError("a form must be given on every chart")
    out = []
    for f in forms:
        if isinstance(f, Form):
            if f.degree != atlas.dim:
                raise DegreeError(
                    f"cannot integrate a degree-{f.degree} form over a {atlas.dim}-manifold")
            out.append(f.coeff(tuple(range(atlas.dim))))
        else:
            out.append(as_expr(f))
    return out


def integrate(atlas, partition, form, chunk=8192):
    """Integrate a top-degree form given chart by chart.

    ``form[k]`` is a :class:`Form` of degree ``atlas.dim`` (or directly the
    coefficient of dx^dy) in chart-k coordinates.  The integral is
    sum_k of the integral over U_k of alpha_k times the form, computed with
    the midpoint rule of each chart's grid.  Work is split into fixed
    chunks reduced in a fixed order, so the result does not depend on the
    thread count.
    """
    coeffs = _chart_forms(atlas, form)
    jobs = []
    for k in range(atlas.n_charts):
        if coeffs[k] is ZERO:
            continue
        weight_expr = partition.alpha(k, k) * coeffs[k]
        grid = atlas.grids[k]
        for start in range(0, len(grid), chunk):
            jobs.append((weight_expr, grid.points[start:start + chunk],
                         grid.weights[start:start + chunk]))
    if not jobs:
        return 0j

    def run(job):
        expr, pts, w = job
        vals = evaluate_exprs([expr], pts)[0]
        return complex(np.dot(w, vals))

    if _threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=_threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    total = 0j
    for p in parts:
        total += p
    return total


__all__ = [
    "Atlas", "Chart", "SampleGrid", "SphereAtlas", "PeriodicAtlas", "PartitionOfUnity",
    "GeometryError", "UnknownManifold", "PartitionError", "DegreeError",
    "build_atlas", "build_partition", "normalize_bumps", "square_partition",
    "catalog_bumps", "catalog_partition", "integrate", "set_threads", "get_threads",
    "step_shift", "MANIFOLDS",
]
