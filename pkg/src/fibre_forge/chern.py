"""Chern character forms by curvature and by projector, and their integrals.

Two routes to Ch_p:

* curvature: Ch_p = Tr(R^p) / ((2 pi i)^p p!)
* projector: Ch_p = Tr(Q (dQ)^{2p}) / ((2 pi i)^p p!), where Q is the
  N x N idempotent (N = charts x rank) built from the squared partition.

Forms are kept unnormalised and the constant is applied to numbers, so
symbolic expressions stay rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cocycle import evaluate_matrix, identity_matrix
from .expr import ZERO, as_expr
from .forms import Form, components, pullback_components, scalar_matrix_form
from .geometry import DegreeError, GeometryError, integrate

INTEGRALITY_TOL = 1e-3
ROUTE_TOL = 1e-6
PROJECTOR_TOL = 1e-12


class ProjectorError(GeometryError):
    pass


def normalization(p):
    """1 / ((2 pi i)^p p!)."""
    return 1.0 / ((2j * math.pi) ** p * math.factorial(p))


@dataclass(frozen=True)
class ChernForm:
    """Per-chart Tr(R^p) (or Tr(Q dQ^{2p})) together with its normalisation."""

    p: int
    traces: tuple
    partition: object
    route: str = "connection"

    @property
    def degree(self):
        return 2 * self.p

    @property
    def normalization(self):
        return normalization(self.p)

    def evaluate(self, i, pts):
        """Normalised component values on chart i, shape ``(npts, ncomp)``."""
        return self.traces[i].evaluate(pts) * self.normalization


def _trace_power(r, p, dim):
    if p == 0:
        return Form.function(dim, as_expr(r.n))
    return r.power(p).trace()


def chern_form(curv, p):
    """Ch_p of a curvature, chart by chart."""
    if p < 0:
        raise ValueError("p must be non-negative")
    conn = curv.connection
    dim = curv.forms[0].dim
    traces = tuple(_trace_power(r, p, dim) for r in curv.forms)
    return ChernForm(p, traces, conn.partition if conn is not None else None)


@dataclass(frozen=True)
class ChernReport:
    closedness: float
    chart_mismatch: float
    integral_delta: float = 0.0
    integrals: tuple = ()

    def passed(self, tol_closed=1e-8, tol_chart=1e-9, tol_route=ROUTE_TOL):
        return (self.closedness < tol_closed and self.chart_mismatch < tol_chart
                and self.integral_delta < tol_route)

    def as_dict(self):
        return {
            "closedness": self.closedness,
            "chart_mismatch": self.chart_mismatch,
            "integral_delta": self.integral_delta,
            "integrals": [[z.real, z.imag] for z in self.integrals],
        }


def closedness_residual(atlas, chf):
    """max |d Ch_p| over chart sample points (normalised)."""
    res = 0.0
    for i, f in enumerate(chf.traces):
        df = f.d()
        if not components(atlas.dim, df.degree):
            continue
        vals = df.evaluate(atlas.sample_points(i))
        if vals.size:
            res = max(res, float(np.max(np.abs(vals))) * abs(chf.normalization))
    return res


def chart_mismatch(atlas, chf):
    """max |Ch_i - phi^* Ch_j| over overlap sample points (normalised)."""
    res = 0.0
    if not components(atlas.dim, chf.degree):
        return res
    for (j, i) in atlas.overlaps():
        pts = atlas.overlap_points(i, j)
        if not len(pts):
            continue
        q = atlas.transition(i, j, pts)
        here = chf.traces[i].evaluate(pts)
        there = pullback_components(chf.traces[j].evaluate(q), atlas.jacobian(i, j, pts),
                                    chf.degree)
        res = max(res, float(np.max(np.abs(here - there))) * abs(chf.normalization))
    return res


def chern_integral(atlas, chf):
    """Integral of a top-degree Chern form (0 if 2p exceeds the dimension)."""
    if chf.degree > atlas.dim:
        return 0j
    if chf.degree != atlas.dim:
        raise DegreeError(f"Ch_{chf.p} has degree {chf.degree}, the manifold has dimension {atlas.dim}")
    if chf.partition is None:
        raise GeometryError("the Chern form carries no partition to integrate with")
    return integrate(atlas, chf.partition, list(chf.traces)) * chf.normalization


@dataclass(frozen=True)
class ChernNumber:
    value: complex
    nearest: int
    distance: float

    def integral(self, tol=INTEGRALITY_TOL):
        return self.distance < tol

    def as_dict(self):
        return {"value": [self.value.real, self.value.imag], "nearest_integer": self.nearest,
                "integrality_distance": self.distance}


def chern_number(atlas, chf):
    """Integral of Ch_p over a manifold of dimension 2p, with distance to Z."""
    if chf.degree != atlas.dim:
        raise DegreeError(f"Ch_{chf.p} has degree {chf.degree}, the manifold has dimension {atlas.dim}")
    value = chern_integral(atlas, chf)
    nearest = int(round(value.real))
    return ChernNumber(value, nearest, abs(value - nearest))


def verify_chern_invariance(atlas, c, p, partitions):
    """Chart independence of Ch_p and partition independence of its integral."""
    from .connection import connection_from_partition, curvature

    forms = []
    for part in partitions:
        conn = connection_from_partition(atlas, c, part)
        forms.append(chern_form(curvature(conn), p))
    closed = max(closedness_residual(atlas, f) for f in forms)
    mismatch = max(chart_mismatch(atlas, f) for f in forms)
    integrals = ()
    delta = 0.0
    if forms[0].degree == atlas.dim or forms[0].degree > atlas.dim:
        integrals = tuple(chern_integral(atlas, f) for f in forms)
        delta = max(abs(a - integrals[0]) for a in integrals)
    return ChernReport(closed, mismatch, delta, integrals)


# ---------------------------------------------------------------------------
# Projector route
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectorField:
    """Q as an N x N expression matrix on every chart; N = charts x rank.

    Block (i, j) is beta_i beta_j g_ij, which is the column-vector form of
    the gluing: Q^2 = Q follows from sum_k beta_k^2 = 1 and g_ik g_kj = g_ij.
    """

    matrices: tuple
    rank: int
    n_charts: int
    partition: object
    cocycle: object

    @property
    def size(self):
        return self.rank * self.n_charts

    def block(self, chart, i, j):
        n = self.rank
        m = self.matrices[chart]
        return [row[j * n:(j + 1) * n] for row in m[i * n:(i + 1) * n]]

    def values(self, chart, pts):
        return evaluate_matrix(self.matrices[chart], pts)


def build_projector(atlas, c, p):
    """Assemble Q with blocks beta_i beta_j g_ij in every chart's coordinates."""
    r, n = atlas.n_charts, c.rank
    overlaps = set(atlas.overlaps())
    zero_block = [[ZERO] * n for _ in range(n)]
    mats = []
    for m in range(r):
        pts = atlas.sample_points(m)
        blocks = {}
        for i in range(r):
            for j in range(r):
                bb = p.beta(i, m) * p.beta(j, m)
                if i == j:
                    g = identity_matrix(n)
                elif (i, j) in overlaps and (j == m or (j, m) in overlaps):
                    g = [[atlas.pullback(e, j, m) for e in row] for row in c.g(i, j)]
                else:
                    vals = _eval_scalar(bb, pts)
                    if np.any(np.abs(vals) > 0):
                        raise ProjectorError(
                            f"beta_{i} beta_{j} is nonzero on chart {m} where g_{i}{j} is undefined")
                    blocks[(i, j)] = zero_block
                    continue
                blocks[(i, j)] = [[bb * e for e in row] for row in g]
        mat = []
        for i in range(r):
            for a in range(n):
                mat.append(tuple(blocks[(i, j)][a][b] for j in range(r) for b in range(n)))
        mats.append(tuple(mat))
    return ProjectorField(tuple(mats), n, r, p, c)


def _eval_scalar(e, pts):
    from .forms import evaluate_exprs
    return evaluate_exprs([e], pts)[0]


@dataclass(frozen=True)
class ProjectorReport:
    idempotency: float
    trace_error: float
    tolerance: float = PROJECTOR_TOL

    @property
    def passed(self):
        return self.idempotency < self.tolerance and self.trace_error < self.tolerance

    def as_dict(self):
        return {"idempotency": self.idempotency, "trace_error": self.trace_error,
                "passed": self.passed}


def verify_projector(atlas, q, tol=PROJECTOR_TOL):
    """max |Q^2 - Q| and max |Tr Q - rank| over all chart sample points."""
    idem, trace = 0.0, 0.0
    for m in range(q.n_charts):
        vals = q.values(m, atlas.sample_points(m))
        idem = max(idem, float(np.max(np.abs(vals @ vals - vals))))
        tr = np.trace(vals, axis1=1, axis2=2)
        trace = max(trace, float(np.max(np.abs(tr - q.rank))))
    return ProjectorReport(idem, trace, tol)


def chern_from_projector(atlas, q, p):
    """Ch_p = Tr(Q (dQ)^{2p}) / ((2 pi i)^p p!), chart by chart."""
    traces = []
    for m in range(q.n_charts):
        qm = scalar_matrix_form(atlas.dim, q.matrices[m])
        if p == 0:
            traces.append(qm.trace())
            continue
        dq = qm.d()
        traces.append((qm @ dq.power(2 * p)).trace())
    return ChernForm(p, tuple(traces), q.partition, route="projector")


__all__ = [
    "ChernForm", "ChernNumber", "ChernReport", "ProjectorField", "ProjectorReport",
    "ProjectorError", "normalization", "chern_form", "chern_number", "chern_integral",
    "closedness_residual", "chart_mismatch", "verify_chern_invariance", "build_projector",
    "verify_projector", "chern_from_projector",
]
