"""The eleven acceptance criteria, each at its stated tolerance.

Every test reports one PASS/FAIL line through the ``criterion`` fixture; the
lines are repeated in a summary section at the end of the pytest run.
"""

import math
import shutil
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from conftest import BUNDLES, CLUTCHING_DEGREES, SPHERE_RES, atlas
from fibre_forge.chern import (build_projector, chart_mismatch, chern_form, chern_from_projector,
                               chern_integral, chern_number, closedness_residual,
                               verify_projector)
from fibre_forge.cocycle import flat_circle_cocycle, make_clutching, verify_cocycle
from fibre_forge.connection import (connection_from_partition, curvature, evaluate_connection,
                                    verify_gluing, verify_tensoriality)
from fibre_forge.geometry import build_atlas, catalog_partition
from fibre_forge.nc.algebra import CATALOG, load_algebra
from fibre_forge.nc.chern import catalog_idempotents, chern_idempotent, verify_chern_invariance_alg
from fibre_forge.nc.hochschild import cyclic, hochschild, verify_kernel_comparison
from fibre_forge.nc.omega import commutator_d_stable, forms_of, nc_homology

ROOT = Path(__file__).resolve().parent.parent


def _worst(values):
    return max(values) if values else 0.0


# ---------------------------------------------------------------------------
# geometry and bundles
# ---------------------------------------------------------------------------

def test_criterion_01_cocycle_law(criterion):
    rows = []
    cases = [("sphere2", lambda a, k=k: make_clutching(a, k)) for k in CLUTCHING_DEGREES]
    cases += [("circle3", lambda a: flat_circle_cocycle(a, complex(math.cos(1.0), math.sin(1.0)))),
              ("circle3", lambda a: flat_circle_cocycle(a, [[0.6, -0.8], [0.8, 0.6]]))]
    for mid, make in cases:
        t = time.perf_counter()
        a = build_atlas(mid, SPHERE_RES)
        rep = verify_cocycle(a, make(a))
        rows.append((max(rep.cocycle_residual, rep.inverse_residual), time.perf_counter() - t))
    res, slow = _worst([r for r, _ in rows]), _worst([s for _, s in rows])
    criterion(1, "cocycle law", res < 1e-10 and slow < 1.0,
              f"max residual {res:.1e}, slowest {slow:.2f} s, {len(rows)} cocycles")


def test_criterion_02_gluing_and_tensoriality(criterion):
    worst_g = worst_t = slow = 0.0
    n = 0
    for label, mid, make in BUNDLES:
        a = atlas(mid)
        for variant in ("A", "B"):
            t = time.perf_counter()
            c = make(a)
            conn = connection_from_partition(a, c, catalog_partition(a, variant))
            g = verify_gluing(a, c, conn)
            r = verify_tensoriality(a, c, curvature(conn))
            slow = max(slow, time.perf_counter() - t)
            worst_g, worst_t = max(worst_g, g.residual), max(worst_t, r.residual)
            n += 1
    ok = worst_g < 1e-9 and worst_t < 1e-9 and slow < 5.0
    criterion(2, "connection gluing and curvature tensoriality", ok,
              f"gluing {worst_g:.1e}, tensoriality {worst_t:.1e}, slowest {slow:.2f} s, {n} combinations")


def test_criterion_03_closedness_and_chart_independence(criterion):
    a = atlas("sphere2")
    closed, mismatch = [], []
    for k in CLUTCHING_DEGREES:
        conn = connection_from_partition(a, make_clutching(a, k), catalog_partition(a))
        chf = chern_form(curvature(conn), 1)
        closed.append(closedness_residual(a, chf))
        mismatch.append(chart_mismatch(a, chf))
    ok = _worst(closed) < 1e-8 and _worst(mismatch) < 1e-9
    criterion(3, "Chern form closed and chart independent", ok,
              f"d Ch_1 {_worst(closed):.1e}, overlap mismatch {_worst(mismatch):.1e}")


def _oracle_sign():
    """s from Stokes: both chart disks |u| <= 1 bounded by anticlockwise unit loops."""
    a = atlas("sphere2")
    conn = connection_from_partition(a, make_clutching(a, 1), catalog_partition(a))
    n = 2048
    t = 2 * math.pi * np.arange(n) / n
    pts = np.stack([np.cos(t), np.sin(t)], axis=1)
    total = 0j
    for chart in (0, 1):
        g = evaluate_connection(conn, chart, pts)[:, :, 0, 0]
        total += np.sum(-g[:, 0] * np.sin(t) + g[:, 1] * np.cos(t)) * (2 * math.pi / n)
    value = total / (2j * math.pi)
    return int(round(value.real)), value


def test_criterion_04_integrality(criterion):
    s, raw = _oracle_sign()
    dist, slow, wrong = 0.0, 0.0, []
    for k in CLUTCHING_DEGREES:
        t = time.perf_counter()
        a = build_atlas("sphere2", SPHERE_RES)
        conn = connection_from_partition(a, make_clutching(a, k), catalog_partition(a))
        num = chern_number(a, chern_form(curvature(conn), 1))
        slow = max(slow, time.perf_counter() - t)
        dist = max(dist, abs(num.value - s * k))
        if num.nearest != s * k:
            wrong.append(k)
    ok = abs(s) == 1 and abs(raw - s) < 1e-9 and dist < 1e-3 and not wrong and slow < 10.0
    criterion(4, "integrality of the first Chern number", ok,
              f"oracle sign s = {s:+d}, max |int - s k| {dist:.1e}, slowest {slow:.2f} s")


def test_criterion_05_projector(criterion):
    idem = trace = 0.0
    n = 0
    for label, mid, make in BUNDLES:
        a = atlas(mid)
        c = make(a)
        for variant in ("A", "B"):
            rep = verify_projector(a, build_projector(a, c, catalog_partition(a, variant)))
            idem, trace = max(idem, rep.idempotency), max(trace, rep.trace_error)
            n += 1
    criterion(5, "Q is a projector with trace n", idem < 1e-12 and trace < 1e-12,
              f"|Q^2 - Q| {idem:.1e}, |Tr Q - n| {trace:.1e}, {n} combinations")


def _sphere_routes(k, variant):
    a = atlas("sphere2")
    c = make_clutching(a, k)
    part = catalog_partition(a, variant)
    conn = chern_integral(a, chern_form(curvature(connection_from_partition(a, c, part)), 1))
    proj = chern_integral(a, chern_from_projector(a, build_projector(a, c, part), 1))
    return conn, proj


def test_criterion_06_route_agreement(criterion):
    delta = _worst([abs(c - p) for k in CLUTCHING_DEGREES for c, p in [_sphere_routes(k, "A")]])
    criterion(6, "projector route agrees with curvature route", delta < 1e-6,
              f"max |int_proj - int_conn| {delta:.1e}")


def test_criterion_07_connection_independence(criterion):
    a = atlas("sphere2")
    deltas = []
    for k in CLUTCHING_DEGREES:
        c = make_clutching(a, k)
        vals = [chern_integral(a, chern_form(curvature(
            connection_from_partition(a, c, catalog_partition(a, v))), 1)) for v in ("A", "B")]
        deltas.append(abs(vals[0] - vals[1]))
    criterion(7, "two partitions give the same integral", _worst(deltas) < 1e-6,
              f"max difference {_worst(deltas):.1e}")


# ---------------------------------------------------------------------------
# exact algebra
# ---------------------------------------------------------------------------

def _leibniz_holds(eng, max_degree):
    for p in range(max_degree + 1):
        sign = -1 if p % 2 else 1
        for q in range(max_degree + 1 - p):
            for s in eng.basis(p):
                ds = eng.d({s: 1})
                for t in eng.basis(q):
                    rhs = dict(eng.multiply(ds, {t: 1}))
                    for key, v in eng.multiply({s: 1}, eng.d({t: 1})).items():
                        rhs[key] = rhs.get(key, 0) + sign * v
                    rhs = {key: v for key, v in rhs.items() if v}
                    if eng.d(eng.multiply({s: 1}, {t: 1})) != rhs:
                        return False
    return True


def test_criterion_08_exact_identities(criterion):
    t = time.perf_counter()
    failures = []
    for name in CATALOG:
        A = load_algebra(name)
        eng = forms_of(A)
        for n in range(6):
            if len(eng.basis(n)) != A.dim * (A.dim - 1) ** n:
                failures.append(f"{name}: dim Omega^{n}")
            if any(eng.d(eng.d({b: 1})) for b in eng.basis(n)):
                failures.append(f"{name}: d^2 on Omega^{n}")
            if not commutator_d_stable(A, n):
                failures.append(f"{name}: d(C_{n})")
        if not _leibniz_holds(eng, 5):
            failures.append(f"{name}: Leibniz")
    elapsed = time.perf_counter() - t
    criterion(8, "d^2 = 0, Leibniz, dim formula, d-stable commutators (n <= 5)",
              not failures and elapsed < 60.0,
              f"{elapsed:.1f} s" + (f"; failed: {', '.join(failures)}" if failures else ""))


def test_criterion_09_comparison(criterion):
    rows, bad = [], []
    for name in CATALOG:
        rep = verify_kernel_comparison(load_algebra(name), 4)
        rows.append(f"{name} " + "/".join(f"{r.hbar_dim}={r.kernel_dim}" for r in rep.rows))
        if not rep.passed:
            bad.append(name)
    # classical cross-checks: Q, and M_2(Q) by Morita invariance
    Q, M = load_algebra("rationals"), load_algebra("matrix-2x2")
    classical = (hochschild(Q, 4).dims == [1, 0, 0, 0, 0] and cyclic(Q, 4).dims == [1, 0, 1, 0, 1]
                 and hochschild(M, 4).dims == hochschild(Q, 4).dims
                 and cyclic(M, 4).dims == cyclic(Q, 4).dims)
    criterion(9, "dim H-bar_n = dim Ker B_* (n <= 4)", not bad and classical,
              "; ".join(rows) + ("" if classical else "; classical values differ"))


def test_criterion_10_idempotent_character(criterion):
    checked, bad = 0, []
    for name in CATALOG:
        A = load_algebra(name)
        hom = nc_homology(A, 2)
        for idx, (q, us) in enumerate(catalog_idempotents(A)):
            for p in (0, 1):
                if not chern_idempotent(A, q, p, hom).closed:
                    bad.append(f"{name}[{idx}] p={p} not closed")
                for u in us:
                    if not verify_chern_invariance_alg(A, q, u, p).passed:
                        bad.append(f"{name}[{idx}] p={p} not invariant")
                    checked += 1
    criterion(10, "idempotent Chern character closed and conjugation invariant", not bad,
              f"{checked} conjugations" + (f"; {', '.join(bad)}" if bad else ""))


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------

def _cli():
    exe = shutil.which("fibre-forge")
    return [exe] if exe else [sys.executable, "-m", "fibre_forge.cli"]


def test_criterion_11_determinism(criterion):
    differing = []
    for cmd, cfg in (("bundle", "sphere_k1.json"), ("algebra", "dual_numbers.json")):
        outs = [subprocess.run(_cli() + [cmd, str(ROOT / "configs" / cfg), "--threads", "1"],
                               capture_output=True, check=False).stdout for _ in range(2)]
        if not outs[0] or outs[0] != outs[1]:
            differing.append(cfg)
    criterion(11, "byte-identical reports across runs", not differing,
              "differing: " + ", ".join(differing) if differing else "bundle and algebra reports")
