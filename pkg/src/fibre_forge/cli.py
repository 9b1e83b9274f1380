"""``fibre-forge``: JSON-configured bundle and algebra reports.

Exit codes: 0 all checks pass, 1 failed checks or validation diagnostics,
2 config/schema/algebra errors, 3 numeric domain errors, 4 size cap.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from contextlib import contextmanager

import numpy as np

from .config import (SCHEMA_VERSION, ConfigError, build_cocycle, build_partitions, check_schema,
                     thresholds, validate_config)
from .expr import DomainError, DSLError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DOMAIN, EXIT_CAP = 0, 1, 2, 3, 4


class _Clock:
    def __init__(self):
        self.laps = {}

    @contextmanager
    def lap(self, name):
        t0 = time.perf_counter()
        yield
        self.laps[name] = self.laps.get(name, 0.0) + time.perf_counter() - t0


def _c(z):
    z = complex(z)
    return [z.real, z.imag]


class _Checks:
    def __init__(self):
        self.rows = []

    def add(self, name, value, threshold):
        ok = bool(value < threshold)
        self.rows.append({"name": name, "value": float(value), "threshold": threshold, "pass": ok})
        return ok

    @property
    def passed(self):
        return all(r["pass"] for r in self.rows)


# ---------------------------------------------------------------------------
# Bundle report
# ---------------------------------------------------------------------------

def _route_delta_pointwise(atlas, f, g):
    worst = 0.0
    for i in range(atlas.n_charts):
        pts = atlas.sample_points(i)
        worst = max(worst, float(np.max(np.abs(f.evaluate(i, pts) - g.evaluate(i, pts)))))
    return worst


def run_bundle_report(config, clock=None):
    """Run the numeric pipeline for a schema-valid bundle config.

    Returns ``(report, exit_code)``; exceptions propagate to the caller.
    """
    from .chern import (build_projector, chart_mismatch, chern_form, chern_from_projector,
                        chern_integral, closedness_residual, verify_projector)
    from .cocycle import verify_cocycle
    from .connection import connection_from_partition, curvature, verify_gluing, verify_tensoriality
    from .geometry import build_atlas

    check_schema(config, "bundle-report")
    clock = clock or _Clock()
    th = thresholds(config)
    checks = _Checks()

    with clock.lap("setup"):
        atlas = build_atlas(config["manifold"], config["resolution"])
        c = build_cocycle(atlas, config["cocycle"])
        parts = build_partitions(atlas, config)

    with clock.lap("cocycle"):
        rep = verify_cocycle(atlas, c, th["cocycle"])
    checks.add("cocycle", max(rep.cocycle_residual, rep.inverse_residual), th["cocycle"])
    report = {
        "schema": SCHEMA_VERSION,
        "job": "bundle-report",
        "manifold": config["manifold"],
        "resolution": config["resolution"],
        "rank": c.rank,
        "charts": atlas.n_charts,
        "thresholds": th,
        "cocycle": {"cocycle_residual": rep.cocycle_residual,
                    "inverse_residual": rep.inverse_residual,
                    "min_abs_det": rep.min_abs_det, "samples": rep.samples},
        "partitions": [],
        "chern": [],
    }

    curvs, projs = [], []
    for part in parts:
        entry = {"name": part.name}
        with clock.lap("connection"):
            conn = connection_from_partition(atlas, c, part)
            glue = verify_gluing(atlas, c, conn, th["gluing"])
            curv = curvature(conn)
            tens = verify_tensoriality(atlas, c, curv, th["tensoriality"])
        with clock.lap("projector"):
            q = build_projector(atlas, c, part)
            prep = verify_projector(atlas, q, th["projector"])
        entry["gluing"] = glue.residual
        entry["tensoriality"] = tens.residual
        entry["projector"] = {"idempotency": prep.idempotency, "trace_error": prep.trace_error}
        checks.add(f"gluing[{part.name}]", glue.residual, th["gluing"])
        checks.add(f"tensoriality[{part.name}]", tens.residual, th["tensoriality"])
        checks.add(f"projector_idempotency[{part.name}]", prep.idempotency, th["projector"])
        checks.add(f"projector_trace[{part.name}]", prep.trace_error, th["projector"])
        report["partitions"].append(entry)
        curvs.append(curv)
        projs.append(q)

    for p in sorted(set(config["p"])):
        row = {"p": p, "degree": 2 * p, "partitions": []}
        conn_integrals = []
        for part, curv, q in zip(parts, curvs, projs):
            with clock.lap(f"chern_p{p}"):
                fc = chern_form(curv, p)
                fq = chern_from_projector(atlas, q, p)
                sub = {"name": part.name}
                closed = max(closedness_residual(atlas, fc), closedness_residual(atlas, fq))
                mism = max(chart_mismatch(atlas, fc), chart_mismatch(atlas, fq))
                sub["closedness"] = closed
                sub["chart_mismatch"] = mism
                checks.add(f"closedness[p={p},{part.name}]", closed, th["closedness"])
                checks.add(f"chart_mismatch[p={p},{part.name}]", mism, th["chart"])
                if 2 * p == atlas.dim:
                    ic = chern_integral(atlas, fc)
                    iq = chern_integral(atlas, fq)
                    nearest = int(round(ic.real))
                    sub["integral_connection"] = _c(ic)
                    sub["integral_projector"] = _c(iq)
                    sub["route_delta"] = abs(ic - iq)
                    sub["nearest_integer"] = nearest
                    sub["integrality_distance"] = abs(ic - nearest)
                    checks.add(f"route[p={p},{part.name}]", sub["route_delta"], th["route"])
                    checks.add(f"integrality[p={p},{part.name}]", sub["integrality_distance"],
                               th["integrality"])
                    conn_integrals.append(ic)
                elif p == 0:
                    sub["value"] = c.rank
                    sub["route_delta"] = _route_delta_pointwise(atlas, fc, fq)
                    checks.add(f"route[p=0,{part.name}]", sub["route_delta"], th["route"])
            row["partitions"].append(sub)
        if len(conn_integrals) > 1:
            row["partition_delta"] = max(abs(z - conn_integrals[0]) for z in conn_integrals)
            checks.add(f"invariance[p={p}]", row["partition_delta"], th["invariance"])
        report["chern"].append(row)

    report["checks"] = checks.rows
    report["pass"] = checks.passed
    return report, EXIT_OK if checks.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# Algebra report
# ---------------------------------------------------------------------------

def _load_algebra_spec(spec):
    from .nc.algebra import algebra_from_json, load_algebra
    if isinstance(spec, str):
        return load_algebra(spec)
    return algebra_from_json(spec)


def run_algebra_report(config, clock=None):
    """Exact homology tables, the B-kernel comparison and idempotent data."""
    from .nc import (algebra_matrix, chern_idempotent, cyclic, hochschild, nc_homology,
                     verify_chern_invariance_alg, verify_kernel_comparison)

    check_schema(config, "algebra-report")
    clock = clock or _Clock()
    checks = []
    n_max = config["n_max"]
    with clock.lap("algebra"):
        A = _load_algebra_spec(config["algebra"])
    with clock.lap("hbar"):
        hom = nc_homology(A, n_max)
    with clock.lap("hochschild"):
        hh = hochschild(A, n_max)
    with clock.lap("cyclic"):
        hc = cyclic(A, n_max)
    with clock.lap("comparison"):
        cmp_rep = verify_kernel_comparison(A, n_max)

    table = []
    for n in range(n_max + 1):
        row = cmp_rep.rows[n]
        table.append({
            "n": n,
            "omega": hom.omega_dims[n],
            "omega_bar": hom.quotient_dims[n],
            "hbar": hom.dims[n],
            "hbar_reduced": hom.reduced_dim0 if n == 0 else hom.dims[n],
            "hh": hh.dims[n],
            "hc": hc.dims[n],
            "hc_reduced": hc.reduced_dims[n],
            "ker_B": row.kernel_dim,
            "comparison": "pass" if row.passed else "fail",
        })
        checks.append({"name": f"hbar_vs_kerB[n={n}]", "pass": row.passed})

    idems = []
    for k, spec in enumerate(config.get("idempotents", [])):
        q = algebra_matrix(A, spec["Q"])
        entry = {"index": k, "size": len(q), "chern": [], "conjugations": []}
        ps = spec.get("p", [0, 1])
        for p in ps:
            if 2 * p > n_max:
                hp = nc_homology(A, 2 * p)
            else:
                hp = hom
            with clock.lap("idempotents"):
                ch = chern_idempotent(A, q, p, hp)
            entry["chern"].append(ch.as_dict())
            checks.append({"name": f"idempotent[{k}].closed[p={p}]", "pass": ch.closed})
            checks.append({"name": f"idempotent[{k}].odd_trace[p={p}]",
                           "pass": ch.odd_trace_vanishes})
        for c_idx, u_entries in enumerate(spec.get("conjugators", [])):
            u = algebra_matrix(A, u_entries)
            for p in ps:
                with clock.lap("idempotents"):
                    inv = verify_chern_invariance_alg(A, q, u, p)
                d = inv.as_dict()
                d["conjugator"] = c_idx
                entry["conjugations"].append(d)
                checks.append({"name": f"idempotent[{k}].invariance[u={c_idx},p={p}]",
                               "pass": inv.passed})
        idems.append(entry)

    passed = all(c["pass"] for c in checks)
    report = {
        "schema": SCHEMA_VERSION,
        "job": "algebra-report",
        "algebra": A.name or "inline",
        "dimension": A.dim,
        "n_max": n_max,
        "unit_class_nonzero_hbar0": hom.unit_class_nonzero,
        "table": table,
        "idempotents": idems,
        "checks": checks,
        "pass": passed,
    }
    return report, EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _dump(report):
    return json.dumps(report, indent=2) + "\n"


def _write_csv(path, report):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if report["job"] == "algebra-report":
            cols = list(report["table"][0]) if report["table"] else []
            w.writerow(cols)
            for row in report["table"]:
                w.writerow([row[c] for c in cols])
        else:
            w.writerow(["p", "partition", "closedness", "chart_mismatch", "integral_connection_re",
                        "integral_projector_re", "route_delta", "integrality_distance"])
            for row in report["chern"]:
                for sub in row["partitions"]:
                    w.writerow([row["p"], sub["name"], sub["closedness"], sub["chart_mismatch"],
                                sub.get("integral_connection", [""])[0],
                                sub.get("integral_projector", [""])[0],
                                sub.get("route_delta", ""), sub.get("integrality_distance", "")])


def _error(kind, message, code):
    sys.stderr.write(f"fibre-forge: {kind}: {message}\n")
    return code


def _read_config(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def build_parser():
    ap = argparse.ArgumentParser(prog="fibre-forge",
                                 description="Bundle and algebra reports from JSON configs.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("bundle", "Chern-Weil report for a bundle on a catalog manifold"),
                           ("algebra", "exact homology report for a finite-dimensional algebra")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--csv", help="also write the table as CSV")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads for quadrature (default: all cores)")
        p.add_argument("--timings", action="store_true",
                       help="add wall-clock timings (reports stop being byte-stable)")
    v = sub.add_parser("validate", help="schema check and dry-run resolution")
    v.add_argument("config")
    v.add_argument("--kind", choices=["bundle-report", "algebra-report"],
                   help="job kind when the config has no 'job' field")
    return ap


def _validate(args):
    try:
        cfg = _read_config(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"ok": False, "diagnostics": [f"<file>: {exc}"]}, indent=2))
        return EXIT_FAIL
    diags = validate_config(cfg, args.kind)
    if diags:
        print(json.dumps({"ok": False, "diagnostics": diags}, indent=2))
        return EXIT_FAIL
    print("ok")
    return EXIT_OK


def main(argv=None):
    from .geometry import GeometryError, set_threads
    from .nc.algebra import AlgebraError
    from .nc.omega import SizeCapError

    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return _validate(args)

    kind = "bundle-report" if args.command == "bundle" else "algebra-report"
    try:
        cfg = _read_config(args.config)
    except OSError as exc:
        return _error("config", str(exc), EXIT_CONFIG)
    except json.JSONDecodeError as exc:
        return _error("config", f"invalid JSON: {exc}", EXIT_CONFIG)
    if isinstance(cfg, dict) and cfg.get("job", kind) != kind:
        return _error("config", f"config is a {cfg['job']!r} job, not {kind!r}", EXIT_CONFIG)

    set_threads(args.threads if args.threads else (os.cpu_count() or 1))
    clock = _Clock()
    run = run_bundle_report if kind == "bundle-report" else run_algebra_report
    try:
        report, code = run(cfg, clock)
    except ConfigError as exc:
        return _error("schema", str(exc), EXIT_CONFIG)
    except DomainError as exc:
        return _error("domain", str(exc), EXIT_DOMAIN)
    except SizeCapError as exc:
        return _error("size cap", str(exc), EXIT_CAP)
    except (AlgebraError, GeometryError, DSLError) as exc:
        return _error("config", str(exc), EXIT_CONFIG)

    if args.timings:
        report["timings"] = {k: round(v, 6) for k, v in sorted(clock.laps.items())}
    text = _dump(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        _write_csv(args.csv, report)
    return code


if __name__ == "__main__":
    sys.exit(main())
