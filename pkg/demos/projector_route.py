"""The same Chern numbers from a projector instead of a connection.

Stacking the charts gives a trivial bundle of rank (charts x rank) and a
matrix Q with blocks beta_i beta_j g_ij.  Q is idempotent, its image is the
bundle, and the trace of Q (dQ)^2 computes the first Chern form directly.
"""

from fibre_forge.chern import (build_projector, chern_form, chern_from_projector,
                               chern_integral, verify_projector)
from fibre_forge.cocycle import direct_sum, make_clutching, torus_line_bundle
from fibre_forge.connection import connection_from_partition, curvature
from fibre_forge.geometry import build_atlas, catalog_partition


def both_routes(atlas, c, variant="A"):
    part = catalog_partition(atlas, variant)
    q = build_projector(atlas, c, part)
    rep = verify_projector(atlas, q)
    proj = chern_integral(atlas, chern_from_projector(atlas, q, 1)).real
    conn = chern_integral(atlas, chern_form(curvature(connection_from_partition(atlas, c, part)), 1)).real
    return rep, proj, conn


sphere = build_atlas("sphere2", 160)
torus = build_atlas("torus4", 160)
cases = [
    ("sphere, degree 1", sphere, make_clutching(sphere, 1)),
    ("sphere, degree 3", sphere, make_clutching(sphere, 3)),
    ("sphere, (2) + (-1)", sphere, direct_sum(make_clutching(sphere, 2), make_clutching(sphere, -1))),
    ("torus, degree 1", torus, torus_line_bundle(torus, 1)),
]

print(f"{'bundle':<20} {'|Q^2-Q|':>8} {'|TrQ-n|':>8} {'projector':>13} {'connection':>13}")
for label, atlas, c in cases:
    rep, proj, conn = both_routes(atlas, c, "B" if atlas is torus else "A")
    print(f"{label:<20} {rep.idempotency:8.1e} {rep.trace_error:8.1e} {proj:+13.8f} {conn:+13.8f}")

# the torus sign is opposite: with these chart orientations degree k integrates to -k
