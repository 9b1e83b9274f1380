"""Line bundles on the sphere, from transition function to Chern number.

The clutching bundle of degree k glues the two stereographic charts with
g = z^k.  We build a connection from a partition of unity, take its
curvature, and integrate the first Chern form.  The answer is the integer k,
whatever partition we use.
"""

from fibre_forge.chern import chern_form, chern_number, verify_chern_invariance
from fibre_forge.cocycle import make_clutching, verify_cocycle
from fibre_forge.connection import (connection_from_partition, curvature, verify_gluing,
                                    verify_tensoriality)
from fibre_forge.geometry import build_atlas, catalog_partition

atlas = build_atlas("sphere2", 200)
part = catalog_partition(atlas, "A")

print("degree  cocycle    gluing     tensorial  integral")
for k in range(-2, 4):
    c = make_clutching(atlas, k)
    conn = connection_from_partition(atlas, c, part)
    curv = curvature(conn)
    num = chern_number(atlas, chern_form(curv, 1))
    print(f"{k:>6}  {verify_cocycle(atlas, c).cocycle_residual:.1e}  "
          f"{verify_gluing(atlas, c, conn).residual:.1e}  "
          f"{verify_tensoriality(atlas, c, curv).residual:.1e}  {num.value.real:+.9f}  -> {num.nearest}")

# a different partition changes the connection but not the integral
rep = verify_chern_invariance(atlas, make_clutching(atlas, 2), 1,
                              [catalog_partition(atlas, v) for v in ("A", "B")])
print("\ndegree 2, partitions A and B:")
print("  integrals", [f"{v.real:+.9f}" for v in rep.integrals])
print(f"  difference {rep.integral_delta:.1e}, d Ch_1 {rep.closedness:.1e}")
