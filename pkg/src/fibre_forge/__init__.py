"""fibre_forge: Chern-Weil numerics for glued bundles and exact noncommutative homology.

The numeric side builds bundles from transition cocycles on small atlases,
glues a connection with a partition of unity and integrates Chern character
forms by two independent routes.  The exact side (``fibre_forge.nc``)
computes universal differential forms, their commutator quotient and the
Hochschild and cyclic homology of finite-dimensional algebras over Q.
"""

from .chern import (build_projector, chern_form, chern_from_projector, chern_integral,
                    chern_number, verify_chern_invariance, verify_projector)
from .cocycle import (Cocycle, direct_sum, flat_circle_cocycle, make_clutching, torus_line_bundle,
                      trivial_cocycle, verify_cocycle, verify_cohomologous)
from .connection import connection_from_partition, curvature, verify_gluing, verify_tensoriality
from .expr import DomainError, ParseError, differentiate, evaluate, parse, to_source
from .geometry import build_atlas, build_partition, catalog_partition, integrate, set_threads

__version__ = "0.1.0"

__all__ = [
    "build_projector", "chern_form", "chern_from_projector", "chern_integral", "chern_number",
    "verify_chern_invariance", "verify_projector", "Cocycle", "direct_sum",
    "flat_circle_cocycle", "make_clutching", "torus_line_bundle", "trivial_cocycle",
    "verify_cocycle", "verify_cohomologous", "connection_from_partition", "curvature",
    "verify_gluing", "verify_tensoriality", "DomainError", "ParseError", "differentiate",
    "evaluate", "parse", "to_source", "build_atlas", "build_partition", "catalog_partition",
    "integrate", "set_threads",
]
