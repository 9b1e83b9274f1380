"""Exact noncommutative homology of finite-dimensional algebras over Q."""

from .algebra import (CATALOG, AlgebraError, AssociativityError, FiniteDimAlgebra, UnitError,
                      algebra_from_json, algebra_from_structure_constants, load_algebra)
from .chern import (IDEMPOTENT_CATALOG, algebra_matrix, catalog_idempotents, chern_idempotent,
                    chern_trace, invert_A, verify_chern_invariance_alg)
from .hochschild import (check_identities, connes_B_kernel, cyclic, hochschild,
                         verify_kernel_comparison)
from .omega import (SizeCapError, commutator_d_stable, forms_of, nc_homology, omega_space,
                    reduced_complex)

__all__ = [
    "CATALOG", "AlgebraError", "AssociativityError", "FiniteDimAlgebra", "UnitError",
    "algebra_from_json", "algebra_from_structure_constants", "load_algebra",
    "IDEMPOTENT_CATALOG", "catalog_idempotents", "algebra_matrix", "chern_idempotent", "chern_trace", "invert_A",
    "verify_chern_invariance_alg", "check_identities", "connes_B_kernel", "cyclic",
    "hochschild", "verify_kernel_comparison", "SizeCapError", "commutator_d_stable", "forms_of",
    "nc_homology", "omega_space", "reduced_complex",
]
