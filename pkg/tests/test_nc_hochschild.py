import pytest

from oracles import DenseAlgebra, cyclic_dims, hochschild_dims
from fibre_forge.nc.algebra import CATALOG, load_algebra
from fibre_forge.nc.hochschild import (check_identities, connes_B_kernel, cyclic, cyclic_engine,
                                       hochschild, lambda_cycles, verify_kernel_comparison)

ORACLE_DEPTH = {"matrix-2x2": 3}


@pytest.mark.parametrize("name", CATALOG)
def test_hochschild_matches_the_unnormalised_oracle(name):
    A = load_algebra(name)
    n = ORACLE_DEPTH.get(name, 4)
    expected = hochschild_dims(DenseAlgebra(A.table, A.unit), n)
    assert hochschild(A, n).dims == expected


@pytest.mark.parametrize("name", CATALOG)
def test_cyclic_matches_the_connes_complex_oracle(name):
    A = load_algebra(name)
    n = ORACLE_DEPTH.get(name, 4)
    dims, reduced = cyclic_dims(DenseAlgebra(A.table, A.unit), n)
    res = cyclic(A, n)
    assert res.dims == dims
    assert res.reduced_dims == reduced


def test_classical_values_for_the_rationals():
    # HH(Q) is Q in degree 0; HC(Q) is Q in every even degree
    A = load_algebra("rationals")
    assert hochschild(A, 4).dims == [1, 0, 0, 0, 0]
    assert cyclic(A, 4).dims == [1, 0, 1, 0, 1]
    assert cyclic(A, 4).reduced_dims == [0] * 5


def test_morita_invariance_for_2x2_matrices():
    Q, M = load_algebra("rationals"), load_algebra("matrix-2x2")
    assert hochschild(M, 4).dims == hochschild(Q, 4).dims
    assert cyclic(M, 4).dims == cyclic(Q, 4).dims


def test_dual_numbers_have_higher_hochschild_homology():
    # HH_n(Q[e]/e^2) is one-dimensional in every degree over Q, plus Q in degree 0
    assert hochschild(load_algebra("dual-numbers"), 4).dims == [2, 1, 1, 1, 1]


@pytest.mark.parametrize("name", CATALOG)
def test_chain_level_identities(name):
    ok = check_identities(load_algebra(name), 4)
    assert ok == {"b2_hochschild": True, "b2_lambda": True, "B2": True, "bB+Bb": True}


def test_cyclic_operator_has_finite_order():
    eng = cyclic_engine(load_algebra("upper-triangular"))
    reps, _ = eng.lambda_basis(2)
    # every (1 - t)-orbit class is represented once
    assert len(reps) == len(set(reps))
    assert len(reps) == cyclic(load_algebra("upper-triangular"), 2).chain_dims[2]


@pytest.mark.parametrize("name", CATALOG)
def test_comparison_theorem_dimensions(name):
    rep = verify_kernel_comparison(load_algebra(name), 4)
    assert rep.passed
    assert [r.degree for r in rep.rows] == [0, 1, 2, 3, 4]
    assert rep.rows[0].reduced


def test_kernel_dims_are_bounded_by_reduced_cyclic_homology():
    A = load_algebra("upper-triangular")
    hc = cyclic(A, 4)
    for n in range(5):
        res = connes_B_kernel(A, n, hc=hc)
        assert 0 <= res.kernel_dim <= hc.reduced_dims[n]
    assert len(lambda_cycles(A, 2)) >= hc.dims[2]


def test_comparison_fails_when_B_is_replaced_by_zero():
    # fault injection: with B = 0 the kernel is all of HC-bar, which is
    # nonzero in even degrees for the dual numbers while H-bar vanishes there
    rep = verify_kernel_comparison(load_algebra("dual-numbers"), 4, B=lambda t: {})
    assert not rep.passed
    assert [(r.hbar_dim, r.kernel_dim) for r in rep.rows if not r.passed] == [(0, 1)] * 3
