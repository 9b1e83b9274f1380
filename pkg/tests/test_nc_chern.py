from fractions import Fraction

import pytest

from fibre_forge.nc.algebra import load_algebra
from fibre_forge.nc.chern import (IdempotentError, algebra_matrix, chern_idempotent, chern_trace,
                                  invert_A, is_idempotent, mat_mul_A, verify_chern_invariance_alg)
from fibre_forge.nc.omega import forms_of, nc_homology

# catalog idempotents and the conjugating units used by the reports
CASES = [
    ("rationals-squared", [[{"p": 1}]], [[{"p": 2, "q": 1}]]),
    ("matrix-2x2", [[{"e11": 1}]], [[{"e11": 1, "e12": 1, "e22": 1}]]),
    ("matrix-2x2", [[{"e11": 1}]], [[{"e12": 1, "e21": 1}]]),
    ("upper-triangular", [[{"e11": 1}]], [[{"e11": 1, "e12": 1, "e22": 1}]]),
    ("dual-numbers", [[{"1": 1}]], [[{"1": 1, "eps": 1}]]),
    ("rationals-squared", [[{"p": 1}, {}], [{}, {"q": 1}]], [[{}, {"p": 1, "q": 1}], [{"p": 1, "q": 1}, {}]]),
]
IDS = [f"{c[0]}-{i}" for i, c in enumerate(CASES)]


@pytest.mark.parametrize("name, q, u", CASES, ids=IDS)
@pytest.mark.parametrize("p", [0, 1])
def test_character_is_closed_and_conjugation_invariant(name, q, u, p):
    A = load_algebra(name)
    Q, U = algebra_matrix(A, q), algebra_matrix(A, u)
    ch = chern_idempotent(A, Q, p)
    assert ch.closed
    assert ch.odd_trace_vanishes
    assert verify_chern_invariance_alg(A, Q, U, p).passed


def test_rationals_squared_frozen_representative():
    A = load_algebra("rationals-squared")
    ch = chern_idempotent(A, algebra_matrix(A, [[{"p": 1}]]), 1)
    # rebased basis: 1 and q, so p = 1 - q and Tr(p dp dp) = dq dq - q dq dq
    assert ch.representative == {(0, 1, 1): 1, (1, 1, 1): -1}
    assert ch.class_coordinates == [Fraction(-1)]
    assert not ch.class_is_zero and not ch.in_commutators


def test_complementary_idempotents_have_opposite_classes():
    # Ch_1(e) + Ch_1(1 - e) = Tr(de de) = d(Tr(e de)), a boundary
    A = load_algebra("upper-triangular")
    hom = nc_homology(A, 2)
    a = chern_idempotent(A, algebra_matrix(A, [[{"e11": 1}]]), 1, hom)
    b = chern_idempotent(A, algebra_matrix(A, [[{"e22": 1}]]), 1, hom)
    assert a.class_coordinates and not a.class_is_zero
    assert [x + y for x, y in zip(a.class_coordinates, b.class_coordinates)] == [0]


def test_stabilisation_by_the_identity():
    A = load_algebra("rationals-squared")
    one = chern_idempotent(A, algebra_matrix(A, [[{"p": 1}]]), 1)
    two = chern_idempotent(A, algebra_matrix(A, [[{"p": 1}, {}], [{}, {"p": 1, "q": 1}]]), 1)
    assert one.class_coordinates == two.class_coordinates


def test_classes_vanish_where_the_homology_does():
    M = load_algebra("matrix-2x2")
    ch = chern_idempotent(M, algebra_matrix(M, [[{"e11": 1}]]), 1)
    assert ch.class_coordinates == [] and ch.class_is_zero
    # nonzero as a form, and not a commutator, yet a boundary modulo commutators
    assert ch.representative and not ch.in_commutators


def test_degree_zero_is_the_trace():
    A = load_algebra("rationals-squared")
    ch = chern_idempotent(A, algebra_matrix(A, [[{"p": 1}]]), 0)
    assert ch.representative == {(0,): 1, (1,): -1}


def test_odd_trace_vanishes_modulo_commutators():
    A = load_algebra("matrix-2x2")
    eng = forms_of(A)
    Q = algebra_matrix(A, [[{"e11": 1}]])
    odd = eng.to_vector(chern_trace(A, Q, 1, odd=True), 3)
    assert not odd or eng.commutator_span(3).contains(odd)


def test_non_idempotents_are_rejected():
    D = load_algebra("dual-numbers")
    with pytest.raises(IdempotentError, match="not idempotent"):
        chern_idempotent(D, algebra_matrix(D, [[{"eps": 1}]]), 1)
    with pytest.raises(IdempotentError):
        verify_chern_invariance_alg(D, algebra_matrix(D, [[{"1": 2}]]), [[{0: 1}]], 0)


def test_inverse_over_the_algebra():
    M = load_algebra("matrix-2x2")
    u = algebra_matrix(M, [[{"e11": 1, "e12": 3, "e22": 1}]])
    v = invert_A(M, u)
    assert mat_mul_A(M, u, v) == [[{0: 1}]]
    with pytest.raises(IdempotentError):
        invert_A(M, algebra_matrix(M, [[{"e11": 1}]]))


def test_matrix_entries_are_checked():
    A = load_algebra("dual-numbers")
    with pytest.raises(Exception, match="unknown basis label"):
        algebra_matrix(A, [[{"delta": 1}]])
    assert is_idempotent(A, algebra_matrix(A, [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]))
