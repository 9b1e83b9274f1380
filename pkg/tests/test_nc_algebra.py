from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fibre_forge.nc.algebra import (CATALOG, AlgebraError, AssociativityError, UnitError,
                                    algebra_from_json, algebra_from_structure_constants,
                                    load_algebra, matrix_algebra_table)

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@pytest.mark.parametrize("name, dim, commutative", [
    ("rationals", 1, True), ("rationals-squared", 2, True), ("dual-numbers", 2, True),
    ("matrix-2x2", 4, False), ("upper-triangular", 3, False),
])
def test_catalog_algebras(name, dim, commutative):
    A = load_algebra(name)
    assert A.dim == dim
    assert A.is_commutative() == commutative
    assert A.new_labels[0] == "1"
    for b in range(dim):
        assert A.multiply(A.one, {b: Fraction(1)}) == {b: 1}
        assert A.multiply({b: Fraction(1)}, A.one) == {b: 1}


def test_unknown_catalog_name():
    with pytest.raises(AlgebraError, match="unknown catalog algebra"):
        load_algebra("octonions")
    assert len(CATALOG) == 5


def test_matrix_table_matches_the_catalog():
    A = load_algebra("matrix-2x2")
    table, unit, labels = matrix_algebra_table(2)
    assert [[[Fraction(v) for v in e] for e in row] for row in table] == A.table
    assert unit == [1, 0, 0, 1] and labels == A.labels
    M3 = algebra_from_structure_constants(*matrix_algebra_table(3))
    assert M3.dim == 9 and not M3.is_commutative()


def test_rebasing_round_trip():
    A = load_algebra("matrix-2x2")
    # the unit e11 + e22 becomes basis vector 0
    assert A.to_new([1, 0, 0, 1]) == {0: 1}
    x = [Fraction(1, 2), 3, -1, Fraction(5, 7)]
    assert A.to_old(A.to_new(x)) == x


@given(st.lists(rationals, min_size=4, max_size=4), st.lists(rationals, min_size=4, max_size=4))
@settings(max_examples=60, deadline=None)
def test_rebased_product_agrees_with_the_table(x, y):
    A = load_algebra("matrix-2x2")
    # 2 x 2 matrix product in the e_ij basis, written out by hand
    X = [[x[0], x[1]], [x[2], x[3]]]
    Y = [[y[0], y[1]], [y[2], y[3]]]
    Z = [[sum(X[i][k] * Y[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    expected = [Z[0][0], Z[0][1], Z[1][0], Z[1][1]]
    assert A.to_old(A.multiply(A.to_new(x), A.to_new(y))) == expected


def test_associativity_failure_names_the_triple():
    # a.a = b, b.b = a, 1 the unit: (a a) b = b b = a but a (a b) = a 0 = 0
    table = [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[0, 1, 0], [0, 0, 1], [0, 0, 0]],
        [[0, 0, 1], [0, 0, 0], [0, 1, 0]],
    ]
    with pytest.raises(AssociativityError) as info:
        algebra_from_structure_constants(table, [1, 0, 0], ["1", "a", "b"])
    assert "associativity fails" in str(info.value)
    assert len(info.value.triple) == 3


def test_unit_failure():
    with pytest.raises(UnitError):
        algebra_from_structure_constants([[[1, 0], [0, 0]], [[0, 0], [0, 1]]], [1, 0])


@pytest.mark.parametrize("table, unit", [
    ([], []),
    ([[[1.5]]], [1]),
    ([[[1, 0]]], [1]),
    ([[[1]]], [1, 0]),
])
def test_malformed_tables(table, unit):
    with pytest.raises(AlgebraError):
        algebra_from_structure_constants(table, unit)


def test_json_layout_and_string_rationals():
    # u.u = 2u, so the unit is u/2
    A = algebra_from_json({"name": "half", "basis": ["u"], "unit": ["1/2"],
                           "products": [[["2"]]]})
    assert A.to_new(["1/2"]) == {0: 1}
    assert A.to_new([1]) == {0: 2}
    with pytest.raises(AlgebraError, match="lacks"):
        algebra_from_json({"basis": ["u"]})
