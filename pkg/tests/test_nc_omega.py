import pytest
from hypothesis import given, settings, strategies as st

from fibre_forge.nc.algebra import CATALOG, load_algebra
from fibre_forge.nc.linalg import span
from fibre_forge.nc.omega import (SizeCapError, commutator_d_stable, dbar_matrix, forms_of,
                                  nc_homology, omega_space, reduced_complex)

# exact values produced by the package, cross-checked against the classical
# results where they exist (Q and M_2(Q) are Morita equivalent)
FROZEN = {
    "rationals": {"quotient": [1, 0, 0, 0, 0], "hbar": [1, 0, 0, 0, 0], "reduced0": 0},
    "rationals-squared": {"quotient": [2, 0, 1, 0, 1], "hbar": [2, 0, 1, 0, 1], "reduced0": 1},
    "dual-numbers": {"quotient": [2, 1, 1, 1, 1], "hbar": [1, 0, 0, 0, 0], "reduced0": 0},
    "matrix-2x2": {"quotient": [1, 3, 3, 11, 21], "hbar": [1, 0, 0, 0, 0], "reduced0": 0},
    "upper-triangular": {"quotient": [2, 1, 2, 3, 5], "hbar": [2, 0, 1, 0, 1], "reduced0": 1},
}


def _add(x, y, c=1):
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v}


@pytest.mark.parametrize("name", CATALOG)
def test_dimension_formula(name):
    A = load_algebra(name)
    eng = forms_of(A)
    for n in range(6):
        assert len(eng.basis(n)) == A.dim * (A.dim - 1) ** n


@pytest.mark.parametrize("name", CATALOG)
def test_d_squared_vanishes(name):
    eng = forms_of(load_algebra(name))
    for n in range(5):
        for t in eng.basis(n):
            assert eng.d(eng.d({t: 1})) == {}


@pytest.mark.parametrize("name", ["dual-numbers", "upper-triangular", "matrix-2x2"])
def test_leibniz_on_basis_pairs(name):
    eng = forms_of(load_algebra(name))
    for p in range(4):
        for q in range(4 - p):
            for s in eng.basis(p):
                for t in eng.basis(q):
                    lhs = eng.d(eng.multiply({s: 1}, {t: 1}))
                    rhs = _add(eng.multiply(eng.d({s: 1}), {t: 1}),
                               eng.multiply({s: 1}, eng.d({t: 1})), -1 if p % 2 else 1)
                    assert lhs == rhs


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_product_is_associative(data):
    eng = forms_of(load_algebra("upper-triangular"))
    forms = []
    for _ in range(3):
        n = data.draw(st.integers(0, 2))
        basis = eng.basis(n)
        forms.append({basis[data.draw(st.integers(0, len(basis) - 1))]: 1})
    x, y, z = forms
    assert eng.multiply(eng.multiply(x, y), z) == eng.multiply(x, eng.multiply(y, z))


def test_da_is_one_tensor_a_minus_a_tensor_one():
    # in A (x) Abar the element a0 da1 is the tuple (a0, a1); d(a) = 1.da
    eng = forms_of(load_algebra("matrix-2x2"))
    assert eng.d({(2,): 1}) == {(0, 2): 1}
    assert eng.d({(0,): 1}) == {}


def test_omega_space_multiplication_maps():
    A = load_algebra("dual-numbers")
    sp = omega_space(A, 2)
    assert sp.dim == 2
    eps = 1
    # basis (1, eps, eps) = d eps d eps and (eps, eps, eps) = eps d eps d eps
    assert sp.left[eps][0] == {1: 1}
    assert sp.right[0][0] == {0: 1}
    assert sp.product((0, 1), (0, 1)) == {(0, 1, 1): 1}


@pytest.mark.parametrize("name", CATALOG)
def test_commutator_subspace_is_d_stable(name):
    A = load_algebra(name)
    for n in range(4):
        assert commutator_d_stable(A, n)


@pytest.mark.parametrize("name", ["dual-numbers", "upper-triangular", "matrix-2x2"])
def test_generator_commutators_span_all_commutators(name):
    eng = forms_of(load_algebra(name))
    for n in range(3):
        small = eng.commutator_span(n)
        full = span(eng.full_commutator_generators(n))
        assert small.rank == full.rank
        for v in eng.full_commutator_generators(n):
            assert small.contains(v)


@pytest.mark.parametrize("name", CATALOG)
def test_dbar_squared_vanishes(name):
    A = load_algebra(name)
    for n in range(3):
        first, second = dbar_matrix(A, n), dbar_matrix(A, n + 1)
        for col in first:
            image = {}
            for k, v in col.items():
                for r, w in second[k].items():
                    image[r] = image.get(r, 0) + v * w
            assert not any(image.values())


@pytest.mark.parametrize("name", CATALOG)
def test_frozen_quotient_and_homology_dims(name):
    A = load_algebra(name)
    hom = nc_homology(A, 4)
    assert hom.quotient_dims == FROZEN[name]["quotient"]
    assert [s.dim for s in reduced_complex(A, 4)] == FROZEN[name]["quotient"]
    assert hom.dims == FROZEN[name]["hbar"]
    assert hom.reduced_dim0 == FROZEN[name]["reduced0"]
    assert hom.unit_class_nonzero
    for n, reps in hom.representatives.items():
        assert len(reps) == hom.dims[n]


def test_size_cap(monkeypatch):
    monkeypatch.setenv("FIBRE_FORGE_SIZE_CAP", "50")
    A = load_algebra("matrix-2x2")
    with pytest.raises(SizeCapError, match="size cap 50"):
        nc_homology(A, 3)
    monkeypatch.delenv("FIBRE_FORGE_SIZE_CAP")
    assert nc_homology(A, 1).dims == [1, 0]
