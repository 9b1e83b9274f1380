from fractions import Fraction

from hypothesis import given, settings, strategies as st

from fibre_forge.nc.linalg import Echelon, coordinates, induced_rank, kernel, rank_of, span


def _fraction_rank(rows, ncols):
    """Plain Gauss elimination over Fractions."""
    m = [[Fraction(r.get(c, 0)) for c in range(ncols)] for r in rows]
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


entries = st.one_of(st.just(0), st.just(0), st.integers(-3, 3),
                    st.fractions(min_value=-2, max_value=2, max_denominator=5))


@st.composite
def sparse_vectors(draw, ncols=6, max_rows=8):
    rows = draw(st.lists(st.lists(entries, min_size=ncols, max_size=ncols), max_size=max_rows))
    return [{c: Fraction(v) for c, v in enumerate(r) if v} for r in rows]


@given(sparse_vectors())
@settings(max_examples=200, deadline=None)
def test_rank_matches_fraction_elimination(vecs):
    assert rank_of(vecs) == _fraction_rank(vecs, 6)


@given(sparse_vectors())
@settings(max_examples=150, deadline=None)
def test_kernel_vectors_are_annihilated(cols):
    ker = kernel(cols)
    assert len(ker) == len(cols) - rank_of(cols)
    for z in ker:
        total = {}
        for j, c in z.items():
            for k, v in cols[j].items():
                total[k] = total.get(k, 0) + c * v
        assert not any(total.values())
    assert rank_of([{j: c for j, c in z.items()} for z in ker]) == len(ker)


@given(sparse_vectors(), sparse_vectors(max_rows=4))
@settings(max_examples=150, deadline=None)
def test_induced_rank_is_rank_of_the_quotient(cols, base):
    ech = span(base)
    assert induced_rank(cols, ech) == rank_of(base + cols) - rank_of(base)


@given(sparse_vectors(max_rows=3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
@settings(max_examples=150, deadline=None)
def test_coordinates_recover_combinations(reps, coeffs):
    reps = [r for r in reps if r]
    if rank_of(reps) < len(reps):
        return
    target = {}
    for r, c in zip(reps, coeffs):
        for k, v in r.items():
            target[k] = target.get(k, 0) + c * v
    target = {k: v for k, v in target.items() if v}
    got = coordinates(target, Echelon(), reps)
    assert got == [Fraction(c) for c in coeffs[:len(reps)]]


def test_coordinates_outside_the_span():
    assert coordinates({0: 1}, Echelon(), [{1: 1}]) is None


def test_echelon_membership():
    e = span([{0: 2, 1: 1}, {1: Fraction(1, 3), 2: 1}])
    assert e.rank == 2
    assert e.contains({0: 2, 1: Fraction(4, 3), 2: 1})
    assert not e.contains({2: 1})
