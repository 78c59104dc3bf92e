from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from diffmor.exactlin import (
    ContainmentError,
    IncrementalSpan,
    InputError,
    Matrix,
    Subspace,
    as_scalar,
    block,
    kernel_basis,
    kron,
    quotient_dim,
    rank,
    rank_mod_p,
    rank_rational,
    random_primes,
    solve,
)

import oracles

small = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def matrices(draw, max_dim=7, density=0.5):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    rows = [[draw(small) if draw(st.floats(0, 1)) < density else Fraction(0) for _ in range(c)] for _ in range(r)]
    return Matrix.from_dense(rows, c)


def test_scalar_parsing():
    assert as_scalar("3/6") == Fraction(1, 2)
    assert as_scalar(-4) == -4
    with pytest.raises(InputError):
        as_scalar("x")
    with pytest.raises(InputError):
        as_scalar(0.5)


def test_trivial_ranks():
    assert rank(Matrix.zeros(3, 3)) == 0
    assert rank(Matrix.identity(4)) == 4
    assert kernel_basis(Matrix.identity(5)).dim == 0
    z = kernel_basis(Matrix.zeros(4, 4))
    assert z.dim == 4


def test_matrix_canonical_form():
    m = Matrix.from_coo((2, 2), [0, 0, 1], [1, 1, 0], [Fraction(1, 2), Fraction(1, 2), 0])
    assert m.nnz == 1 and m[0, 1] == 1 and m[1, 0] == 0
    assert m == Matrix.from_dense([[0, 1], [0, 0]])


def test_kron_and_block():
    a = Matrix.from_dense([[1, 2], [3, 4]])
    b = Matrix.from_dense([[0, 1], [1, 0]])
    k = kron(a, b).to_dense()
    assert k[0] == [0, 1, 0, 2] and k[3] == [3, 0, 4, 0]
    assert block([[a, None], [None, b]]).to_dense()[2] == [0, 0, 0, 1]


def test_large_entries_fall_back_to_python_product():
    big = 1 << 70
    a = Matrix.from_dense([[big, 1], [0, big]])
    assert (a @ a).to_dense() == [[big * big, 2 * big], [0, big * big]]


def test_solve_examples():
    assert solve(Matrix.identity(3), [1, 2, 3]) == [1, 2, 3]
    assert solve(Matrix.zeros(2, 2), [1, 0]) is None
    with pytest.raises(InputError):
        solve(Matrix.identity(2), [1, 2, 3])


def test_quotient_dim():
    amb = Subspace.span([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 3)
    sub = Subspace.span([[1, 1, 0]], 3)
    assert quotient_dim(amb, sub) == 2
    assert quotient_dim(sub, sub) == 0
    with pytest.raises(ContainmentError):
        quotient_dim(sub, Subspace.span([[1, 0, 0]], 3))


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_agrees_across_methods(m):
    r = rank_rational(m)
    assert rank(m) == r == rank(m.T)
    assert r == oracles.dense_rank(m.to_dense())
    for p in random_primes(2, seed=11):
        assert rank_mod_p(m, p) <= r


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_kernel_vectors_annihilate(m):
    ker = kernel_basis(m)
    assert ker.dim == m.shape[1] - rank(m)
    for v in ker.basis:
        assert not any(m @ v)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solve_consistent_systems(m, data):
    x = [data.draw(small) for _ in range(m.shape[1])]
    b = m @ x
    sol = solve(m, b)
    assert sol is not None and m @ sol == b


@settings(max_examples=40, deadline=None)
@given(matrices(max_dim=4), st.data())
def test_quotient_containment_iff(m1, data):
    n = m1.shape[0]
    assume(n > 0)
    cols = data.draw(st.integers(0, 3))
    m2 = Matrix.from_dense([[data.draw(small) for _ in range(cols)] for _ in range(n)], cols)
    num = Subspace.span([list(c) for c in zip(*m1.to_dense())], n) if m1.shape[1] else Subspace(n, ())
    den = Subspace.span([list(c) for c in zip(*m2.to_dense())], n) if m2.shape[1] else Subspace(n, ())
    contained = all(num.contains(v) for v in den.basis)
    if contained:
        assert quotient_dim(num, den) == num.dim - den.dim
    else:
        with pytest.raises(ContainmentError):
            quotient_dim(num, den)


def test_incremental_span():
    s = IncrementalSpan(3)
    assert s.add([1, 1, 0]) and s.add([0, 1, 1])
    assert not s.add([1, 2, 1])
    assert s.dim == 2


def test_large_sparse_rank_matches_rational():
    import random

    rng = random.Random(4)
    entries = {}
    for _ in range(1500):
        entries[(rng.randrange(300), rng.randrange(200))] = rng.randint(-3, 3)
    m = Matrix.from_entries((300, 200), entries)
    assert rank(m, method="modular") == rank_rational(m)
