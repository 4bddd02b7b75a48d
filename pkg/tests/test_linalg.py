import threading
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from engine.operators import MatrixCache, PieceKey
from lattice.fock import Params
from linalg.matrix import DimensionMismatch, NoSolution, RationalMatrix, kernel, rank, rref, solve
from linalg.nilpotency import NotNilpotent, nilpotency_rank


@st.composite
def small_matrices(draw, max_rows=5, max_cols=6):
    nrows = draw(st.integers(1, max_rows))
    ncols = draw(st.integers(1, max_cols))
    entries = st.fractions(min_value=-4, max_value=4, max_denominator=3)
    rows = draw(st.lists(st.lists(entries, min_size=ncols, max_size=ncols), min_size=nrows, max_size=nrows))
    return RationalMatrix(rows, ncols)


def jordan_block(n):
    return RationalMatrix([[Fraction(int(j == i + 1)) for j in range(n)] for i in range(n)], n)


def test_kernel_of_rank_one_row():
    M = RationalMatrix([[1, 2, 3]])
    assert rank(M) == 1
    assert kernel(M) == [
        (Fraction(-2), Fraction(1), Fraction(0)),
        (Fraction(-3), Fraction(0), Fraction(1)),
    ]


def test_solve_sets_free_variables_to_zero():
    M = RationalMatrix([[-6, 36, 0]])
    solution = solve(M, [1])
    assert solution.particular == (Fraction(-1, 6), Fraction(0), Fraction(0))
    assert len(solution.kernel) == 2


def test_solve_without_solution():
    M = RationalMatrix([[1, 1], [2, 2]])
    with pytest.raises(NoSolution):
        solve(M, [1, 3])


def test_ragged_rows_rejected():
    with pytest.raises(DimensionMismatch):
        RationalMatrix([[1, 2], [3]])
    with pytest.raises(DimensionMismatch):
        RationalMatrix([])


@settings(max_examples=60, deadline=None)
@given(small_matrices())
def test_strategies_agree_exactly(M):
    bareiss = kernel(M, "bareiss")
    assert bareiss == kernel(M, "gauss")
    assert bareiss == kernel(M, "auto")
    assert rref(M, "bareiss") == rref(M, "gauss")


@settings(max_examples=60, deadline=None)
@given(small_matrices())
def test_kernel_vectors_are_annihilated(M):
    basis = kernel(M)
    assert rank(M) + len(basis) == M.ncols
    for v in basis:
        assert all(x == 0 for x in M.apply(v))


@settings(max_examples=40, deadline=None)
@given(small_matrices(), st.data())
def test_solve_reproduces_right_hand_side(M, data):
    x = data.draw(st.lists(st.integers(-3, 3), min_size=M.ncols, max_size=M.ncols))
    b = M.apply(x)
    solution = solve(M, b)
    assert tuple(M.apply(solution.particular)) == tuple(b)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_jordan_block_rank(n):
    report = nilpotency_rank(jordan_block(n))
    assert report.max_chain == n
    # e_n is the only basis vector that survives n-1 applications
    assert report.witness_index == n - 1


def test_zero_matrix_has_rank_one():
    assert nilpotency_rank(RationalMatrix.zeros(3, 3)).max_chain == 1
    assert nilpotency_rank(RationalMatrix([], 0)).max_chain == 0


def test_identity_is_not_nilpotent():
    with pytest.raises(NotNilpotent):
        nilpotency_rank(RationalMatrix.identity(2))


@settings(max_examples=40, deadline=None)
@given(small_matrices())
def test_rank_matches_the_domain_matrix(M):
    assert rank(M, "gauss") == M.to_domain().rank()
    assert RationalMatrix.from_domain(M.to_domain()) == M


def elementary(n, i, j, c):
    return RationalMatrix([[Fraction(int(r == s)) + (c if (r, s) == (i, j) else 0) for s in range(n)] for r in range(n)], n)


@st.composite
def nilpotent_and_unimodular(draw, max_dim=5):
    n = draw(st.integers(1, max_dim))
    entries = st.integers(-3, 3)
    N = RationalMatrix([[draw(entries) if j > i else 0 for j in range(n)] for i in range(n)], n)
    U, U_inv = RationalMatrix.identity(n), RationalMatrix.identity(n)
    if n > 1:
        for _ in range(draw(st.integers(1, 6))):
            i, j = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
            c = draw(st.integers(-3, 3))
            U = U @ elementary(n, i, j, c)
            U_inv = elementary(n, i, j, -c) @ U_inv
    return N, U, U_inv


@settings(max_examples=50, deadline=None)
@given(nilpotent_and_unimodular())
def test_nilpotency_rank_survives_unimodular_conjugation(case):
    N, U, U_inv = case
    assert U @ U_inv == RationalMatrix.identity(N.ncols)
    conjugated = U @ N @ U_inv
    assert nilpotency_rank(conjugated).max_chain == nilpotency_rank(N).max_chain


def test_matrix_cache_readers_are_not_blocked_by_a_writer():
    P = Params(3, 2)
    warm, cold = PieceKey(P, "Q", "V", Fraction(0)), PieceKey(P, "Q", "V", Fraction(1))
    stored, computed = jordan_block(2), jordan_block(3)
    cache = MatrixCache()
    cache.get_or_compute(warm, lambda: stored)
    started, release = threading.Event(), threading.Event()

    def slow():
        started.set()
        assert release.wait(10)
        return computed

    def unexpected():
        raise AssertionError("cached piece recomputed")

    writer = threading.Thread(target=lambda: cache.get_or_compute(cold, slow))
    writer.start()
    assert started.wait(10)
    with ThreadPoolExecutor(max_workers=8) as pool:
        seen = list(pool.map(lambda _: cache.get_or_compute(warm, unexpected), range(40)))
    release.set()
    writer.join(10)
    assert not writer.is_alive()
    assert all(m == stored for m in seen)
    assert cache.get_or_compute(cold, unexpected) == computed
    assert cache.hits == 41
    assert cache.misses == 2
