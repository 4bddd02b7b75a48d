from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from lattice.cosets import summand_acts, target_summand
from lattice.fock import (
    FockMonomial,
    Params,
    ParamsError,
    State,
    charge_weight,
    charges_up_to,
    coset_lowest_weight,
    enumerate_basis,
    graded_piece,
    pairing,
    partitions,
    weight,
)
from models.vpp import graded_dims

PARTITION_COUNTS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]

coprime_params = st.tuples(st.integers(2, 5), st.integers(2, 5)).filter(
    lambda t: t[0] != t[1] and all(t[0] % d or t[1] % d for d in range(2, 6))
).map(lambda t: Params(*t))


@pytest.mark.parametrize("p, pprime", [(4, 2), (1, 2), (3, 3), (6, 9)])
def test_params_rejects_invalid(p, pprime):
    with pytest.raises(ParamsError):
        Params(p, pprime)


def test_charge_weights(P32):
    assert charge_weight(P32.alpha_over_pprime.k, P32) == 1
    assert charge_weight(P32.minus_alpha_over_p.k, P32) == 1
    assert charge_weight(P32.difference_charge.k, P32) == 0
    assert charge_weight(12, P32) == 5
    assert charge_weight(1, P32) == Fraction(-1, 24)


def test_pairing_of_screening_charges(P32):
    assert pairing(P32.alpha_over_pprime, P32.alpha_over_pprime, P32) == 3
    assert pairing(P32.alpha_over_pprime, P32.minus_alpha_over_p, P32) == -2
    assert pairing(P32.alpha, P32.alpha, P32) == P32.norm


def test_partitions_order():
    assert partitions(4) == ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))


@given(st.integers(0, 10))
def test_partition_counts(n):
    assert len(partitions(n)) == PARTITION_COUNTS[n]
    assert all(sum(parts) == n for parts in partitions(n))


def test_monomial_format_and_weight(P32):
    m = FockMonomial.of((1, 2, 1), 6)
    assert m.parts == (2, 1, 1)
    assert m.format() == "a(-2) a(-1)^2 e^{6}"
    assert weight(m, P32) == 5
    with pytest.raises(ValueError):
        FockMonomial.of((0,), 0)


def test_state_arithmetic(P32):
    a = State.monomial(FockMonomial.of((1, 1), 6), Fraction(2, 3))
    b = State.exponential(2) * -1
    assert (a + b - a) == b
    assert a - a == 0
    assert (a + b).format(P32) == "-e^{2} + 2/3 a(-1)^2 e^{6}"


def test_basis_order_up_to_weight_one(P32, V32):
    expected = [
        FockMonomial.of((), 0),
        FockMonomial.of((), 2),
        FockMonomial.of((), -4),
        FockMonomial.of((1,), 0),
        FockMonomial.of((1,), 2),
        FockMonomial.of((), 6),
    ]
    assert enumerate_basis(V32.classes, 1, P32) == expected


def test_vpp_dimensions(V32):
    assert graded_dims(V32, 1) == {Fraction(0): 2, Fraction(1): 4}


def test_module_classes(V32, MV32):
    assert V32.classes == (0, 8, 6, 2)
    assert MV32.classes == (6, 2, 0, 8)
    assert V32.summand_of(-4) == 1
    assert MV32.summand_of(12) == 2
    assert V32.summand_of(1) is None


def test_summand_rule():
    assert [j for j in range(4) if summand_acts(0, j)] == [0, 1, 2, 3]
    assert [j for j in range(4) if summand_acts(1, j)] == [0, 2]
    assert [j for j in range(4) if summand_acts(2, j)] == [0, 1]
    assert [j for j in range(4) if summand_acts(3, j)] == [0]
    assert target_summand(1, 2) == 3


@settings(max_examples=40, deadline=None)
@given(coprime_params, st.integers(0, 11), st.integers(0, 4))
def test_charges_up_to_matches_brute_force(P, coset, bound):
    coset %= P.norm
    brute = [k for k in range(-120, 121) if k % P.norm == coset and charge_weight(k, P) <= bound]
    assert charges_up_to(coset, Fraction(bound), P) == brute


@settings(max_examples=40, deadline=None)
@given(coprime_params, st.integers(0, 11))
def test_coset_lowest_weight_matches_brute_force(P, coset):
    coset %= P.norm
    brute = min(charge_weight(k, P) for k in range(-120, 121) if k % P.norm == coset)
    assert coset_lowest_weight(coset, P) == brute


@settings(max_examples=25, deadline=None)
@given(coprime_params, st.integers(0, 11), st.integers(0, 3))
def test_graded_piece_is_a_slice_of_the_basis(P, coset, bound):
    basis = enumerate_basis(coset, bound, P)
    keys = [m.sort_key(P) for m in basis]
    assert keys == sorted(keys)
    assert all(weight(m, P) <= bound for m in basis)
    for w in sorted({weight(m, P) for m in basis}):
        assert graded_piece(coset, w, P) == [m for m in basis if weight(m, P) == w]


@settings(max_examples=30, deadline=None)
@given(coprime_params, st.integers(0, 11), st.integers(0, 4))
def test_basis_is_closed_under_removing_parts(P, coset, bound):
    basis = set(enumerate_basis(coset, bound, P))
    for m in basis:
        for part in set(m.parts):
            assert m.without_part(part) in basis


@settings(max_examples=40, deadline=None)
@given(coprime_params, st.integers(-30, 30), st.lists(st.integers(1, 4), max_size=3), st.integers(1, 6))
def test_creation_raises_weight_by_mode(P, k, parts, n):
    m = FockMonomial.of(parts, k)
    assert weight(m.with_part(n), P) == weight(m, P) + n
