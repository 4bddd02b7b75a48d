from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from engine.deform import delta_apply
from engine.modes import (
    DomainError,
    binomial,
    central_charge,
    central_charge_from_modes,
    conformal_vector,
    exp_mode,
    field_mode,
    heisenberg_act,
    screening_Q,
    screening_Qtilde,
    virasoro_mode,
)
from lattice.fock import FockMonomial, Params, State, enumerate_basis, weight


def a1(charge=0, coeff=1):
    return State.monomial(FockMonomial.of((1,), charge), coeff)


@pytest.mark.parametrize("p, pprime, c", [(3, 2, 0), (5, 2, Fraction(-22, 5)), (5, 3, Fraction(-3, 5))])
def test_central_charges(p, pprime, c):
    P = Params(p, pprime)
    assert central_charge(P) == c
    assert central_charge_from_modes(P) == c


def test_binomial_negative_upper():
    assert binomial(-1, 3) == -1
    assert binomial(-2, 2) == 3
    assert binomial(4, 2) == 6
    assert binomial(3, -1) == 0


def test_heisenberg_modes(P32):
    assert heisenberg_act(1, a1(), P32) == State.vacuum() * P32.norm
    assert heisenberg_act(0, State.exponential(6), P32) == State.exponential(6) * 6
    assert heisenberg_act(-2, State.vacuum(), P32) == State.monomial(FockMonomial.of((2,), 0))


def test_screenings_on_weight_one(P32):
    assert screening_Q(a1(), P32) == State.exponential(6) * -6
    assert screening_Qtilde(a1(), P32) == State.exponential(-4) * 4
    assert screening_Q(State.exponential(-4), P32) == a1(2, Fraction(1, 2))
    assert screening_Qtilde(State.exponential(6), P32) == a1(2, Fraction(-1, 3))


def test_screenings_kill_omega(P32):
    omega = conformal_vector(P32)
    assert screening_Q(omega, P32) == 0
    assert screening_Qtilde(omega, P32) == 0


def test_exp_mode_translation(P32):
    # e^{-a/p}_1 ω = e^{-a/p}: the translation x_i -> x_i + 4 z^{-i} on α(-1)² and α(-2)
    assert exp_mode(P32.minus_alpha_over_p, 1, conformal_vector(P32), P32) == State.exponential(-4)


def test_fractional_index_gives_zero(P32):
    assert exp_mode(6, Fraction(1, 2), State.vacuum(), P32) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 40))
def test_l0_is_the_weight(index):
    P = Params(3, 2)
    basis = enumerate_basis((0, 2, 6, 8), 3, P)
    m = basis[index % len(basis)]
    assert virasoro_mode(0, State.monomial(m), P) == State.monomial(m) * weight(m, P)


@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2])
def test_omega_modes_are_virasoro_modes(P32, n):
    omega = conformal_vector(P32)
    for s in (State.vacuum(), a1(), State.exponential(-4), a1(2) + State.exponential(6)):
        assert field_mode(omega, n + 1, s, P32) == virasoro_mode(n, s, P32)


def test_virasoro_lowers_by_mode(P32):
    s = State.monomial(FockMonomial.of((2, 1), 6))
    out = virasoro_mode(1, s, P32)
    assert out.weights(P32) == [weight(FockMonomial.of((2, 1), 6), P32) - 1]


def test_delta_of_omega(P32):
    series = delta_apply(conformal_vector(P32), P32)
    assert series.exponents() == [0, -1]
    assert series.coefficient(0) == conformal_vector(P32)
    assert series.coefficient(-1) == State.exponential(-4)


def test_delta_needs_screening_kernel(P32):
    with pytest.raises(DomainError):
        delta_apply(a1(), P32)


V_COSETS = (0, 2, 6, 8)
LADDER_CHARGES = (6, -4, 2, -6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 60), st.sampled_from(LADDER_CHARGES), st.integers(-3, 3), st.integers(-3, 3))
def test_heisenberg_exponential_ladder(index, gamma, m, n):
    # [α(m), e^γ_n] = ⟨α,γ⟩ e^γ_{m+n}; ⟨α,γ⟩ is the charge k of γ
    P = Params(3, 2)
    basis = enumerate_basis(V_COSETS, 2, P)
    s = State.monomial(basis[index % len(basis)])
    bracket = heisenberg_act(m, exp_mode(gamma, n, s, P), P) - exp_mode(gamma, n, heisenberg_act(m, s, P), P)
    assert bracket == exp_mode(gamma, m + n, s, P) * gamma


TRANSLATED = (
    State.monomial(FockMonomial.of((1,), 0)),
    State.exponential(6),
    State.exponential(-4),
    State.monomial(FockMonomial.of((2,), 2)),
)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 60), st.sampled_from(TRANSLATED), st.integers(-2, 3))
def test_translation_covariance(index, u, n):
    # Y(L(-1)u, z) = ∂Y(u, z): (L(-1)u)_n = -n·u_{n-1}
    P = Params(3, 2)
    basis = enumerate_basis(V_COSETS, 2, P)
    s = State.monomial(basis[index % len(basis)])
    assert field_mode(virasoro_mode(-1, u, P), n, s, P) == field_mode(u, n - 1, s, P) * (-n)
