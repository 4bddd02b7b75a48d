from fractions import Fraction

import pytest

from engine.deform import deformation_part, lbar_mode, lbar_operator, nilpotent_part
from engine.modes import DomainError, central_charge
from engine.operators import GradedOperator, operator_matrix
from lattice.fock import FockMonomial, State
from reports.suites import bracket_failure


def a1(charge=0):
    return State.monomial(FockMonomial.of((1,), charge))


def test_nilpotent_part_on_a1(P32, V32):
    first = deformation_part(0, a1(), V32)
    assert first == State.exponential(-4) * 4 - State.exponential(6) * 6 + a1(2) * Fraction(2, 3)
    second = deformation_part(0, first, V32)
    assert second == a1(2) * 4
    assert deformation_part(0, second, V32) == 0


def test_vacuum_chain(V32):
    assert deformation_part(0, State.vacuum(), V32) == State.exponential(2)
    assert deformation_part(0, State.exponential(2), V32) == 0


def test_selection_blocks_same_summand(V32):
    # only the e^{a/p′} term acts on the -a/p summand
    assert deformation_part(0, State.exponential(-4), V32) == a1(2) * Fraction(1, 2)


def test_lbar_zero_on_a1(P32, V32):
    out = lbar_mode(0, a1(), V32)
    expected = 1 - Fraction(2 * (P32.p - P32.pprime) ** 2, P32.p * P32.pprime)
    assert out.coefficient(FockMonomial.of((1,), 2)) == expected == Fraction(2, 3)
    assert out.coefficient(FockMonomial.of((1,), 0)) == 1


def test_deformation_rejects_foreign_charges(V32):
    with pytest.raises(DomainError):
        deformation_part(0, State.exponential(1), V32)


def test_nilpotent_part_matrix_at_weight_zero(V32):
    basis = V32.graded_piece(0)
    M = nilpotent_part(V32).matrix(basis, basis)
    assert M.rows == ((0, 0), (1, 0))


def test_operator_matrix_requires_exact_target(V32):
    basis = V32.graded_piece(1)
    with pytest.raises(DomainError):
        operator_matrix(lbar_operator(0, V32), basis, basis[:2])


def test_graded_operator_composition(V32):
    N = nilpotent_part(V32)
    square = N.then(N)
    assert isinstance(square, GradedOperator)
    assert square(a1()) == a1(2) * 4


@pytest.mark.slow
@pytest.mark.parametrize("which", ["V", "MV"])
def test_lbar_virasoro_bracket(which, V32, MV32, P32):
    module = V32 if which == "V" else MV32
    c = central_charge(P32)
    for w in module.weights_up_to(2):
        basis = module.graded_piece(w)
        assert bracket_failure(lambda n, s: lbar_mode(n, s, module), basis, c, P32, bound=2) is None
