import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

import fields.field
from engine.modes import DomainError, binomial, conformal_vector
from fields.field import (
    WindowExceeded,
    compare_fields,
    derivative,
    field_vanishes,
    identity_field,
    intertwiner_field,
    locality_order,
    nth_product,
    residue_product,
    vertex_field,
)
from fields.identities import (
    com_field,
    deformation_check,
    h_identities,
    homomorphism_check,
    pom_identities,
    residue_cross_check,
    screening_commutator_check,
    singular_generators,
    structure_identities,
    virasoro_deformation_hypotheses,
)
from fields.named import build_named_fields, nu
from lattice.fock import FockMonomial, State, weight


@pytest.fixture(scope="module")
def named2(P32, window2):
    return build_named_fields(P32, window2)


def test_nu(P32):
    assert nu(P32) == 3


def test_vacuum_field_is_identity(window2):
    assert compare_fields(vertex_field("Y(1)", State.vacuum(), window2), identity_field(window2), window2) is None


def test_derivative_of_identity_vanishes(window2):
    assert field_vanishes(derivative(identity_field(window2)), window2) is None


def test_ltilde_is_virasoro_plus_shifted_minus_current(named2, window2):
    assert compare_fields(named2.ltilde, named2.ltilde_direct, window2) is None


def test_zeroth_product_of_virasoro_is_translation(named2, window2):
    L = named2.virasoro
    assert compare_fields(nth_product(L, 0, L, window2), derivative(L), window2) is None


def test_identity_is_local_with_everything(named2, window2):
    assert locality_order(identity_field(window2), named2.virasoro, 4, window2) == 0


def test_evaluate_refuses_to_leave_window(named2, window2):
    vec = window2.unit(0, FockMonomial.of((2,), 0))
    with pytest.raises(WindowExceeded):
        named2.virasoro.evaluate(-3, vec, window2)


def test_intertwiner_field_needs_both_sectors(window2):
    with pytest.raises(DomainError):
        intertwiner_field("Y~", State.exponential(6), window2)


def test_vertex_field_rejects_inhomogeneous_states(window2, P32):
    with pytest.raises(DomainError):
        vertex_field("bad", conformal_vector(P32) + State.vacuum(), window2)


@pytest.mark.slow
def test_screening_current_identities(named2):
    checks = pom_identities(named2)
    assert checks
    assert all(c.status == "pass" for c in checks), [(c.name, c.witness) for c in checks if c.status != "pass"]


@pytest.mark.slow
def test_h_identities(named2):
    checks = h_identities(named2)
    assert all(c.status == "pass" for c in checks), [(c.name, c.witness) for c in checks if c.status != "pass"]


def _failures(checks):
    return [(c.name, c.witness) for c in checks if c.status != "pass"]


RESIDUE_FIELDS = ("screening_current", "htilde", "ltilde")


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(RESIDUE_FIELDS), st.sampled_from(RESIDUE_FIELDS), st.integers(-1, 2), st.integers(0, 40))
def test_residue_expansion_matches_nth_product(named2, window2, a_name, b_name, n, index):
    a, b = getattr(named2, a_name), getattr(named2, b_name)
    product = nth_product(a, n, b, window2)
    sector, u = window2.basis[index % len(window2.basis)]
    vec = window2.unit(sector, u)
    for m in window2.output_modes(weight(u, window2.params), product.weight):
        assert residue_product(a, n, b, m, vec, window2) == product.apply(m, vec)


@pytest.mark.slow
def test_residue_cross_check_on_random_vectors(P32, window3):
    check = residue_cross_check(build_named_fields(P32, window3))
    assert check.status == "pass", check.witness
    assert int(check.witness["vectors"]) >= 20
    assert check.witness["pairs"] == "9"


def test_residue_cross_check_catches_a_wrong_product_formula(named2, monkeypatch):
    # C(n, 1) off by one only inside the n-th product
    monkeypatch.setattr(fields.field, "binomial", lambda x, k: binomial(x, k) + (k == 1))
    check = residue_cross_check(named2, modes=(1,))
    assert check.status == "fail"
    assert check.witness["n"] == "1"


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(("screening_current", "virasoro", "htilde")), st.sampled_from(("ltilde", "h")),
       st.integers(-1, 2))
def test_derivative_is_a_derivation_of_nth_products(named2, window2, a_name, b_name, n):
    a, b = getattr(named2, a_name), getattr(named2, b_name)
    lhs = derivative(nth_product(a, n, b, window2))
    rhs = nth_product(derivative(a), n, b, window2) + nth_product(a, n, derivative(b), window2)
    assert compare_fields(lhs, rhs, window2) is None


@pytest.mark.slow
def test_com_field_derived_form(named2):
    check = com_field(named2)
    assert check.status == "pass", check.witness
    assert check.witness["literal_form_fails_at"]


@pytest.mark.slow
def test_structure_and_singular_generators(named2):
    checks = structure_identities(named2) + [singular_generators(named2)]
    assert len(checks) == 4
    assert not _failures(checks)


@pytest.mark.slow
def test_virasoro_deformation_and_deformation_of_ltilde(named2):
    checks = virasoro_deformation_hypotheses(named2) + [deformation_check(named2)]
    assert not _failures(checks)


@pytest.mark.slow
def test_homomorphism_and_screening_commutator(P32, named2):
    omega = conformal_vector(P32)
    checks = homomorphism_check(named2, omega, omega, range(0, 4))
    checks += screening_commutator_check(named2, [("omega", omega)])
    assert len(checks) == 5
    assert not _failures(checks)
