import pytest

from engine.modes import DomainError, conformal_vector
from lattice.fock import FockMonomial, Params, State
from models.intertwiner import doublet_witness, intertwiner_eval
from models.kernels import (
    coset_of,
    doublet_lowest_weight,
    graded_kernel,
    kernel_dims,
    lowest_kernel_vector,
)
from models.logarithmic import (
    coincidence_check,
    find_subsingular,
    nilpotent_matrix,
    rank3_certificate,
    subsingular_weight,
)
from models.vpp import graded_dims, summand_labels, vpp_vertex_mode


def a1(charge=0):
    return State.monomial(FockMonomial.of((1,), charge))


def test_vertex_action_respects_summands(P32):
    # -a/p acting on -a/p would leave the four cosets
    assert vpp_vertex_mode(State.exponential(-4), -1, State.exponential(-4), P32) == 0
    assert vpp_vertex_mode(State.exponential(-4), -1, State.exponential(6), P32)
    assert vpp_vertex_mode(State.vacuum(), -1, State.exponential(6), P32) == State.exponential(6)


def test_vertex_action_rejects_foreign_states(P32):
    with pytest.raises(DomainError):
        vpp_vertex_mode(State.exponential(1), 0, State.vacuum(), P32)


def test_graded_dims_and_summands(V32):
    assert graded_dims(V32, 1) == {0: 2, 1: 4}
    assert summand_labels(V32, State.exponential(-4) + State.exponential(2)) == [1, 3]


def test_rank3_on_vpp_low_weights(V32):
    cert = rank3_certificate(V32, 1)
    assert cert.chain_at(0) == 2
    assert cert.chain_at(1) == 3
    assert cert.overall == 3
    assert cert.witness.weight == 1
    chain = cert.witness.chain
    assert len(chain) == 3 and all(chain)


def test_nilpotent_matrix_on_the_vacuum_piece(V32):
    # 1 -> e^G -> 0
    assert nilpotent_matrix(V32, 0).rows == ((0, 0), (1, 0))


def test_subsingular_vector(P32):
    record = find_subsingular(P32)
    assert record.weight == subsingular_weight(P32) == 5
    assert record.vector == State.monomial(FockMonomial.of((4,), 6))
    assert record.scale == -2 * P32.p
    assert record.q_image == State.exponential(12) * -6
    assert record.source_dim == 5
    assert record.solution_dim == record.oracle_kernel_dim == 4
    assert record.double_screening
    assert record.n_squared
    assert record.n_squared_matches
    assert record.n_squared == record.double_screening


@pytest.mark.parametrize("p, pprime", [(3, 2), (5, 2)])
def test_n_squared_is_twice_the_double_screening(p, pprime):
    P = Params(p, pprime)
    record = find_subsingular(P)
    assert record.weight == subsingular_weight(P)
    assert record.q_image == State.monomial(record.target, record.scale)
    assert record.n_squared_matches
    assert record.n_squared


def test_kernel_dims_agree_with_oracle(P32):
    rows = kernel_dims(coset_of("VL", P32), 3, P32)
    assert all(r.bases_agree for r in rows)
    dims = {r.weight: r.dim for r in rows}
    assert dims[0] == 1
    assert dims[1] == 0
    assert dims[2] >= 1


def test_conformal_vector_in_kernel(P32):
    piece = graded_kernel(0, 2, P32)
    omega = conformal_vector(P32)
    span = {m for s in piece.basis for m in s.terms}
    assert set(omega.terms) <= span


def test_coset_selectors(P32):
    assert coset_of("VL", P32) == 0
    assert coset_of("M", P32) == 6
    assert coset_of("14", P32) == 2


@pytest.mark.slow
def test_doublet_lowest_weight(P32):
    h = doublet_lowest_weight(P32)
    assert h == 7
    rows = kernel_dims(coset_of("M", P32), h, P32)
    assert all(r.dim == 0 for r in rows if r.weight < h)
    assert [r.dim for r in rows if r.weight == h][0] >= 1


@pytest.mark.slow
def test_intertwiner_creates_the_doublet_vector(P32):
    w, v = lowest_kernel_vector(coset_of("M", P32), P32, 7)
    assert w == 7
    out = intertwiner_eval(v, -1, State.vacuum(), P32)
    assert out.cosets(P32)[6] == v
    witnesses = doublet_witness(P32, 7, [State.vacuum(), a1()])
    assert witnesses


def test_intertwiner_rejects_vectors_outside_the_kernel(P32):
    with pytest.raises(DomainError):
        intertwiner_eval(State.exponential(6), -1, State.vacuum(), P32)
    with pytest.raises(DomainError):
        intertwiner_eval(State.vacuum(), -1, State.vacuum(), P32)


@pytest.mark.slow
def test_mv_reaches_rank3_at_subsingular_weight(MV32):
    cert = rank3_certificate(MV32, 5)
    assert cert.overall == 3
    assert cert.witness.weight == 5


@pytest.mark.slow
def test_coincidence_distinguishes_witness_weights():
    record = coincidence_check(Params(3, 2), 5)
    assert record.applies and record.bases_agree
    assert record.witness_weights == (1, 5)
    assert record.distinguished


def test_coincidence_does_not_apply_for_p_prime_three():
    record = coincidence_check(Params(4, 3), 0)
    assert not record.applies
