"""Graded pieces of Ker Q ∩ Ker Q̃ in the lattice modules V_L and V_{L+α/2}."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from engine.modes import DomainError, screening_Q, screening_Qtilde, virasoro_mode
from engine.operators import GradedOperator, PieceKey, cached_matrix
from lattice.fock import FockMonomial, Params, State, enumerate_basis, graded_piece, weight
from linalg.matrix import RationalMatrix, kernel

logger = logging.getLogger(__name__)

COSET_LABELS = {"VL": "V_L", "M": "V_{L+a/2}"}


def coset_of(label: str, P: Params) -> int:
    """Resolve the coset selectors used on the command line (VL, M) or a bare integer."""
    if label == "VL":
        return 0
    if label == "M":
        return P.half_alpha.k % P.norm
    return int(label) % P.norm


def q_operator(P: Params) -> GradedOperator:
    return GradedOperator("Q", Fraction(0), lambda s: screening_Q(s, P))


def qtilde_operator(P: Params) -> GradedOperator:
    return GradedOperator("Qtilde", Fraction(0), lambda s: screening_Qtilde(s, P))


def virasoro_operator(n: int, P: Params) -> GradedOperator:
    return GradedOperator(f"L({n})", Fraction(-n), lambda s: virasoro_mode(n, s, P))


def _piece_matrix(op: GradedOperator, coset: int, w: Fraction, target_coset: int, P: Params,
                  source: Sequence[FockMonomial]) -> RationalMatrix:
    target_weight = w + op.shift
    target = graded_piece(target_coset, target_weight, P)
    key = PieceKey(P, op.name, f"coset {coset}", w)
    return cached_matrix(op, key, source, target)


def constraint_matrix(coset: int, w, P: Params, with_virasoro: bool = False) -> RationalMatrix:
    """[Q; Q̃] (optionally also L(1), L(2)) on the weight-w piece of the coset."""
    w = Fraction(w)
    source = graded_piece(coset, w, P)
    M = _piece_matrix(q_operator(P), coset, w, (coset + P.alpha_over_pprime.k) % P.norm, P, source)
    M = M.stack(_piece_matrix(qtilde_operator(P), coset, w, (coset + P.minus_alpha_over_p.k) % P.norm, P, source))
    if with_virasoro:
        for n in (1, 2):
            M = M.stack(_piece_matrix(virasoro_operator(n, P), coset, w, coset, P, source))
    return M


@dataclass(frozen=True)
class KernelPiece:
    coset: int
    weight: Fraction
    source_dim: int
    basis: Tuple[State, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass
class KernelModule:
    """Graded basis of Ker Q ∩ Ker Q̃ on one coset, weight by weight."""

    coset: int
    pieces: Dict[Fraction, KernelPiece] = field(default_factory=dict)

    def dims(self) -> Dict[Fraction, int]:
        return {w: piece.dim for w, piece in sorted(self.pieces.items())}


def _vectors_to_states(vectors, source: Sequence[FockMonomial]) -> Tuple[State, ...]:
    return tuple(State({source[i]: x for i, x in enumerate(vec) if x}) for vec in vectors)


def graded_kernel(coset: int, w, P: Params, strategy: str = "bareiss", with_virasoro: bool = False) -> KernelPiece:
    w = Fraction(w)
    source = graded_piece(coset, w, P)
    if not source:
        return KernelPiece(coset, w, 0, ())
    M = constraint_matrix(coset, w, P, with_virasoro)
    basis = _vectors_to_states(kernel(M, strategy), source)
    for s in basis:
        if screening_Q(s, P) or screening_Qtilde(s, P):
            raise DomainError(f"kernel vector at weight {w} is not annihilated by the screenings")
    logger.debug(f"kernel on coset {coset} weight {w}: {len(basis)} of {len(source)}")
    return KernelPiece(coset, w, len(source), basis)


def coset_weights(coset: int, max_weight, P: Params) -> List[Fraction]:
    return sorted({weight(m, P) for m in enumerate_basis(coset, max_weight, P)})


def kernel_module(coset: int, max_weight, P: Params, strategy: str = "bareiss") -> KernelModule:
    module = KernelModule(coset)
    for w in coset_weights(coset, max_weight, P):
        module.pieces[w] = graded_kernel(coset, w, P, strategy)
    return module


@dataclass(frozen=True)
class KernelDim:
    weight: Fraction
    source_dim: int
    dim: int
    oracle_dim: int
    bases_agree: bool


def kernel_dims(coset: int, max_weight, P: Params) -> List[KernelDim]:
    """Kernel dimensions per weight, each computed by Bareiss and by the Gauss oracle."""
    out = []
    for w in coset_weights(coset, max_weight, P):
        primary = graded_kernel(coset, w, P, "bareiss")
        oracle = graded_kernel(coset, w, P, "gauss")
        out.append(KernelDim(w, primary.source_dim, primary.dim, oracle.dim, primary.basis == oracle.basis))
    return out


def lowest_kernel_vector(coset: int, P: Params, max_weight) -> Optional[Tuple[Fraction, State]]:
    """First basis vector of the lowest nonzero kernel piece, searching up to max_weight."""
    for w in coset_weights(coset, max_weight, P):
        piece = graded_kernel(coset, w, P)
        if piece.basis:
            return w, piece.basis[0]
    return None


@dataclass(frozen=True)
class StretchRecord:
    weight: Fraction
    source_dim: int
    kernel_dim: int
    primary_dim: int


def stretch_primaries(P: Params, w) -> StretchRecord:
    """dim of Ker Q ∩ Ker Q̃ in (V_L)_w and of its subspace killed by L(1), L(2)."""
    w = Fraction(w)
    kernel_piece = graded_kernel(0, w, P)
    primaries = graded_kernel(0, w, P, with_virasoro=True)
    return StretchRecord(w, kernel_piece.source_dim, kernel_piece.dim, primaries.dim)


def doublet_lowest_weight(P: Params) -> int:
    """Lowest weight of M for p′ = 2, where it is 3p - 2."""
    return 3 * P.p - 2

