"""Jordan structure of L̄(0) on V(p,p′) and MV(p,p′).

L(0) is the semisimple part of L̄(0) on the monomial basis, so the nilpotent
part is N = L̄(0) - L(0) and the nilpotent rank is the longest N-chain.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from engine.deform import deformation_part, nilpotent_part
from engine.modes import screening_Q, screening_Qtilde
from engine.operators import GradedOperator, PieceKey, cached_matrix, operator_matrix
from lattice.cosets import FourCosetModule, mv_module, vpp_module
from lattice.fock import DualVector, FockMonomial, Params, State, WlogError, partitions
from linalg.matrix import NoSolution, RationalMatrix, kernel, solve
from linalg.nilpotency import NilpotencyReport, nilpotency_rank

logger = logging.getLogger(__name__)


class NotFound(WlogError):
    pass


def nilpotent_matrix(module: FourCosetModule, w) -> RationalMatrix:
    """N = L̄(0) - L(0) on the weight-w piece of ``module``, through the matrix cache."""
    w = Fraction(w)
    basis = module.graded_piece(w)
    key = PieceKey(module.params, "N", module.label, w)
    return cached_matrix(nilpotent_part(module), key, basis, basis)


@dataclass
class WeightNilpotency:
    weight: Fraction
    dim: int
    report: NilpotencyReport
    chain: List[State] = field(default_factory=list)

    @property
    def max_chain(self) -> int:
        return self.report.max_chain


@dataclass
class Rank3Certificate:
    module: str
    max_weight: Fraction
    per_weight: List[WeightNilpotency]

    @property
    def overall(self) -> int:
        return max((w.max_chain for w in self.per_weight), default=0)

    @property
    def witness(self) -> Optional[WeightNilpotency]:
        """The lowest weight reaching the overall rank."""
        top = self.overall
        return next((w for w in self.per_weight if w.max_chain == top and top > 0), None)

    def chain_at(self, w) -> Optional[int]:
        w = Fraction(w)
        return next((x.max_chain for x in self.per_weight if x.weight == w), None)


def nilpotent_chain(module: FourCosetModule, start: State, length: int) -> List[State]:
    """[v, Nv, ..., N^(length-1) v]."""
    out = [start]
    for _ in range(length - 1):
        out.append(deformation_part(0, out[-1], module))
    return out


def rank3_certificate(module: FourCosetModule, max_weight) -> Rank3Certificate:
    per_weight = []
    for w in module.weights_up_to(max_weight):
        basis = module.graded_piece(w)
        report = nilpotency_rank(nilpotent_matrix(module, w), basis)
        chain: List[State] = []
        if report.witness_label is not None:
            chain = nilpotent_chain(module, State.monomial(report.witness_label), report.max_chain)
        logger.debug(f"{module.name} weight {w}: dim {len(basis)}, nilpotent rank {report.max_chain}")
        per_weight.append(WeightNilpotency(w, len(basis), report, chain))
    return Rank3Certificate(module.name, Fraction(max_weight), per_weight)


@dataclass
class SubsingularRecord:
    """w with Q·w = scale·e^{α/2+α/p′} and leading coefficient 1."""

    weight: Fraction
    vector: State
    target: FockMonomial
    scale: Fraction
    source_dim: int
    solution_dim: int
    oracle_kernel_dim: int
    q_image: State
    double_screening: State
    n_squared: State

    @property
    def n_squared_matches(self) -> bool:
        return self.n_squared == self.double_screening


def subsingular_weight(P: Params) -> Fraction:
    return Fraction((P.p + 2) * (P.pprime + 2), 4)


def find_subsingular(P: Params) -> SubsingularRecord:
    h = subsingular_weight(P)
    charge = P.half_alpha
    source = [FockMonomial(parts, charge) for parts in partitions(P.p + 1)]
    target = FockMonomial((), DualVector(charge.k + P.alpha_over_pprime.k))
    q = GradedOperator("Q", Fraction(0), lambda s: screening_Q(s, P))
    M = operator_matrix(q, source, [target])
    try:
        solution = solve(M, [Fraction(1)])
    except NoSolution as e:
        raise NotFound(f"no w at weight {h} with Q w on e^{{{target.charge.k}}}: {e}")
    coeffs = solution.particular
    lead = next(x for x in coeffs if x)
    w = State({m: x / lead for m, x in zip(source, coeffs) if x})
    q_image = screening_Q(w, P)
    scale = q_image.coefficient(target)
    module = mv_module(P)
    n_squared = deformation_part(0, deformation_part(0, w, module), module)
    double_screening = screening_Qtilde(q_image, P) * 2
    record = SubsingularRecord(
        weight=h,
        vector=w,
        target=target,
        scale=scale,
        source_dim=len(source),
        solution_dim=len(solution.kernel),
        oracle_kernel_dim=len(kernel(M, "gauss")),
        q_image=q_image,
        double_screening=double_screening,
        n_squared=n_squared,
    )
    logger.info(f"subsingular vector at weight {h}: {w.format(P)}")
    return record


@dataclass
class CoincidenceRecord:
    """V(p,p′) and MV(p,p′) share a graded basis exactly when their coset classes coincide."""

    applies: bool
    bases_agree: bool
    mismatched_weights: List[Fraction]
    vpp: Rank3Certificate
    mv: Rank3Certificate

    @property
    def witness_weights(self):
        return (
            self.vpp.witness.weight if self.vpp.witness else None,
            self.mv.witness.weight if self.mv.witness else None,
        )

    @property
    def distinguished(self) -> bool:
        """Same bases, but rank 3 is reached at different weights."""
        v_weight, mv_weight = self.witness_weights
        return self.bases_agree and v_weight is not None and mv_weight is not None and v_weight != mv_weight


def coincidence_check(P: Params, max_weight) -> CoincidenceRecord:
    V, MV = vpp_module(P), mv_module(P)
    applies = set(V.classes) == set(MV.classes)
    mismatched = []
    for w in sorted(set(V.weights_up_to(max_weight)) | set(MV.weights_up_to(max_weight))):
        if V.graded_piece(w) != MV.graded_piece(w):
            mismatched.append(w)
    return CoincidenceRecord(
        applies=applies,
        bases_agree=not mismatched,
        mismatched_weights=mismatched,
        vpp=rank3_certificate(V, max_weight),
        mv=rank3_certificate(MV, max_weight),
    )
