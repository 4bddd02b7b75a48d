from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence, Tuple

from lattice.fock import WlogError
from linalg.matrix import RationalMatrix

logger = logging.getLogger(__name__)


class NotNilpotent(WlogError):
    pass


@dataclass(frozen=True)
class NilpotencyReport:
    """Smallest r with N^r = 0, plus a basis vector whose chain has length r.

    For r > 0 the witness is the first basis column with N^(r-1)·e ≠ 0, so
    applying N r-1 times keeps it nonzero and r times kills it.
    """

    max_chain: int
    witness_index: Optional[int] = None
    witness: Optional[Tuple[Fraction, ...]] = None
    witness_label: Any = None


def nilpotency_rank(N, space: Optional[Sequence] = None) -> NilpotencyReport:
    """Nilpotency rank of a square matrix, or of an operator materialized on ``space``."""
    if not isinstance(N, RationalMatrix):
        if space is None:
            raise ValueError("an operator needs a basis to be materialized")
        N = N.matrix(space, space)
    dim = N.ncols
    if N.nrows != dim:
        raise ValueError(f"nilpotency of non-square {N.shape} matrix")
    if dim == 0:
        return NilpotencyReport(0)
    power = RationalMatrix.identity(dim)
    for r in range(1, dim + 1):
        nxt = N @ power
        if nxt.is_zero():
            index = next(j for j in range(dim) if any(power.column(j)))
            witness = tuple(Fraction(int(i == index)) for i in range(dim))
            label = space[index] if space is not None else None
            logger.debug(f"nilpotency rank {r} on {dim}-dimensional space, witness column {index}")
            return NilpotencyReport(r, index, witness, label)
        power = nxt
    raise NotNilpotent(f"N^{dim} != 0 on a {dim}-dimensional space")
