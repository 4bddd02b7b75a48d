from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Optional, Protocol, Sequence

from engine.modes import DomainError
from lattice.fock import FockMonomial, Params, State
from linalg.matrix import RationalMatrix

logger = logging.getLogger(__name__)


class MatrixBackend(Protocol):
    def get(self, key: "PieceKey") -> Optional[RationalMatrix]: ...

    def put(self, key: "PieceKey", matrix: RationalMatrix) -> None: ...


@dataclass(frozen=True)
class GradedOperator:
    """A linear map on states raising weight by ``shift``."""

    name: str
    shift: Fraction
    action: Callable[[State], State] = field(compare=False, repr=False)

    def __call__(self, s: State) -> State:
        return self.action(s)

    def matrix(self, source: Sequence[FockMonomial], target: Sequence[FockMonomial]) -> RationalMatrix:
        return operator_matrix(self, source, target)

    def then(self, other: "GradedOperator") -> "GradedOperator":
        """other ∘ self"""
        return GradedOperator(f"{other.name}*{self.name}", self.shift + other.shift, lambda s: other(self(s)))


def operator_matrix(op, source: Sequence[FockMonomial], target: Sequence[FockMonomial]) -> RationalMatrix:
    """Column j is op(source[j]) expanded in ``target``; outputs must stay inside it."""
    index = {m: i for i, m in enumerate(target)}
    columns: List[List[Fraction]] = []
    for m in source:
        col = [Fraction(0)] * len(target)
        for out, c in op(State.monomial(m)).terms.items():
            i = index.get(out)
            if i is None:
                raise DomainError(f"{getattr(op, 'name', op)}: output {out.format()} is outside the target basis")
            col[i] = c
        columns.append(col)
    return RationalMatrix.from_columns(columns, len(target))


@dataclass(frozen=True)
class PieceKey:
    """Identifies one operator restricted to one graded piece."""

    params: Params
    operator: str
    source: str
    weight: Fraction

    def digest_fields(self) -> Dict[str, str]:
        return {
            "p": str(self.params.p),
            "pprime": str(self.params.pprime),
            "operator": self.operator,
            "source": self.source,
            "weight": str(self.weight),
        }


class MatrixCache:
    """In-memory matrix cache with an optional persistent backend."""

    def __init__(self, backend: Optional[MatrixBackend] = None):
        self._lock = threading.Lock()
        self._memory: Dict[Hashable, RationalMatrix] = {}
        self.backend = backend
        self.hits = 0
        self.misses = 0

    def get_or_compute(self, key: PieceKey, compute: Callable[[], RationalMatrix]) -> RationalMatrix:
        with self._lock:
            found = self._memory.get(key)
            if found is not None:
                self.hits += 1
                return found
        if self.backend is not None:
            found = self.backend.get(key)
            if found is not None:
                logger.debug(f"matrix cache hit on disk: {key.operator} {key.source} weight {key.weight}")
                with self._lock:
                    self.hits += 1
                    self._memory[key] = found
                return found
        matrix = compute()
        logger.debug(f"computed {key.operator} on {key.source} weight {key.weight}: {matrix.shape}")
        with self._lock:
            self.misses += 1
            self._memory[key] = matrix
        if self.backend is not None:
            self.backend.put(key, matrix)
        return matrix

    def clear(self) -> None:
        with self._lock:
            self._memory.clear()


_default_cache = MatrixCache()


def default_cache() -> MatrixCache:
    return _default_cache


def set_backend(backend: Optional[MatrixBackend]) -> None:
    _default_cache.backend = backend


def cached_matrix(op: GradedOperator, key: PieceKey, source, target) -> RationalMatrix:
    return _default_cache.get_or_compute(key, lambda: operator_matrix(op, source, target))
