"""Exact rational matrices over sympy's ``DomainMatrix`` on QQ.

Entries are kept as ``Fraction`` so matrices hash, compare and serialize
without sympy types leaking out; elimination runs on ``DomainMatrix``.
``bareiss`` is sympy's fraction-free Gauss-Jordan, ``gauss`` its division
Gauss-Jordan and serves as the oracle, ``auto`` lets sympy pick. All end in
the unique reduced row echelon form, so kernel bases agree exactly, not just
in dimension.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from lattice.fock import WlogError

logger = logging.getLogger(__name__)

Vector = Tuple[Fraction, ...]

RREF_METHODS = {"bareiss": "FF", "gauss": "GJ", "auto": "auto"}
STRATEGIES = tuple(RREF_METHODS)


class DimensionMismatch(WlogError, ValueError):
    pass


class NoSolution(WlogError):
    pass


def to_qq(x) -> "QQ.dtype":
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def from_qq(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class RationalMatrix:
    __slots__ = ("rows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: Optional[int] = None):
        self.rows: Tuple[Vector, ...] = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if ncols is None:
            if not self.rows:
                raise DimensionMismatch("ncols is required for a matrix without rows")
            ncols = len(self.rows[0])
        self.ncols = ncols
        for row in self.rows:
            if len(row) != ncols:
                raise DimensionMismatch(f"ragged row of length {len(row)}, expected {ncols}")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        zero = Fraction(0)
        return cls([[zero] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> "RationalMatrix":
        return cls([[col[i] for col in columns] for i in range(nrows)], len(columns))

    @classmethod
    def from_domain(cls, dm: DomainMatrix) -> "RationalMatrix":
        return cls([[from_qq(x) for x in row] for row in dm.to_list()], dm.shape[1])

    def to_domain(self) -> DomainMatrix:
        return DomainMatrix([[to_qq(x) for x in row] for row in self.rows], self.shape, QQ)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.ncols, self.rows))

    def __repr__(self) -> str:
        return f"RationalMatrix({self.nrows}x{self.ncols})"

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.rows)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix([self.column(j) for j in range(self.ncols)], self.nrows)

    def stack(self, other: "RationalMatrix") -> "RationalMatrix":
        if other.ncols != self.ncols:
            raise DimensionMismatch(f"cannot stack {self.shape} over {other.shape}")
        return RationalMatrix(self.rows + other.rows, self.ncols)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.shape} matrix")
        nonzero = [(j, Fraction(x)) for j, x in enumerate(v) if x]
        return tuple(sum((row[j] * x for j, x in nonzero), Fraction(0)) for row in self.rows)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        if 0 in (self.nrows, self.ncols, other.ncols):
            return RationalMatrix.zeros(self.nrows, other.ncols)
        return RationalMatrix.from_domain(self.to_domain().matmul(other.to_domain()))

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return RationalMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols
        )

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "RationalMatrix":
        c = Fraction(c)
        return RationalMatrix([[c * x for x in row] for row in self.rows], self.ncols)

    def power(self, k: int) -> "RationalMatrix":
        if self.nrows != self.ncols:
            raise DimensionMismatch(f"power of non-square {self.shape} matrix")
        if k == 0 or self.ncols == 0:
            return RationalMatrix.identity(self.ncols)
        return RationalMatrix.from_domain(self.to_domain() ** k)


def _method(strategy: str) -> str:
    try:
        return RREF_METHODS[strategy]
    except KeyError:
        raise ValueError(f"unknown elimination strategy {strategy!r}")


def rref(M: RationalMatrix, strategy: str = "bareiss") -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    method = _method(strategy)
    if M.nrows == 0 or M.ncols == 0:
        return [], []
    reduced, pivots = M.to_domain().rref(method=method)
    rows = [[from_qq(x) for x in row] for row in reduced.to_list()[: len(pivots)]]
    return rows, list(pivots)


def rank(M: RationalMatrix, strategy: str = "bareiss") -> int:
    _, pivots = rref(M, strategy)
    logger.debug(f"rank of {M.shape} matrix via {strategy}: {len(pivots)}")
    return len(pivots)


def _canonical(basis: DomainMatrix, pivots: Sequence[int], ncols: int) -> List[Vector]:
    """Scale each nullspace row so its single free-column entry is 1; order by that column."""
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    out = []
    for row in basis.to_list():
        v = [from_qq(x) for x in row]
        lead = next(c for c in free if v[c])
        out.append((lead, tuple(x / v[lead] for x in v)))
    return [v for _, v in sorted(out)]


def kernel(M: RationalMatrix, strategy: str = "bareiss") -> List[Vector]:
    """Canonical kernel basis: one vector per free column, free entry 1, other free entries 0."""
    method = _method(strategy)
    n = M.ncols
    if n == 0:
        return []
    if M.nrows == 0:
        return [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    dm = M.to_domain()
    if method == "auto":
        basis = dm.nullspace()
        _, pivots = dm.rref()
    else:
        reduced, pivots = dm.rref(method=method)
        basis = reduced.nullspace_from_rref(pivots)
    if len(pivots) == n:
        return []
    return _canonical(basis, pivots, n)


@dataclass(frozen=True)
class Solution:
    particular: Vector
    kernel: List[Vector]


def solve(M: RationalMatrix, b: Sequence, strategy: str = "bareiss") -> Solution:
    """One solution of Mx = b (free variables 0) plus a kernel basis of M."""
    if len(b) != M.nrows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {M.shape} matrix")
    augmented = RationalMatrix([row + (Fraction(x),) for row, x in zip(M.rows, b)], M.ncols + 1)
    rows, pivots = rref(augmented, strategy)
    if pivots and pivots[-1] == M.ncols:
        raise NoSolution(f"right-hand side is not in the column space of a {M.shape} matrix")
    x = [Fraction(0)] * M.ncols
    for row, c in zip(rows, pivots):
        x[c] = row[-1]
    return Solution(tuple(x), kernel(M, strategy))


def combine(columns: Sequence[Vector], coeffs: Sequence) -> Vector:
    if not columns:
        return ()
    out = [Fraction(0)] * len(columns[0])
    for col, c in zip(columns, coeffs):
        if c:
            for i, x in enumerate(col):
                out[i] += c * x
    return tuple(out)
