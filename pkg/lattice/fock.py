"""Rank-one lattice arithmetic and Heisenberg Fock monomials.

Charges are stored as the integer ``k`` of ``k·α/(2pp′)``, so every pairing is
an exact rational and coset tests are plain modular arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union


class WlogError(Exception):
    """Base class for every error raised by the library."""


class ParamsError(WlogError, ValueError):
    pass


@dataclass(frozen=True)
class Params:
    p: int
    pprime: int

    def __post_init__(self):
        if self.p < 2 or self.pprime < 2:
            raise ParamsError(f"p and p' must be >= 2, got ({self.p}, {self.pprime})")
        if math.gcd(self.p, self.pprime) != 1:
            raise ParamsError(f"p and p' must be relatively prime, got ({self.p}, {self.pprime})")

    @property
    def norm(self) -> int:
        """<α, α> = 2pp′, also the number of dual-lattice cosets."""
        return 2 * self.p * self.pprime

    @property
    def background(self) -> Fraction:
        # coefficient of α(-2)1 in ω
        return Fraction(self.p - self.pprime, 2 * self.p * self.pprime)

    @property
    def alpha(self) -> "DualVector":
        return DualVector(self.norm)

    @property
    def alpha_over_pprime(self) -> "DualVector":
        return DualVector(2 * self.p)

    @property
    def minus_alpha_over_p(self) -> "DualVector":
        return DualVector(-2 * self.pprime)

    @property
    def difference_charge(self) -> "DualVector":
        """α/p′ − α/p, the weight-0 companion of the vacuum."""
        return DualVector(2 * self.p - 2 * self.pprime)

    @property
    def half_alpha(self) -> "DualVector":
        return DualVector(self.p * self.pprime)

    def label(self) -> str:
        return f"({self.p},{self.pprime})"


@dataclass(frozen=True, order=True)
class DualVector:
    """The dual-lattice point k·α/(2pp′)."""

    k: int

    def __add__(self, other: "DualVector") -> "DualVector":
        return DualVector(self.k + other.k)

    def __sub__(self, other: "DualVector") -> "DualVector":
        return DualVector(self.k - other.k)

    def __neg__(self) -> "DualVector":
        return DualVector(-self.k)

    def coset(self, P: Params) -> int:
        return self.k % P.norm

    def in_lattice(self, P: Params) -> bool:
        return self.k % P.norm == 0


Charge = Union[DualVector, int]


def _as_k(charge: Charge) -> int:
    return charge.k if isinstance(charge, DualVector) else int(charge)


def pairing(a: Charge, b: Charge, P: Params) -> Fraction:
    return Fraction(_as_k(a) * _as_k(b), P.norm)


def charge_weight(k: int, P: Params) -> Fraction:
    """L(0) eigenvalue of the charged vacuum e^{kα/(2pp′)}."""
    return Fraction(k * k, 2 * P.norm) - P.background * k


@dataclass(frozen=True)
class FockMonomial:
    """α(−n₁)···α(−n_r)e^β with parts stored non-increasing."""

    parts: Tuple[int, ...]
    charge: DualVector

    @classmethod
    def of(cls, parts: Iterable[int] = (), charge: Charge = 0) -> "FockMonomial":
        ordered = tuple(sorted((int(x) for x in parts), reverse=True))
        if ordered and ordered[-1] <= 0:
            raise ValueError(f"parts must be positive, got {ordered}")
        k = charge if isinstance(charge, DualVector) else DualVector(int(charge))
        return cls(ordered, k)

    @property
    def level(self) -> int:
        return sum(self.parts)

    @property
    def max_part(self) -> int:
        return self.parts[0] if self.parts else 0

    def multiplicity(self, n: int) -> int:
        return self.parts.count(n)

    def with_part(self, n: int) -> "FockMonomial":
        return FockMonomial(_insert_part(self.parts, n), self.charge)

    def without_part(self, n: int) -> "FockMonomial":
        parts = list(self.parts)
        parts.remove(n)
        return FockMonomial(tuple(parts), self.charge)

    def sort_key(self, P: Params):
        return (weight(self, P), self.charge.k, tuple(-x for x in self.parts))

    def format(self) -> str:
        if not self.parts:
            return f"e^{{{self.charge.k}}}"
        grouped = []
        for n in sorted(set(self.parts), reverse=True):
            mult = self.parts.count(n)
            grouped.append(f"a(-{n})" + (f"^{mult}" if mult > 1 else ""))
        return " ".join(grouped) + f" e^{{{self.charge.k}}}"


def _insert_part(parts: Tuple[int, ...], n: int) -> Tuple[int, ...]:
    i = 0
    while i < len(parts) and parts[i] >= n:
        i += 1
    return parts[:i] + (n,) + parts[i:]


def weight(m: FockMonomial, P: Params) -> Fraction:
    return m.level + charge_weight(m.charge.k, P)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class State:
    """Finite exact-rational combination of Fock monomials.

    States produced by lattice operations live in a single coset; vectors of a
    four-coset module are sums of such pieces and split again with ``cosets``.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[FockMonomial, Fraction]] = None):
        self.terms: Dict[FockMonomial, Fraction] = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self.terms[m] = c

    @classmethod
    def _trusted(cls, terms: Dict[FockMonomial, Fraction]) -> "State":
        s = cls.__new__(cls)
        s.terms = {m: c for m, c in terms.items() if c}
        return s

    @classmethod
    def zero(cls) -> "State":
        return cls._trusted({})

    @classmethod
    def vacuum(cls) -> "State":
        return cls.monomial(FockMonomial((), DualVector(0)))

    @classmethod
    def monomial(cls, m: FockMonomial, coeff=1) -> "State":
        return cls({m: Fraction(coeff)})

    @classmethod
    def exponential(cls, charge: Charge) -> "State":
        return cls.monomial(FockMonomial.of((), charge))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[FockMonomial, Fraction]]) -> "State":
        acc: Dict[FockMonomial, Fraction] = {}
        for m, c in pairs:
            acc[m] = acc.get(m, 0) + c
        return cls._trusted(acc)

    @staticmethod
    def sum(states: Iterable["State"]) -> "State":
        acc: Dict[FockMonomial, Fraction] = {}
        for s in states:
            for m, c in s.terms.items():
                acc[m] = acc.get(m, 0) + c
        return State._trusted(acc)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[FockMonomial, Fraction]]:
        return iter(self.terms.items())

    def __eq__(self, other) -> bool:
        if isinstance(other, State):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "State") -> "State":
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, 0) + c
        return State._trusted(acc)

    def __sub__(self, other: "State") -> "State":
        return self + (-other)

    def __neg__(self) -> "State":
        return State._trusted({m: -c for m, c in self.terms.items()})

    def __mul__(self, scalar) -> "State":
        scalar = Fraction(scalar)
        if not scalar:
            return State.zero()
        return State._trusted({m: c * scalar for m, c in self.terms.items()})

    __rmul__ = __mul__

    def coefficient(self, m: FockMonomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def ordered(self, P: Params) -> List[Tuple[FockMonomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: t[0].sort_key(P))

    def leading(self, P: Params) -> Optional[Tuple[FockMonomial, Fraction]]:
        items = self.ordered(P)
        return items[0] if items else None

    def weights(self, P: Params) -> List[Fraction]:
        return sorted({weight(m, P) for m in self.terms})

    def max_weight(self, P: Params) -> Optional[Fraction]:
        return max((weight(m, P) for m in self.terms), default=None)

    def by_weight(self, P: Params) -> Dict[Fraction, "State"]:
        out: Dict[Fraction, Dict[FockMonomial, Fraction]] = {}
        for m, c in self.terms.items():
            out.setdefault(weight(m, P), {})[m] = c
        return {w: State._trusted(t) for w, t in sorted(out.items())}

    def cosets(self, P: Params) -> Dict[int, "State"]:
        out: Dict[int, Dict[FockMonomial, Fraction]] = {}
        for m, c in self.terms.items():
            out.setdefault(m.charge.coset(P), {})[m] = c
        return {k: State._trusted(t) for k, t in sorted(out.items())}

    def is_homogeneous(self, P: Params) -> bool:
        return len({weight(m, P) for m in self.terms}) <= 1

    def format(self, P: Params) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for m, c in self.ordered(P):
            if c == 1:
                chunks.append(m.format())
            elif c == -1:
                chunks.append(f"-{m.format()}")
            else:
                chunks.append(f"{format_rational(c)} {m.format()}")
        return " + ".join(chunks).replace("+ -", "- ")

    def __repr__(self) -> str:
        inner = ", ".join(f"{m.format()}: {format_rational(c)}" for m, c in self.terms.items())
        return f"State({{{inner}}})"


@lru_cache(maxsize=None)
def partitions(n: int, largest: Optional[int] = None) -> Tuple[Tuple[int, ...], ...]:
    """Partitions of n as non-increasing tuples, in reverse-lex order."""
    if largest is None:
        largest = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def _normalize_cosets(cosets, P: Params) -> Tuple[int, ...]:
    if isinstance(cosets, (int, DualVector)):
        cosets = (cosets,)
    return tuple(sorted({_as_k(c) % P.norm for c in cosets}))


def charges_up_to(coset: int, max_weight: Fraction, P: Params) -> List[int]:
    """Charges k in the class with charge_weight(k) <= max_weight, ascending."""
    d = P.p - P.pprime
    # charge_weight(k) = ((k - d)^2 - d^2) / (4pp′)
    bound = 2 * P.norm * Fraction(max_weight) + d * d
    if bound < 0:
        return []
    radius = math.isqrt(math.floor(bound)) + 1
    first = d - radius
    first += (coset - first) % P.norm
    return [
        k for k in range(first, d + radius + 1, P.norm)
        if charge_weight(k, P) <= max_weight
    ]


def coset_lowest_weight(coset: int, P: Params) -> Fraction:
    d = P.p - P.pprime
    above = d + (coset - d) % P.norm
    return min(charge_weight(above, P), charge_weight(above - P.norm, P))


def enumerate_basis(cosets, max_weight, P: Params) -> List[FockMonomial]:
    """All monomials in the given coset(s) with weight <= max_weight.

    Ordered by weight, then charge, then partition in reverse-lex order.
    """
    max_weight = Fraction(max_weight)
    out: List[FockMonomial] = []
    if max_weight < 0:
        return out
    for coset in _normalize_cosets(cosets, P):
        for k in charges_up_to(coset, max_weight, P):
            room = max_weight - charge_weight(k, P)
            for level in range(0, math.floor(room) + 1):
                out.extend(FockMonomial(parts, DualVector(k)) for parts in partitions(level))
    out.sort(key=lambda m: m.sort_key(P))
    return out


def graded_piece(cosets, w, P: Params) -> List[FockMonomial]:
    w = Fraction(w)
    out: List[FockMonomial] = []
    for coset in _normalize_cosets(cosets, P):
        for k in charges_up_to(coset, w, P):
            level = w - charge_weight(k, P)
            if level.denominator == 1:
                out.extend(FockMonomial(parts, DualVector(k)) for parts in partitions(int(level)))
    out.sort(key=lambda m: m.sort_key(P))
    return out


def graded_dimensions(cosets, max_weight, P: Params) -> Dict[Fraction, int]:
    dims: Dict[Fraction, int] = {}
    for m in enumerate_basis(cosets, max_weight, P):
        w = weight(m, P)
        dims[w] = dims.get(w, 0) + 1
    return dims
