"""Mode-indexed fields on a truncated direct sum of four-coset modules.

A field is known only through its modes: ``apply(n, vec)`` returns a_n·vec.
Products, derivatives and shifts build new fields from old ones lazily, and
every infinite sum is cut off at the lowest weight of the window's modules,
below which all states vanish.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Iterator, Optional, Sequence, Tuple

from engine.modes import DomainError, binomial, mode_index
from lattice.cosets import FourCosetModule, mv_module, vpp_module
from lattice.fock import FockMonomial, Params, State, WlogError, format_rational, weight
from models.intertwiner import intertwiner_eval
from models.vpp import module_vertex_mode

logger = logging.getLogger(__name__)


class WindowExceeded(WlogError):
    pass


class NotLocalUpTo(WlogError):
    def __init__(self, k_max: int, witness: str = ""):
        super().__init__(f"not local up to order {k_max}: {witness}")
        self.k_max = k_max
        self.witness = witness


class SectorVector:
    """A vector of the window: one State per module of the window."""

    __slots__ = ("parts",)

    def __init__(self, parts: Sequence[State]):
        self.parts: Tuple[State, ...] = tuple(parts)

    @classmethod
    def zero(cls, n: int) -> "SectorVector":
        return cls([State.zero()] * n)

    @classmethod
    def unit(cls, n: int, sector: int, m: FockMonomial) -> "SectorVector":
        parts = [State.zero()] * n
        parts[sector] = State.monomial(m)
        return cls(parts)

    def __bool__(self) -> bool:
        return any(self.parts)

    def __eq__(self, other) -> bool:
        return isinstance(other, SectorVector) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __add__(self, other: "SectorVector") -> "SectorVector":
        return SectorVector([a + b for a, b in zip(self.parts, other.parts)])

    def __sub__(self, other: "SectorVector") -> "SectorVector":
        return SectorVector([a - b for a, b in zip(self.parts, other.parts)])

    def __neg__(self) -> "SectorVector":
        return SectorVector([-a for a in self.parts])

    def __mul__(self, c) -> "SectorVector":
        return SectorVector([a * c for a in self.parts])

    __rmul__ = __mul__

    def terms(self) -> Iterator[Tuple[int, FockMonomial, Fraction]]:
        for i, part in enumerate(self.parts):
            for m, c in part.terms.items():
                yield i, m, c

    def max_weight(self, P: Params) -> Optional[Fraction]:
        return max((weight(m, P) for _, m, _ in self.terms()), default=None)

    def format(self, window: "TruncationWindow") -> str:
        chunks = [
            f"[{module.label}] {part.format(window.params)}"
            for module, part in zip(window.sectors, self.parts) if part
        ]
        return " + ".join(chunks) or "0"


@dataclass(frozen=True)
class TruncationWindow:
    params: Params
    max_weight: Fraction
    sectors: Tuple[FourCosetModule, ...]

    @classmethod
    def on_vpp(cls, P: Params, max_weight) -> "TruncationWindow":
        return cls(P, Fraction(max_weight), (vpp_module(P),))

    @classmethod
    def on_vpp_and_mv(cls, P: Params, max_weight) -> "TruncationWindow":
        return cls(P, Fraction(max_weight), (vpp_module(P), mv_module(P)))

    @property
    def size(self) -> int:
        return len(self.sectors)

    @cached_property
    def lowest_weight(self) -> Fraction:
        return min(module.lowest_weight() for module in self.sectors)

    @cached_property
    def basis(self) -> Tuple[Tuple[int, FockMonomial], ...]:
        return tuple(
            (i, m) for i, module in enumerate(self.sectors) for m in module.basis(self.max_weight)
        )

    def sector_index(self, label: str) -> int:
        for i, module in enumerate(self.sectors):
            if module.label == label:
                return i
        raise DomainError(f"window has no {label} sector")

    def zero(self) -> SectorVector:
        return SectorVector.zero(self.size)

    def unit(self, sector: int, m: FockMonomial) -> SectorVector:
        return SectorVector.unit(self.size, sector, m)

    def embed(self, label: str, s: State) -> SectorVector:
        parts = [State.zero()] * self.size
        parts[self.sector_index(label)] = s
        return SectorVector(parts)

    def output_modes(self, source_weight: Fraction, field_weight: Fraction) -> range:
        """Integer modes n whose output weight lies in [lowest_weight, max_weight]."""
        top = source_weight + field_weight - 1
        return range(math.ceil(top - self.max_weight), math.floor(top - self.lowest_weight) + 1)


Action = Callable[[Fraction, SectorVector], SectorVector]


class Field:
    """a(z) = Σ a_n z^{-n-1}, homogeneous of the given weight."""

    def __init__(self, name: str, weight, action: Action, offset=Fraction(0), size: int = 1):
        self.name = name
        self.weight = Fraction(weight)
        self.offset = Fraction(offset)
        self.size = size
        self._action = action
        self._memo: Dict[Tuple[Fraction, int, FockMonomial], SectorVector] = {}

    def __repr__(self) -> str:
        return f"Field({self.name}, weight={format_rational(self.weight)})"

    def _unit(self, n: Fraction, sector: int, m: FockMonomial) -> SectorVector:
        key = (n, sector, m)
        found = self._memo.get(key)
        if found is None:
            found = self._action(n, SectorVector.unit(self.size, sector, m))
            self._memo[key] = found
        return found

    def apply(self, n, vec: SectorVector) -> SectorVector:
        n = mode_index(n)
        acc = [dict() for _ in range(self.size)]
        for i, m, c in vec.terms():
            for j, out, d in self._unit(n, i, m).terms():
                acc[j][out] = acc[j].get(out, 0) + c * d
        return SectorVector([State._trusted(t) for t in acc])

    def mode(self, n) -> Callable[[SectorVector], SectorVector]:
        return lambda vec: self.apply(n, vec)

    def evaluate(self, n, vec: SectorVector, window: TruncationWindow) -> SectorVector:
        """a_n·vec, refusing inputs or outputs above the window."""
        top = vec.max_weight(window.params)
        if top is None:
            return window.zero()
        if top > window.max_weight or top + self.weight - mode_index(n) - 1 > window.max_weight:
            raise WindowExceeded(f"{self.name}_{n} on a weight-{top} vector leaves the window {window.max_weight}")
        return self.apply(n, vec)

    def __add__(self, other: "Field") -> "Field":
        _require_same_weight(self, other)
        return Field(f"{self.name} + {other.name}", self.weight,
                     lambda n, v: self.apply(n, v) + other.apply(n, v), self.offset, self.size)

    def __sub__(self, other: "Field") -> "Field":
        _require_same_weight(self, other)
        return Field(f"{self.name} - {other.name}", self.weight,
                     lambda n, v: self.apply(n, v) - other.apply(n, v), self.offset, self.size)

    def scaled(self, c) -> "Field":
        c = Fraction(c)
        return Field(f"{format_rational(c)}*{self.name}", self.weight,
                     lambda n, v: self.apply(n, v) * c, self.offset, self.size)

    def shifted(self, k: int) -> "Field":
        """z^{-k}·a(z): (z^{-k}a)_n = a_{n-k}."""
        if k == 0:
            return self
        return Field(f"z^-{k} {self.name}", self.weight + k,
                     lambda n, v: self.apply(n - k, v), self.offset, self.size)


def _require_same_weight(a: Field, b: Field) -> None:
    if a.weight != b.weight or a.size != b.size:
        raise DomainError(f"cannot add {a!r} and {b!r}")


def zero_field(weight, size: int) -> Field:
    return Field("0", weight, lambda n, v: SectorVector.zero(size), size=size)


def identity_field(window: TruncationWindow) -> Field:
    return Field("1", 0, lambda n, v: v if n == -1 else window.zero(), size=window.size)


def vertex_field(name: str, u: State, window: TruncationWindow) -> Field:
    """Y(u, z) acting on every module of the window."""
    P = window.params
    if not u.is_homogeneous(P):
        raise DomainError(f"{name}: vertex field of an inhomogeneous state")
    w = u.weights(P)[0] if u else Fraction(0)

    def action(n, vec):
        return SectorVector([
            module_vertex_mode(module, u, n, part) if part else State.zero()
            for module, part in zip(window.sectors, vec.parts)
        ])

    return Field(name, w, action, size=window.size)


def intertwiner_field(name: str, v: State, window: TruncationWindow) -> Field:
    """Ỹ(v, z) for v ∈ M: V(p,p′) → MV(p,p′), zero on MV(p,p′)."""
    P = window.params
    source, target = window.sector_index("V"), window.sector_index("MV")
    w = v.weights(P)[0]

    def action(n, vec):
        parts = [State.zero()] * window.size
        if vec.parts[source]:
            parts[target] = intertwiner_eval(v, n, vec.parts[source], P)
        return SectorVector(parts)

    return Field(name, w, action, size=window.size)


def derivative(a: Field) -> Field:
    """(Da)_n = -n·a_{n-1}."""
    return Field(f"D{a.name}", a.weight + 1, lambda n, v: a.apply(n - 1, v) * (-n), a.offset, a.size)


def _require_integral(a: Field, b: Field) -> None:
    if a.offset or b.offset:
        raise DomainError(f"{a.name} and {b.name} need integral modes")


def _sum_limit(source_weight: Fraction, field_weight: Fraction, shift: Fraction, floor: Fraction) -> int:
    """Largest j with field_{shift + j} possibly nonzero on a vector of the given weight."""
    return math.floor(source_weight + field_weight - 1 - shift - floor)


def nth_product(a: Field, n: int, b: Field, window: TruncationWindow) -> Field:
    """(a_n b)_m = Σ_j (-1)^j C(n,j) (a_{n-j} b_{m+j} - (-1)^n b_{n+m-j} a_j)."""
    _require_integral(a, b)
    P = window.params
    floor = window.lowest_weight
    sign = (-1) ** (n % 2)

    def action(m, vec):
        (_, u, _), = vec.terms()
        w = weight(u, P)
        out = window.zero()
        last = _sum_limit(w, b.weight, m, floor)
        if n >= 0:
            last = min(last, n)
        for j in range(0, last + 1):
            c = (-1) ** j * binomial(n, j)
            if c:
                out = out + a.apply(n - j, b.apply(m + j, vec)) * c
        last = _sum_limit(w, a.weight, Fraction(0), floor)
        if n >= 0:
            last = min(last, n)
        for j in range(0, last + 1):
            c = (-1) ** j * binomial(n, j)
            if c:
                out = out - b.apply(n + m - j, a.apply(j, vec)) * (sign * c)
        return out

    return Field(f"({a.name})_({n})({b.name})", a.weight + b.weight - n - 1, action, size=window.size)


def _expansion_coefficient(n: int, j: int) -> int:
    """Coefficient of x^{n-j} y^j in (x + y)^n expanded in powers of y/x."""
    if j < 0:
        return 0
    if n >= 0:
        return math.comb(n, j)
    return (-1) ** j * math.comb(j - n - 1, j)


CoefficientTable = Dict[Tuple[int, int], SectorVector]


def _ordered_table(outer: Field, inner: Field, vec: SectorVector, window: TruncationWindow,
                   inner_lo: int, total_lo: int) -> CoefficientTable:
    """outer_r inner_s vec for every inner mode s >= inner_lo and r + s >= total_lo that can be nonzero.

    Keyed by the exponents (-r-1, -s-1) the term carries in the outer and inner variable.
    """
    P = window.params
    floor = window.lowest_weight
    w = vec.max_weight(P)
    table: CoefficientTable = {}
    if w is None:
        return table
    for s in range(inner_lo, _sum_limit(w, inner.weight, Fraction(0), floor) + 1):
        middle = inner.apply(s, vec)
        top = middle.max_weight(P)
        if top is None:
            continue
        for r in range(total_lo - s, _sum_limit(top, outer.weight, Fraction(0), floor) + 1):
            value = outer.apply(r, middle)
            if value:
                table[(-r - 1, -s - 1)] = value
    return table


def residue_product(a: Field, n: int, b: Field, m: int, vec: SectorVector, window: TruncationWindow) -> SectorVector:
    """(a_n b)_m·vec read off Res_{z₁}[(z₁-z)^n a(z₁)b(z) - (-z+z₁)^n b(z)a(z₁)] at z^{-m-1}.

    Both operator products are tabulated over every mode pair whose output stays
    at or above the lowest weight of the window and at most one step below the
    target weight, and each table entry is matched against the expansion of
    (z₁-z)^n in its own region.
    """
    _require_integral(a, b)
    total = n + m - 1
    # a(z₁)b(z)vec: only z-exponents <= -m come into play since the expansion carries z^j, j >= 0
    near = _ordered_table(a, b, vec, window, m - 1, total)
    # b(z)a(z₁)vec: only z₁-exponents <= 0 since the expansion carries z₁^j, j >= 0
    far = {(e1, e2): v for (e2, e1), v in _ordered_table(b, a, vec, window, -1, total).items()}
    out = window.zero()
    # |z₁| > |z|: (z₁ - z)^n = Σ_j C(n,j) z₁^{n-j} (-z)^j
    for (e1, e2), value in near.items():
        j = n + 1 + e1
        if j >= 0 and e2 + j == -m - 1:
            c = _expansion_coefficient(n, j) * (-1) ** j
            if c:
                out = out + value * c
    # |z| > |z₁|: (-z + z₁)^n = Σ_j C(n,j) (-z)^{n-j} z₁^j
    for (e1, e2), value in far.items():
        j = -1 - e1
        if j >= 0 and e2 + n - j == -m - 1:
            c = _expansion_coefficient(n, j) * (-1) ** ((n - j) % 2)
            if c:
                out = out - value * c
    return out


@dataclass(frozen=True)
class Mismatch:
    sector: str
    source: str
    mode: int
    difference: str


def compare_fields(a: Field, b: Field, window: TruncationWindow) -> Optional[Mismatch]:
    """First mode on a window basis vector where a and b differ, or None."""
    P = window.params
    for sector, m in window.basis:
        vec = window.unit(sector, m)
        w = weight(m, P)
        for n in window.output_modes(w, a.weight):
            diff = a.apply(n, vec) - b.apply(n, vec)
            if diff:
                return Mismatch(window.sectors[sector].label, m.format(), n, diff.format(window))
    return None


def field_vanishes(a: Field, window: TruncationWindow) -> Optional[Mismatch]:
    return compare_fields(a, zero_field(a.weight, a.size), window)


def _commutator(a: Field, r: int, b: Field, s: int, vec: SectorVector) -> SectorVector:
    return a.apply(r, b.apply(s, vec)) - b.apply(s, a.apply(r, vec))


def locality_order(a: Field, b: Field, k_max: int, window: TruncationWindow) -> int:
    """Smallest k <= k_max with Σ_i (-1)^i C(k,i) [a_{m+k-i}, b_{r+i}] = 0 on the window.

    Only mode pairs whose intermediate states stay inside the window are
    tested, so the order is certified up to weight ``window.max_weight``.
    """
    _require_integral(a, b)
    P = window.params
    W = window.max_weight
    weights = sorted({weight(m, P) for _, m in window.basis})
    order = 0
    for sector, u in window.basis:
        vec = window.unit(sector, u)
        w = weight(u, P)
        r_low = math.ceil(w + b.weight - 1 - W)
        m_low = math.ceil(w + a.weight - 1 - W)
        for f in weights:
            total = w + a.weight + b.weight - 2 - f
            if total.denominator != 1:
                continue
            total = int(total)
            r_high = total - m_low
            if r_high < r_low:
                continue
            brackets = {r: _commutator(a, total - r, b, r, vec) for r in range(r_low, r_high + 1)}
            k = _local_order_at(brackets, r_low, r_high, k_max)
            if k is None:
                raise NotLocalUpTo(k_max, f"{a.name} with {b.name} on {window.sectors[sector].label} {u.format()} at output weight {f}")
            order = max(order, k)
    logger.debug(f"locality order of {a.name} with {b.name}: {order}")
    return order


def _local_order_at(brackets: Dict[int, SectorVector], r_low: int, r_high: int, k_max: int) -> Optional[int]:
    for k in range(0, k_max + 1):
        ok = True
        for r in range(r_low, r_high - k + 1):
            total = None
            for i in range(k + 1):
                term = brackets[r + i] * ((-1) ** i * binomial(k, i))
                total = term if total is None else total + term
            if total:
                ok = False
                break
        if ok:
            return k
    return None

