"""Modes of lattice vertex operators acting on Fock states.

Every action is computed monomial by monomial and memoized; the public
functions take and return ``State``s. Mode indices are ``Fraction``s so that
fractional-monodromy sectors are representable; an index that does not match
the monodromy of (γ, β) gives the zero state.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple

from lattice.fock import (
    Charge,
    DualVector,
    FockMonomial,
    Params,
    State,
    WlogError,
    coset_lowest_weight,
    partitions,
    weight,
)

logger = logging.getLogger(__name__)

Terms = Tuple[Tuple[FockMonomial, Fraction], ...]


class DomainError(WlogError, ValueError):
    pass


def mode_index(n) -> Fraction:
    return n if isinstance(n, Fraction) else Fraction(n)


def _charge_k(gamma: Charge) -> int:
    return gamma.k if isinstance(gamma, DualVector) else int(gamma)


def binomial(x: int, k: int) -> int:
    """C(x, k) for any integer x and k >= 0."""
    if k < 0:
        return 0
    if x >= 0:
        return math.comb(x, k)
    return (-1) ** k * math.comb(k - x - 1, k)


def _merge_parts(a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(sorted(a + b, reverse=True))


def _lift(fn, s: State, *args) -> State:
    acc: Dict[FockMonomial, Fraction] = {}
    for m, c in s.terms.items():
        for out, d in fn(*args, m):
            acc[out] = acc.get(out, 0) + c * d
    return State._trusted(acc)


# Heisenberg


@lru_cache(maxsize=None)
def _heisenberg_terms(n: int, P: Params, m: FockMonomial) -> Terms:
    if n < 0:
        return ((m.with_part(-n), Fraction(1)),)
    if n == 0:
        return ((m, Fraction(m.charge.k)),) if m.charge.k else ()
    mult = m.multiplicity(n)
    if not mult:
        return ()
    return ((m.without_part(n), Fraction(P.norm * n * mult)),)


def heisenberg_act(n: int, s: State, P: Params) -> State:
    """α(n)·s: creation for n < 0, charge for n = 0, ⟨α,α⟩·n·∂ for n > 0."""
    return _lift(_heisenberg_terms, s, int(n), P)


# Exponential modes


@lru_cache(maxsize=None)
def _exp_series(a: int, c: Fraction) -> Terms:
    """z^a coefficient of exp(Σ_m (c/m) x_m z^m), as (parts, coefficient) pairs."""
    out = []
    for parts in partitions(a):
        coeff = Fraction(1)
        for value in set(parts):
            mult = parts.count(value)
            coeff *= (c / value) ** mult / math.factorial(mult)
        out.append((parts, coeff))
    return tuple(out)


def _sub_multisets(parts: Tuple[int, ...], shift: int):
    """Yield (removed level, remaining parts, coefficient) for x_i -> x_i + shift·z^{-i}."""
    groups = [(v, parts.count(v)) for v in sorted(set(parts), reverse=True)]

    def walk(i):
        if i == len(groups):
            yield 0, (), 1
            return
        value, mult = groups[i]
        for level, rest, coeff in walk(i + 1):
            for t in range(mult + 1):
                yield (
                    level + value * t,
                    (value,) * (mult - t) + rest,
                    coeff * math.comb(mult, t) * shift ** t,
                )

    yield from walk(0)


@lru_cache(maxsize=None)
def _exp_terms(gk: int, n: Fraction, P: Params, m: FockMonomial) -> Terms:
    # Y(e^γ, z) x_λ e^β = z^{⟨γ,β⟩} Σ_a z^a S_a · x_λ(x_i - kγ z^{-i}) e^{β+γ}
    offset = -n - 1 - Fraction(gk * m.charge.k, P.norm)
    if offset.denominator != 1:
        return ()
    offset = int(offset)
    c = Fraction(gk, P.norm)
    charge = DualVector(m.charge.k + gk)
    acc: Dict[FockMonomial, Fraction] = {}
    for removed, rest, coeff in _sub_multisets(m.parts, -gk):
        a = offset + removed
        if a < 0 or not coeff:
            continue
        for created, s_coeff in _exp_series(a, c):
            out = FockMonomial(_merge_parts(rest, created), charge)
            acc[out] = acc.get(out, 0) + coeff * s_coeff
    return tuple((k, v) for k, v in acc.items() if v)


def exp_mode(gamma: Charge, n, s: State, P: Params) -> State:
    """e^γ_n·s with the trivial two-cocycle."""
    return _lift(_exp_terms, s, _charge_k(gamma), mode_index(n), P)


# General fields


@lru_cache(maxsize=None)
def _field_terms(u: FockMonomial, n: Fraction, P: Params, s: FockMonomial) -> Terms:
    if not u.parts:
        return _exp_terms(u.charge.k, n, P, s)
    # Y(α(-j)u′)_n = Σ_{m<0} C(-m-1, j-1) α(m) u′_{n-m-j} + Σ_{m>=0} C(-m-1, j-1) u′_{n-m-j} α(m)
    j = u.parts[0]
    rest = FockMonomial(u.parts[1:], u.charge)
    acc: Dict[FockMonomial, Fraction] = {}

    floor_weight = coset_lowest_weight(rest.charge.k + s.charge.k, P)
    top = weight(s, P) + weight(rest, P) - 1 - floor_weight
    m_min = math.ceil(n - j - top)
    for m in range(-1, m_min - 1, -1):
        b = binomial(-m - 1, j - 1)
        if not b:
            continue
        for inner, c in _field_terms(rest, n - m - j, P, s):
            out = inner.with_part(-m)
            acc[out] = acc.get(out, 0) + b * c

    for m in range(0, s.max_part + 1):
        b = binomial(-m - 1, j - 1)
        if not b:
            continue
        for lowered, c in _heisenberg_terms(m, P, s):
            for out, d in _field_terms(rest, n - m - j, P, lowered):
                acc[out] = acc.get(out, 0) + b * c * d
    return tuple((k, v) for k, v in acc.items() if v)


def field_mode(v: State, n, s: State, P: Params) -> State:
    """v_n·s for arbitrary lattice states v, by peeling Heisenberg parts off v."""
    n = mode_index(n)
    return State.sum(
        _lift(_field_terms, s, u, n, P) * c for u, c in v.terms.items()
    )


# Virasoro


@lru_cache(maxsize=None)
def _virasoro_terms(n: int, P: Params, m: FockMonomial) -> Terms:
    reach = m.max_part + 1
    acc: Dict[FockMonomial, Fraction] = {}
    quadratic = Fraction(1, 2 * P.norm)
    for j in range(min(0, n) - reach, max(0, n) + reach + 1):
        hi, lo = max(j, n - j), min(j, n - j)
        for mid, c in _heisenberg_terms(hi, P, m):
            for out, d in _heisenberg_terms(lo, P, mid):
                acc[out] = acc.get(out, 0) + quadratic * c * d
    linear = -(n + 1) * P.background
    if linear:
        for out, c in _heisenberg_terms(n, P, m):
            acc[out] = acc.get(out, 0) + linear * c
    return tuple((k, v) for k, v in acc.items() if v)


def virasoro_mode(n: int, s: State, P: Params) -> State:
    return _lift(_virasoro_terms, s, int(n), P)


def conformal_vector(P: Params) -> State:
    """ω = α(-1)²𝟙/(4pp′) + (p-p′)/(2pp′)·α(-2)𝟙."""
    zero = DualVector(0)
    return State({
        FockMonomial((1, 1), zero): Fraction(1, 2 * P.norm),
        FockMonomial((2,), zero): P.background,
    })


def central_charge(P: Params) -> Fraction:
    return 1 - Fraction(6 * (P.p - P.pprime) ** 2, P.p * P.pprime)


def central_charge_from_modes(P: Params) -> Fraction:
    """2·(vacuum coefficient of L(2)L(-2)𝟙)."""
    vac = State.vacuum()
    out = virasoro_mode(2, virasoro_mode(-2, vac, P), P)
    return 2 * out.coefficient(FockMonomial((), DualVector(0)))


# Screenings


def screening_Q(s: State, P: Params) -> State:
    return exp_mode(P.alpha_over_pprime, 0, s, P)


def screening_Qtilde(s: State, P: Params) -> State:
    return exp_mode(P.minus_alpha_over_p, 0, s, P)


def mode_output_weight(source_weight: Fraction, field_weight: Fraction, n) -> Fraction:
    return Fraction(source_weight) + Fraction(field_weight) - mode_index(n) - 1


def cache_info() -> Dict[str, object]:
    return {
        "heisenberg": _heisenberg_terms.cache_info(),
        "exponential": _exp_terms.cache_info(),
        "field": _field_terms.cache_info(),
        "virasoro": _virasoro_terms.cache_info(),
    }

