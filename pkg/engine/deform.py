"""Li's Δ-operator for the screening current and the deformed Virasoro modes L̄(n)."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from engine.modes import DomainError, exp_mode, virasoro_mode
from engine.operators import GradedOperator
from lattice.cosets import FourCosetModule, summand_acts
from lattice.fock import Charge, DualVector, Params, State, charge_weight, coset_lowest_weight, format_rational, weight

logger = logging.getLogger(__name__)

# summand indices (0-based) of the three exponentials in L̄
MINUS_ALPHA_OVER_P, ALPHA_OVER_PPRIME, DIFFERENCE = 1, 2, 3


@dataclass(frozen=True)
class LaurentStateSeries:
    """Σ_j z^{e_j}·v_j with finitely many nonzero coefficients; sorted by descending exponent."""

    terms: Tuple[Tuple[Fraction, State], ...]

    @classmethod
    def from_dict(cls, coeffs: Dict[Fraction, State]) -> "LaurentStateSeries":
        return cls(tuple((e, s) for e, s in sorted(coeffs.items(), reverse=True) if s))

    def coefficient(self, exponent) -> State:
        for e, s in self.terms:
            if e == exponent:
                return s
        return State.zero()

    def exponents(self) -> List[Fraction]:
        return [e for e, _ in self.terms]

    def is_zero(self) -> bool:
        return not self.terms

    def format(self, P: Params) -> str:
        return " + ".join(f"z^{format_rational(e)} ({s.format(P)})" for e, s in self.terms) or "0"


def _deepest_mode(s: State, gk: int, P: Params) -> int:
    """Largest n for which e^γ_n can be nonzero on s."""
    depth = 0
    lift = charge_weight(gk, P) - 1
    for m in s.terms:
        room = weight(m, P) + lift - coset_lowest_weight(m.charge.k + gk, P)
        depth = max(depth, math.floor(room))
    return depth


def delta_apply(v: State, P: Params, gamma: Optional[Charge] = None) -> LaurentStateSeries:
    """Δ(e^γ, z)v = exp(Σ_{n>=1} e^γ_n/(-n)·(-z)^{-n})v, γ = -α/p by default.

    z^{e^γ_0} is trivial here: v is required to lie in Ker e^γ_0, and e^γ_0
    commutes with every e^γ_n since e^γ_0 e^γ = 0.
    """
    gk = P.minus_alpha_over_p.k if gamma is None else (gamma.k if isinstance(gamma, DualVector) else int(gamma))
    if exp_mode(gk, 0, v, P):
        raise DomainError(f"Δ needs a vector in the kernel of the screening e^{{{gk}}}_0")
    total: Dict[Fraction, State] = {Fraction(0): v}
    level: Dict[Fraction, State] = {Fraction(0): v}
    r = 0
    while level:
        r += 1
        nxt: Dict[Fraction, State] = {}
        for e, s in level.items():
            for n in range(1, _deepest_mode(s, gk, P) + 1):
                out = exp_mode(gk, n, s, P)
                if out:
                    c = Fraction((-1) ** (n + 1), n * r)
                    key = e - n
                    nxt[key] = nxt.get(key, State.zero()) + out * c
        level = {e: s for e, s in nxt.items() if s}
        for e, s in level.items():
            total[e] = total.get(e, State.zero()) + s
    logger.debug(f"Δ expansion stopped after {r} levels with {len(total)} coefficients")
    return LaurentStateSeries.from_dict(total)


def selected_exp_mode(module: FourCosetModule, summand: int, gamma: Charge, n, s: State) -> State:
    """e^γ_n restricted to the summands that the summand of γ acts on."""
    parts = module.split(s)
    P = module.params
    return State.sum(exp_mode(gamma, n, part, P) for j, part in enumerate(parts) if part and summand_acts(summand, j))


def _require_module(module: FourCosetModule, s: State) -> None:
    if not module.contains(s):
        raise DomainError(f"state has charges outside {module.name}")


def deformation_part(n: int, s: State, module: FourCosetModule) -> State:
    """L̄(n) - L(n) = e^{-α/p}_n + e^{α/p′}_n + e^{α/p′-α/p}_{n-1}, with component selection."""
    _require_module(module, s)
    P = module.params
    return (
        selected_exp_mode(module, MINUS_ALPHA_OVER_P, P.minus_alpha_over_p, n, s)
        + selected_exp_mode(module, ALPHA_OVER_PPRIME, P.alpha_over_pprime, n, s)
        + selected_exp_mode(module, DIFFERENCE, P.difference_charge, n - 1, s)
    )


def lbar_mode(n: int, s: State, module: FourCosetModule) -> State:
    return virasoro_mode(n, s, module.params) + deformation_part(n, s, module)


def lbar_operator(n: int, module: FourCosetModule) -> GradedOperator:
    return GradedOperator(f"Lbar({n})@{module.label}", Fraction(-n), lambda s: lbar_mode(n, s, module))


def nilpotent_part(module: FourCosetModule) -> GradedOperator:
    """N = L̄(0) - L(0) = Q + Q̃ + e^{α/p′-α/p}_{-1} on the module."""
    return GradedOperator(f"N@{module.label}", Fraction(0), lambda s: deformation_part(0, s, module))
