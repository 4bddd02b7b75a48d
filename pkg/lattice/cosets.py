"""Layout of the four-coset spaces V(p,p′) and MV(p,p′)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from lattice.fock import (
    Params,
    ParamsError,
    FockMonomial,
    State,
    coset_lowest_weight,
    enumerate_basis,
    graded_piece,
    weight,
)

# Z/2 x Z/2 labels of the summands 1..4: base, -α/p, +α/p′, +α/p′-α/p
SUMMAND_BITS: Tuple[int, ...] = (0b00, 0b01, 0b10, 0b11)
SUMMAND_NAMES: Tuple[str, ...] = ("1", "-a/p", "+a/p'", "+a/p'-a/p")


def summand_acts(i: int, j: int) -> bool:
    """Summand i acts on summand j iff their labels are disjoint."""
    return SUMMAND_BITS[i] & SUMMAND_BITS[j] == 0


def target_summand(i: int, j: int) -> int:
    return SUMMAND_BITS.index(SUMMAND_BITS[i] | SUMMAND_BITS[j])


@dataclass(frozen=True)
class FourCosetModule:
    label: str
    params: Params
    base: int

    def __post_init__(self):
        if len(set(self.classes)) != 4:
            raise ParamsError(f"{self.label}{self.params.label()}: coset classes collide: {self.classes}")

    @property
    def offsets(self) -> Tuple[int, int, int, int]:
        P = self.params
        return (0, P.minus_alpha_over_p.k, P.alpha_over_pprime.k, P.difference_charge.k)

    @property
    def classes(self) -> Tuple[int, ...]:
        return tuple((self.base + o) % self.params.norm for o in self.offsets)

    @property
    def name(self) -> str:
        return f"{self.label}{self.params.label()}"

    def summand_of(self, charge_k: int) -> Optional[int]:
        cls = charge_k % self.params.norm
        classes = self.classes
        return classes.index(cls) if cls in classes else None

    def contains(self, s: State) -> bool:
        return all(self.summand_of(m.charge.k) is not None for m in s.terms)

    def split(self, s: State) -> List[State]:
        """Components of s in summands 1..4; charges outside the module are dropped."""
        buckets: List[Dict[FockMonomial, Fraction]] = [{}, {}, {}, {}]
        for m, c in s.terms.items():
            i = self.summand_of(m.charge.k)
            if i is not None:
                buckets[i][m] = c
        return [State._trusted(b) for b in buckets]

    def lowest_weight(self) -> Fraction:
        return min(coset_lowest_weight(c, self.params) for c in self.classes)

    def basis(self, max_weight) -> List[FockMonomial]:
        return enumerate_basis(self.classes, max_weight, self.params)

    def graded_piece(self, w) -> List[FockMonomial]:
        return graded_piece(self.classes, w, self.params)

    def weights_up_to(self, max_weight) -> List[Fraction]:
        P = self.params
        return sorted({weight(m, P) for m in self.basis(max_weight)})


def vpp_module(P: Params) -> FourCosetModule:
    """V(p,p′): V_L ⊕ V_{L−α/p} ⊕ V_{L+α/p′} ⊕ V_{L+α/p′−α/p}."""
    return FourCosetModule("V", P, 0)


def mv_module(P: Params) -> FourCosetModule:
    """MV(p,p′): the same layout shifted by α/2."""
    return FourCosetModule("MV", P, P.half_alpha.k)
