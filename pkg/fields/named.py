"""The generating fields of the extended algebra and the Δ(H̃)-deformation of fields."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from engine.deform import delta_apply, lbar_mode
from engine.modes import DomainError, conformal_vector
from fields.field import (
    Field,
    SectorVector,
    TruncationWindow,
    field_vanishes,
    identity_field,
    locality_order,
    nth_product,
    vertex_field,
)
from lattice.fock import Params, State

logger = logging.getLogger(__name__)

DEFORMATION_ORDER_LIMIT = 6


def nu(P: Params) -> Fraction:
    """ν = p/(p - p′), the weight of B in H̃ = A + νB."""
    if P.p == P.pprime:
        raise DomainError("ν is undefined for p = p′")
    return Fraction(P.p, P.p - P.pprime)


def ytilde(v: State, window: TruncationWindow, name: Optional[str] = None) -> Field:
    """Ỹ(v, z) = Y(Δ(e^{-α/p}, z)v, z), summed over the finite Δ-expansion."""
    P = window.params
    name = name or f"Y~({v.format(P)})"
    total: Optional[Field] = None
    for exponent, coeff in delta_apply(v, P).terms:
        piece = vertex_field(f"Y({coeff.format(P)})", coeff, window).shifted(int(-exponent))
        total = piece if total is None else total + piece
    total.name = name
    return total


def lbar_field(window: TruncationWindow) -> Field:
    """L̄(z) = Σ L̄(n) z^{-n-2}, straight from the mode formula."""

    def action(n, vec):
        return SectorVector([
            lbar_mode(int(n) - 1, part, module) if part else State.zero()
            for module, part in zip(window.sectors, vec.parts)
        ])

    return Field("Lbar", 2, action, size=window.size)


@dataclass
class NamedFields:
    window: TruncationWindow
    nu: Fraction
    identity: Field
    virasoro: Field
    screening_current: Field
    minus_screening_current: Field
    difference: Field
    shifted_difference: Field
    ltilde: Field
    ltilde_direct: Field
    h: Field
    htilde: Field
    lbar: Field
    extra: Dict[str, Field] = field(default_factory=dict)

    def ytilde(self, v: State, name: Optional[str] = None) -> Field:
        return ytilde(v, self.window, name)


def build_named_fields(P: Params, window: TruncationWindow) -> NamedFields:
    """A = e^{α/p′}(z), B = z^{-1}e^{α/p′-α/p}(z), L̃ = Ỹ(ω), H = A + B, H̃ = A + νB."""
    omega = conformal_vector(P)
    virasoro = vertex_field("L", omega, window)
    current = vertex_field("A", State.exponential(P.alpha_over_pprime), window)
    minus = vertex_field("E", State.exponential(P.minus_alpha_over_p), window)
    difference = vertex_field("G", State.exponential(P.difference_charge), window)
    shifted = difference.shifted(1)
    shifted.name = "B"
    coupling = nu(P)
    h = current + shifted
    h.name = "H"
    htilde = current + shifted.scaled(coupling)
    htilde.name = "H~"
    direct = virasoro + minus.shifted(1)
    direct.name = "L + z^-1 E"
    return NamedFields(
        window=window,
        nu=coupling,
        identity=identity_field(window),
        virasoro=virasoro,
        screening_current=current,
        minus_screening_current=minus,
        difference=difference,
        shifted_difference=shifted,
        ltilde=ytilde(omega, window, "L~"),
        ltilde_direct=direct,
        h=h,
        htilde=htilde,
        lbar=lbar_field(window),
    )


def delta_field_deform(target: Field, fields: NamedFields, k_max: int = DEFORMATION_ORDER_LIMIT) -> Field:
    """Δ(H̃(z), z₁)·target = exp(Σ_{n>=1} H̃_n/(-n)·(-z₁)^{-n})·target, evaluated at z₁ = z.

    H̃_n acts by n-th products; n stops below the locality order of H̃ with
    each term, and the exponential stops at the first level that vanishes on
    the window.
    """
    window = fields.window
    htilde = fields.htilde
    if field_vanishes(nth_product(htilde, 0, target, window), window) is not None:
        raise DomainError(f"H~_0 does not annihilate {target.name}")
    total = target
    level: List[Tuple[int, Field]] = [(0, target)]
    r = 0
    while level:
        r += 1
        nxt: List[Tuple[int, Field]] = []
        for shift, f in level:
            order = locality_order(htilde, f, k_max, window)
            for n in range(1, order):
                term = nth_product(htilde, n, f, window)
                if field_vanishes(term, window) is None:
                    continue
                c = Fraction((-1) ** (n + 1), n * r)
                # z₁ stays formal until the end
                nxt.append((shift + n, term.scaled(c)))
        level = nxt
        for shift, f in level:
            total = total + f.shifted(shift)
    logger.debug(f"Δ(H~) deformation of {target.name} stopped after {r} levels")
    total.name = f"Delta(H~){target.name}"
    return total
