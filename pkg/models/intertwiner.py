"""The deformed intertwiner Ỹ(v, z) = 𝒴(Δ(e^{-α/p}, z)v, z) from V(p,p′) to MV(p,p′), v ∈ M."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from engine.deform import delta_apply
from engine.modes import DomainError, field_mode, mode_index, screening_Q, screening_Qtilde
from lattice.cosets import mv_module, summand_acts, vpp_module
from lattice.fock import Params, State, weight
from models.kernels import lowest_kernel_vector

logger = logging.getLogger(__name__)


def intertwining_mode(x: State, n, u: State, P: Params) -> State:
    """𝒴(x)_n u for x in the α/2-shifted cosets and u ∈ V(p,p′), by the summand rule."""
    source, algebra = mv_module(P), vpp_module(P)
    if not source.contains(x):
        raise DomainError(f"intertwiner argument has charges outside {source.name}")
    if not algebra.contains(u):
        raise DomainError(f"intertwiner input has charges outside {algebra.name}")
    n = mode_index(n)
    out = []
    for i, xi in enumerate(source.split(x)):
        if not xi:
            continue
        for j, uj in enumerate(algebra.split(u)):
            if uj and summand_acts(i, j):
                out.append(field_mode(xi, n, uj, P))
    return State.sum(out)


def _require_doublet(v: State, P: Params) -> None:
    coset = P.half_alpha.k % P.norm
    if any(m.charge.k % P.norm != coset for m in v.terms):
        raise DomainError("intertwiner needs a vector of V_{L+α/2}")
    if screening_Q(v, P) or screening_Qtilde(v, P):
        raise DomainError("intertwiner needs a vector of M = Ker Q ∩ Ker Q̃")


def intertwiner_eval(v: State, n, u: State, P: Params) -> State:
    _require_doublet(v, P)
    n = mode_index(n)
    return State.sum(
        intertwining_mode(vj, n + e, u, P) for e, vj in delta_apply(v, P).terms
    )


@dataclass(frozen=True)
class IntertwinerWitness:
    v: State
    v_weight: Fraction
    mode: int
    u: State
    output: State


def nonzero_outputs(v: State, inputs: Sequence[State], P: Params, depth: int = 4) -> List[IntertwinerWitness]:
    """Scan modes downward from the highest possible one; keep the first nonzero output per input.

    The scan covers at least ``depth`` modes and always reaches n = -1, where the vacuum gives v back
    in the V_{L+α/2} component.
    """
    v_weight = max(weight(m, P) for m in v.terms)
    floor = mv_module(P).lowest_weight()
    found = []
    for u in inputs:
        top = math.floor(v_weight + max(weight(m, P) for m in u.terms) - 1 - floor)
        for n in range(top, min(top - depth, -2), -1):
            out = intertwiner_eval(v, n, u, P)
            if out:
                found.append(IntertwinerWitness(v, v_weight, n, u, out))
                break
    return found


def doublet_witness(P: Params, search_weight, inputs: Sequence[State]) -> Optional[List[IntertwinerWitness]]:
    """Nonzero intertwiner outputs for the lowest vector of M, or None if M is empty up to search_weight."""
    lowest = lowest_kernel_vector(P.half_alpha.k % P.norm, P, search_weight)
    if lowest is None:
        return None
    _, v = lowest
    return nonzero_outputs(v, inputs, P)
