"""Vertex action of V(p,p′) on itself and on MV(p,p′)."""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, List

from engine.modes import DomainError, field_mode, mode_index
from lattice.cosets import FourCosetModule, mv_module, summand_acts, vpp_module
from lattice.fock import Params, State, graded_dimensions

logger = logging.getLogger(__name__)


def module_vertex_mode(module: FourCosetModule, u: State, n, v: State) -> State:
    """u_n·v for u ∈ V(p,p′) and v in ``module``; u_i acts on v_j iff the labels of i, j are disjoint."""
    P = module.params
    algebra = vpp_module(P)
    if not algebra.contains(u):
        raise DomainError(f"vertex operator of a state outside {algebra.name}")
    if not module.contains(v):
        raise DomainError(f"state has charges outside {module.name}")
    n = mode_index(n)
    out = []
    for i, ui in enumerate(algebra.split(u)):
        if not ui:
            continue
        for j, vj in enumerate(module.split(v)):
            if vj and summand_acts(i, j):
                out.append(field_mode(ui, n, vj, P))
    return State.sum(out)


def vpp_vertex_mode(u: State, n, v: State, P: Params) -> State:
    return module_vertex_mode(vpp_module(P), u, n, v)


def mv_vertex_mode(u: State, n, v: State, P: Params) -> State:
    return module_vertex_mode(mv_module(P), u, n, v)


def graded_dims(module: FourCosetModule, max_weight) -> Dict[Fraction, int]:
    """Dimensions per weight, summed over the four summands separately."""
    dims: Dict[Fraction, int] = {}
    for cls in module.classes:
        for w, d in graded_dimensions(cls, max_weight, module.params).items():
            dims[w] = dims.get(w, 0) + d
    return dict(sorted(dims.items()))


def summand_labels(module: FourCosetModule, s: State) -> List[int]:
    return [i for i, part in enumerate(module.split(s)) if part]
