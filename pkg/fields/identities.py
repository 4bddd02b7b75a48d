"""Field identities of the extended algebra, checked mode by mode on a window."""
from __future__ import annotations

import itertools
import logging
import math
import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from engine.modes import conformal_vector, field_mode
from fields.field import (
    Field,
    Mismatch,
    TruncationWindow,
    compare_fields,
    derivative,
    field_vanishes,
    intertwiner_field,
    locality_order,
    nth_product,
    residue_product,
    zero_field,
)
from fields.named import NamedFields, build_named_fields, delta_field_deform
from lattice.fock import Params, State, weight
from reports.schema import Check, run_check, state_terms

logger = logging.getLogger(__name__)

COM_FIELD_RANGE = range(-2, 3)
RESIDUE_MODES = (-1, 0, 1, 2)
RESIDUE_SAMPLES = 24


def _mismatch(m: Optional[Mismatch]) -> Dict[str, str]:
    if m is None:
        return {}
    return {"sector": m.sector, "source": m.source, "mode": str(m.mode), "difference": m.difference}


def _equal(a: Field, b: Field, window: TruncationWindow) -> Tuple[bool, Dict]:
    found = compare_fields(a, b, window)
    return found is None, _mismatch(found)


def _zero(a: Field, window: TruncationWindow) -> Tuple[bool, Dict]:
    found = field_vanishes(a, window)
    return found is None, _mismatch(found)


def ytilde_of(nf: NamedFields, v: State, weight_hint: Fraction) -> Field:
    if not v:
        return zero_field(weight_hint, nf.window.size)
    return nf.ytilde(v)


def pom_identities(nf: NamedFields) -> List[Check]:
    window = nf.window
    A, B, G, L = nf.screening_current, nf.shifted_difference, nf.difference, nf.ltilde
    dg = derivative(G).shifted(1)
    anchor = "products of the screening current with L~"
    return [
        run_check("A_1 L~ = A + B", lambda: _equal(nth_product(A, 1, L, window), A + B, window), anchor),
        run_check("B_1 L~ = 0", lambda: _zero(nth_product(B, 1, L, window), window), anchor),
        run_check("A_0 L~ = nu z^-1 DG",
                  lambda: _equal(nth_product(A, 0, L, window), dg.scaled(nf.nu), window), anchor),
        run_check("B_0 L~ = -z^-1 DG",
                  lambda: _equal(nth_product(B, 0, L, window), dg.scaled(-1), window), anchor),
    ]


def h_identities(nf: NamedFields) -> List[Check]:
    window = nf.window
    H, Ht, L = nf.h, nf.htilde, nf.ltilde
    anchor = "products of H and H~ with L~"

    def l0_h_differs():
        found = compare_fields(nth_product(L, 0, H, window), derivative(H), window)
        return found is not None, _mismatch(found)

    return [
        run_check("L~ = L + z^-1 E", lambda: _equal(L, nf.ltilde_direct, window), "definition of L~"),
        run_check("H~_0 L~ = 0", lambda: _zero(nth_product(Ht, 0, L, window), window), anchor),
        run_check("H~_1 L~ = H", lambda: _equal(nth_product(Ht, 1, L, window), H, window), anchor),
        run_check("H~_2 L~ = 0", lambda: _zero(nth_product(Ht, 2, L, window), window), anchor),
        run_check("H~_3 L~ = 0", lambda: _zero(nth_product(Ht, 3, L, window), window), anchor),
        run_check("L~_1 H = H", lambda: _equal(nth_product(L, 1, H, window), H, window), anchor),
        run_check("L~_0 H != DH", l0_h_differs, anchor),
        run_check("L~_0 H~ = DH",
                  lambda: _equal(nth_product(L, 0, Ht, window), derivative(H), window), "commutator of L~ with H~"),
        run_check("L~_1 H~ = H",
                  lambda: _equal(nth_product(L, 1, Ht, window), H, window), "commutator of L~ with H~"),
    ]


def com_field(nf: NamedFields) -> Check:
    """[L~_{n+1}, H~_m] against -m·H_{m+n} (pass criterion) and the literal H_{m+n}."""
    window = nf.window
    P = window.params
    L, H, Ht = nf.ltilde, nf.h, nf.htilde

    def body():
        literal_failures = []
        first_failure: Dict = {}
        for n in COM_FIELD_RANGE:
            for m in COM_FIELD_RANGE:
                literal_ok = True
                for sector, u in window.basis:
                    if weight(u, P) - n - m > window.max_weight:
                        continue
                    vec = window.unit(sector, u)
                    bracket = L.apply(n + 1, Ht.apply(m, vec)) - Ht.apply(m, L.apply(n + 1, vec))
                    target = H.apply(m + n, vec)
                    if bracket != target * (-m) and not first_failure:
                        first_failure = {"n": str(n), "m": str(m), "source": u.format(),
                                         "difference": (bracket - target * (-m)).format(window)}
                    if bracket != target:
                        literal_ok = False
                if not literal_ok:
                    literal_failures.append(f"(n={n}, m={m})")
        witness = {
            "derived_form": "[L~_{n+1}, H~_m] = -m H_{m+n}",
            "literal_form": "[L~_{n+1}, H~_m] = H_{m+n}",
            "literal_form_fails_at": literal_failures,
        }
        witness.update(first_failure)
        return not first_failure, witness

    return run_check("[L~_{n+1}, H~_m] = -m H_{m+n} for n, m in -2..2", body, "commutator of L~ with H~")


def structure_identities(nf: NamedFields) -> List[Check]:
    window = nf.window
    B, G, L, plain = nf.shifted_difference, nf.difference, nf.ltilde, nf.virasoro
    dg = derivative(G).shifted(1)
    anchor = "structure of the extended local system"
    return [
        run_check("L~_0 B = z^-1 DG", lambda: _equal(nth_product(L, 0, B, window), dg, window), anchor),
        run_check("L_0 B = z^-1 DG (untilded L)", lambda: _equal(nth_product(plain, 0, B, window), dg, window), anchor),
        run_check("z^-2 G = -DB + L~_0 B",
                  lambda: _equal(G.shifted(2), derivative(B).scaled(-1) + nth_product(L, 0, B, window), window), anchor),
    ]


def singular_generators(nf: NamedFields, k_max: int = 3) -> Check:
    """U = L~_0 - D sends z^{-k}G to k·z^{-k-1}G, so U^k B = k!·z^{-k-1}G."""
    window = nf.window
    L, G = nf.ltilde, nf.difference

    def u_op(f: Field) -> Field:
        return nth_product(L, 0, f, window) - derivative(f)

    def body():
        current = G.shifted(1)
        for k in range(1, k_max + 1):
            step = compare_fields(u_op(G.shifted(k)), G.shifted(k + 1).scaled(k), window)
            if step is not None:
                return False, {"k": str(k), "identity": "U(z^-k G) = k z^-k-1 G", **_mismatch(step)}
            current = u_op(current)
            power = compare_fields(current, G.shifted(k + 1).scaled(math.factorial(k)), window)
            if power is not None:
                return False, {"k": str(k), "identity": "U^k B = k! z^-k-1 G", **_mismatch(power)}
        return True, {"k_max": str(k_max)}

    return run_check("singular generators U^k(z^-1 G)", body, "singular vectors of the quotient")


def virasoro_deformation_hypotheses(nf: NamedFields) -> List[Check]:
    window = nf.window
    P = window.params
    L, H = nf.ltilde, nf.h
    checks = []
    for n in range(0, 4):
        expected = H if n == 0 else zero_field(H.weight - n, window.size)
        checks.append(run_check(
            f"L~_{n + 1} H = {'H' if n == 0 else '0'}",
            lambda n=n, expected=expected: _equal(nth_product(L, n + 1, H, window), expected, window),
            "Lbar = L~ + z^-1 H is a Virasoro field",
        ))

    def commuting():
        for i in COM_FIELD_RANGE:
            for j in COM_FIELD_RANGE:
                for sector, u in window.basis:
                    if weight(u, P) - i - j > window.max_weight:
                        continue
                    vec = window.unit(sector, u)
                    bracket = H.apply(i, H.apply(j, vec)) - H.apply(j, H.apply(i, vec))
                    if bracket:
                        return False, {"i": str(i), "j": str(j), "source": u.format(), "bracket": bracket.format(window)}
        return True, {}

    checks.append(run_check("[H_i, H_j] = 0", commuting, "Lbar = L~ + z^-1 H is a Virasoro field"))
    return checks


def homomorphism_check(nf: NamedFields, a: State, b: State, modes: Sequence[int]) -> List[Check]:
    """Y~(a)_n Y~(b) = Y~(a_n b)."""
    window = nf.window
    P = window.params
    ya, yb = nf.ytilde(a), nf.ytilde(b)
    checks = []
    for n in modes:
        def body(n=n):
            product = field_mode(a, n, b, P)
            image = ytilde_of(nf, product, ya.weight + yb.weight - n - 1)
            ok, witness = _equal(nth_product(ya, n, yb, window), image, window)
            witness["a_n b"] = state_terms(product, P)
            return ok, witness
        checks.append(run_check(f"Y~(w)_{n} Y~(w) = Y~(w_{n} w)", body, "W(p,p') maps homomorphically into the local system"))
    return checks


def screening_commutator_check(nf: NamedFields, vectors: Sequence[Tuple[str, State]]) -> List[Check]:
    """[H~_0, Y~(a)] = 0 for a in the kernel of both screenings."""
    window = nf.window
    checks = []
    for label, v in vectors:
        checks.append(run_check(
            f"[H~_0, Y~({label})] = 0",
            lambda v=v: _zero(nth_product(nf.htilde, 0, nf.ytilde(v), window), window),
            "H~_0 commutes with Y~ on the kernel",
        ))
    return checks


def deformation_check(nf: NamedFields) -> Check:
    def body():
        deformed = delta_field_deform(nf.ltilde, nf)
        return _equal(deformed, nf.lbar, nf.window)

    return run_check("Delta(H~(z), z1) L~ = Lbar", body, "deformation of L~ by Delta(H~)")


def residue_cross_check(nf: NamedFields, modes: Sequence[int] = RESIDUE_MODES, samples: int = RESIDUE_SAMPLES,
                        seed: int = 0) -> Check:
    """The n-th product formula agrees with the two-variable residue expansion.

    Every ordered pair of A, H~ and L~ is compared on a seeded random draw of
    window basis vectors (all of them when the window is smaller than the draw).
    """
    window = nf.window
    P = window.params
    named = (("A", nf.screening_current), ("H~", nf.htilde), ("L~", nf.ltilde))
    basis = list(window.basis)
    drawn = random.Random(seed).sample(basis, min(samples, len(basis)))

    def body():
        for (na, a), (nb, b) in itertools.product(named, repeat=2):
            for n in modes:
                product = nth_product(a, n, b, window)
                for sector, u in drawn:
                    vec = window.unit(sector, u)
                    for m in window.output_modes(weight(u, P), product.weight):
                        direct = product.apply(m, vec)
                        residue = residue_product(a, n, b, m, vec, window)
                        if direct != residue:
                            return False, {
                                "pair": f"{na}, {nb}", "n": str(n), "m": str(m), "source": u.format(),
                                "difference": (direct - residue).format(window),
                            }
        return True, {"pairs": str(len(named) ** 2), "modes": [str(n) for n in modes], "vectors": str(len(drawn))}

    return run_check("n-th product = residue expansion", body, "n-th product of local fields")


def identity_suite(P: Params, window: TruncationWindow, kernel_vectors: Sequence[Tuple[str, State]] = ()) -> List[Check]:
    nf = build_named_fields(P, window)
    omega = conformal_vector(P)
    checks: List[Check] = []
    checks += pom_identities(nf)
    checks += h_identities(nf)
    checks.append(com_field(nf))
    checks += structure_identities(nf)
    checks.append(singular_generators(nf))
    checks += virasoro_deformation_hypotheses(nf)
    checks += homomorphism_check(nf, omega, omega, range(0, 4))
    checks += screening_commutator_check(nf, [("omega", omega)] + list(kernel_vectors))
    checks.append(deformation_check(nf))
    checks.append(residue_cross_check(nf))
    return checks


def locality_checks(nf: NamedFields, k_max: int = 4) -> List[Check]:
    window = nf.window
    named = [("A", nf.screening_current), ("L~", nf.ltilde), ("H", nf.h), ("H~", nf.htilde)]
    checks = []
    for i, (na, a) in enumerate(named):
        for nb, b in named[i:]:
            def body(a=a, b=b):
                order = locality_order(a, b, k_max, window)
                return True, {"order": str(order), "k_max": str(k_max)}
            checks.append(run_check(f"locality of {na} with {nb}", body, "mutual locality of the generators"))
    return checks


def intertwiner_locality_checks(P: Params, window: TruncationWindow, v: State, k_max: int = 4) -> List[Check]:
    """Y~_M(v) against A and L~ on V(p,p′) ⊕ MV(p,p′)."""
    nf = build_named_fields(P, window)
    yv = intertwiner_field("Y~_M(v)", v, window)
    checks = []
    for name, other in (("A", nf.screening_current), ("L~", nf.ltilde)):
        def body(other=other):
            order = locality_order(yv, other, k_max, window)
            return True, {"order": str(order), "k_max": str(k_max), "v": state_terms(v, P)}
        check = run_check(f"locality of Y~_M(v) with {name}", body, "fields over V(p,p') + MV(p,p')")
        check.informational = True
        checks.append(check)
    return checks
