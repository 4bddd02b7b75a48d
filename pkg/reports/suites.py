"""Verification suites behind `verify`.

Each suite expands into jobs; a job returns a list of checks. Jobs run on a
thread pool and the report is assembled in manifest order, so its content
does not depend on the number of workers.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from config.settings import TOOL_VERSION, ConfigError, RunConfig
from engine.deform import deformation_part, lbar_mode
from engine.modes import (
    central_charge,
    central_charge_from_modes,
    conformal_vector,
    screening_Q,
    screening_Qtilde,
    virasoro_mode,
)
from fields.field import TruncationWindow
from fields.identities import identity_suite, intertwiner_locality_checks, locality_checks
from fields.named import build_named_fields
from lattice.cosets import FourCosetModule, mv_module, vpp_module
from lattice.fock import FockMonomial, Params, State, graded_dimensions, graded_piece
from models.intertwiner import doublet_witness
from models.kernels import (
    coset_of,
    coset_weights,
    doublet_lowest_weight,
    graded_kernel,
    lowest_kernel_vector,
    stretch_primaries,
)
from models.logarithmic import coincidence_check, find_subsingular, rank3_certificate, subsingular_weight
from models.vpp import graded_dims
from reports.registry import SuiteRegistry, SuiteSpec
from reports.schema import Check, Report, make_check, rational, run_check, skipped, state_terms

logger = logging.getLogger(__name__)

Job = Callable[[], List[Check]]

REFERENCE_CHARGES = {(3, 2): Fraction(0), (5, 2): Fraction(-22, 5), (5, 3): Fraction(-3, 5)}
BRACKET_MODES = 3
SCREENING_COMMUTATOR_WEIGHT = 4
KERNEL_VECTOR_WEIGHT = 4
# Rank-3 witness on V(3,2) has N²·a(-1)1 = ±4·a(-1)e^{a/p′-a/p}; the sign depends on the cocycle.
LITERATURE_LAMBDA = Fraction(-4)


def _single(name: str, body) -> Job:
    return lambda: [run_check(name, body)]


def _weights_text(dims: Dict[Fraction, int]) -> Dict[str, int]:
    return {rational(w): d for w, d in sorted(dims.items())}


def _is_base_case(P: Params) -> bool:
    return (P.p, P.pprime) == (3, 2)


def _search_weight(cfg: RunConfig) -> Fraction:
    """How far to look for M: up to 3p-2 when p′ = 2, else the configured bound."""
    if cfg.pprime == 2:
        return max(cfg.weight_limit, Fraction(doublet_lowest_weight(cfg.params)))
    return cfg.weight_limit


# Central charge


def central_charge_suite(cfg: RunConfig) -> List[Job]:
    params = [cfg.params] + [Params(p, q) for (p, q) in REFERENCE_CHARGES if (p, q) != (cfg.p, cfg.pprime)]
    jobs = []
    for P in params:
        def body(P=P):
            c = central_charge(P)
            from_modes = central_charge_from_modes(P)
            expected = REFERENCE_CHARGES.get((P.p, P.pprime), c)
            return c == expected and from_modes == c, {
                "params": P.label(), "c": rational(c), "from_modes": rational(from_modes),
            }
        jobs.append(_single(f"central charge c{P.label()}", body))
    return jobs


# Virasoro brackets


def bracket_failure(mode: Callable[[int, State], State], basis: Sequence[FockMonomial], c: Fraction,
                    P: Params, bound: int = BRACKET_MODES) -> Optional[Dict[str, str]]:
    """First (m, n, u) violating [X(m), X(n)] = (m-n)X(m+n) + δ·(m³-m)c/12, or None."""
    for u in basis:
        v = State.monomial(u)
        for m in range(-bound, bound + 1):
            for n in range(-bound, m):
                lhs = mode(m, mode(n, v)) - mode(n, mode(m, v))
                rhs = mode(m + n, v) * (m - n)
                if m + n == 0:
                    rhs = rhs + v * (Fraction(m ** 3 - m, 12) * c)
                if lhs != rhs:
                    return {"m": str(m), "n": str(n), "source": u.format(), "difference": (lhs - rhs).format(P)}
    return None


def _bracket_jobs(label: str, module: FourCosetModule, mode, cfg: RunConfig) -> List[Job]:
    c = central_charge(module.params)
    jobs = []
    for w in module.weights_up_to(cfg.weight_limit):
        def body(w=w):
            basis = module.graded_piece(w)
            found = bracket_failure(mode, basis, c, module.params)
            return found is None, dict(found or {}, dim=str(len(basis)))
        jobs.append(_single(f"{label} bracket on {module.name} weight {rational(w)}", body))
    return jobs


def virasoro_bracket_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params
    return _bracket_jobs("Virasoro", vpp_module(P), lambda n, s: virasoro_mode(n, s, P), cfg)


def deformed_virasoro_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params
    jobs = []
    for module in (vpp_module(P), mv_module(P)):
        jobs += _bracket_jobs("Lbar", module, lambda n, s, module=module: lbar_mode(n, s, module), cfg)
    return jobs


# Screenings and kernels


def screening_kernel_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params
    omega = conformal_vector(P)
    jobs = [
        _single("Q omega = 0", lambda: (not screening_Q(omega, P), {"Q omega": state_terms(screening_Q(omega, P), P)})),
        _single("Q~ omega = 0", lambda: (not screening_Qtilde(omega, P), {"Q~ omega": state_terms(screening_Qtilde(omega, P), P)})),
    ]
    for w in coset_weights(0, min(cfg.weight_limit, SCREENING_COMMUTATOR_WEIGHT), P):
        def commutator(w=w):
            for u in graded_piece(0, w, P):
                v = State.monomial(u)
                bracket = screening_Q(screening_Qtilde(v, P), P) - screening_Qtilde(screening_Q(v, P), P)
                if bracket:
                    return False, {"source": u.format(), "bracket": state_terms(bracket, P)}
            return True, {}
        jobs.append(_single(f"[Q, Q~] = 0 on (V_L)_{rational(w)}", commutator))
    for w in coset_weights(0, cfg.weight_limit, P):
        jobs.append(_single(f"Ker Q ∩ Ker Q~ on (V_L)_{rational(w)}", _oracle_body(0, w, P)))
    return jobs


def _oracle_body(coset: int, w: Fraction, P: Params):
    def body():
        primary = graded_kernel(coset, w, P, "bareiss")
        oracle = graded_kernel(coset, w, P, "gauss")
        return primary.basis == oracle.basis, {
            "source_dim": str(primary.source_dim), "dim": str(primary.dim), "oracle_dim": str(oracle.dim),
        }
    return body


def doublet_kernel_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params
    coset = coset_of("M", P)
    search = _search_weight(cfg)
    weights = coset_weights(coset, search, P)
    jobs = [_single(f"Ker Q ∩ Ker Q~ on (V_{{L+a/2}})_{rational(w)}", _oracle_body(coset, w, P)) for w in weights]

    def lowest():
        dims = {w: graded_kernel(coset, w, P).dim for w in weights}
        nonzero = [w for w, d in dims.items() if d]
        found = nonzero[0] if nonzero else None
        witness = {"dims": _weights_text(dims), "lowest_weight": rational(found) if found is not None else "none"}
        if P.pprime != 2:
            return True, witness
        expected = doublet_lowest_weight(P)
        witness["expected_lowest_weight"] = str(expected)
        return found == expected, witness

    jobs.append(_single("lowest weight of M", lowest))
    return jobs


def basis_dims_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params
    jobs = []
    for module in (vpp_module(P), mv_module(P)):
        def body(module=module):
            dims = graded_dims(module, cfg.weight_limit)
            counted = graded_dimensions(module.classes, cfg.weight_limit, P)
            ok = dims == counted
            if _is_base_case(P) and module.label == "V":
                ok = ok and dims.get(Fraction(0)) == 2 and (cfg.weight_limit < 1 or dims.get(Fraction(1)) == 4)
            return ok, {"dims": _weights_text(dims)}
        jobs.append(_single(f"graded dimensions of {module.name}", body))
    return jobs


# Logarithmic structure


def _chain_lengths(cert) -> Dict[str, int]:
    return {rational(x.weight): x.max_chain for x in cert.per_weight}


def rank3_vpp_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params
    module = vpp_module(P)
    if cfg.weight_limit < 1:
        return [lambda: [skipped("rank 3 on V", "max_weight below 1")]]

    def job():
        cert = lru_cache(maxsize=None)(lambda: rank3_certificate(module, cfg.weight_limit))
        start = State.monomial(FockMonomial.of((1,), 0))
        companion = FockMonomial.of((1,), P.difference_charge)

        def overall():
            c = cert()
            return c.overall == 3, {"overall": str(c.overall), "chains": _chain_lengths(c)}

        def witness():
            c = cert()
            n2 = deformation_part(0, deformation_part(0, start, module), module)
            lam = n2.coefficient(companion)
            ok = c.chain_at(1) == 3 and lam != 0
            if _is_base_case(P):
                ok = ok and n2 == State.monomial(companion, lam) and abs(lam) == abs(LITERATURE_LAMBDA)
            return ok, {
                "witness_weight": rational(c.witness.weight) if c.witness else "none",
                "N^2 a(-1)1": state_terms(n2, P),
                "lambda": rational(lam),
                "literature_lambda": rational(LITERATURE_LAMBDA) if _is_base_case(P) else "n/a",
                "companion": companion.format(),
                "companion_alternative_spelling": "e^(a/p - a/p')",
            }

        def vacuum_chain():
            c = cert()
            return c.chain_at(0) == 2, {"chain": str(c.chain_at(0))}

        def derived_coefficient():
            out = lbar_mode(0, start, module).coefficient(companion)
            expected = 1 - Fraction(2 * (P.p - P.pprime) ** 2, P.p * P.pprime)
            return out == expected, {"coefficient": rational(out), "expected": rational(expected)}

        return [
            run_check("N^3 = 0 and nilpotent rank 3 on V", overall),
            run_check("rank-3 witness a(-1)1 on V", witness),
            run_check("weight-0 chain on V has length 2", vacuum_chain),
            run_check("coefficient of a(-1)e^G in Lbar(0)a(-1)1", derived_coefficient),
        ]

    return [job]


def subsingular_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params

    def job():
        record = lru_cache(maxsize=None)(lambda: find_subsingular(P))

        def located():
            r = record()
            h = subsingular_weight(P)
            ok = r.weight == h and r.vector.weights(P) == [h]
            if _is_base_case(P):
                ok = ok and r.vector == State.monomial(FockMonomial.of((4,), P.half_alpha))
            return ok, {"weight": rational(r.weight), "w": state_terms(r.vector, P)}

        def spans_target():
            r = record()
            ok = r.scale != 0 and r.q_image == State.monomial(r.target, r.scale)
            if _is_base_case(P):
                ok = ok and r.scale == -2 * P.p
            return ok, {
                "Q w": state_terms(r.q_image, P),
                "scale": rational(r.scale),
                "solution_kernel_dim": str(r.solution_dim),
                "oracle_kernel_dim": str(r.oracle_kernel_dim),
            }

        def double_screening():
            r = record()
            return bool(r.double_screening), {"2 Q~ Q w": state_terms(r.double_screening, P)}

        def n_squared():
            r = record()
            return bool(r.n_squared) and r.n_squared_matches, {
                "N^2 w": state_terms(r.n_squared, P),
                "equals 2 Q~ Q w": str(r.n_squared_matches).lower(),
            }

        return [
            run_check("subsingular vector weight", located),
            run_check("Q w spans the target line", spans_target),
            run_check("2 Q~ Q w != 0", double_screening),
            run_check("N^2 w = 2 Q~ Q w != 0", n_squared),
        ]

    return [job]


def rank3_mv_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params
    h = subsingular_weight(P)
    if cfg.weight_limit < h:
        return [lambda: [skipped("rank 3 on MV", f"max_weight below {rational(h)}")]]

    def body():
        cert = rank3_certificate(mv_module(P), cfg.weight_limit)
        ok = cert.overall == 3 and cert.chain_at(h) == 3
        if _is_base_case(P):
            ok = ok and cert.witness is not None and cert.witness.weight == h
        return ok, {
            "overall": str(cert.overall),
            "witness_weight": rational(cert.witness.weight) if cert.witness else "none",
            "chains": _chain_lengths(cert),
        }

    return [_single("N^3 = 0 and nilpotent rank 3 on MV", body)]


def coincidence_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params

    def job():
        record = coincidence_check(P, cfg.weight_limit)
        if not record.applies:
            return [skipped("V and MV share bases but not rank-3 weights", "coset classes of V and MV differ")]
        v_weight, mv_weight = record.witness_weights

        def body():
            return record.distinguished, {
                "bases_agree": str(record.bases_agree).lower(),
                "mismatched_weights": [rational(w) for w in record.mismatched_weights],
                "V_witness_weight": rational(v_weight) if v_weight is not None else "none",
                "MV_witness_weight": rational(mv_weight) if mv_weight is not None else "none",
            }

        return [run_check("V and MV share bases but not rank-3 weights", body)]

    return [job]


# Intertwiner


def intertwiner_inputs(P: Params) -> List[State]:
    return [
        State.vacuum(),
        conformal_vector(P),
        State.exponential(P.alpha_over_pprime),
        State.exponential(P.minus_alpha_over_p),
    ]


def intertwiner_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params

    def body():
        found = doublet_witness(P, _search_weight(cfg), intertwiner_inputs(P))
        if found is None:
            return P.pprime != 2, {"reason": "M is empty up to the search weight"}
        return bool(found), {
            "triples": [
                {
                    "v": state_terms(x.v, P),
                    "v_weight": rational(x.v_weight),
                    "mode": str(x.mode),
                    "u": state_terms(x.u, P),
                    "output": state_terms(x.output, P),
                }
                for x in found
            ],
        }

    return [_single("non-zero intertwining operator", body)]


# Fields


def _kernel_vectors(P: Params, bound: Fraction) -> List[Tuple[str, State]]:
    out = []
    for w in coset_weights(0, bound, P):
        for i, v in enumerate(graded_kernel(0, w, P).basis):
            out.append((f"K{rational(w)}.{i}", v))
    return out


def field_identities_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params

    def job():
        window = TruncationWindow.on_vpp(P, cfg.window_weight)
        vectors = _kernel_vectors(P, min(cfg.window_weight, KERNEL_VECTOR_WEIGHT))
        return identity_suite(P, window, vectors)

    return [job]


def locality_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params
    return [lambda: locality_checks(build_named_fields(P, TruncationWindow.on_vpp(P, cfg.window_weight)))]


def intertwiner_locality_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params

    def job():
        lowest = lowest_kernel_vector(coset_of("M", P), P, _search_weight(cfg))
        if lowest is None:
            return [skipped("locality of Y~_M(v)", "M is empty up to the search weight")]
        window = TruncationWindow.on_vpp_and_mv(P, cfg.window_weight)
        return intertwiner_locality_checks(P, window, lowest[1])

    return [job]


def stretch_suite(cfg: RunConfig) -> List[Job]:
    P = cfg.params

    def body():
        record = stretch_primaries(P, cfg.stretch_target)
        return record.primary_dim >= 3, {
            "weight": rational(record.weight),
            "source_dim": str(record.source_dim),
            "kernel_dim": str(record.kernel_dim),
            "primary_dim": str(record.primary_dim),
        }

    return [_single(f"primaries in Ker Q ∩ Ker Q~ at weight {cfg.stretch_target}", body)]


SUITES: Dict[str, Callable[[RunConfig], List[Job]]] = {
    "central_charge": central_charge_suite,
    "virasoro_bracket": virasoro_bracket_suite,
    "deformed_virasoro": deformed_virasoro_suite,
    "screening_kernel": screening_kernel_suite,
    "basis_dims": basis_dims_suite,
    "rank3_V": rank3_vpp_suite,
    "subsingular": subsingular_suite,
    "rank3_MV": rank3_mv_suite,
    "doublet_kernel": doublet_kernel_suite,
    "intertwiner": intertwiner_suite,
    "coincidence": coincidence_suite,
    "field_identities": field_identities_suite,
    "locality": locality_suite,
    "intertwiner_locality": intertwiner_locality_suite,
    "stretch": stretch_suite,
}


def _run_job(spec: SuiteSpec, job: Job) -> List[Check]:
    try:
        return job()
    except Exception as e:
        logger.error(f"suite {spec.id} raised: {e}")
        return [make_check(f"{spec.id} setup", False, spec.anchor, error=f"{type(e).__name__}: {e}")]


def plan(cfg: RunConfig, registry: SuiteRegistry) -> List[Tuple[SuiteSpec, Job]]:
    planned = []
    for spec in registry.select(cfg.module, cfg.stretch):
        builder = SUITES.get(spec.id)
        if builder is None:
            raise ConfigError(f"suite '{spec.id}' has no implementation")
        planned += [(spec, job) for job in builder(cfg)]
    return planned


def run_verification(cfg: RunConfig, registry: Optional[SuiteRegistry] = None) -> Report:
    registry = registry or SuiteRegistry()
    planned = plan(cfg, registry)
    logger.info(f"Running {len(planned)} jobs for module {cfg.module} on {cfg.params.label()} with {cfg.jobs} workers")
    with ThreadPoolExecutor(max_workers=cfg.jobs, thread_name_prefix="wlog") as pool:
        futures = [pool.submit(_run_job, spec, job) for spec, job in planned]
        results = [f.result() for f in futures]
    checks: List[Check] = []
    for (spec, _), found in zip(planned, results):
        for check in found:
            check.suite = spec.id
            if check.anchor is None:
                check.anchor = spec.anchor
            check.informational = check.informational or spec.informational
            checks.append(check)
    report = Report(tool_version=TOOL_VERSION, config=cfg.echo(), checks=checks)
    logger.info(f"Verification finished: {report.summary()}")
    return report
