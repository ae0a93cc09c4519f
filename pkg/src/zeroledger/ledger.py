"""Six-case certification of the weighted zero-sum inequality.

Builds one certificate per subcase from recomputed constituent bounds,
assembles the report with its table-reproduction ledger, searches the
feasibility frontier in delta, and stress-tests the assemblies with an
adversarial configuration search.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from .errors import (
    DomainError,
    InfeasibleParametersError,
    NoFeasiblePointError,
    ZeroLedgerError,
)
from .rbound import HeadScenario
from .tables import BoundBook, TableReproduction, reproduce_tables, round_up

EPS_NUM_DEFAULT = 1e-9

CASE_WINDOWS: dict[int, tuple[float, float]] = {
    1: (0.0, 0.08),
    2: (0.08, 0.3),
    3: (0.3, 0.4),
    4: (0.4, 0.5),
    5: (0.5, 0.6),
    6: (0.6, math.inf),
}

CASE_LAMBDA: dict[int, float] = {
    1: 3.08,
    2: 1.58,
    3: 1.29,
    4: 1.273,
    5: 1.311,
    6: 1.348,
}

CASE_GAP_RULES: dict[int, tuple[tuple[int, float], ...]] = {
    1: ((1, 3.08),),
    2: ((1, 1.58),),
    3: ((1, 1.29),),
    4: ((1, 1.08), (2, 1.36)),
    5: ((1, 0.92), (2, 0.97)),
    6: ((2, 0.702),),
}

PAPER_CASE_VALUES: dict[tuple[int, str], float] = {
    (1, "audit"): 0.951,
    (2, "one isolated term"): 0.8919,
    (3, "one isolated term"): 0.9015,
    (4, "one isolated term"): 0.97,
    (4, "two terms, distinct classes"): 0.8266,
    (4, "two terms, common class"): 0.9307,
    (5, "one isolated term"): 0.9550,
    (5, "two terms, common class"): 0.9737,
    (5, "two terms, distinct classes"): 0.9950,
    (6, "pooled classes"): 0.9862,
}


@dataclass(frozen=True)
class CaseGapProfile:
    """Structural constraints on the smallest zero for one case.

    gap_rules lists (count_limit, range_end) pairs: at most count_limit
    weighted terms lie at or below range_end.  The lambda11 windows of the
    six cases partition [c0, infinity).
    """

    case_id: int
    lambda11_range: tuple[float, float]
    gap_rules: tuple[tuple[int, float], ...]
    Lambda: float


def case_profile(case_id: int, c0: float = 0.01) -> CaseGapProfile:
    if case_id not in CASE_WINDOWS:
        raise DomainError(f"case_id must be 1..6, got {case_id!r}")
    if not 0.0 < c0 <= 0.08:
        raise DomainError(f"need 0 < c0 <= 0.08, got {c0!r}")
    lo, hi = CASE_WINDOWS[case_id]
    if case_id == 1:
        lo = c0
    return CaseGapProfile(
        case_id=case_id,
        lambda11_range=(lo, hi),
        gap_rules=CASE_GAP_RULES[case_id],
        Lambda=CASE_LAMBDA[case_id],
    )


@dataclass(frozen=True)
class CaseCertificate:
    """Worst-case bound on the squared weighted sums for one subcase."""

    case_id: int
    subcase: str
    sum_bound: float
    components: dict
    passed: bool
    paper_value: Optional[float] = None
    discrepancy: Optional[str] = None


@dataclass(frozen=True)
class VerificationReport:
    delta: float
    c0: float
    table_reproductions: tuple[TableReproduction, ...]
    case_certificates: tuple[CaseCertificate, ...]
    c1: Optional[float]
    overall_pass: Optional[bool]
    delta_search_trace: Optional[dict] = None

    def to_json_dict(self) -> dict:
        doc: dict = {
            "delta": self.delta,
            "c0": self.c0,
            "tables": [
                {
                    "id": row.row_id,
                    "paper": row.paper,
                    "computed": row.computed if row.feasible else None,
                    "margin": row.margin if row.feasible else None,
                    "feasible": row.feasible,
                }
                for row in self.table_reproductions
            ],
            "cases": [
                {
                    "case": cert.case_id,
                    "subcase": cert.subcase,
                    "bound": cert.sum_bound if math.isfinite(cert.sum_bound) else None,
                    "paper": cert.paper_value,
                    "pass": cert.passed,
                    "components": dict(cert.components),
                    "discrepancy": cert.discrepancy,
                }
                for cert in self.case_certificates
            ],
            "c1": self.c1 if self.c1 is not None and math.isfinite(self.c1) else None,
            "overall_pass": self.overall_pass,
        }
        if self.delta_search_trace is not None:
            doc["search"] = self.delta_search_trace
        return doc


def split_s(lambdas, delta: float, Lambda: float) -> tuple[float, float, float]:
    """Tail/head split of the weighted sum at the threshold Lambda.

    T counts every term at the clipped position max(lambda, Lambda); R is
    the remainder, so S = T + R holds by construction.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"need 0 < delta < 1, got {delta!r}")
    if not Lambda > 0.0:
        raise DomainError(f"need Lambda > 0, got {Lambda!r}")
    dinv = 1.0 / delta
    s_total = 0.0
    t_total = 0.0
    for lam in lambdas:
        if lam < 0.0:
            raise DomainError(f"zero position must be >= 0, got {lam!r}")
        s_total += math.exp(-dinv * lam)
        t_total += math.exp(-dinv * max(lam, Lambda))
    return t_total, s_total - t_total, s_total


def case_assemble_single(
    delta: float, T1: float, maxT_rest: float, sumT: float, R1: float
) -> float:
    """One isolated head term: (R1 + T1)^2 plus the pooled tail square."""
    _check_assembly_inputs(delta, (T1, maxT_rest, sumT, R1))
    return (R1 + T1) ** 2 + maxT_rest * sumT


def case_assemble_head(
    delta: float,
    S_head,
    maxR_rest: float,
    sumR_rest: float,
    maxT_rest: float,
    sumT: float,
    T_head_cap: float,
) -> float:
    """Head/tail assembly for the structured cases.

    Head classes enter as explicit (R, T) caps; the remaining classes are
    pooled through their max and sum caps.  The subtraction removes the
    head portion of the pooled tail product, which the monotone-in-T
    substitution argument licenses only when every head T cap is at least
    maxT_rest.
    """
    flat = [v for pair in S_head for v in pair]
    _check_assembly_inputs(delta, flat + [maxR_rest, sumR_rest, maxT_rest, sumT, T_head_cap])
    total = 0.0
    for r_cap, t_cap in S_head:
        total += (r_cap + t_cap) ** 2
    total += maxT_rest * (sumT + 2.0 * sumR_rest)
    total += maxR_rest * sumR_rest
    total -= maxT_rest * (len(S_head) * T_head_cap)
    return total


def _check_assembly_inputs(delta: float, values) -> None:
    if not 0.0 < delta < 1.0:
        raise DomainError(f"need 0 < delta < 1, got {delta!r}")
    for v in values:
        if not (math.isfinite(v) and v >= 0.0):
            raise DomainError(f"assembly inputs must be finite and >= 0, got {v!r}")


CASE1_CONSTANT = 134.0
CASE1_CONSTANT_FLOOR = 50.0 * (2.0 + 0.675)
CASE1_REFERENCE = 0.951


def case1_audit(delta: float, c0: float = 0.01, eps_num: float = EPS_NUM_DEFAULT) -> CaseCertificate:
    """Recompute the gap-window envelope h and audit its claimed shape.

    h(lam) = e^{-2 lam / delta} + 134 e^{-2 Lambda} with Lambda the larger
    of 3.08 and log(1/lam).  The envelope is convex below the kink at
    e^{-3.08} and decreasing above it, so its sup over [c0, 0.08] is
    attained at c0 or at the kink.  The reference endpoint value is
    recorded next to the recomputed one; agreement is not required.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"need 0 < delta < 1, got {delta!r}")
    if not 0.0 < c0 <= 0.08:
        raise DomainError(f"need 0 < c0 <= 0.08, got {c0!r}")
    two_a = 2.0 / delta
    kink = math.exp(-3.08)
    tail_const = CASE1_CONSTANT * math.exp(-2.0 * 3.08)

    def h(lam: float) -> float:
        if lam >= kink:
            return math.exp(-two_a * lam) + tail_const
        return math.exp(-two_a * lam) + CASE1_CONSTANT * lam * lam

    h_c0 = h(c0)
    h_kink = h(kink)
    h_hi = h(0.08)
    sum_bound = max(h_c0, h_kink) if c0 < kink else h_c0

    # shape checks on 101-point grids: convex below the kink (positive
    # second differences), decreasing above it
    convex_ok = True
    if c0 < kink:
        pts = [c0 + i * (kink - c0) / 100.0 for i in range(101)]
        for a, b, c in zip(pts, pts[1:], pts[2:]):
            if h(a) - 2.0 * h(b) + h(c) <= 0.0:
                convex_ok = False
                break
    decreasing_ok = True
    start = max(c0, kink)
    pts = [start + i * (0.08 - start) / 100.0 for i in range(101)]
    for a, b in zip(pts, pts[1:]):
        if h(b) > h(a) + 1e-15:
            decreasing_ok = False
            break
    constant_ok = CASE1_CONSTANT >= CASE1_CONSTANT_FLOOR

    discrepancy = None
    if abs(h_kink - CASE1_REFERENCE) > 5e-3:
        discrepancy = (
            f"recomputed kink value {h_kink:.6f} differs from the reference "
            f"{CASE1_REFERENCE} by {h_kink - CASE1_REFERENCE:+.4f}"
        )
    passed = (
        sum_bound + eps_num < 1.0 and convex_ok and decreasing_ok and constant_ok
    )
    return CaseCertificate(
        case_id=1,
        subcase="audit",
        sum_bound=sum_bound,
        components={
            "h_at_c0": h_c0,
            "h_at_kink": h_kink,
            "h_at_0.08": h_hi,
            "kink": kink,
            "envelope_constant": CASE1_CONSTANT,
            "envelope_constant_floor": CASE1_CONSTANT_FLOOR,
            "convexity_ok": 1.0 if convex_ok else 0.0,
            "decreasing_ok": 1.0 if decreasing_ok else 0.0,
        },
        passed=passed,
        paper_value=CASE1_REFERENCE,
        discrepancy=discrepancy,
    )


def _scenario(Lambda: float, l1: float, l2: float, ls: float, restricted: bool) -> HeadScenario:
    return HeadScenario(
        Lambda=Lambda, lambda1=l1, lambda2=l2, lambda_star=ls, restricted=restricted
    )


def _certificate(
    case_id: int,
    subcase: str,
    sum_bound: float,
    components: dict,
    eps_num: float,
) -> CaseCertificate:
    return CaseCertificate(
        case_id=case_id,
        subcase=subcase,
        sum_bound=sum_bound,
        components=components,
        passed=sum_bound + eps_num < 1.0,
        paper_value=PAPER_CASE_VALUES.get((case_id, subcase)),
    )


def verify_case(
    case_id: int,
    delta: float,
    c0: float = 0.01,
    book: Optional[BoundBook] = None,
    eps_num: float = EPS_NUM_DEFAULT,
) -> list[CaseCertificate]:
    """Certificates for every subcase of one case, constituents recomputed."""
    profile = case_profile(case_id, c0)
    if case_id == 1:
        return [case1_audit(delta, c0, eps_num)]
    if book is None:
        book = BoundBook(delta)
    if book.delta != delta:
        raise DomainError(
            f"bound book built for delta={book.delta!r}, case asked for {delta!r}"
        )
    L = profile.Lambda
    lam_min = profile.lambda11_range[0]

    if case_id == 2 or case_id == 3:
        T1 = round_up(book.t_staircase(L, lam_min).bound)
        maxT = round_up(book.t_staircase(L, L).bound)
        sumT = round_up(book.t_exponential(L).bound)
        R1 = book.weight(lam_min)
        value = case_assemble_single(delta, T1, maxT, sumT, R1)
        return [
            _certificate(
                case_id,
                "one isolated term",
                value,
                {
                    "Lambda": L,
                    "R1": R1,
                    "T1": T1,
                    "maxT": maxT,
                    "sumT": sumT,
                    "i0": 1,
                },
                eps_num,
            )
        ]

    if case_id == 4:
        (one_limit, one_end), (two_limit, two_end) = profile.gap_rules
        T1 = round_up(book.t_staircase(L, lam_min).bound)
        sumT = round_up(book.t_exponential(L).bound)
        R1 = round_up(book.r_head(_scenario(L, lam_min, one_end, one_end, True)).bound)
        maxR = round_up(book.r_head(_scenario(L, one_end, one_end, one_end, True)).bound)
        sumR = round_up(book.r_head(_scenario(L, one_end, one_end, one_end, False)).bound)
        maxT = round_up(book.t_staircase(L, one_end).bound)
        v_a = case_assemble_head(delta, [(R1, T1)], maxR, sumR, maxT, sumT, 0.0)
        gap = round_up(book.gap(lam_min, L))
        maxT_two = round_up(book.t_staircase(two_end, two_end).bound)
        v_b = case_assemble_head(
            delta, [(gap, T1), (gap, T1)], 0.0, 0.0, maxT_two, sumT, 0.0
        )
        v_c = case_assemble_head(
            delta, [(2.0 * gap, T1)], 0.0, 0.0, maxT_two, sumT, 0.0
        )
        return [
            _certificate(
                case_id,
                "one isolated term",
                v_a,
                {
                    "Lambda": L,
                    "R1": R1,
                    "T1": T1,
                    "maxR": maxR,
                    "sumR": sumR,
                    "maxT": maxT,
                    "sumT": sumT,
                    "i0": 1,
                },
                eps_num,
            ),
            _certificate(
                case_id,
                "two terms, distinct classes",
                v_b,
                {
                    "Lambda": L,
                    "R1": gap,
                    "R2": gap,
                    "T1": T1,
                    "T2": T1,
                    "maxT": maxT_two,
                    "sumT": sumT,
                    "i0": 2,
                },
                eps_num,
            ),
            _certificate(
                case_id,
                "two terms, common class",
                v_c,
                {
                    "Lambda": L,
                    "R1": 2.0 * gap,
                    "T1": T1,
                    "maxT": maxT_two,
                    "sumT": sumT,
                    "i0": 1,
                },
                eps_num,
            ),
        ]

    if case_id == 5:
        (one_limit, one_end), (two_limit, two_end) = profile.gap_rules
        T1 = round_up(book.t_staircase(L, lam_min).bound)
        sumT = round_up(book.t_exponential(L).bound)
        R1_a = round_up(book.r_head(_scenario(L, lam_min, one_end, one_end, True)).bound)
        maxR_a = round_up(book.r_head(_scenario(L, one_end, one_end, one_end, True)).bound)
        sumR_a = round_up(book.r_head(_scenario(L, one_end, one_end, one_end, False)).bound)
        maxT_a = round_up(book.t_staircase(L, one_end).bound)
        v_a = case_assemble_head(delta, [(R1_a, T1)], maxR_a, sumR_a, maxT_a, sumT, 0.0)
        R1_b = round_up(
            book.r_head(_scenario(L, lam_min, lam_min, two_end, True)).bound
        )
        maxR_b = round_up(book.r_head(_scenario(L, two_end, two_end, two_end, True)).bound)
        sumR_b = round_up(book.r_head(_scenario(L, two_end, two_end, two_end, False)).bound)
        maxT_b = round_up(book.t_staircase(L, two_end).bound)
        v_b = case_assemble_head(delta, [(R1_b, T1)], maxR_b, sumR_b, maxT_b, sumT, T1)
        R_c = round_up(book.r_head(_scenario(L, lam_min, two_end, two_end, True)).bound)
        v_c = case_assemble_head(
            delta, [(R_c, T1), (R_c, T1)], maxR_b, sumR_b, maxT_b, sumT, T1
        )
        return [
            _certificate(
                case_id,
                "one isolated term",
                v_a,
                {
                    "Lambda": L,
                    "R1": R1_a,
                    "T1": T1,
                    "maxR": maxR_a,
                    "sumR": sumR_a,
                    "maxT": maxT_a,
                    "sumT": sumT,
                    "i0": 1,
                },
                eps_num,
            ),
            _certificate(
                case_id,
                "two terms, common class",
                v_b,
                {
                    "Lambda": L,
                    "R1": R1_b,
                    "T1": T1,
                    "maxR": maxR_b,
                    "sumR": sumR_b,
                    "maxT": maxT_b,
                    "sumT": sumT,
                    "T_head_cap": T1,
                    "i0": 1,
                },
                eps_num,
            ),
            _certificate(
                case_id,
                "two terms, distinct classes",
                v_c,
                {
                    "Lambda": L,
                    "R1": R_c,
                    "R2": R_c,
                    "T1": T1,
                    "T2": T1,
                    "maxR": maxR_b,
                    "sumR": sumR_b,
                    "maxT": maxT_b,
                    "sumT": sumT,
                    "T_head_cap": T1,
                    "i0": 2,
                },
                eps_num,
            ),
        ]

    # case 6: both preassigned terms pool into the rest caps
    (two_limit, two_end), = profile.gap_rules
    maxR = round_up(book.r_head(_scenario(L, lam_min, lam_min, two_end, True)).bound)
    sumR = round_up(book.r_head(_scenario(L, lam_min, lam_min, two_end, False)).bound)
    maxT = round_up(book.t_staircase(L, lam_min).bound)
    sumT = round_up(book.t_exponential(L).bound)
    value = case_assemble_head(delta, [], maxR, sumR, maxT, sumT, 0.0)
    return [
        _certificate(
            case_id,
            "pooled classes",
            value,
            {
                "Lambda": L,
                "maxR": maxR,
                "sumR": sumR,
                "maxT": maxT,
                "sumT": sumT,
                "i0": 0,
            },
            eps_num,
        )
    ]


def verify_all(
    delta: float,
    c0: float = 0.01,
    eps_num: float = EPS_NUM_DEFAULT,
    grid_points: int = 201,
    include_tables: bool = True,
    parallel: bool = False,
    threads: Optional[int] = None,
) -> VerificationReport:
    """Full report: table ledger, all six cases, c1 for cases (2)-(6).

    The case-(1) certificate is an audit artifact; c1 and overall_pass
    cover cases (2)-(6).  Failures are reported in the certificates, not
    raised.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"need 0 < delta < 1, got {delta!r}")
    if not c0 > 0.0:
        raise DomainError(f"need c0 > 0, got {c0!r}")
    book = BoundBook(delta, grid_points)
    tables = (
        reproduce_tables(book, parallel=parallel, threads=threads)
        if include_tables
        else ()
    )
    certs: list[CaseCertificate] = []
    for case_id in range(1, 7):
        try:
            certs.extend(verify_case(case_id, delta, c0, book=book, eps_num=eps_num))
        except (InfeasibleParametersError, NoFeasiblePointError) as exc:
            certs.append(
                CaseCertificate(
                    case_id=case_id,
                    subcase="infeasible",
                    sum_bound=math.nan,
                    components={},
                    passed=False,
                    discrepancy=f"constituent bound infeasible: {exc}",
                )
            )
    scored = [c for c in certs if c.case_id >= 2]
    finite = [c.sum_bound for c in scored if math.isfinite(c.sum_bound)]
    if finite and len(finite) == len(scored):
        c1: Optional[float] = 1.0 - max(finite)
        overall = all(c.passed for c in scored)
    else:
        c1 = None
        overall = False
    return VerificationReport(
        delta=delta,
        c0=c0,
        table_reproductions=tuple(tables),
        case_certificates=tuple(certs),
        c1=c1,
        overall_pass=overall,
    )


def delta_search(
    lo: float,
    hi: float,
    tol: float,
    c0: float = 0.01,
    eps_num: float = EPS_NUM_DEFAULT,
    grid_points: int = 201,
) -> tuple[float, dict]:
    """Smallest passing delta over [lo, hi] by feasibility bisection.

    Feasibility of a probe means verify_all at that delta passes cases
    (2)-(6).  Returns the smallest passing probe and a trace holding every
    probe, the certified bracket, and a monotonicity flag.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got {lo!r}, {hi!r}")
    if not tol > 0.0:
        raise DomainError(f"need tol > 0, got {tol!r}")

    probes: list[tuple[float, bool]] = []

    def feasible(d: float) -> bool:
        report = verify_all(
            d, c0, eps_num=eps_num, grid_points=grid_points, include_tables=False
        )
        ok = bool(report.overall_pass)
        probes.append((d, ok))
        return ok

    max_bisect = max(1, math.ceil(math.log2((hi - lo) / tol)))

    # the relative guard absorbs representation error when hi - lo was
    # meant to equal tol exactly
    if hi - lo <= tol * (1.0 + 1e-9):
        ok = feasible(lo)
        return _search_result(lo if ok else math.nan, probes, "degenerate-interval")

    lo_ok = feasible(lo)
    hi_ok = feasible(hi)
    if lo_ok and hi_ok:
        for i in range(1, 6):
            feasible(lo + i * (hi - lo) / 6.0)
        return _search_result(lo, probes, "all-pass")
    if not lo_ok and not hi_ok:
        for i in range(1, 6):
            feasible(lo + i * (hi - lo) / 6.0)
        best = min((d for d, ok in probes if ok), default=math.nan)
        return _search_result(best, probes, "all-fail" if math.isnan(best) else "bracketed")

    # one endpoint passes: bisect the pass/fail boundary
    if lo_ok:
        good, bad = lo, hi
    else:
        good, bad = hi, lo
    for _ in range(max_bisect):
        if abs(bad - good) <= tol:
            break
        mid = 0.5 * (good + bad)
        if feasible(mid):
            good = mid
        else:
            bad = mid
    interior = sum(1 for d, _ in probes if d not in (lo, hi))
    for i in range(1, 6 - interior):
        d = lo + i * (hi - lo) / 6.0
        if all(abs(d - p) > 1e-12 for p, _ in probes):
            feasible(d)
    best = min(d for d, ok in probes if ok)
    return _search_result(best, probes, "bracketed")


def _search_result(
    delta_min: float, probes: list[tuple[float, bool]], status: str
) -> tuple[float, dict]:
    passing = [d for d, ok in probes if ok]
    failing = [d for d, ok in probes if not ok]
    ordered = sorted(probes)
    monotone = True
    seen_fail = False
    for _, ok in ordered:
        if not ok:
            seen_fail = True
        elif seen_fail:
            monotone = False
            break
    trace = {
        "probes": [[d, ok] for d, ok in probes],
        "status": status,
        "feasible_max": max(passing) if passing else None,
        "infeasible_min": min(failing) if failing else None,
        "monotone": monotone,
    }
    return delta_min, trace


NOMINAL_REST_CLASSES = 4


def adversary_audit(
    case_id: int,
    delta: float,
    c0: float = 0.01,
    budget: int = 1000,
    seed: int = 0,
    book: Optional[BoundBook] = None,
) -> tuple[tuple, float]:
    """Hill-climbing search for zero configurations that stress a case.

    Candidate configurations obey the case's gap profile and the exact cap
    set its certificates consumed (per-class and pooled T/R caps), and the
    direct evaluation of the squared weighted sums via split_s must stay
    below the matching subcase certificate.  A violation raises; the worst
    configuration found and its value are returned.
    """
    profile = case_profile(case_id, c0)
    certs = verify_case(case_id, delta, c0, book=book)
    rng = random.Random(0xA5E + seed * 1009 + case_id)

    worst_value = -math.inf
    worst_config: tuple = ()

    nominal = _nominal_config(profile, certs[0])
    value = _config_value(nominal, delta)
    _check_against(certs[0], value, nominal)
    worst_value, worst_config = value, nominal
    if budget <= 0:
        return worst_config, worst_value

    for restart in range(budget):
        cert = certs[restart % len(certs)]
        config = _sample_config(profile, cert, delta, rng)
        if config is None:
            continue
        config = _hill_climb(config, profile, cert, delta, rng)
        value = _config_value(config, delta)
        _check_against(cert, value, config)
        if value > worst_value:
            worst_value, worst_config = value, config
    return worst_config, worst_value


def _check_against(cert: CaseCertificate, value: float, config: tuple) -> None:
    if value > cert.sum_bound + 1e-9:
        raise ZeroLedgerError(
            f"adversary value {value} exceeds certificate {cert.sum_bound} "
            f"for case {cert.case_id} ({cert.subcase}); config {config}"
        )


def _config_value(config: tuple, delta: float) -> float:
    total = 0.0
    for cls in config:
        _, _, s = split_s(cls, delta, 1.0)
        total += s * s
    return total


def _nominal_config(profile: CaseGapProfile, cert: CaseCertificate) -> tuple:
    """Head zeros at their preassigned minima, no rest classes."""
    lam_min = profile.lambda11_range[0]
    i0 = int(cert.components.get("i0", 1))
    if profile.case_id == 6:
        rule_count, rule_end = profile.gap_rules[0]
        return ((lam_min,) * rule_count,)
    if i0 == 2:
        return ((lam_min,), (lam_min,))
    if profile.case_id in (4, 5) and cert.subcase == "two terms, common class":
        return ((lam_min, lam_min),)
    return ((lam_min,),)


def _head_caps(cert: CaseCertificate) -> list[tuple[float, float]]:
    comps = cert.components
    i0 = int(comps.get("i0", 0))
    caps: list[tuple[float, float]] = []
    if i0 >= 1 and "R1" in comps:
        caps.append((comps["R1"], comps.get("T1", 0.0)))
    if i0 >= 2:
        caps.append((comps.get("R2", comps["R1"]), comps.get("T2", comps.get("T1", 0.0))))
    return caps


def _low_term_count(cert: CaseCertificate) -> int:
    if cert.subcase.startswith("two terms"):
        return 2
    if cert.subcase == "pooled classes":
        return 0
    return 1


def _active_rules(profile: CaseGapProfile, n_low: int) -> tuple[tuple[int, float], ...]:
    # subcases with n_low preassigned low terms sit in the branch where
    # every tighter rule already failed, so only rules admitting n_low
    # terms constrain the configuration
    if n_low <= 0:
        return profile.gap_rules
    return tuple(r for r in profile.gap_rules if r[0] >= n_low)


def _rest_floor(profile: CaseGapProfile, n_low: int) -> float:
    if profile.case_id in (2, 3):
        return profile.Lambda
    if profile.case_id == 6:
        return profile.lambda11_range[0]
    rules = _active_rules(profile, max(n_low, 1))
    return rules[0][1]


def _sample_config(
    profile: CaseGapProfile,
    cert: CaseCertificate,
    delta: float,
    rng: random.Random,
) -> Optional[tuple]:
    """One random configuration consistent with the subcase branch."""
    lo, hi = profile.lambda11_range
    hi = min(hi, 5.0)
    n_low = _low_term_count(cert)
    head_caps = _head_caps(cert)
    low_ceiling = _rest_floor(profile, n_low)
    classes: list[tuple] = []
    low_remaining = n_low
    for head_idx, (r_cap, t_cap) in enumerate(head_caps):
        if head_idx == 0:
            zeros = [rng.uniform(lo, hi)]
        else:
            zeros = [rng.uniform(lo, min(low_ceiling, 5.0))]
        low_remaining -= 1
        if low_remaining > 0 and len(head_caps) == 1:
            # common-class subcases put the second low term next to the first
            zeros.append(rng.uniform(zeros[0], low_ceiling))
            low_remaining -= 1
        n_extra = rng.randrange(0, 3)
        zeros.extend(rng.uniform(low_ceiling, 5.0) for _ in range(n_extra))
        classes.append(tuple(sorted(zeros)))
    n_rest = rng.randrange(0, 5)
    for _ in range(n_rest):
        n_zeros = rng.randrange(1, 7)
        zeros = sorted(rng.uniform(low_ceiling, 5.0) for _ in range(n_zeros))
        classes.append(tuple(zeros))
    config = tuple(classes)
    if _violates_caps(config, profile, cert, delta):
        return None
    return config


def _violates_caps(
    config: tuple, profile: CaseGapProfile, cert: CaseCertificate, delta: float
) -> bool:
    comps = cert.components
    L = comps.get("Lambda", profile.Lambda)
    head_caps = _head_caps(cert)
    n_head = len(head_caps)
    n_low = _low_term_count(cert)
    max_t = comps.get("maxT", comps.get("sumT", math.inf))
    max_r = comps.get("maxR", 0.0)
    sum_r_cap = comps.get("sumR", 0.0)
    sum_t_cap = comps.get("sumT", math.inf)
    lo = profile.lambda11_range[0]
    for cls in config:
        for lam in cls:
            if lam < lo:
                return True
    for count_limit, range_end in _active_rules(profile, n_low):
        total_below = sum(
            sum(1 for lam in cls if lam <= range_end) for cls in config
        )
        if total_below > count_limit:
            return True
    sum_t = 0.0
    sum_r_rest = 0.0
    for idx, cls in enumerate(config):
        t_val, r_val, _ = split_s(cls, delta, L)
        sum_t += t_val
        if idx < n_head:
            r_cap, t_cap = head_caps[idx]
            if r_val > r_cap or t_val > t_cap:
                return True
        else:
            if t_val > max_t or r_val > max_r:
                return True
            sum_r_rest += r_val
    if sum_t > sum_t_cap or sum_r_rest > sum_r_cap:
        return True
    return False


def _hill_climb(
    config: tuple,
    profile: CaseGapProfile,
    cert: CaseCertificate,
    delta: float,
    rng: random.Random,
    steps: int = 12,
) -> tuple:
    best = config
    best_value = _config_value(config, delta)
    for _ in range(steps):
        mutated = _mutate(best, rng)
        if mutated is None or _violates_caps(mutated, profile, cert, delta):
            continue
        value = _config_value(mutated, delta)
        if value > best_value:
            best, best_value = mutated, value
    return best


def _mutate(config: tuple, rng: random.Random) -> Optional[tuple]:
    if not config:
        return None
    classes = [list(cls) for cls in config]
    ci = rng.randrange(len(classes))
    if not classes[ci]:
        return None
    zi = rng.randrange(len(classes[ci]))
    factor = math.exp(rng.uniform(-0.25, 0.1))
    classes[ci][zi] = max(1e-6, classes[ci][zi] * factor)
    classes[ci].sort()
    return tuple(tuple(cls) for cls in classes)
