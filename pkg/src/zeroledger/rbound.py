"""Head-sum bounds R(Lambda): the general kernel-budget route and the
count-dichotomy restricted route."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .errors import DomainError, InfeasibleParametersError, NoFeasiblePointError
from .kernel import KernelContext, monotone_ratio_coefficient, psi_quantities
from .optimizer import SearchSpec, minimize

_N0_CHOICES = (4, 5, 6)
_X_HI = 20.0


@dataclass(frozen=True)
class HeadScenario:
    """Preassigned smallest zeros lambda1 <= lambda2 and floor lambda_star for
    the third zero onward.  The kernel floor lambda0 is lambda1 itself."""

    Lambda: float
    lambda1: float
    lambda2: float
    lambda_star: float
    N0: Optional[int] = None
    restricted: bool = False

    def __post_init__(self) -> None:
        if not (0.0 < self.lambda1 <= self.lambda2 <= self.Lambda):
            raise DomainError(
                f"need 0 < lambda1 <= lambda2 <= Lambda, got "
                f"({self.lambda1!r}, {self.lambda2!r}, {self.Lambda!r})"
            )
        if not (0.0 < self.lambda_star <= self.Lambda):
            raise DomainError(
                f"need 0 < lambda_star <= Lambda, got {self.lambda_star!r}"
            )
        if self.N0 is not None:
            if not self.restricted:
                raise DomainError("N0 only applies to the restricted regime")
            if self.N0 not in _N0_CHOICES:
                raise DomainError(f"N0 must be one of {_N0_CHOICES}, got {self.N0!r}")

    @property
    def lambda0(self) -> float:
        return self.lambda1


@dataclass(frozen=True)
class RBoundResult:
    """Certified upper bound on R(Lambda) with branch and slack provenance."""

    bound: float
    branch: str  # "main" or "count_fallback"
    fallback_bound: Optional[float]
    x_used: float
    slacks: tuple[tuple[str, float], ...]
    n0_used: Optional[int] = None


def _check_delta(delta: float) -> float:
    if not (0.0 < delta < 1.0):
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")
    return 1.0 / delta


def _exp_gap(delta_inv: float, lam: float, Lambda: float) -> float:
    # e^(-delta_inv*lam) - e^(-delta_inv*Lambda), stable when lam nears Lambda
    return math.exp(-delta_inv * Lambda) * math.expm1(delta_inv * (Lambda - lam))


def _x_floor(delta: float, sc: HeadScenario) -> float:
    return max(0.8 * sc.lambda0, 2.0 * delta)


def r_bound_general(delta: float, sc: HeadScenario, x: float) -> RBoundResult:
    """Head bound with kernel budget (1 - xi)/(2 Delta); needs Delta > sqrt(xi).

    R(Lambda) <= sum of the two preassigned head gaps plus the monotone
    ratio coefficient times the leftover psi budget (clamped at zero: a
    negative budget certifies that no further term fits).
    """
    delta_inv = _check_delta(delta)
    floor = _x_floor(delta, sc)
    if x < floor:
        raise InfeasibleParametersError(
            f"x must be >= max(0.8 lambda0, 2 delta) = {floor}, got {x}"
        )
    ctx = KernelContext(x, sc.lambda0)
    q = psi_quantities(ctx, sc.Lambda)
    root_xi = math.sqrt(q.xi)
    if not q.delta > root_xi:
        raise InfeasibleParametersError(
            f"Delta = {q.delta} must exceed sqrt(xi) = {root_xi}"
        )
    coeff = monotone_ratio_coefficient(ctx, delta_inv, sc.Lambda, sc.lambda_star)
    head = _exp_gap(delta_inv, sc.lambda1, sc.Lambda) + _exp_gap(
        delta_inv, sc.lambda2, sc.Lambda
    )
    used = (q.psi_at(sc.lambda1) - q.psi_cap) + (q.psi_at(sc.lambda2) - q.psi_cap)
    budget = (1.0 - q.xi) / (2.0 * q.delta) - used
    return RBoundResult(
        bound=head + coeff * max(budget, 0.0),
        branch="main",
        fallback_bound=None,
        x_used=x,
        slacks=(
            ("x >= 0.8*lambda0", x - 0.8 * sc.lambda0),
            ("x >= 2*delta", x - 2.0 * delta),
            ("Delta > sqrt(xi)", q.delta - root_xi),
        ),
    )


def r_bound_restricted(delta: float, sc: HeadScenario, x: float) -> RBoundResult:
    """Count-dichotomy head bound; reports the max of both dichotomy branches.

    Main branch: the head gaps plus the coefficient times the shrunken
    budget (1 - N0 Delta^2)/(2 Delta).  Fallback branch: at most N0 - 1
    terms, bounded at their preassigned minima.  Either branch alone could
    be violated; their max is a certified bound.
    """
    delta_inv = _check_delta(delta)
    if not sc.restricted:
        raise DomainError("r_bound_restricted needs a restricted scenario")
    if sc.N0 is None:
        raise DomainError("r_bound_restricted needs N0 set on the scenario")
    floor = _x_floor(delta, sc)
    if x < floor:
        raise InfeasibleParametersError(
            f"x must be >= max(0.8 lambda0, 2 delta) = {floor}, got {x}"
        )
    ctx = KernelContext(x, sc.lambda0)
    q = psi_quantities(ctx, sc.Lambda)
    if not q.delta > 0.0:
        raise InfeasibleParametersError(f"Delta = {q.delta} must be positive")
    coeff = monotone_ratio_coefficient(ctx, delta_inv, sc.Lambda, sc.lambda_star)
    head = _exp_gap(delta_inv, sc.lambda1, sc.Lambda) + _exp_gap(
        delta_inv, sc.lambda2, sc.Lambda
    )
    used = (q.psi_at(sc.lambda1) - q.psi_cap) + (q.psi_at(sc.lambda2) - q.psi_cap)
    budget = (1.0 - sc.N0 * q.delta * q.delta) / (2.0 * q.delta) - used
    main = head + coeff * max(budget, 0.0)
    fallback = head + (sc.N0 - 3) * _exp_gap(delta_inv, sc.lambda_star, sc.Lambda)
    if main >= fallback:
        bound, branch = main, "main"
    else:
        bound, branch = fallback, "count_fallback"
    return RBoundResult(
        bound=bound,
        branch=branch,
        fallback_bound=fallback,
        x_used=x,
        slacks=(
            ("x >= 0.8*lambda0", x - 0.8 * sc.lambda0),
            ("x >= 2*delta", x - 2.0 * delta),
            ("Delta > 0", q.delta),
        ),
        n0_used=sc.N0,
    )


def optimize_r(delta: float, sc: HeadScenario) -> RBoundResult:
    """Minimize the applicable head bound over x, and over N0 when restricted
    and the scenario leaves it unset."""
    _check_delta(delta)
    x_lo = _x_floor(delta, sc)
    if not x_lo < _X_HI:
        raise NoFeasiblePointError(f"empty x window [{x_lo}, {_X_HI}]")

    if not sc.restricted:
        x, _ = _run_search(delta, sc, x_lo, r_bound_general)
        return r_bound_general(delta, sc, x)

    candidates = (sc.N0,) if sc.N0 is not None else _N0_CHOICES
    best: Optional[tuple[float, float, int]] = None
    for n0 in candidates:
        variant = replace(sc, N0=n0)
        try:
            x, value = _run_search(delta, variant, x_lo, r_bound_restricted)
        except NoFeasiblePointError:
            continue
        if best is None or value < best[1]:
            best = (x, value, n0)
    if best is None:
        raise NoFeasiblePointError(
            f"no feasible x in [{x_lo}, {_X_HI}] for any N0 in {candidates}"
        )
    return r_bound_restricted(delta, replace(sc, N0=best[2]), best[0])


def _run_search(delta: float, sc: HeadScenario, x_lo: float, evaluator) -> tuple[float, float]:
    def objective(pt: tuple) -> float:
        return evaluator(delta, sc, pt[0]).bound

    spec = SearchSpec(
        dims=1, boxes=((x_lo, _X_HI),), objective=objective, coarse_points=128
    )
    try:
        (x,), value = minimize(spec)
    except NoFeasiblePointError:
        # the Delta > sqrt(xi) window can be a sliver near small x that a
        # coarse full-box scan straddles; rescan that strip densely before
        # declaring the search infeasible
        strip_hi = min(max(x_lo + 1.0, 3.0), _X_HI)
        strip = SearchSpec(
            dims=1, boxes=((x_lo, strip_hi),), objective=objective, coarse_points=1024
        )
        (x,), value = minimize(strip)
    return x, value
