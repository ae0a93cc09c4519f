"""Tail-sum bounds T(Lambda): the exponential B-function route and the
staircase zero-count route, plus the zero-count bound itself."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import DomainError, InfeasibleParametersError, NoFeasiblePointError
from .kernel import KernelContext, psi_quantities
from .optimizer import SearchSpec, _golden, minimize


@dataclass(frozen=True)
class BoundParams:
    """Free triple (x, y, z); restricted toggles the bounded-conductor regime."""

    x: float
    y: float
    z: float
    restricted: bool = False

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"BoundParams needs {name} > 0, got {v!r}")

    @property
    def k(self) -> float:
        # The restricted exponent is the general one minus 2/3, computed by
        # that subtraction so the identity holds exactly in floating point.
        k_general = 2.0 * (2.0 / 3.0 + 3.0 * self.x + self.y + self.z)
        if self.restricted:
            return k_general - 2.0 / 3.0
        return k_general


@dataclass(frozen=True)
class TBoundResult:
    """Certified upper bound on T(Lambda) with the inputs that justify it."""

    bound: float
    Lambda: float
    method: str  # "exponential" or "staircase"
    params: object  # BoundParams or StaircaseGrid
    slacks: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class StaircaseGrid:
    """Per-threshold count bounds after the nondecreasing envelope."""

    Lambda_points: tuple[float, ...]
    N_bounds: tuple[float, ...]
    x_choices: tuple[float, ...]
    tail: float


def b0(u: float, lam: float) -> float:
    """B_0(u, lam) = (1 - e^(-2 u lam)) / (6 lam) + (1 - e^(-u lam))^2 / lam^2."""
    if not (u > 0.0 and lam > 0.0):
        raise DomainError(f"b0 needs u > 0 and lam > 0, got u={u!r}, lam={lam!r}")
    double_part = -math.expm1(-2.0 * u * lam)
    single_part = -math.expm1(-u * lam)
    return double_part / (6.0 * lam) + single_part * single_part / (lam * lam)


def b_bound(p: BoundParams, Lambda: float) -> float:
    """B(x, y, z, Lambda) = (1/(xz)) (1/2 + (1/3 + x)/y) sqrt(B0(1/3+x+y, L) B0(z, L))."""
    if not Lambda > 0.0:
        raise DomainError(f"b_bound needs Lambda > 0, got {Lambda!r}")
    lead = (0.5 + (1.0 / 3.0 + p.x) / p.y) / (p.x * p.z)
    return lead * math.sqrt(b0(1.0 / 3.0 + p.x + p.y, Lambda) * b0(p.z, Lambda))


def _check_delta(delta: float) -> float:
    if not (0.0 < delta < 1.0):
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")
    return 1.0 / delta


def t_bound_exponential(delta: float, Lambda: float, p: BoundParams) -> TBoundResult:
    """T(Lambda) <= e^(-(1/delta - k) Lambda) B(x, y, z, Lambda), needs k <= 1/delta."""
    delta_inv = _check_delta(delta)
    if not Lambda > 0.0:
        raise DomainError(f"Lambda must be positive, got {Lambda!r}")
    slack = delta_inv - p.k
    if slack < 0.0:
        raise InfeasibleParametersError(
            f"k = {p.k} exceeds 1/delta = {delta_inv}; the density bound does not apply"
        )
    bound = math.exp(-slack * Lambda) * b_bound(p, Lambda)
    return TBoundResult(
        bound=bound,
        Lambda=Lambda,
        method="exponential",
        params=p,
        slacks=(("k <= 1/delta", slack),),
    )


_T_EXP_BOX = (1e-3, 1.0)


def optimize_t_exponential(delta: float, Lambda: float, restricted: bool) -> TBoundResult:
    """Search (x, y, z) over (0, 1]^3 minimizing t_bound_exponential under k <= 1/delta."""
    delta_inv = _check_delta(delta)
    if not Lambda > 0.0:
        raise DomainError(f"Lambda must be positive, got {Lambda!r}")

    def objective(pt: tuple) -> float:
        p = BoundParams(pt[0], pt[1], pt[2], restricted=restricted)
        return t_bound_exponential(delta, Lambda, p).bound

    def feasible(pt: tuple) -> bool:
        return BoundParams(pt[0], pt[1], pt[2], restricted=restricted).k <= delta_inv

    spec = SearchSpec(
        dims=3,
        boxes=(_T_EXP_BOX,) * 3,
        objective=objective,
        feasible=feasible,
        coarse_points=8,
    )
    pt, _ = minimize(spec)
    return t_bound_exponential(
        delta, Lambda, BoundParams(pt[0], pt[1], pt[2], restricted=restricted)
    )


def zero_count_bound(ctx: KernelContext, Lambda: float, eps: float = 0.0) -> float:
    """N <= 1/(Delta^2 - eps): count of zeros below Lambda, restricted regime."""
    if eps < 0.0:
        raise DomainError(f"eps must be >= 0, got {eps!r}")
    if ctx.x < 0.8 * ctx.lambda0:
        raise InfeasibleParametersError(
            f"zero count needs x >= 0.8 lambda0 = {0.8 * ctx.lambda0}, got x={ctx.x}"
        )
    q = psi_quantities(ctx, Lambda)
    if not (q.delta > 0.0 and q.delta * q.delta > eps):
        raise InfeasibleParametersError(
            f"Delta = {q.delta} fails Delta > 0 and Delta^2 > eps = {eps}"
        )
    return 1.0 / (q.delta * q.delta - eps)


_STAIR_X_HI = 10.0
# refinement drives the Abel sum's discretization slack below this
_REFINE_TOL = 1e-6
_REFINE_MAX_SPLITS = 3000
_TAIL_CUTS = (5.5, 6.0, 6.5, 7.0)
_TAIL_EXT_POINTS = 41
_GRID_CACHE: dict = {}
_PROBE_CACHE: dict = {}
_EXT_CACHE: dict = {}
_TAIL_CACHE: dict = {}


def _floor_count(value: float) -> float:
    # the count is an integer, so flooring a real bound keeps validity;
    # the guard only ever rounds up, which also keeps validity
    return float(math.floor(value + 1e-9))


def _count_grid(
    lambda0: float, Lambda: float, n: int, eps: float, x_lo: float
) -> tuple[tuple, tuple, tuple, float, float]:
    # The count grid depends on delta only through x_lo, so cache on that.
    key = (lambda0, Lambda, n, eps, x_lo)
    hit = _GRID_CACHE.get(key)
    if hit is not None:
        return hit
    if Lambda == 5.0:
        points: tuple[float, ...] = (5.0,)
    else:
        step = (5.0 - Lambda) / (n - 1)
        pts = [Lambda + i * step for i in range(n)]
        pts[-1] = 5.0
        points = tuple(pts)
    counts: list[float] = []
    xs: list[float] = []
    slack_x08 = math.inf
    slack_eps = math.inf
    for point in points:

        def objective(pt: tuple, _point: float = point) -> float:
            return zero_count_bound(KernelContext(pt[0], lambda0), _point, eps)

        spec = SearchSpec(
            dims=1,
            boxes=((x_lo, _STAIR_X_HI),),
            objective=objective,
            coarse_points=64,
        )
        try:
            (x_best,), value = minimize(spec)
        except NoFeasiblePointError:
            if not counts:
                raise InfeasibleParametersError(
                    f"no feasible x at the first staircase point "
                    f"Lambda={point} (lambda0={lambda0}, eps={eps})"
                )
            # envelope carry: the previous bound stays valid at larger Lambda
            # only as part of the running max, which is what the sum uses
            counts.append(counts[-1])
            xs.append(xs[-1])
            continue
        value = _floor_count(value)
        counts.append(max(value, counts[-1]) if counts else value)
        xs.append(x_best)
        slack_x08 = min(slack_x08, x_best - 0.8 * lambda0)
        q = psi_quantities(KernelContext(x_best, lambda0), point)
        slack_eps = min(slack_eps, q.delta * q.delta - eps)
    result = (points, tuple(counts), tuple(xs), slack_x08, slack_eps)
    _GRID_CACHE[key] = result
    return result


def _probe_count(
    lambda0: float, eps: float, x_lo: float, t: float, x_hint: float
) -> float:
    """Floored count bound at an off-grid threshold, searched near x_hint.

    A local search can only land on a suboptimal x, which gives a larger
    (still valid) bound, so the hint never threatens soundness.
    """
    key = (lambda0, eps, x_lo)
    bucket = _PROBE_CACHE.setdefault(key, {})
    hit = bucket.get(t)
    if hit is not None:
        return hit
    lo = max(x_lo, x_hint - 0.5)
    hi = min(_STAIR_X_HI, x_hint + 0.5)

    def f(x: float) -> float:
        try:
            return zero_count_bound(KernelContext(x, lambda0), t, eps)
        except InfeasibleParametersError:
            return math.inf

    _, value = _golden(f, lo, hi, 1e-8)
    if not math.isfinite(value):
        value = math.inf
    else:
        value = _floor_count(value)
    bucket[t] = value
    return value


def _hint_for(points: tuple, xs: tuple, t: float) -> float:
    if len(points) < 2:
        return xs[0]
    step = points[1] - points[0]
    idx = int((t - points[0]) / step)
    idx = min(max(idx, 0), len(xs) - 1)
    return xs[idx]


def _sharp_abel(
    points: tuple,
    counts: tuple,
    delta_inv: float,
    lambda0: float,
    eps: float,
    x_lo: float,
    xs: tuple,
) -> float:
    """Abel sum of the count staircase, with jump cells split adaptively.

    Any partition gives a valid bound; splitting a cell relocates part of
    its jump to a smaller weight, so refinement only sharpens.  Cells are
    split worst-first until the remaining discretization slack (an upper
    bound on what further splitting could save) falls below _REFINE_TOL.
    """
    w = [math.exp(-delta_inv * p) for p in points]
    total_base = counts[0] * w[0]
    heap: list = []
    for k in range(1, len(points)):
        jump = counts[k] - counts[k - 1]
        if jump > 0.0:
            excess = jump * (w[k - 1] - w[k])
            heapq.heappush(
                heap, (-excess, points[k - 1], points[k], counts[k - 1], counts[k])
            )
    remaining = -sum(item[0] for item in heap)
    splits = 0
    while heap and remaining > _REFINE_TOL and splits < _REFINE_MAX_SPLITS:
        neg_excess, t_l, t_r, c_l, c_r = heapq.heappop(heap)
        t_m = 0.5 * (t_l + t_r)
        c_m = _probe_count(lambda0, eps, x_lo, t_m, _hint_for(points, xs, t_m))
        # clamp: c_l and c_r stay valid at t_m by monotonicity of counts
        c_m = min(max(c_m, c_l), c_r)
        w_l = math.exp(-delta_inv * t_l)
        w_m = math.exp(-delta_inv * t_m)
        w_r = math.exp(-delta_inv * t_r)
        child_excess = 0.0
        for a, b, wa, wb in ((t_l, t_m, w_l, w_m), (t_m, t_r, w_m, w_r)):
            ca, cb = (c_l, c_m) if a == t_l else (c_m, c_r)
            if cb > ca:
                e = (cb - ca) * (wa - wb)
                child_excess += e
                heapq.heappush(heap, (-e, a, b, ca, cb))
        remaining += child_excess - (-neg_excess)
        splits += 1
    total = total_base
    for neg_excess, t_l, t_r, c_l, c_r in heap:
        total += (c_r - c_l) * math.exp(-delta_inv * t_l)
    return total


def _ext_grid(lambda0: float, eps: float, x_lo: float, cut: float) -> tuple:
    """Count grid on [5, cut] for the tail; truncated at infeasibility."""
    key = (lambda0, eps, x_lo, cut)
    hit = _EXT_CACHE.get(key)
    if hit is not None:
        return hit
    pts = [
        5.0 + i * (cut - 5.0) / (_TAIL_EXT_POINTS - 1) for i in range(_TAIL_EXT_POINTS)
    ]
    counts: list[float] = []
    kept: list[float] = []
    for t in pts:

        def objective(pt: tuple, _t: float = t) -> float:
            return zero_count_bound(KernelContext(pt[0], lambda0), _t, eps)

        spec = SearchSpec(
            dims=1,
            boxes=((x_lo, _STAIR_X_HI),),
            objective=objective,
            coarse_points=48,
        )
        try:
            _, value = minimize(spec)
        except NoFeasiblePointError:
            break
        value = _floor_count(value)
        counts.append(max(value, counts[-1]) if counts else value)
        kept.append(t)
    result = (tuple(kept), tuple(counts))
    _EXT_CACHE[key] = result
    return result


def _tail_bound_at_five(delta: float, lambda0: float, eps: float, x_lo: float) -> float:
    """Bound on T(5): the exponential route at 5, or a count staircase on
    [5, cut] plus the exponential route at the cut, whichever is least."""
    key = (delta, lambda0, eps, x_lo)
    hit = _TAIL_CACHE.get(key)
    if hit is not None:
        return hit
    delta_inv = 1.0 / delta
    best = optimize_t_exponential(delta, 5.0, restricted=True).bound
    for cut in _TAIL_CUTS:
        pts, counts = _ext_grid(lambda0, eps, x_lo, cut)
        if len(pts) < 2:
            continue
        stair = counts[0] * math.exp(-delta_inv * pts[0])
        for k in range(1, len(pts)):
            stair += (counts[k] - counts[k - 1]) * math.exp(-delta_inv * pts[k - 1])
        candidate = stair + optimize_t_exponential(delta, pts[-1], restricted=True).bound
        best = min(best, candidate)
    _TAIL_CACHE[key] = best
    return best


def t_bound_staircase(
    delta: float, Lambda: float, lambda0: float, n: int = 201, eps: float = 0.0
) -> TBoundResult:
    """Abel staircase bound on T(Lambda) for the restricted regime.

    Builds per-threshold zero-count bounds on an n-point grid from Lambda
    to 5 (each optimized over x), envelopes them to be nondecreasing, sums
    the staircase, and adds the optimized tail bound at 5.
    """
    delta_inv = _check_delta(delta)
    if not (0.0 < lambda0 <= Lambda <= 5.0):
        raise DomainError(
            f"need 0 < lambda0 <= Lambda <= 5, got lambda0={lambda0!r}, Lambda={Lambda!r}"
        )
    if n < 2:
        raise DomainError(f"staircase needs at least 2 grid points, got {n!r}")
    if eps < 0.0:
        raise DomainError(f"eps must be >= 0, got {eps!r}")
    x_lo = max(0.8 * lambda0, 2.0 * delta)
    if x_lo >= _STAIR_X_HI:
        raise InfeasibleParametersError(f"empty x window [{x_lo}, {_STAIR_X_HI}]")
    points, counts, xs, slack_x08, slack_eps = _count_grid(lambda0, Lambda, n, eps, x_lo)
    tail = _tail_bound_at_five(delta, lambda0, eps, x_lo)
    total = _sharp_abel(points, counts, delta_inv, lambda0, eps, x_lo, xs) + tail
    return TBoundResult(
        bound=total,
        Lambda=Lambda,
        method="staircase",
        params=StaircaseGrid(points, counts, xs, tail),
        slacks=(
            ("x >= 0.8*lambda0", slack_x08),
            ("x >= 2*delta", min(x - 2.0 * delta for x in xs)),
            ("Delta^2 > eps", slack_eps),
        ),
    )
