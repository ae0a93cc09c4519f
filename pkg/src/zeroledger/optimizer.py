"""Deterministic derivative-free minimization over small boxes.

A full coarse scan seeds coordinate-wise golden-section sweeps.  The result
is only ever used as an upper bound on the true minimum, so optimizer
quality affects sharpness, never soundness.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import DomainError, InfeasibleParametersError, NoFeasiblePointError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

Point = "tuple[float, ...]"


@dataclass
class SearchSpec:
    """Box-constrained search problem.

    objective maps a coordinate tuple to a float; feasible (optional) is a
    predicate on the same tuples.  An objective may also signal an
    infeasible point by raising InfeasibleParametersError.
    """

    dims: int
    boxes: Sequence[tuple[float, float]]
    objective: Callable[[tuple], float]
    feasible: Optional[Callable[[tuple], bool]] = None
    coarse_points: int = 8
    refine_tol: float = 1e-10
    max_iter: int = 10000

    def __post_init__(self) -> None:
        if not (1 <= self.dims <= 3):
            raise DomainError(f"dims must be 1..3, got {self.dims!r}")
        if len(self.boxes) != self.dims:
            raise DomainError(
                f"boxes must have {self.dims} entries, got {len(self.boxes)}"
            )
        for lo, hi in self.boxes:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise DomainError(f"degenerate box ({lo!r}, {hi!r})")
        if self.coarse_points < 4:
            raise DomainError(f"coarse_points must be >= 4, got {self.coarse_points!r}")
        if not self.refine_tol > 0.0:
            raise DomainError(f"refine_tol must be > 0, got {self.refine_tol!r}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter!r}")


def _linspace(lo: float, hi: float, n: int) -> list[float]:
    step = (hi - lo) / (n - 1)
    pts = [lo + i * step for i in range(n)]
    pts[-1] = hi
    return pts


def _golden(
    f: Callable[[float], float], a: float, b: float, xtol: float
) -> tuple[float, float]:
    # Standard golden-section shrink with best-seen tracking; the best-seen
    # value keeps the sweep monotone even on non-unimodal slices.
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc = f(c)
    fd = f(d)
    if fc <= fd:
        best_t, best_v = c, fc
    else:
        best_t, best_v = d, fd
    width = b - a
    xtol = max(xtol, 1e-15)
    if width <= xtol:
        return best_t, best_v
    n = math.ceil(math.log(width / xtol) / math.log(1.0 / GOLDEN))
    for _ in range(n):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
            t, v = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
            t, v = d, fd
        if v < best_v:
            best_t, best_v = t, v
    return best_t, best_v


def minimize(spec: SearchSpec) -> tuple[tuple, float]:
    """Best feasible point found and its value; deterministic for a fixed spec.

    Raises NoFeasiblePointError when the coarse scan finds nothing feasible.
    The refined value never exceeds the best coarse-scan value.
    """
    feasible = spec.feasible
    evals = [0]

    def probe(pt: tuple) -> float:
        evals[0] += 1
        if feasible is not None and not feasible(pt):
            return math.inf
        try:
            v = spec.objective(pt)
        except InfeasibleParametersError:
            return math.inf
        if not math.isfinite(v):
            return math.inf
        return v

    axes = [_linspace(lo, hi, spec.coarse_points) for lo, hi in spec.boxes]
    best_pt: Optional[tuple] = None
    best_val = math.inf
    # lexicographic scan order; ties keep the earliest point
    for pt in itertools.product(*axes):
        v = probe(pt)
        if v < best_val:
            best_pt, best_val = pt, v
    if best_pt is None:
        raise NoFeasiblePointError(
            f"coarse scan found no feasible point over {list(spec.boxes)!r}"
        )

    widths = [(hi - lo) / (spec.coarse_points - 1) for lo, hi in spec.boxes]
    cur = list(best_pt)
    while True:
        before = best_val
        for d in range(spec.dims):
            lo_d, hi_d = spec.boxes[d]
            a = max(lo_d, cur[d] - widths[d])
            b = min(hi_d, cur[d] + widths[d])
            if not b > a:
                continue

            def f_line(t: float, _d: int = d) -> float:
                q = list(cur)
                q[_d] = t
                return probe(tuple(q))

            t_best, v_best = _golden(f_line, a, b, spec.refine_tol * (hi_d - lo_d))
            if v_best < best_val:
                cur[d] = t_best
                best_val = v_best
                best_pt = tuple(cur)
        if before - best_val <= spec.refine_tol or evals[0] >= spec.max_iter:
            break
    return best_pt, best_val
