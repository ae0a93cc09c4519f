"""Smoothing kernel, its Laplace transform, and the psi/xi/Delta quantities.

The kernel g is a degree-5 polynomial supported on [0, 2] with a triple
zero at u = 2.  Everything downstream consumes g only through the
transform G(z) = integral of g(u) exp(-u z) du over [0, 2] and its
scaled variant F_x(z) = G(z / x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, InfeasibleParametersError, ZeroLedgerError

# Branch switch for laplace_G: below this the closed form cancels badly.
SERIES_CUTOVER = 1e-2

_MAX_SERIES_TERMS = 4000


def eval_g(u: float) -> float:
    """Kernel value (2 - u)^3 (4 + 6u + u^2) / 30 on [0, 2]."""
    if not (0.0 <= u <= 2.0):
        raise DomainError(f"g is defined on [0, 2], got u={u!r}")
    c = 2.0 - u
    return c * c * c * (4.0 + u * (6.0 + u)) / 30.0


def _g_moment(k: int) -> float:
    # Moment of the expanded kernel (32 - 40u^2 + 20u^3 - u^5)/30 against
    # u^k over [0, 2], reduced to one positive rational.
    return 2.0 ** (k + 6) / ((k + 1) * (k + 3) * (k + 4) * (k + 6))


def _laplace_g_series(z: float) -> float:
    # G(z) = sum_k M_k (-z)^k / k! with M_k = _g_moment(k).  Every term is
    # positive for z < 0, and for 0 <= z < SERIES_CUTOVER the alternating
    # terms decay immediately, so the running sum never cancels.  The term
    # recurrence avoids forming 2^k and k! separately.
    term = _g_moment(0)
    total = term
    k = 0
    while k < _MAX_SERIES_TERMS:
        term *= 2.0 * (-z) * (k + 3) * (k + 6) / ((k + 2) * (k + 5) * (k + 7))
        total += term
        k += 1
        if k >= 12 and abs(term) <= 1e-17 * abs(total):
            break
        if math.isinf(total):
            break
    return total


def _reg_lower_gamma(a: int, w: float) -> float:
    # Regularized lower incomplete gamma P(a, w) for small integer a and
    # w > 0, split so neither branch cancels.
    if a == 1:
        return -math.expm1(-w)
    if w > 745.0:
        return 1.0
    if w <= a + 1.0:
        # tail series P = exp(-w) sum_{m >= a} w^m / m!
        t = w**a / math.factorial(a)
        s = t
        m = a + 1
        while t > 1e-17 * s:
            t *= w / m
            s += t
            m += 1
        return math.exp(-w) * s
    t = 1.0
    s = 1.0
    for m in range(1, a):
        t *= w / m
        s += t
    return 1.0 - math.exp(-w) * s


_CLOSED_COEFFS = ((0, 32.0), (2, -40.0), (3, 20.0), (5, -1.0))


def _laplace_g_closed(z: float) -> float:
    # Monomial integrals I_n = n! P(n+1, 2z) / z^(n+1) combined with the
    # expanded-kernel coefficients; fine once z is away from 0.
    w = 2.0 * z
    total = 0.0
    for n, c in _CLOSED_COEFFS:
        p = _reg_lower_gamma(n + 1, w)
        total += c * math.factorial(n) * p / z ** (n + 1)
    return total / 30.0


def laplace_G(z: float) -> float:
    """Transform of the kernel: integral of g(u) exp(-u z) du over [0, 2].

    Positive for every finite z.  Arguments below roughly -350 overflow
    the double range and come back as inf.
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"laplace_G needs finite z, got {z!r}")
    if z < SERIES_CUTOVER:
        return _laplace_g_series(z)
    return _laplace_g_closed(z)


@dataclass(frozen=True)
class KernelContext:
    """Scale x and zero floor lambda0 fixing the scaled kernel f_x."""

    x: float
    lambda0: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and self.x > 0.0):
            raise DomainError(f"KernelContext needs x > 0, got {self.x!r}")
        if not (math.isfinite(self.lambda0) and self.lambda0 >= 0.0):
            raise DomainError(
                f"KernelContext needs lambda0 >= 0, got {self.lambda0!r}"
            )


def eval_F(ctx: KernelContext, z: float) -> float:
    """Scaled transform F_x(z) = G(z / x); strictly decreasing in z."""
    return laplace_G(z / ctx.x)


@dataclass(frozen=True)
class PsiQuantities:
    """psi evaluator plus the xi, Delta, psi(Lambda) values at a fixed Lambda."""

    psi_at: Callable[[float], float]
    xi: float
    delta: float
    psi_cap: float


def psi_quantities(ctx: KernelContext, Lambda: float) -> PsiQuantities:
    """psi(lam) = F_x(lam - lambda0) / F_x(-lambda0), xi, Delta = psi(Lambda) - xi.

    Lambda may equal lambda0 (staircase grids start exactly at the floor).
    Delta can come out <= 0; feasibility is the caller's concern.
    """
    if not (math.isfinite(Lambda) and Lambda >= ctx.lambda0):
        raise DomainError(
            f"psi_quantities needs Lambda >= lambda0 = {ctx.lambda0}, got {Lambda!r}"
        )
    f0 = eval_F(ctx, -ctx.lambda0)
    if not f0 > 0.0:
        # g >= 0 makes this impossible; fail loudly if numerics ever break it.
        raise ZeroLedgerError(f"F_x(-lambda0) = {f0!r} is not positive")
    x = ctx.x
    lambda0 = ctx.lambda0

    def psi_at(lam: float) -> float:
        return laplace_G((lam - lambda0) / x) / f0

    xi = (16.0 * x / 15.0) / (6.0 * f0)
    psi_cap = psi_at(Lambda)
    return PsiQuantities(psi_at=psi_at, xi=xi, delta=psi_cap - xi, psi_cap=psi_cap)


def monotone_ratio_coefficient(
    ctx: KernelContext, delta_inv: float, Lambda: float, lambda_star: float
) -> float:
    """Extremal conversion factor (e^(-d*lam_star) - e^(-d*Lambda)) / (psi* - psi).

    Here d = delta_inv and psi* = psi(lambda_star), psi = psi(Lambda).  The
    factor turns kernel-weighted tail sums into exponential-weighted ones.
    Requires x >= 2/delta_inv; lambda_star must sit strictly below Lambda
    but may lie below the lambda0 floor (the ratio argument does not use
    the floor).
    """
    if not (math.isfinite(delta_inv) and delta_inv > 0.0):
        raise DomainError(f"delta_inv must be positive, got {delta_inv!r}")
    if ctx.x < 2.0 / delta_inv:
        raise InfeasibleParametersError(
            f"monotone ratio needs x >= 2/delta_inv = {2.0 / delta_inv}, got x={ctx.x}"
        )
    if not lambda_star < Lambda:
        raise DomainError(
            f"lambda_star must lie strictly below Lambda, "
            f"got {lambda_star!r} >= {Lambda!r}"
        )
    q = psi_quantities(ctx, Lambda)
    num = math.exp(-delta_inv * Lambda) * math.expm1(
        delta_inv * (Lambda - lambda_star)
    )
    den = q.psi_at(lambda_star) - q.psi_cap
    if not den > 0.0:
        # psi is strictly decreasing, so this cannot happen for lambda_star < Lambda
        raise ZeroLedgerError(f"psi(lambda_star) - psi(Lambda) = {den!r} not positive")
    return num / den
