"""Closed-form asymptotic and approximate optimal gains.

Collects the delay-free gain, the expensive-control limit (which doubles
as the fast-dynamics limit, since both share the expression
e^{T a} / (2 r |a|)), the small-delay linear correction, the cubic
stationarity equation of the small-delay expansion with its Cardano
solution, and the expensive-regime per-frequency cost gap.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError

# |a| T above which the small-delay expansion is used outside its regime.
_SMALL_DELAY_REGIME = 0.1


class Regime(Enum):
    DELAY_FREE = "delay_free"
    FAST_DYNAMICS = "fast_dynamics"
    EXPENSIVE = "expensive"
    SMALL_DELAY = "small_delay"
    SMALL_DELAY_CUBIC = "small_delay_cubic"


@dataclass(frozen=True)
class GainFormulaResult:
    k: float
    regime: Regime
    validity_hint: float


@dataclass(frozen=True)
class CostGapResult:
    gap: float
    limit_T_inf: float


def delay_free_gain(a: float, r: float) -> float:
    """Optimal gain a + sqrt(a^2 + 1/r) of the delay-free loop.

    Evaluated as 1 / (r (sqrt(a^2 + 1/r) - a)) for a <= 0, which avoids the
    catastrophic cancellation of the direct form as a -> -infinity.
    """
    if r <= 0.0:
        raise DomainError(f"control weight r must be > 0, got {r}")
    g = math.sqrt(a * a + 1.0 / r)
    if a > 0.0:
        return a + g
    return 1.0 / (r * (g - a))


def expensive_gain(a: float, T: float, r: float) -> GainFormulaResult:
    """Expensive-control (r -> inf) gain e^{T a} / (2 r |a|); needs a < 0.

    The same expression is the fast-dynamics (a -> -inf) limit, so no
    separate operation is exposed for that regime.
    """
    if a >= 0.0:
        raise DomainError("expensive-regime formula requires a < 0")
    if r <= 0.0 or T < 0.0:
        raise DomainError("requires r > 0 and T >= 0")
    k = math.exp(T * a) / (2.0 * r * abs(a))
    return GainFormulaResult(k=k, regime=Regime.EXPENSIVE, validity_hint=r)


def small_delay_gain(a: float, T: float, r: float) -> GainFormulaResult:
    """Small-delay gain k0 - (a k0 + 1/r) T.

    The correction coefficient a k0 + 1/r equals sqrt(a^2+1/r) / (r
    (sqrt(a^2+1/r) - a)) and is positive for every finite a, so the
    correction always shrinks the gain.  Warns when |a| T > 0.1, outside
    the expansion's regime.
    """
    if r <= 0.0 or T < 0.0:
        raise DomainError("requires r > 0 and T >= 0")
    k0 = delay_free_gain(a, r)
    if abs(a) * T > _SMALL_DELAY_REGIME:
        warnings.warn(
            f"small-delay formula used with |a|*T = {abs(a) * T:g} > "
            f"{_SMALL_DELAY_REGIME}; outside its validity regime",
            RuntimeWarning, stacklevel=2)
    k = k0 - (a * k0 + 1.0 / r) * T
    return GainFormulaResult(k=k, regime=Regime.SMALL_DELAY, validity_hint=T)


def _cubic_coefficients(a: float, T: float, r: float):
    # 2rT k^3 + (1 - 3Ta) r k^2 - 2ra k - (1 + Ta) = 0
    return 2.0 * r * T, (1.0 - 3.0 * T * a) * r, -2.0 * r * a, -(1.0 + T * a)


def cubic_residual(a: float, T: float, r: float, k: float) -> float:
    c3, c2, c1, c0 = _cubic_coefficients(a, T, r)
    return ((c3 * k + c2) * k + c1) * k + c0


def small_delay_cubic_root(a: float, T: float, r: float) -> float:
    """Positive real root of the small-delay stationarity cubic.

    Solved by Cardano's formula; the three-real-root case (negative
    discriminant combination D1^2 - 4 D0^3) goes through the trigonometric
    branch to stay in real arithmetic.  Descartes' rule gives exactly one
    positive root when 1 + T a > 0; if none emerges the parameters are
    outside the expansion's validity and DomainError is raised.
    """
    if T <= 0.0 or r <= 0.0:
        raise DomainError("requires T > 0 and r > 0")
    c3, c2, c1, c0 = _cubic_coefficients(a, T, r)

    # depressed cubic t^3 + p t + q, k = t - c2 / (3 c3)
    shift = c2 / (3.0 * c3)
    p = (3.0 * c3 * c1 - c2 * c2) / (3.0 * c3 * c3)
    q = (2.0 * c2 ** 3 - 9.0 * c3 * c2 * c1 + 27.0 * c3 * c3 * c0) \
        / (27.0 * c3 ** 3)

    disc = 4.0 * p ** 3 + 27.0 * q * q  # sign matches D1^2 - 4 D0^3
    roots = []
    if disc < 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)  # = (3q / 2p) sqrt(-3/p)
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg)
        for i in range(3):
            t = m * math.cos((theta - 2.0 * math.pi * i) / 3.0)
            roots.append(t - shift)
    else:
        s = math.sqrt(disc / 108.0)
        u = -q / 2.0 - math.copysign(s, q)
        w = math.copysign(abs(u) ** (1.0 / 3.0), u)
        t = w - p / (3.0 * w) if w != 0.0 else 0.0
        roots.append(t - shift)

    positive = [k for k in roots if k > 0.0]
    if not positive:
        raise DomainError(
            "cubic has no positive real root; parameters outside the "
            "small-delay expansion's validity")
    # Descartes guarantees uniqueness in the valid regime; under numerical
    # ties keep the root with the smallest cubic residual.
    k = min(positive, key=lambda x: abs(cubic_residual(a, T, r, x)))

    # Newton polish to pin the root well below the 1e-10 comparison level.
    for _ in range(3):
        fp = (3.0 * c3 * k + 2.0 * c2) * k + c1
        if fp == 0.0:
            break
        step = cubic_residual(a, T, r, k) / fp
        k -= step
        if abs(step) < 1e-15 * max(1.0, abs(k)):
            break
    return k


def expensive_cost_gap(a: float, T: float, r: float) -> CostGapResult:
    """Per-frequency cost inflation (1 - e^{2Ta}) / (8 r |a|^3) due to delay.

    Zero exactly at T = 0 and saturating at 1 / (8 r |a|^3) as T -> inf.
    """
    if a >= 0.0:
        raise DomainError("cost-gap formula requires a < 0")
    if r <= 0.0 or T < 0.0:
        raise DomainError("requires r > 0 and T >= 0")
    limit = 1.0 / (8.0 * r * abs(a) ** 3)
    gap = (1.0 - math.exp(2.0 * T * a)) * limit
    return CostGapResult(gap=gap, limit_T_inf=limit)
