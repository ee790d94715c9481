"""Exact H2 cost and optimal proportional gain for a scalar retarded loop.

The plant is the scalar stochastic delay equation

    dx(t) = (a x(t) - k x(t - T)) dt + dw(t),

with open-loop coefficient ``a``, feedback gain ``k``, delay ``T >= 0`` and
control penalty ``r > 0``.  The stationary state variance f(k) has a known
closed form with three branches (hyperbolic for |k| < -a, a boundary value
at k = |a|, trigonometric for |a| < k < k_u), and the H2 design cost is
J(k) = (1 + r k^2) f(k).  Gains stabilize the loop exactly when they lie in
the open interval (a, k_u), where k_u solves

    T sqrt(k^2 - a^2) = arccos(a / k),   k > |a|.

The loop is stabilizable at all iff a T < 1.  Everything in this module is
a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import BoundaryError, DomainError, NoSolutionError

# Relative half-width of the exact-boundary and branch-averaging windows
# around k = |a| (cancellation control for l = sqrt(|k^2-a^2|) -> 0).
_BOUNDARY_TOL = 1e-10
_AVERAGING_TOL = 1e-6

# Coarse-grid size used to seed the scalar minimizer.  Strict convexity of
# J is observed numerically but unproven, so the optimum is located on a
# grid first and only then refined.
_SEED_GRID = 96


class Branch(Enum):
    BELOW = "below"
    EQUAL = "equal"
    ABOVE = "above"


@dataclass(frozen=True)
class ScalarPlant:
    """One spatial-frequency subsystem: coefficient a, delay T, weight r."""

    a: float
    T: float = 0.0
    r: float = 1.0

    def __post_init__(self):
        if not (self.T >= 0.0):
            raise DomainError(f"delay T must be >= 0, got {self.T}")
        if not (self.r > 0.0):
            raise DomainError(f"control weight r must be > 0, got {self.r}")

    @property
    def stabilizable(self) -> bool:
        return self.a * self.T < 1.0


@dataclass(frozen=True)
class StabilityInterval:
    """Open interval (a, k_u) of stabilizing gains.

    ``upper`` is ``math.inf`` when the loop is delay-free; the sentinel is
    only ever compared against, never used in arithmetic.
    """

    lower: float
    upper: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.upper)

    def contains(self, k: float) -> bool:
        return self.lower < k < self.upper

    @property
    def width(self) -> float:
        if not self.bounded:
            raise DomainError("unbounded stability interval has no width")
        return self.upper - self.lower


@dataclass(frozen=True)
class CostBreakdown:
    f_value: float
    j_value: float
    branch: Branch


def _require_stabilizable(plant: ScalarPlant, exc=DomainError):
    if not plant.stabilizable:
        raise exc(
            f"a*T = {plant.a * plant.T:g} >= 1: no stabilizing gain exists"
        )


def _upper_bound_residual(a: float, T: float, k: float) -> float:
    # (k - |a|)(k + |a|) avoids the cancellation of k^2 - a^2 for k ~ |a|.
    ell = math.sqrt((k - abs(a)) * (k + abs(a)))
    return T * ell - math.acos(a / k)


def stabilizing_upper_bound(plant: ScalarPlant) -> float:
    """Upper end k_u of the stabilizing interval (a, k_u).

    Unique root of T sqrt(k^2 - a^2) = arccos(a/k) for k > |a|, bracketed
    in (|a|, |a| + pi/T] since arccos is bounded by pi.  For T = 0 the
    interval is unbounded and ``math.inf`` is returned as a sentinel.

    Raises NoSolutionError when a*T >= 1.
    """
    _require_stabilizable(plant, NoSolutionError)
    a, T = plant.a, plant.T
    if T == 0.0:
        return math.inf

    lo = abs(a) + 1e-12 * max(1.0, abs(a))
    hi = abs(a) + math.pi / T
    flo = _upper_bound_residual(a, T, lo)
    if flo >= 0.0:
        # Root pinched against the lower bracket (a close to 1/T); fall
        # back to a tiny bracket expansion.
        lo = abs(a) + 1e-15 * max(1.0, abs(a))
        flo = _upper_bound_residual(a, T, lo)
        if flo >= 0.0:
            return lo
    while _upper_bound_residual(a, T, hi) <= 0.0:
        hi = abs(a) + 2.0 * (hi - abs(a))

    k = brentq(lambda x: _upper_bound_residual(a, T, x), lo, hi,
               xtol=1e-300, rtol=8.9e-16, maxiter=200)

    # Newton polish: brentq leaves a residual ~ slope * eps * k, which for
    # |a| >> 1 can exceed the 1e-12 * max(1, k) contract.
    for _ in range(3):
        res = _upper_bound_residual(a, T, k)
        if abs(res) < 1e-13 * max(1.0, k):
            break
        ell = math.sqrt((k - abs(a)) * (k + abs(a)))
        slope = (T * k * k - a) / (k * ell)
        k -= res / slope
    return k


def stability_interval(plant: ScalarPlant) -> StabilityInterval:
    return StabilityInterval(lower=plant.a, upper=stabilizing_upper_bound(plant))


def upper_bound_derivative(plant: ScalarPlant) -> float:
    """Implicit-function derivative dk_u/da = k_u (aT - 1) / (k_u^2 T - a).

    Strictly negative on the stabilizable set; requires T > 0.
    """
    if plant.T <= 0.0:
        raise DomainError("k_u is unbounded at T = 0; derivative undefined")
    _require_stabilizable(plant, NoSolutionError)
    ku = stabilizing_upper_bound(plant)
    return ku * (plant.a * plant.T - 1.0) / (ku * ku * plant.T - plant.a)


def _f_below(a: float, T: float, k: float) -> float:
    ell = math.sqrt(abs((k - abs(a)) * (k + abs(a))))
    x = ell * T
    if x > 350.0:
        # hyperbolic functions overflow; divide through by e^x / 2
        if k == 0.0:
            return -1.0 / (2.0 * a)
        u = math.exp(-x)
        num = -0.5 * k + 0.5 * k * u * u - ell * u
        den = -k * ell + 2.0 * ell * a * u - k * ell * u * u
        return num / den
    den = 2.0 * ell * (a - k * math.cosh(x))
    if den == 0.0:
        # k pinched against an interval endpoint: variance diverges there
        return math.inf
    return (-k * math.sinh(x) - ell) / den


def _f_above(a: float, T: float, k: float) -> float:
    ell = math.sqrt(abs((k - abs(a)) * (k + abs(a))))
    den = 2.0 * ell * (a - k * math.cos(ell * T))
    if den == 0.0:
        return math.inf
    return (-k * math.sin(ell * T) - ell) / den


def is_stabilizing(plant: ScalarPlant, k: float) -> bool:
    """Strict membership test k in (a, k_u) without root finding.

    For k > |a| the residual F(k) = T sqrt(k^2-a^2) - arccos(a/k) is
    negative exactly on (|a|, k_u), so a sign test replaces the root solve.
    """
    if not plant.stabilizable:
        return False
    a, T = plant.a, plant.T
    if k <= a:
        return False
    if T == 0.0:
        return True
    if k <= abs(a):
        # (a, |a|] is stabilizing for a < 0; for a >= 0 only k > a = |a|.
        return a < 0.0 or k > a
    return _upper_bound_residual(a, T, k) < 0.0


def variance_integral(plant: ScalarPlant, k: float) -> CostBreakdown:
    """Stationary variance f(k) and design cost J(k) = (1 + r k^2) f(k).

    ``k`` must lie strictly inside the stability interval.  The three-branch
    closed form is continuous across k = |a|; within a thin window around
    the boundary the two adjacent branches are averaged to suppress the
    l -> 0 cancellation, and at the boundary itself the exact value
    T/4 + 1/(4|a|) is used (undefined for a = 0, which raises).
    """
    _require_stabilizable(plant)
    a, T, r = plant.a, plant.T, plant.r

    if T == 0.0:
        if k <= a:
            raise DomainError(f"k={k:g} outside stability interval (a, inf)")
        f = 1.0 / (2.0 * (k - a))
        branch = Branch.BELOW if k < abs(a) else (
            Branch.EQUAL if k == abs(a) else Branch.ABOVE)
        return CostBreakdown(f, (1.0 + r * k * k) * f, branch)

    if not is_stabilizing(plant, k):
        ku = stabilizing_upper_bound(plant)
        raise DomainError(
            f"k={k:g} outside stability interval ({a:g}, {ku:g})")

    scale = max(1.0, abs(a))
    delta = (k - abs(a)) / scale

    if abs(delta) < _BOUNDARY_TOL:
        if a == 0.0:
            raise BoundaryError("f is undefined at k = |a| = 0")
        f = T / 4.0 + 1.0 / (4.0 * abs(a))
        return CostBreakdown(f, (1.0 + r * k * k) * f, Branch.EQUAL)

    if abs(delta) < _AVERAGING_TOL and a != 0.0:
        lo, hi = _f_below(a, T, k), _f_above(a, T, k)
        if abs(hi - lo) < _AVERAGING_TOL * abs(hi):
            f = 0.5 * (lo + hi)
        else:
            f = lo if delta < 0 else hi
        branch = Branch.BELOW if delta < 0 else Branch.ABOVE
        return CostBreakdown(f, (1.0 + r * k * k) * f, branch)

    if abs(k) < -a:
        f = _f_below(a, T, k)
        branch = Branch.BELOW
    else:
        f = _f_above(a, T, k)
        branch = Branch.ABOVE
    return CostBreakdown(f, (1.0 + r * k * k) * f, branch)


def _minimize_on_interval(objective, lo: float, hi: float,
                          n_seed: int = _SEED_GRID,
                          xatol_rel: float = 1e-12) -> tuple[float, float]:
    """Coarse grid seed + bounded Brent refine on (lo, hi).

    The grid guards against undetected multimodality; Brent then refines
    inside the bracket formed by the best sample's neighbours.
    """
    span = hi - lo
    pad = 1e-7 * span
    ks = np.linspace(lo + pad, hi - pad, n_seed)
    vals = np.array([objective(k) for k in ks])
    i = int(np.nanargmin(vals))
    blo = ks[max(0, i - 1)]
    bhi = ks[min(n_seed - 1, i + 1)]
    res = minimize_scalar(objective, bounds=(blo, bhi), method="bounded",
                          options={"xatol": max(xatol_rel * span, 1e-15),
                                   "maxiter": 500})
    k = float(res.x)
    v = float(res.fun)
    # The seeded sample can beat the refined point only through numerical
    # noise at the bracket edge; keep the better of the two.
    if vals[i] < v:
        return float(ks[i]), float(vals[i])
    return k, v


def optimal_gain(plant: ScalarPlant) -> tuple[float, float]:
    """Global minimizer of J over the stability interval and its cost.

    Delay-free loops use the closed form k = a + sqrt(a^2 + 1/r); delayed
    loops are solved by grid-seeded Brent search over (a, k_u).
    """
    _require_stabilizable(plant, NoSolutionError)
    a, T, r = plant.a, plant.T, plant.r

    if T == 0.0:
        k = _delay_free_gain(a, r)
        return k, (1.0 + r * k * k) / (2.0 * (k - a))

    ku = stabilizing_upper_bound(plant)

    def J(k: float) -> float:
        return variance_integral(plant, k).j_value

    k, j = _minimize_on_interval(J, a, ku)
    return k, j


def _delay_free_gain(a: float, r: float) -> float:
    # 1/(r (sqrt(a^2+1/r) - a)) is the cancellation-free form for a < 0.
    g = math.sqrt(a * a + 1.0 / r)
    if a > 0.0:
        return a + g
    return 1.0 / (r * (g - a))


@dataclass(frozen=True)
class SpectralDesign:
    """Per-frequency design arrays produced by a sweep.

    ``lam`` carries the sweep variable (spatial frequency, or the open-loop
    coefficient itself for region sweeps), ``a`` the open-loop symbol,
    ``k`` the designed gain and ``j`` its cost.  ``extras`` holds named
    companion columns.  Entries that could not be computed are NaN.
    """

    lam: np.ndarray
    a: np.ndarray
    k: np.ndarray
    j: np.ndarray
    extras: dict[str, np.ndarray] | None = None

    def column(self, name: str) -> np.ndarray:
        if self.extras is None or name not in self.extras:
            raise KeyError(name)
        return self.extras[name]


def region_boundaries(a_grid, T: float) -> SpectralDesign:
    """Stability and optimality region boundaries over a grid of a values.

    For each a: the stabilizing upper bound k_u, the cheap-control boundary
    (argmin of f, the r -> 0 limit) and the expensive-control boundary
    (argmin of k^2 f, the r -> infinity limit).  For stable a the latter
    degenerates to 0 since k^2 f vanishes there; for a > 0 it is the
    positive interior minimizer.  Entries with a T >= 1, and boundaries
    that are unbounded (delay-free cheap boundary), are emitted as NaN.
    """
    a_grid = np.asarray(a_grid, dtype=float)
    n = a_grid.size
    k_upper = np.full(n, np.nan)
    k_cheap = np.full(n, np.nan)
    k_exp = np.full(n, np.nan)

    for i, a in enumerate(a_grid):
        if a * T >= 1.0:
            continue
        if T == 0.0:
            # cheap boundary unbounded; expensive boundary max(0, 2a)
            k_exp[i] = max(0.0, 2.0 * a)
            continue
        plant = ScalarPlant(a=float(a), T=T)
        ku = stabilizing_upper_bound(plant)
        k_upper[i] = ku

        def f_only(k, _p=plant):
            return variance_integral(_p, k).f_value

        def kk_f(k, _p=plant):
            return k * k * variance_integral(_p, k).f_value

        k_cheap[i], _ = _minimize_on_interval(f_only, a, ku)
        k_exp[i], _ = _minimize_on_interval(kk_f, a, ku)

    return SpectralDesign(lam=a_grid, a=a_grid, k=k_upper, j=np.full(n, np.nan),
                          extras={"k_upper": k_upper, "k_cheap": k_cheap,
                                  "k_expensive": k_exp})
