"""Independent oracles for the H2 cost of the scalar delayed loop.

Three routes that never touch the closed-form variance expression:

* time domain: method-of-steps RK4 integration of the fundamental solution
  x0 of dx/dt = a x(t) - k x(t-T) with x0(0) = 1 and zero history, plus
  composite-Simpson energy with an exponential tail correction;
* frequency domain: quadrature of 1 / |j w - a + k e^{-j T w}|^2 over the
  real axis, normalized by 2 pi so that the delay-free OU case (a = -1,
  k = 0) yields exactly 1/2;
* Monte Carlo: seeded Euler-Maruyama simulation of the stochastic loop,
  reporting the time-averaged second moment and its standard error.

The step h is adjusted to divide the delay an even number of times so that
derivative discontinuities of x0 (propagating from t = 0 at multiples of
T) always land on Simpson panel boundaries; otherwise the quadrature error
would be capped at O(h^2) and mask the integrator's fourth order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.special import sici

from .errors import DivergenceError, DomainError
from .scalar import ScalarPlant, is_stabilizing

_DIVERGENCE_LIMIT = 1e9

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(48)


@dataclass(frozen=True)
class FundamentalSolution:
    t_grid: np.ndarray
    x0: np.ndarray
    energy: float
    truncation_time: float
    tail_fraction: float


@dataclass(frozen=True)
class OracleReport:
    f_closed_form: float
    f_time_domain: float
    f_freq_domain: float
    rel_err_time: float
    rel_err_freq: float


def _hermite_mid(x0: float, x1: float, d0: float, d1: float, h: float) -> float:
    # cubic Hermite evaluated at the interval midpoint
    return 0.5 * (x0 + x1) + 0.125 * h * (d0 - d1)


def fundamental_solution(plant: ScalarPlant, k: float, h: float,
                         horizon: float) -> FundamentalSolution:
    """Integrate the fundamental solution and its energy.

    RK4 with the method of steps: within segment m of length T the delayed
    value comes from the cubic-Hermite interpolant of segment m-1 (zero
    history for the first segment), so every step sees a smooth right-hand
    side and the integrator keeps its fourth order across breakpoints.

    Raises DivergenceError as soon as |x0| exceeds 1e9, which doubles as a
    stability-boundary detector.
    """
    if h <= 0.0:
        raise DomainError(f"step h must be > 0, got {h}")
    a, T = plant.a, plant.T
    heuristic = 10.0 * max(T, 1.0 / abs(a - k)) if a != k else 10.0 * max(T, 1.0)
    if horizon < heuristic:
        raise DomainError(
            f"horizon {horizon:g} below heuristic minimum {heuristic:g}")

    if T == 0.0:
        return _fundamental_solution_ode(plant, k, h, horizon)

    # h | T with an even multiplier: breakpoints stay on Simpson panels.
    m = 2 * max(1, math.ceil(T / (2.0 * h)))
    h = T / m
    n = 2 * max(1, math.ceil(horizon / (2.0 * h)))
    horizon = n * h

    x = np.empty(n + 1)
    dr = np.empty(n + 1)  # derivative at node j seen by interval [j, j+1]
    dl = np.empty(n + 1)  # derivative at node j seen by interval [j-1, j]
    x[0] = 1.0

    for j in range(n):
        seg = j // m
        if seg == 0:
            u1 = u2 = u3 = 0.0
        else:
            i = j - m
            u1 = x[i]
            u3 = x[i + 1]
            u2 = _hermite_mid(x[i], x[i + 1], dr[i], dl[i + 1], h)
        xj = x[j]
        k1 = a * xj - k * u1
        k2 = a * (xj + 0.5 * h * k1) - k * u2
        k3 = a * (xj + 0.5 * h * k2) - k * u2
        k4 = a * (xj + h * k3) - k * u3
        xn = xj + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        dr[j] = k1
        dl[j + 1] = a * xn - k * u3
        x[j + 1] = xn
        if abs(xn) > _DIVERGENCE_LIMIT:
            raise DivergenceError(
                f"|x0| exceeded {_DIVERGENCE_LIMIT:g} at t = {(j + 1) * h:g}; "
                f"gain k = {k:g} is not stabilizing")
    dr[n] = dl[n]

    t = np.arange(n + 1) * h
    main = float(simpson(x * x, x=t))
    tail, frac = _tail_estimate(x, t, main)
    energy = main + tail
    return FundamentalSolution(t_grid=t, x0=x, energy=energy,
                               truncation_time=horizon,
                               tail_fraction=frac)


def _fundamental_solution_ode(plant: ScalarPlant, k: float, h: float,
                              horizon: float) -> FundamentalSolution:
    # delay-free: dx/dt = (a - k) x, handled by plain RK4
    c = plant.a - k
    n = 2 * max(1, math.ceil(horizon / (2.0 * h)))
    h = horizon / n
    # amplification factor of one RK4 step for x' = c x
    z = c * h
    amp = 1.0 + z + z * z / 2.0 + z ** 3 / 6.0 + z ** 4 / 24.0
    x = np.empty(n + 1)
    x[0] = 1.0
    for j in range(n):
        x[j + 1] = x[j] * amp
        if abs(x[j + 1]) > _DIVERGENCE_LIMIT:
            raise DivergenceError(f"|x0| exceeded {_DIVERGENCE_LIMIT:g}")
    t = np.arange(n + 1) * h
    main = float(simpson(x * x, x=t))
    tail, frac = _tail_estimate(x, t, main)
    return FundamentalSolution(t_grid=t, x0=x, energy=main + tail,
                               truncation_time=horizon, tail_fraction=frac)


def _tail_estimate(x: np.ndarray, t: np.ndarray, main: float):
    """Geometric extrapolation of the energy beyond the horizon.

    Uses the decay ratio of the last two equal windows (each a fifth of
    the horizon): for an exponentially decaying envelope the remaining
    tail is E2 * rho / (1 - rho) with rho = E2 / E1.
    """
    n = x.size - 1
    w = max(2, n // 5)
    if 2 * w > n:
        return 0.0, 1.0
    e1 = float(simpson(x[n - 2 * w:n - w + 1] ** 2, x=t[n - 2 * w:n - w + 1]))
    e2 = float(simpson(x[n - w:] ** 2, x=t[n - w:]))
    if e1 <= 0.0 or not (0.0 < e2 < e1):
        # not decaying (or already at rounding floor): no reliable estimate
        frac = e2 / main if main > 0 else 1.0
        return 0.0, frac
    rho = e2 / e1
    tail = e2 * rho / (1.0 - rho)
    frac = tail / (main + tail) if main + tail > 0 else 1.0
    return tail, frac


def converged_energy(plant: ScalarPlant, k: float, h: float,
                     horizon: float | None = None,
                     tail_tol: float = 1e-6,
                     max_doublings: int = 10) -> FundamentalSolution:
    """fundamental_solution with the horizon extended until the estimated
    tail contributes less than ``tail_tol`` of the energy."""
    a, T = plant.a, plant.T
    if horizon is None:
        horizon = 10.0 * max(T, 1.0 / abs(a - k) if a != k else 1.0, 1.0)
    sol = fundamental_solution(plant, k, h, horizon)
    for _ in range(max_doublings):
        if sol.tail_fraction < tail_tol:
            break
        horizon *= 1.8
        sol = fundamental_solution(plant, k, h, horizon)
    return sol


def freq_domain_cost(plant: ScalarPlant, k: float) -> float:
    """H2 integral (1/2pi) int dw / |j w - a + k e^{-j T w}|^2.

    The integrand is even, so twice the [0, inf) half is taken.  [0, W] is
    covered by per-period Gauss-Legendre panels (the integrand oscillates
    with period 2 pi / T); beyond W the integrand is expanded in 1/w and
    the oscillatory moments are integrated exactly via the sine integral.
    Normalization is calibrated so that a = -1, k = 0 gives 1/2.
    """
    if not is_stabilizing(plant, k):
        raise DomainError(f"k={k:g} is not a stabilizing gain")
    a, T = plant.a, plant.T

    def integrand(w):
        c = np.cos(T * w)
        s = np.sin(T * w)
        return 1.0 / ((k * c - a) ** 2 + (w - k * s) ** 2)

    cut = 200.0 * max(1.0, abs(a), abs(k))
    if T > 0.0:
        # four Gauss panels per oscillation period
        period = 2.0 * math.pi / T
        n_per = max(16, int(math.ceil(cut / period)) + 1)
        cut = n_per * period
        edges = np.linspace(0.0, cut, 4 * n_per + 1)
    else:
        # geometric refinement toward 0 resolves a Lorentzian of any width
        edges = np.concatenate(([0.0], np.geomspace(cut * 1e-7, cut, 48)))

    # Near the stability boundary the closed-loop pole pair sits close to
    # the imaginary axis at frequency ~ sqrt(k^2 - a^2), producing a
    # resonance peak too narrow for the base panels; refine geometrically
    # around it down to machine width.
    w_res = math.sqrt(max(k * k - a * a, 0.0))
    if w_res < cut:
        base = edges[1] - edges[0]
        offsets = base * 2.0 ** -np.arange(1, 52, dtype=float)
        extra = np.concatenate((w_res - offsets, [w_res], w_res + offsets))
        extra = extra[(extra > 0.0) & (extra < cut)]
        edges = np.unique(np.concatenate((edges, extra)))

    nodes, weights = _GAUSS_NODES, _GAUSS_WEIGHTS
    lo = edges[:-1][:, None]
    hi = edges[1:][:, None]
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    main = float(np.sum(half * weights * integrand(mid + half * nodes)))

    main += _freq_tail(a, T, k, cut)
    return main / math.pi


def _freq_tail(a: float, T: float, k: float, W: float) -> float:
    """int_W^inf dw/D with D = w^2 - 2 w k sin(Tw) + (k^2+a^2) - 2 a k cos(Tw),
    expanded to O(w^-4); residual O(k^3/W^5) is below 1e-10 for the W used."""
    if k == 0.0 or T == 0.0:
        # D is an exact Lorentzian: k = 0 gives w^2 + a^2, T = 0 gives
        # w^2 + (k - a)^2
        b = abs(a) if k == 0.0 else k - a
        return (math.pi / 2.0 - math.atan(W / b)) / b
    c0 = k * k + a * a
    tail = 1.0 / W - c0 / (3.0 * W ** 3) + 2.0 * k * k / (3.0 * W ** 3)
    z = T * W
    tail += 2.0 * k * T * T * _int_sin_x3(z)
    tail += 2.0 * a * k * T ** 3 * _int_cos_x4(z)
    # 4 k^2 sin^2 = 2 k^2 (1 - cos 2Tw); the constant part is above
    tail -= 16.0 * k * k * T ** 3 * _int_cos_x4(2.0 * z)
    return tail


def _int_sin_x3(z: float) -> float:
    # int_z^inf sin(x)/x^3 dx
    si, _ = sici(z)
    return (math.sin(z) / (2.0 * z * z) + math.cos(z) / (2.0 * z)
            - (math.pi / 2.0 - si) / 2.0)


def _int_cos_x4(z: float) -> float:
    # int_z^inf cos(x)/x^4 dx = cos(z)/(3 z^3) - (1/3) int_z^inf sin/x^3
    return math.cos(z) / (3.0 * z ** 3) - _int_sin_x3(z) / 3.0


def oracle_report(plant: ScalarPlant, k: float, h: float = 0.01,
                  horizon: float | None = None) -> OracleReport:
    """Closed form vs both oracles for one (plant, k) point."""
    from .scalar import variance_integral

    f_cf = variance_integral(plant, k).f_value
    f_td = converged_energy(plant, k, h, horizon).energy
    f_fd = freq_domain_cost(plant, k)
    return OracleReport(
        f_closed_form=f_cf, f_time_domain=f_td, f_freq_domain=f_fd,
        rel_err_time=abs(f_td - f_cf) / abs(f_cf),
        rel_err_freq=abs(f_fd - f_cf) / abs(f_cf))


def monte_carlo_variance(plant: ScalarPlant, k: float, h: float,
                         horizon: float, paths: int, seed: int,
                         batch: int = 2000) -> tuple[float, float]:
    """Euler-Maruyama estimate of the stationary variance.

    Each path draws its increments from an independent generator spawned
    deterministically from ``seed`` (SeedSequence child per path), so the
    result is bit-identical across reruns and invariant to batching.
    Returns the mean over paths of the time-averaged second moment over
    the second half of the horizon, and its standard error.
    """
    if paths < 100:
        raise DomainError("need at least 100 paths")
    if not is_stabilizing(plant, k):
        raise DomainError(f"k={k:g} is not a stabilizing gain")
    a, T = plant.a, plant.T

    if T > 0.0:
        m = max(1, math.ceil(T / h))
        h = T / m
    else:
        m = 0
    n = max(2, int(math.ceil(horizon / h)))
    n_avg0 = n // 2
    sqrt_h = math.sqrt(h)

    children = np.random.SeedSequence(seed).spawn(paths)
    averages = np.empty(paths)

    for start in range(0, paths, batch):
        stop = min(paths, start + batch)
        nb = stop - start
        dw = np.empty((nb, n))
        for i in range(nb):
            rng = np.random.default_rng(children[start + i])
            dw[i] = rng.standard_normal(n) * sqrt_h
        x = np.zeros(nb)
        hist = np.zeros((m, nb)) if m > 0 else None
        acc = np.zeros(nb)
        count = 0
        for j in range(n):
            delayed = hist[j % m] if m > 0 else x
            drift = a * x - k * delayed
            x_new = x + drift * h + dw[:, j]
            if m > 0:
                hist[j % m] = x
            x = x_new
            if np.max(np.abs(x)) > _DIVERGENCE_LIMIT:
                raise DivergenceError("Monte Carlo trajectory diverged")
            if j >= n_avg0:
                acc += x * x
                count += 1
        averages[start:stop] = acc / count

    mean = float(np.mean(averages))
    stderr = float(np.std(averages, ddof=1) / math.sqrt(paths))
    return mean, stderr
