"""Desk-scale design and diagnostic artifacts plus the oracle harness.

Every command builds its artifacts (CSV data, JSON report, SVG plot) as
in-memory strings and returns them in a {filename: content} mapping, so
the same functions back both the HTTP service and the CLI.  Outputs are
deterministic: CSV floats use 17 significant digits, JSON keys are sorted,
SVG carries no timestamps.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import svgplot
from .asymptotic import delay_free_gain
from .circulant import (CirculantSystem, DesignMethod, design_gains, h2_cost,
                        verify_closed_loop)
from .errors import DomainError
from .oracle import converged_energy, freq_domain_cost
from .scalar import (ScalarPlant, optimal_gain, region_boundaries,
                     stabilizing_upper_bound, variance_integral)
from .spatial import (KernelProvenance, ReactionDiffusionParams,
                      SymbolFunction, kernel_from_symbol,
                      rd_delay_free_kernel, rd_design_approximation,
                      rd_expensive_kernel, rd_thresholds, sweep_optimal_symbol)

ALL_FORMATS = ("csv", "json", "svg")


def _csv(header: list[str], columns: list[np.ndarray]) -> str:
    lines = [",".join(header)]
    n = len(columns[0])
    for i in range(n):
        cells = []
        for col in columns:
            v = col[i]
            cells.append("" if isinstance(v, float) and math.isnan(v)
                         else f"{v:.17g}" if isinstance(v, float)
                         else str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _select(files: dict[str, str], formats) -> dict[str, str]:
    formats = set(formats or ALL_FORMATS)
    return {name: body for name, body in files.items()
            if name.rsplit(".", 1)[-1] in formats}


def cmd_regions(a_min: float, a_max: float, n_points: int, T: float,
                formats=None) -> tuple[dict[str, str], dict]:
    """Stability and optimality region boundaries over an a grid."""
    if n_points < 2 or a_max <= a_min:
        raise DomainError("need n_points >= 2 and a_max > a_min")
    a = np.linspace(a_min, a_max, n_points)
    design = region_boundaries(a, T)
    ku = design.column("k_upper")
    cheap = design.column("k_cheap")
    exp_ = design.column("k_expensive")

    files = {}
    files["regions.csv"] = _csv(
        ["a", "k_upper", "k_cheap", "k_expensive", "k_lower_diag"],
        [a, ku, cheap, exp_, a.copy()])
    summary = {
        "T": T,
        "n_points": n_points,
        "n_stabilizable": int(np.sum(a * T < 1.0)),
        "upper_bound_present": bool(T > 0),
    }
    files["regions.json"] = _json(summary)
    series = []
    if T > 0:
        series.append(svgplot.Series("k_upper", a, ku))
    series.append(svgplot.Series("k_cheap", a, cheap, dash="6,3"))
    series.append(svgplot.Series("k_expensive", a, exp_, dash="2,3"))
    series.append(svgplot.Series("k = a", a, a))
    files["regions.svg"] = svgplot.line_plot(
        series, f"Stability and optimality boundaries (T = {T:g})",
        "open-loop coefficient a", "gain k")
    return _select(files, formats), summary


def cmd_scalar_sweep(a_min: float, a_max: float, n_points: int,
                     T_list: list[float], r: float,
                     formats=None) -> tuple[dict[str, str], dict]:
    """Optimal gain vs a for several delays."""
    if n_points < 2 or a_max <= a_min:
        raise DomainError("need n_points >= 2 and a_max > a_min")
    a = np.linspace(a_min, a_max, n_points)
    curves = []
    for T in T_list:
        k = np.full(a.size, np.nan)
        for i, ai in enumerate(a):
            if ai * T < 1.0:
                k[i], _ = optimal_gain(ScalarPlant(a=float(ai), T=T, r=r))
        curves.append(k)

    header = ["a"] + [f"k_T_{T:g}" for T in T_list]
    files = {"scalar_sweep.csv": _csv(header, [a] + curves)}
    summary = {
        "r": r,
        "T_list": list(T_list),
        "defined_points": {f"{T:g}": int(np.sum(np.isfinite(c)))
                           for T, c in zip(T_list, curves)},
    }
    files["scalar_sweep.json"] = _json(summary)
    files["scalar_sweep.svg"] = svgplot.line_plot(
        [svgplot.Series(f"T = {T:g}", a, c)
         for T, c in zip(T_list, curves)],
        f"Optimal gain vs open-loop coefficient (r = {r:g})",
        "open-loop coefficient a", "optimal gain")
    return _select(files, formats), summary


def _rd_sweep_window(p: ReactionDiffusionParams, dx: float, L: float):
    """Sweep window per the decay rule |k(lambda_max)| < 1e-6 max |k|.

    The delay-free gain decays like 1/(2 r |a(lambda)|); invert that for
    the cutoff, then respect the alias bound lambda_max >= pi/dx and an
    image-suppression spacing 2 pi / dlambda >= L + decay margin.
    """
    k_ref = delay_free_gain(p.symbol(0.0), p.r)
    target = max(1e-6 * k_ref, 1e-300)
    a_needed = 1.0 / (2.0 * p.r * target)
    lam_max = math.sqrt(max(a_needed - p.c, 1.0) / p.d)
    lam_max = max(lam_max, math.pi / dx)
    margin = 40.0 * math.sqrt(p.d / p.c)
    dlam = 2.0 * math.pi / (2.0 * L + margin)
    n = int(math.ceil(lam_max / dlam)) + 1
    return lam_max, max(n, 512)


def cmd_rd_kernels(c: float, d: float, T: float, r: float, dx: float,
                   L: float, alpha: float = 1.0, beta: float = 1.0,
                   kappa: float = 2.0, gamma: float = 1.0,
                   formats=None, n_lambda: int | None = None,
                   lambda_max: float | None = None
                   ) -> tuple[dict[str, str], dict]:
    """Reaction-diffusion kernels: closed forms, numerical optimum, design
    approximation and truncation markers."""
    p = ReactionDiffusionParams(c=c, d=d, T=T, r=r)
    lm_auto, n_auto = _rd_sweep_window(p, dx, L)
    lam_max = lambda_max if lambda_max is not None else lm_auto
    n_lam = n_lambda if n_lambda is not None else n_auto
    sym = SymbolFunction(a_of_lambda=p.symbol, lambda_max=lam_max,
                         n_lambda=n_lam)

    design = sweep_optimal_symbol(sym, T, r)
    kern_num = kernel_from_symbol(design, dx, L,
                                  provenance=KernelProvenance.NUMERICAL_OPT)
    x = kern_num.x_grid
    k0_closed = rd_delay_free_kernel(p, x)
    kT_closed = rd_expensive_kernel(p, x)

    design0 = sweep_optimal_symbol(sym, 0.0, r)
    kern_num0 = kernel_from_symbol(design0, dx, L,
                                   provenance=KernelProvenance.NUMERICAL_OPT)

    report = {
        "params": {"c": c, "d": d, "T": T, "r": r, "dx": dx, "L": L},
        "lambda_max": lam_max,
        "n_lambda": n_lam,
    }
    columns = [x, k0_closed, kern_num0.values]
    header = ["x", "k0_closed_form", "k0_numerical"]
    if T > 0:
        th = rd_thresholds(p, alpha, beta, kappa, gamma)
        approx = rd_design_approximation(p, th, x)
        columns += [kT_closed, kern_num.values, approx]
        header += ["kT_closed_form", "kT_numerical", "kT_design_approx"]
        l2_gap = (math.sqrt(np.trapezoid((kern_num.values - kT_closed) ** 2, x))
                  / math.sqrt(np.trapezoid(kT_closed ** 2, x)))
        l2_gap0 = (math.sqrt(np.trapezoid(
            (kern_num0.values - k0_closed) ** 2, x))
            / math.sqrt(np.trapezoid(k0_closed ** 2, x)))
        report["thresholds"] = {
            "D0": th.D0, "D2": th.D2, "D4": th.D4,
            "x_th1": th.x_th1, "x_th2": th.x_th2,
            "alpha": alpha, "beta": beta, "kappa": kappa, "gamma": gamma,
            "gain_gap": th.gain_gap,
            "x_th_delay": th.x_th_delay, "x_th_free": th.x_th_free,
            "delay_dominates": bool(
                math.sqrt(2.0 * c * T) > gamma / kappa),
        }
        report["l2_gap_numerical_vs_closed"] = l2_gap
        report["l2_gap_delay_free"] = l2_gap0
        report["peak_gap"] = {
            "k0_at_0": float(k0_closed[x.size // 2]),
            "kT_at_0": float(kT_closed[x.size // 2]),
        }

    files = {"rd_kernels.csv": _csv(header, columns),
             "rd_kernels.json": _json(report)}
    series = [svgplot.Series("delay-free (closed form)", x, k0_closed),
              svgplot.Series("delay-free (numerical)", x, kern_num0.values,
                             dash="2,3")]
    if T > 0:
        series += [svgplot.Series(f"T = {T:g} (closed form)", x, kT_closed),
                   svgplot.Series(f"T = {T:g} (numerical)", x,
                                  kern_num.values, dash="2,3"),
                   svgplot.Series("design approximation", x, columns[-1],
                                  dash="6,3")]
    files["rd_kernels.svg"] = svgplot.line_plot(
        series, f"Feedback kernels (c={c:g}, d={d:g}, r={r:g})",
        "location x", "kernel K(x)")
    return _select(files, formats), report


def cmd_circulant(n: int, a_row, T: float, r: float, method: str = "small_delay",
                  formats=None) -> tuple[dict[str, str], dict]:
    """Gain design for the ring system; JSON in/out plus plots."""
    sys_ = CirculantSystem(n=n, a_row=np.asarray(a_row, dtype=float))
    gains = design_gains(sys_, T, r, method)
    stable = verify_closed_loop(sys_, gains, T)
    cost = h2_cost(sys_, gains, T, r) if stable else None

    from .circulant import modes_of
    modes = modes_of(sys_)
    report = {
        "n": n,
        "a_row": list(map(float, sys_.a_row)),
        "T": T,
        "r": r,
        "method": DesignMethod(method).value,
        "k_row": list(map(float, gains.k_row)),
        "k_modes": list(map(float, gains.k_modes)),
        "self_gain": gains.self_gain,
        "cost": cost,
        "stable": bool(stable),
    }
    half = n // 2 + 1
    idx = np.arange(half, dtype=float)
    files = {
        "circulant.csv": _csv(
            ["mode", "open_loop_eigenvalue", "gain_mode", "gain_row"],
            [idx, modes[:half].astype(float),
             gains.k_modes[:half].astype(float),
             gains.k_row[:half].astype(float)]),
        "circulant.json": _json(report),
        "circulant.svg": svgplot.line_plot(
            [svgplot.Series("open-loop eigenvalues", idx, modes[:half]),
             svgplot.Series("gain eigenvalues", idx, gains.k_modes[:half]),
             svgplot.Series("gain row", idx, gains.k_row[:half], dash="6,3")],
            f"Ring design (n={n}, T={T:g}, r={r:g}, {DesignMethod(method).value})",
            "mode / offset", "value"),
    }
    return _select(files, formats), report


def default_verify_grid():
    a_values = [-2.0, -1.0, -0.5, -0.25, 0.45]
    T_values = [0.2, 0.5, 1.0, 2.0]
    return a_values, T_values


def cmd_verify(a_values=None, T_values=None, k_per_cell: int = 6,
               seed: int = 0, h: float = 0.01,
               formats=None) -> tuple[dict[str, str], dict]:
    """Cross-check the closed-form variance against both oracles.

    For each stabilizable (a, T) cell, k values cover all three branches:
    k = 0 and k = |a| exactly (for a < 0) plus seeded-jitter quantiles of
    the stability interval.  The seed only moves the jitter, so reruns
    with the same seed are byte-identical.
    """
    if a_values is None or T_values is None:
        d_a, d_T = default_verify_grid()
        a_values = a_values or d_a
        T_values = T_values or d_T
    if k_per_cell < 3:
        raise DomainError("need at least 3 gains per cell")
    rng = np.random.default_rng(seed)

    rows = {name: [] for name in
            ("a", "T", "k", "branch", "f_closed", "f_time", "f_freq",
             "rel_err_time", "rel_err_freq")}
    for a in a_values:
        for T in T_values:
            if a * T >= 1.0:
                continue
            plant = ScalarPlant(a=float(a), T=float(T))
            ku = stabilizing_upper_bound(plant)
            ks = []
            if a < 0:
                ks = [0.0, abs(a)]
            n_q = k_per_cell - len(ks)
            qs = np.linspace(0.15, 0.85, n_q)
            qs = qs + rng.uniform(-0.02, 0.02, size=n_q)
            lo = a if a < 0 else a + 0.02 * (ku - a)
            ks += [float(lo + q * (ku - lo)) for q in qs]
            for k in ks:
                cb = variance_integral(plant, k)
                # RK4/Simpson error scales like (h max(|a|,|k|))^4; scale the
                # step so the k = 0 anchor rows stay below 1e-9
                h_cell = h / (1.5 * max(1.0, abs(a), abs(k)))
                sol = converged_energy(plant, k, h_cell)
                ffd = freq_domain_cost(plant, k)
                rows["a"].append(float(a))
                rows["T"].append(float(T))
                rows["k"].append(float(k))
                rows["branch"].append(cb.branch.value)
                rows["f_closed"].append(cb.f_value)
                rows["f_time"].append(sol.energy)
                rows["f_freq"].append(ffd)
                rows["rel_err_time"].append(
                    abs(sol.energy - cb.f_value) / abs(cb.f_value))
                rows["rel_err_freq"].append(
                    abs(ffd - cb.f_value) / abs(cb.f_value))

    report = {
        "seed": seed,
        "h": h,
        "n_triples": len(rows["a"]),
        "branches": sorted(set(rows["branch"])),
        "max_rel_err_time": max(rows["rel_err_time"]),
        "max_rel_err_freq": max(rows["rel_err_freq"]),
        "k_zero_max_err": max(
            (e for kk, e in zip(rows["k"], rows["rel_err_time"]) if kk == 0.0),
            default=0.0),
    }
    files = {
        "verify.csv": _csv(list(rows.keys()),
                           [rows[name] for name in rows]),
        "verify.json": _json(report),
        "verify.svg": svgplot.line_plot(
            [svgplot.Series("rel_err_time",
                            np.arange(len(rows["a"]), dtype=float),
                            np.array(rows["rel_err_time"])),
             svgplot.Series("rel_err_freq",
                            np.arange(len(rows["a"]), dtype=float),
                            np.array(rows["rel_err_freq"]))],
            "Oracle agreement per test triple", "triple index",
            "relative error"),
    }
    return _select(files, formats), report
