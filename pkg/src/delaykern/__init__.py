"""Delay-aware H2-optimal proportional feedback synthesis.

Core layers:

* :mod:`delaykern.scalar` - exact cost and optimal gain for one scalar
  delayed subsystem, plus the stabilizing-gain interval;
* :mod:`delaykern.asymptotic` - closed-form asymptotic gains and the
  expensive-regime cost gap;
* :mod:`delaykern.oracle` - independent time-domain, frequency-domain and
  Monte Carlo verification of the closed forms;
* :mod:`delaykern.spatial` - kernels for spatially invariant plants on the
  real line (reaction-diffusion closed forms, sweeps, truncation);
* :mod:`delaykern.circulant` - gain design for rings coupled by symmetric
  circulant matrices;
* :mod:`delaykern.workbench` / :mod:`delaykern.service` / delaykern CLI -
  reporting commands behind an HTTP service and a thin client.
"""

from .asymptotic import (CostGapResult, GainFormulaResult, Regime,
                         delay_free_gain, expensive_cost_gap, expensive_gain,
                         small_delay_cubic_root, small_delay_gain)
from .circulant import (CirculantGains, CirculantSystem, DesignMethod,
                        design_gains, h2_cost, modes_of, verify_closed_loop)
from .errors import (AliasError, BoundaryError, DelaykernError,
                     DivergenceError, DomainError, InstabilityError,
                     NoSolutionError, ResolutionError, SymmetryError,
                     UnstabilizableError)
from .oracle import (FundamentalSolution, OracleReport, freq_domain_cost,
                     fundamental_solution, monte_carlo_variance,
                     oracle_report)
from .scalar import (Branch, CostBreakdown, ScalarPlant, SpectralDesign,
                     StabilityInterval, is_stabilizing, optimal_gain,
                     region_boundaries, stability_interval,
                     stabilizing_upper_bound, upper_bound_derivative,
                     variance_integral)
from .spatial import (DesignThresholds, KernelProvenance,
                      ReactionDiffusionParams, SpatialKernel, SymbolFunction,
                      kernel_from_symbol, rd_convolution_check,
                      rd_delay_filter, rd_delay_free_kernel,
                      rd_design_approximation, rd_expensive_kernel,
                      rd_tail_remainder_bound, rd_thresholds,
                      small_delay_kernel, sweep_optimal_symbol,
                      symbol_from_kernel, truncation_analysis)

__version__ = "0.1.0"
