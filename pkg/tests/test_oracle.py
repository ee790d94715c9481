"""Time-domain, frequency-domain and Monte Carlo oracles."""

import math

import numpy as np
import pytest

from delaykern.errors import DivergenceError, DomainError
from delaykern.oracle import (converged_energy, freq_domain_cost,
                              fundamental_solution, monte_carlo_variance,
                              oracle_report)
from delaykern.scalar import (ScalarPlant, stabilizing_upper_bound,
                              variance_integral)


class TestFundamentalSolution:
    def test_pure_exponential_when_gain_zero(self):
        plant = ScalarPlant(a=-1.0, T=0.7)
        sol = fundamental_solution(plant, 0.0, h=0.01, horizon=30.0)
        assert sol.x0[0] == 1.0
        assert np.max(np.abs(sol.x0 - np.exp(-sol.t_grid))) < 1e-9
        assert sol.energy == pytest.approx(0.5, abs=1e-9)

    def test_energy_matches_closed_form(self):
        plant = ScalarPlant(a=-1.0, T=0.5)
        f = variance_integral(plant, 1.2).f_value
        sol = converged_energy(plant, 1.2, h=0.01)
        assert sol.energy == pytest.approx(f, rel=1e-3)
        assert sol.tail_fraction < 1e-6

    def test_divergence_above_upper_bound(self):
        plant = ScalarPlant(a=0.5, T=1.0)
        ku = stabilizing_upper_bound(plant)
        with pytest.raises(DivergenceError):
            fundamental_solution(plant, ku * 1.2, h=0.05, horizon=400.0)

    def test_horizon_heuristic_enforced(self):
        with pytest.raises(DomainError):
            fundamental_solution(ScalarPlant(a=-1.0, T=0.5), 1.0, 0.01, 1.0)

    def test_fourth_order_convergence(self):
        plant = ScalarPlant(a=-1.0, T=0.5)
        f = variance_integral(plant, 1.2).f_value
        errs = [abs(fundamental_solution(plant, 1.2, h, 60.0).energy - f)
                for h in (0.04, 0.02, 0.01)]
        assert errs[0] / errs[1] >= 8.0
        assert errs[1] / errs[2] >= 8.0

    def test_stability_flip_window(self):
        # crossing k_u flips convergent -> divergent within a gain window
        # narrower than 1e-3
        plant = ScalarPlant(a=-1.0, T=1.0)
        ku = stabilizing_upper_bound(plant)
        sol = fundamental_solution(plant, ku - 1e-4, h=1 / 16, horizon=2000.0)
        assert np.all(np.abs(sol.x0) < 1e9)
        with pytest.raises(DivergenceError):
            fundamental_solution(plant, ku + 8.9e-4, h=1 / 16, horizon=3e5)


class TestFreqDomainCost:
    def test_lorentzian_calibration(self):
        for T in [0.0, 0.3, 2.0]:
            plant = ScalarPlant(a=-1.0, T=T)
            assert freq_domain_cost(plant, 0.0) == pytest.approx(0.5, abs=1e-12)

    def test_boundary_branch(self):
        plant = ScalarPlant(a=-1.0, T=0.5)
        assert freq_domain_cost(plant, 1.0) == pytest.approx(0.375, rel=1e-6)

    def test_matches_closed_form(self):
        plant = ScalarPlant(a=-0.2, T=0.5)
        f = variance_integral(plant, 0.1).f_value
        assert freq_domain_cost(plant, 0.1) == pytest.approx(f, rel=1e-6)

    def test_rejects_nonstabilizing(self):
        with pytest.raises(DomainError):
            freq_domain_cost(ScalarPlant(a=-1.0, T=1.0), 3.0)

    def test_report_bundles_both_oracles(self):
        rep = oracle_report(ScalarPlant(a=-0.6, T=0.5), 1.2)
        assert rep.rel_err_time < 1e-3
        assert rep.rel_err_freq < 1e-4


class TestMonteCarlo:
    def test_ou_variance(self):
        plant = ScalarPlant(a=-1.0, T=0.0)
        mean, se = monte_carlo_variance(plant, 0.0, h=0.005, horizon=50.0,
                                        paths=2000, seed=11)
        assert abs(mean - 0.5) < 3.0 * se

    def test_delayed_boundary_case(self):
        plant = ScalarPlant(a=-1.0, T=0.5)
        mean, se = monte_carlo_variance(plant, 1.0, h=0.005, horizon=50.0,
                                        paths=2000, seed=3)
        assert abs(mean - 0.375) < 3.0 * se

    def test_bit_identical_reruns(self):
        plant = ScalarPlant(a=-0.6, T=1.0)
        out1 = monte_carlo_variance(plant, 0.3, 0.01, 40.0, 500, seed=123)
        out2 = monte_carlo_variance(plant, 0.3, 0.01, 40.0, 500, seed=123)
        assert out1 == out2

    def test_batching_invariance(self):
        plant = ScalarPlant(a=-1.0, T=0.0)
        out1 = monte_carlo_variance(plant, 0.2, 0.01, 30.0, 300, seed=5,
                                    batch=300)
        out2 = monte_carlo_variance(plant, 0.2, 0.01, 30.0, 300, seed=5,
                                    batch=64)
        assert out1 == out2

    def test_rejects_nonstabilizing_gain(self):
        with pytest.raises(DomainError):
            monte_carlo_variance(ScalarPlant(a=1.0, T=0.5), 0.5, 0.01, 30.0,
                                 200, seed=0)

    def test_path_floor(self):
        with pytest.raises(DomainError):
            monte_carlo_variance(ScalarPlant(a=-1.0, T=0.0), 0.0, 0.01, 30.0,
                                 50, seed=0)
