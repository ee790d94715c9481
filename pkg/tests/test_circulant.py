"""Ring-of-agents design via DFT decoupling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delaykern.circulant import (CirculantGains, CirculantSystem,
                                 DesignMethod, design_gains, h2_cost,
                                 modes_of, verify_closed_loop)
from delaykern.errors import InstabilityError, SymmetryError, UnstabilizableError

REFERENCE_ROW = np.array([1, 1, 0.5, 0, 0, 0, 0, 0, 0.5, 1], dtype=float)


def reference_ring():
    return CirculantSystem(n=10, a_row=REFERENCE_ROW.copy())


def symmetric_row(rng, n):
    row = rng.normal(size=n)
    for i in range(1, n):
        row[i] = row[n - i] = 0.5 * (row[i] + row[n - i])
    return row


class TestModes:
    def test_identity_scale(self):
        sys_ = CirculantSystem(n=6, a_row=np.array([1.0, 0, 0, 0, 0, 0]))
        assert np.allclose(modes_of(sys_), 1.0, atol=1e-14)

    def test_reference_row_against_complex_dft_oracle(self):
        sys_ = reference_ring()
        modes = modes_of(sys_)
        oracle = np.fft.fft(REFERENCE_ROW)
        assert np.max(np.abs(oracle.imag)) < 1e-12
        assert np.max(np.abs(modes - oracle.real)) < 1e-10
        lam = np.arange(10)
        closed = 1 + 2 * np.cos(2 * np.pi * lam / 10) + np.cos(4 * np.pi * lam / 10)
        assert np.max(np.abs(modes - closed)) < 1e-12

    def test_zero_row(self):
        sys_ = CirculantSystem(n=5, a_row=np.zeros(5))
        assert np.all(modes_of(sys_) == 0.0)

    def test_asymmetric_rejected(self):
        with pytest.raises(SymmetryError):
            modes_of(CirculantSystem(n=4, a_row=np.array([0.0, 1.0, 0.0, 0.5])))

    @settings(max_examples=30, deadline=None)
    @given(n=st.integers(3, 24), seed=st.integers(0, 10_000))
    def test_random_symmetric_rows_real_modes(self, n, seed):
        rng = np.random.default_rng(seed)
        sys_ = CirculantSystem(n=n, a_row=symmetric_row(rng, n))
        modes = modes_of(sys_)
        oracle = np.fft.fft(sys_.a_row)
        assert np.max(np.abs(modes - oracle.real)) < 1e-9


class TestDesignGains:
    def test_reference_gains_r1(self):
        gains = design_gains(reference_ring(), 0.01, 1.0, "small_delay")
        assert abs(gains.self_gain - 2.8) <= 0.1
        assert abs(gains.k_row[1] - 1.6) <= 0.1

    def test_reference_gains_r10(self):
        g1 = design_gains(reference_ring(), 0.01, 1.0, "small_delay")
        g10 = design_gains(reference_ring(), 0.01, 10.0, "small_delay")
        assert abs(g10.self_gain - 2.3) <= 0.1
        assert abs(g10.k_row[1] - 1.7) <= 0.1
        # heavier control weight lowers self-gain, raises neighbour gain
        assert g10.self_gain < g1.self_gain
        assert g10.k_row[1] > g1.k_row[1]

    def test_numerical_matches_anchors_too(self):
        gains = design_gains(reference_ring(), 0.01, 1.0, "numerical_opt")
        assert abs(gains.self_gain - 2.8) <= 0.1
        gains10 = design_gains(reference_ring(), 0.01, 10.0, "numerical_opt")
        assert abs(gains10.self_gain - 2.3) <= 0.1

    def test_zero_delay_methods_coincide(self):
        gs = design_gains(reference_ring(), 0.0, 1.0, "small_delay")
        gf = design_gains(reference_ring(), 0.0, 1.0, "delay_free")
        assert np.max(np.abs(gs.k_row - gf.k_row)) == 0.0

    def test_row_symmetry_and_dft_round_trip(self):
        gains = design_gains(reference_ring(), 0.05, 1.0, "numerical_opt")
        n = 10
        for i in range(1, n):
            assert gains.k_row[i] == pytest.approx(gains.k_row[n - i], abs=1e-12)
        j = np.arange(n)
        table = np.cos(2 * np.pi * np.outer(j, j) / n)
        back = table @ gains.k_row
        assert np.max(np.abs(back - gains.k_modes)) < 1e-10

    def test_gain_shrinkage_per_mode(self):
        for T in [0.01, 0.05, 0.1]:
            gT = design_gains(reference_ring(), T, 1.0, "numerical_opt")
            g0 = design_gains(reference_ring(), 0.0, 1.0, "delay_free")
            assert np.all(gT.k_modes <= g0.k_modes + 1e-10)

    def test_small_delay_second_order_consistency(self):
        def err(T):
            gn = design_gains(reference_ring(), T, 1.0, "numerical_opt")
            gs = design_gains(reference_ring(), T, 1.0, "small_delay")
            return np.max(np.abs(gn.k_modes - gs.k_modes))

        assert err(0.01) / err(0.005) >= 3.5

    def test_unstabilizable_mode_named(self):
        with pytest.raises(UnstabilizableError, match="mode 0"):
            design_gains(reference_ring(), 0.3, 1.0, "numerical_opt")


class TestClosedLoopCertificate:
    def test_delay_free_optimal_gains(self):
        gains = design_gains(reference_ring(), 0.0, 1.0, "delay_free")
        assert verify_closed_loop(reference_ring(), gains, 0.0)

    def test_overscaled_gains_fail(self):
        gains = design_gains(reference_ring(), 0.1, 1.0, "numerical_opt")
        scaled = CirculantGains(k_row=10 * gains.k_row,
                                k_modes=10 * gains.k_modes,
                                self_gain=10 * gains.self_gain,
                                provenance=gains.provenance)
        assert not verify_closed_loop(reference_ring(), scaled, 0.1)

    def test_small_delay_gains_certified(self):
        gains = design_gains(reference_ring(), 0.01, 1.0, "small_delay")
        assert verify_closed_loop(reference_ring(), gains, 0.01)


class TestH2Cost:
    def test_independent_agents(self):
        n = 7
        row = np.zeros(n)
        row[0] = -1.0
        sys_ = CirculantSystem(n=n, a_row=row)
        gains = CirculantGains(k_row=np.zeros(n), k_modes=np.zeros(n),
                               self_gain=0.0,
                               provenance=DesignMethod.DELAY_FREE)
        assert h2_cost(sys_, gains, 0.7, 1.0) == pytest.approx(n * 0.5,
                                                               rel=1e-12)

    def test_method_cost_ordering(self):
        T, r = 0.05, 1.0
        sys_ = reference_ring()
        costs = {}
        for m in ("numerical_opt", "small_delay", "delay_free"):
            costs[m] = h2_cost(sys_, design_gains(sys_, T, r, m), T, r)
        assert costs["numerical_opt"] <= costs["small_delay"] + 1e-10
        assert costs["small_delay"] <= costs["delay_free"] + 1e-10

    def test_cost_decreases_as_delay_shrinks(self):
        sys_ = reference_ring()
        costs = [h2_cost(sys_, design_gains(sys_, T, 1.0, "numerical_opt"),
                         T, 1.0) for T in (0.2, 0.1, 0.05, 0.01)]
        assert all(costs[i] >= costs[i + 1] - 1e-9 for i in range(len(costs) - 1))

    def test_unstable_gains_rejected(self):
        gains = design_gains(reference_ring(), 0.1, 1.0, "numerical_opt")
        scaled = CirculantGains(k_row=10 * gains.k_row,
                                k_modes=10 * gains.k_modes,
                                self_gain=10 * gains.self_gain,
                                provenance=gains.provenance)
        with pytest.raises(InstabilityError):
            h2_cost(reference_ring(), scaled, 0.1, 1.0)


class TestCirculantAlgebra:
    @settings(max_examples=25, deadline=None)
    @given(n=st.integers(3, 16), seed=st.integers(0, 10_000))
    def test_matrix_multiply_is_circular_convolution(self, n, seed):
        rng = np.random.default_rng(seed)
        row = symmetric_row(rng, n)
        v = rng.normal(size=n)
        mat = np.empty((n, n))
        for i in range(n):
            mat[i] = np.roll(row, i)
        direct = mat.T @ v  # circ(row) @ v with row as first ROW
        conv = np.array([np.dot(row, v[(i - np.arange(n)) % n])
                         for i in range(n)])
        assert np.max(np.abs(direct - conv)) < 1e-12

    def test_degenerate_two_agent_ring(self):
        sys_ = CirculantSystem(n=2, a_row=np.array([0.5, 0.2]))
        gains = design_gains(sys_, 0.01, 1.0, "numerical_opt")
        assert verify_closed_loop(sys_, gains, 0.01)
        assert h2_cost(sys_, gains, 0.01, 1.0) > 0.0
