import math

import numpy as np
import pytest

from ginivar import (
    ConstantSeriesError,
    IidNormal,
    PiecewiseVariance,
    TimeSeries,
    center_by_block_means,
    estimate_kappa,
    generate_noise,
    make_partition,
)


class TestCentering:
    def test_constant_series_centers_to_zero(self):
        p = make_partition(100, 0.7)
        out = center_by_block_means(TimeSeries(np.full(100, 9.9)), p)
        assert out.n == p.covered
        np.testing.assert_array_equal(out.values, 0.0)

    def test_small_block_arithmetic(self):
        p = make_partition(6, math.log(3) / math.log(6))  # two blocks of 3
        out = center_by_block_means(TimeSeries([1, 2, 3, 10, 20, 30]), p)
        np.testing.assert_allclose(out.values, [-1, 0, 1, -10, 0, 10])

    def test_zero_mean_blocks_pass_through(self):
        p = make_partition(8, 0.5)  # blocks of 2
        x = TimeSeries([1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 4.0, -4.0])
        np.testing.assert_array_equal(center_by_block_means(x, p).values, x.values)


class TestEstimateKappa:
    def test_iid_normal_limit_is_sqrt_two(self):
        # kappa^2 = Var(Z^2) = 2 for standard normal noise
        x = generate_noise(IidNormal(), 100_000, 2024)
        est = estimate_kappa(x)
        assert est.kappa_hat == pytest.approx(math.sqrt(2.0), abs=0.05)
        assert est.sigma_h_sq == pytest.approx(1.0, abs=0.02)

    def test_scale_invariance(self):
        x = generate_noise(IidNormal(), 5000, 77)
        base = estimate_kappa(x)
        rng = np.random.default_rng(1)
        for c in rng.uniform(0.1, 10.0, size=8):
            scaled = estimate_kappa(TimeSeries(c * x.values))
            assert scaled.kappa_hat == pytest.approx(base.kappa_hat, abs=1e-10)
            assert scaled.sigma_h_sq == pytest.approx(c**2 * base.sigma_h_sq, rel=1e-12)

    def test_raw_kappa_relationship(self):
        x = generate_noise(IidNormal(), 5000, 78)
        est = estimate_kappa(x)
        assert est.raw_kappa == pytest.approx(est.kappa_hat * est.sigma_h_sq, rel=1e-12)

    def test_q_must_be_below_s(self):
        x = generate_noise(IidNormal(), 1000, 1)
        with pytest.raises(ValueError, match="q must be smaller"):
            estimate_kappa(x, s=0.6, q=0.6)

    def test_constant_input(self):
        with pytest.raises(ConstantSeriesError, match="constant input"):
            estimate_kappa(TimeSeries(np.full(1000, 4.0)))

    def test_sub_partition_geometry(self):
        x = generate_noise(IidNormal(), 2000, 1)
        est = estimate_kappa(x, s=0.7, q=0.5)
        assert est.sub_partition.block_len == 44  # floor(2000**0.5)
        assert est.sub_partition.block_count == 45

    def test_consistency_trend(self):
        # mean absolute error shrinks from n=500 to n=12000
        target = math.sqrt(2.0)
        errors = {}
        for n in (500, 12_000):
            devs = []
            for i in range(300):
                x = generate_noise(IidNormal(), n, 9_000 + i)
                devs.append(abs(estimate_kappa(x).kappa_hat - target))
            errors[n] = float(np.mean(devs))
        assert errors[12_000] < errors[500]

    def test_fixed_alternative_growth_rate(self):
        # under a fixed scale step, the absolute sub-block sums are dominated
        # by their deterministic drift, so kappa_hat / sqrt(sub block len)
        # approaches sqrt(pi/2) * integral |sigma^2 - mean sigma^2| / mean sigma^2
        var = PiecewiseVariance(levels=(1.0, 1.2), breakpoints=(0.5,))
        n = 100_000
        grid = np.arange(1, n + 1) / n
        sig = var.sigma_at(grid)
        limit = math.sqrt(math.pi / 2.0) * 0.22 / 1.22
        vals = []
        for i in range(5):
            y = generate_noise(IidNormal(), n, 600 + i).values
            est = estimate_kappa(TimeSeries(sig * y))
            vals.append(est.kappa_hat / math.sqrt(est.sub_partition.block_len))
        assert np.mean(vals) == pytest.approx(limit, rel=0.15)
