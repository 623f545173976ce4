import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ginivar import (
    SampleTooShortError,
    TimeSeries,
    difference,
    drop_indices,
    make_partition,
    seasonal_difference,
)


class TestTimeSeries:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="position 3"):
            TimeSeries([1.0, 2.0, float("nan")])

    def test_rejects_inf(self):
        with pytest.raises(ValueError, match="non-finite"):
            TimeSeries([1.0, float("inf")])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            TimeSeries([])

    def test_rejects_2d(self):
        with pytest.raises(ValueError):
            TimeSeries(np.zeros((3, 2)))

    def test_values_are_read_only(self):
        x = TimeSeries([1.0, 2.0])
        with pytest.raises(ValueError):
            x.values[0] = 5.0

    def test_len(self):
        assert len(TimeSeries([1.0, 2.0, 3.0])) == 3


class TestMakePartition:
    @pytest.mark.parametrize(
        "n,s,ell,b,r",
        [
            (2000, 0.7, 204, 9, 164),
            (16, 0.5, 4, 4, 0),
            (500, 0.7, 77, 6, 38),
        ],
    )
    def test_known_geometries(self, n, s, ell, b, r):
        p = make_partition(n, s)
        assert (p.block_len, p.block_count, p.remainder) == (ell, b, r)

    def test_block_slices_cover_in_order(self):
        p = make_partition(2000, 0.7)
        assert p.block_slice(1) == slice(0, 204)
        assert p.block_slice(9) == slice(8 * 204, 9 * 204)
        with pytest.raises(IndexError):
            p.block_slice(10)

    def test_too_short_sample(self):
        with pytest.raises(SampleTooShortError):
            make_partition(3, 0.7)

    def test_single_block_rejected(self):
        # 8**0.9 ~ 6.5 -> one block of 6: no pairwise comparison possible
        with pytest.raises(SampleTooShortError, match="sample too short"):
            make_partition(8, 0.9)

    def test_unit_blocks_rejected(self):
        with pytest.raises(SampleTooShortError):
            make_partition(100, 0.05)

    def test_invalid_exponent(self):
        with pytest.raises(ValueError):
            make_partition(100, 1.0)

    @given(
        n=st.integers(min_value=4, max_value=200_000),
        s=st.floats(min_value=0.1, max_value=0.9),
    )
    @settings(max_examples=300, deadline=None)
    def test_partition_arithmetic(self, n, s):
        try:
            p = make_partition(n, s)
        except SampleTooShortError:
            return
        assert p.block_len >= 2 and p.block_count >= 2
        assert p.block_count * p.block_len + p.remainder == n
        assert 0 <= p.remainder < p.block_len
        assert p.block_count * p.block_len <= n < (p.block_count + 1) * p.block_len


class TestDifferencing:
    def test_constant_series(self):
        assert difference(TimeSeries([1, 1, 1, 1])).values.tolist() == [0, 0, 0]

    def test_arithmetic(self):
        assert difference(TimeSeries([0, 1, 3, 6])).values.tolist() == [1, 2, 3]

    def test_length_contract(self):
        assert difference(TimeSeries(np.arange(17.0))).n == 16

    def test_too_short(self):
        with pytest.raises(ValueError, match="too short"):
            difference(TimeSeries([1.0]))

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=400))
    @settings(max_examples=200, deadline=None)
    def test_cumsum_reconstruction(self, values):
        x = TimeSeries(values)
        z = difference(x)
        rebuilt = x.values[0] + np.concatenate(([0.0], np.cumsum(z.values)))
        scale = max(1.0, np.max(np.abs(x.values)))
        assert np.max(np.abs(rebuilt - x.values)) <= 1e-12 * scale

    def test_seasonal_arithmetic(self):
        z = seasonal_difference(TimeSeries([1, 2, 3, 4, 5, 6]), lag=2)
        assert z.values.tolist() == [2, 2, 2, 2]

    def test_seasonal_lag_one_equals_difference(self):
        rng = np.random.default_rng(7)
        x = TimeSeries(rng.standard_normal(50))
        np.testing.assert_array_equal(
            seasonal_difference(x, 1).values, difference(x).values
        )

    def test_seasonal_weekly_year_lag(self):
        x = TimeSeries(np.arange(832.0))
        assert seasonal_difference(x, 52).n == 780

    def test_seasonal_lag_too_large(self):
        with pytest.raises(ValueError, match="lag exceeds"):
            seasonal_difference(TimeSeries([1.0, 2.0]), 2)


class TestDropIndices:
    def test_drops_one_based_positions(self):
        x = TimeSeries([10.0, 20.0, 30.0, 40.0])
        assert drop_indices(x, [1, 3]).values.tolist() == [20.0, 40.0]

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            drop_indices(TimeSeries([1.0, 2.0]), [3])

    def test_empty_list_is_noop(self):
        x = TimeSeries([1.0, 2.0])
        assert drop_indices(x, []) is x
