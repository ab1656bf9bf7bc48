import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import reference_partition
from redpoctor import (
    Bucket,
    BucketSet,
    DayHistogram,
    NoiseSource,
    PartitionThresholds,
    bucket_layout,
    bucket_means,
    dp_partition,
    noisy_thresholds,
    partition_bounds,
)
from redpoctor.errors import NonPositiveBudget
from redpoctor.perturbation import DEFAULT_ALPHA


def test_jump_isolates_both_endpoints():
    b = dp_partition(DayHistogram(1, [60, 62, 61, 120, 63]), 30.0, 15.0, 10)
    assert b.bounds() == [(0, 1), (2, 2), (3, 3), (4, 4)]
    assert [m for _, m in bucket_means(b)] == [61.0, 61.0, 120.0, 63.0]


def test_drift_closes_bucket():
    assert partition_bounds([60, 70, 95], 30.0, 50.0, 10) == [(0, 1), (2, 2)]


def test_constant_histogram_cut_by_size_only():
    assert partition_bounds([7.0] * 10, 1.0, 1.0, 4) == [(0, 3), (4, 7), (8, 9)]
    assert partition_bounds([7.0] * 3, 1.0, 1.0, 4) == [(0, 2)]


def test_consecutive_jumps():
    assert partition_bounds([0, 100, 0, 100], 30, 15, 4) == [(0, 0), (1, 1), (2, 2), (3, 3)]


def test_single_bin():
    assert partition_bounds([5.0], 30, 15, 4) == [(0, 0)]
    with pytest.raises(ValueError):
        partition_bounds([], 30, 15, 4)


def test_bucket_means():
    bset = BucketSet((Bucket(0, 0, (42.0,)), Bucket(1, 3, (1.0, 2.0, 3.0))))
    assert [m for _, m in bucket_means(bset)] == [42.0, 2.0]


def test_bucket_layout_matches_bucket_means():
    x = np.array([60.0, 62.0, 61.0, 120.0, 63.0])
    bounds = partition_bounds(x, 30.0, 15.0, 10)
    sizes, means = bucket_layout(x, bounds)
    assert sizes.tolist() == [2, 1, 1, 1]
    assert means.tolist() == [61.0, 61.0, 120.0, 63.0]


def test_bucket_set_must_be_contiguous():
    with pytest.raises(ValueError):
        BucketSet((Bucket(0, 1, (1.0, 1.0)), Bucket(3, 3, (1.0,))))
    with pytest.raises(ValueError):
        Bucket(2, 1, ())
    with pytest.raises(ValueError):
        Bucket(0, 1, (1.0,))


def test_threshold_validation():
    with pytest.raises(ValueError):
        PartitionThresholds(t_d=10, t_r=20)
    with pytest.raises(ValueError):
        PartitionThresholds(t_s=0)


def test_noisy_thresholds_zero_noise_limit():
    d, r = noisy_thresholds(PartitionThresholds(), 1e15, DEFAULT_ALPHA, NoiseSource(0))
    assert d == pytest.approx(30.0, abs=1e-9) and r == pytest.approx(15.0, abs=1e-9)


def test_noisy_thresholds_floor_and_budget():
    th = PartitionThresholds(t_d=1.0, t_r=1.0)
    draws = [noisy_thresholds(th, 0.01, 100.0, NoiseSource(s)) for s in range(50)]
    assert min(min(p) for p in draws) == 0.1
    with pytest.raises(NonPositiveBudget):
        noisy_thresholds(th, 0.0, 1.0, NoiseSource(0))


def test_noisy_thresholds_seeded_golden():
    # Drift threshold noise is drawn first, each with scale alpha / (eps / 2).
    rng = NoiseSource(7)
    scale = DEFAULT_ALPHA / 0.05
    z = np.random.Generator(np.random.PCG64(7)).laplace(0.0, scale, 2)
    got = noisy_thresholds(PartitionThresholds(), 0.1, DEFAULT_ALPHA, rng)
    assert got == (max(0.1, 30.0 + z[0]), max(0.1, 15.0 + z[1]))
    assert got == pytest.approx((91.7007176731301, 353.990786805077), abs=1e-9)  # regression pin


values = st.lists(st.floats(0, 200, allow_nan=False), min_size=1, max_size=32)


@given(values, st.floats(0.1, 80), st.floats(0.1, 80), st.integers(1, 12))
def test_matches_reference_partitioner(x, t_d, t_r, t_s):
    assert partition_bounds(x, t_d, t_r, t_s) == reference_partition(x, t_d, t_r, t_s)


@given(values, st.floats(0.1, 80), st.floats(0.1, 80), st.integers(1, 12))
def test_bucket_rules_hold(x, t_d, t_r, t_s):
    bounds = partition_bounds(x, t_d, t_r, t_s)
    assert bounds[0][0] == 0 and bounds[-1][1] == len(x) - 1
    for (s0, e0), (s1, _) in zip(bounds, bounds[1:]):
        assert s1 == e0 + 1
    for s, e in bounds:
        seg = x[s : e + 1]
        assert len(seg) <= t_s
        assert max(seg) - min(seg) <= t_d
        # no jump inside a bucket
        assert all(abs(a - b) <= t_r for a, b in zip(seg, seg[1:]))
    for i in range(1, len(x)):
        if abs(x[i] - x[i - 1]) > t_r:
            assert (i - 1, i - 1) in bounds and (i, i) in bounds
