from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from busyburst import (
    CampaignConfig,
    EmptyTable,
    ExcessiveTruncation,
    IncrementModel,
    InsufficientData,
    TailTable,
    default_thresholds,
    empirical_log_tail,
    fit_tail_offset,
    run_busy_period,
    run_busy_period_path,
    simulate_campaign,
)

PAD = -1e9  # forces any scripted walk to stop right after its script runs out


class _ScriptedSampler:
    def __init__(self, values):
        self._values = list(values)
        self._pos = 0

    def draw(self, n):
        out = []
        for _ in range(n):
            i = self._pos
            self._pos += 1
            out.append(self._values[i] if i < len(self._values) else PAD)
        return np.array(out, dtype=np.float64)


class _Scripted(IncrementModel):
    """Fixed increment sequence; the rng key is ignored."""

    kind = "scripted"

    def __init__(self, values):
        self._values = tuple(float(v) for v in values)

    def drift(self):
        return -1.0

    def scgf(self, theta):
        raise NotImplementedError

    def scgf_derivative(self, theta):
        raise NotImplementedError

    @property
    def theta_max(self):
        return math.inf

    def sampler(self, seed, stream_id):
        return _ScriptedSampler(self._values)


# ------------------------------------------------------------- hand oracles


def test_walk_three_step_cycle():
    out = run_busy_period(_Scripted([2.0, -1.0, -3.0]), seed=0)
    assert out.tau == 3
    assert out.area == 1.0  # partial sums 2, 1, -2
    assert out.height == 2.0
    assert not out.truncated


def test_walk_immediate_return():
    out = run_busy_period(_Scripted([-0.5]), seed=0)
    assert out.tau == 1
    assert out.area == -0.5
    assert out.height == -0.5


def test_walk_stops_on_exact_zero():
    # lattice step back to 0 ends the cycle; the terminal 0 contributes nothing
    out = run_busy_period(_Scripted([1.0, -1.0]), seed=0)
    assert out.tau == 2
    assert out.area == 1.0
    assert out.height == 1.0


def test_walk_path_returns_partial_sums():
    out, values = run_busy_period_path(_Scripted([2.0, -1.0, -3.0]), seed=0)
    assert values.tolist() == [2.0, 1.0, -2.0]
    assert out.area == float(values.sum())
    assert out.tau == 3


def test_walk_respects_step_cap():
    out = run_busy_period(_Scripted([1.0] * 100), seed=0, max_steps=10)
    assert out.truncated
    assert out.tau == 10
    assert out.height == 10.0


@settings(max_examples=200)
@given(
    st.lists(
        st.floats(min_value=-100.0, max_value=100.0, allow_nan=False),
        max_size=30,
    )
)
def test_walk_matches_reference_on_scripted_increments(increments):
    ref = []
    total = 0.0
    for x in increments + [PAD]:
        total += x
        ref.append(total)
        if total <= 0.0:
            break
    out, values = run_busy_period_path(_Scripted(increments), seed=0)
    assert np.array_equal(values, np.array(ref))
    assert out.tau == len(ref)
    assert out.area == float(np.array(ref).sum())
    assert out.height == max(ref)
    # single-block walks agree with the path variant bit for bit
    direct = run_busy_period(_Scripted(increments), seed=0)
    assert direct == out


# -------------------------------------------------------------- invariants


def test_stopping_invariant_on_sampled_cycles(gaussian):
    for stream in range(10_000):
        out, values = run_busy_period_path(gaussian, seed=77, stream_id=stream)
        assert out.tau == len(values)
        assert (values[:-1] > 0.0).all()
        assert values[-1] <= 0.0
        assert out.area == float(values.sum())
        assert out.height == float(values.max())


def test_walk_and_path_agree_across_blocks(gaussian):
    # long cycles span several internal blocks; statistics must still agree
    checked = 0
    for stream in range(3000):
        out = run_busy_period(gaussian, seed=77, stream_id=stream)
        if out.tau <= 32:
            continue
        checked += 1
        path_out, values = run_busy_period_path(gaussian, seed=77, stream_id=stream)
        assert out.tau == path_out.tau
        assert out.height == path_out.height
        assert out.area == pytest.approx(path_out.area, rel=1e-12)
    assert checked > 10


def test_one_step_cycle_fraction(tp_c1):
    n = 100_000
    ones = sum(run_busy_period(tp_c1, seed=7, stream_id=j).tau == 1 for j in range(n))
    # P(one-step cycle) equals the down-move probability
    sigma = math.sqrt(0.6 * 0.4 / n)
    assert abs(ones / n - 0.6) < 3.0 * sigma


# --------------------------------------------------------------- campaigns


def test_campaign_mean_cycle_length(tp_c1):
    # E[tau] = 3 for this lattice law: 1 + 0.4 * (expected descent time 5)
    res = simulate_campaign(tp_c1, CampaignConfig(n_paths=100_000, seed=5))
    sigma = math.sqrt(54.0 / 100_000)  # Var(tau) = 54, by the same ruin algebra
    assert abs(res.mean_tau - 3.0) < 4.0 * sigma


def test_campaign_counts_are_exceedances(tp_c1):
    res = simulate_campaign(
        tp_c1, CampaignConfig(n_paths=20_000, seed=5, thresholds=(1.0, 4.0, 9.0, 25.0))
    )
    t = res.table
    assert t.thresholds == (1.0, 4.0, 9.0, 25.0)
    assert list(t.counts) == sorted(t.counts, reverse=True)
    assert t.n_paths == 20_000
    assert all(0 <= c <= t.n_paths for c in t.counts)


def test_campaign_sorts_thresholds(tp_c1):
    res = simulate_campaign(
        tp_c1, CampaignConfig(n_paths=1000, seed=5, thresholds=(9.0, 1.0, 4.0))
    )
    assert res.table.thresholds == (1.0, 4.0, 9.0)


def test_campaign_rejects_bad_thresholds(tp_c1):
    with pytest.raises(ValueError):
        simulate_campaign(tp_c1, CampaignConfig(n_paths=10, seed=1, thresholds=(0.0, 1.0)))
    with pytest.raises(ValueError):
        simulate_campaign(tp_c1, CampaignConfig(n_paths=0, seed=1))


def test_campaign_worker_count_does_not_change_results(tp_c1):
    # spans three chunks so the parallel branch actually merges
    runs = [
        simulate_campaign(tp_c1, CampaignConfig(n_paths=140_000, seed=42, workers=w))
        for w in (1, 2)
    ]
    a, b = runs
    assert a.table == b.table
    assert a.mean_tau == b.mean_tau
    assert a.mean_positive_area == b.mean_positive_area
    assert a.extremes.area == b.extremes.area
    assert a.extremes.area_stream_id == b.extremes.area_stream_id
    assert a.extremes.height == b.extremes.height
    assert a.extremes.height_stream_id == b.extremes.height_stream_id
    assert np.array_equal(a.extremes.area_path.values, b.extremes.area_path.values)
    assert np.array_equal(a.extremes.height_path.values, b.extremes.height_path.values)


def test_campaign_is_repeatable(tp_c1):
    a = simulate_campaign(tp_c1, CampaignConfig(n_paths=30_000, seed=9))
    b = simulate_campaign(tp_c1, CampaignConfig(n_paths=30_000, seed=9))
    assert a.table == b.table
    assert a.mean_tau == b.mean_tau
    c = simulate_campaign(tp_c1, CampaignConfig(n_paths=30_000, seed=10))
    assert c.table != a.table


def test_campaign_extreme_records_are_reachable(gaussian):
    res = simulate_campaign(gaussian, CampaignConfig(n_paths=30_000, seed=3))
    rec = res.extremes
    assert 0 <= rec.area_stream_id < 30_000
    assert 0 <= rec.height_stream_id < 30_000
    # the stored paths start at 0 and reproduce the records exactly
    assert rec.area_path.values[0] == 0.0
    assert rec.area == float(rec.area_path.values[1:].sum())
    assert rec.height == float(rec.height_path.values[1:].max())
    # records dominate a direct rerun of a few streams
    for j in range(200):
        out = run_busy_period(gaussian, seed=3, stream_id=j)
        assert out.area <= rec.area
        assert out.height <= rec.height


def test_campaign_without_extremes(tp_c1):
    res = simulate_campaign(tp_c1, CampaignConfig(n_paths=1000, seed=3, record_extremes=False))
    assert res.extremes is None


def test_campaign_flags_excessive_truncation(gaussian):
    with pytest.raises(ExcessiveTruncation):
        simulate_campaign(gaussian, CampaignConfig(n_paths=2000, seed=1, max_steps=1))


def test_campaign_tolerates_allowed_truncation(gaussian):
    cfg = CampaignConfig(n_paths=2000, seed=1, max_steps=1, truncation_limit=1.0)
    res = simulate_campaign(gaussian, cfg)
    assert res.table.n_truncated > 0
    assert res.table.n_paths == 2000


def test_default_thresholds_shape():
    grid = default_thresholds(10_000_000, 0.05164)
    assert len(grid) == 40
    assert grid[0] == 1.0
    assert list(grid) == sorted(grid)
    # geometric spacing: constant ratio
    ratios = [grid[i + 1] / grid[i] for i in range(len(grid) - 1)]
    assert max(ratios) == pytest.approx(min(ratios), rel=1e-9)
    # the top bin is sized to keep roughly ten hits
    expected_top = (math.log(1_000_000) / 0.05164) ** 2
    assert grid[-1] == pytest.approx(expected_top, rel=1e-9)


def test_default_thresholds_tiny_campaign():
    grid = default_thresholds(5, 0.05)
    assert grid[-1] == pytest.approx(4.0)


# ------------------------------------------------------------- tail fitting


def test_empirical_log_tail_drops_empty_bins():
    table = TailTable(thresholds=(1.0, 2.0, 4.0), counts=(50, 5, 0), n_paths=100, n_truncated=0)
    pts = empirical_log_tail(table)
    assert [b for b, _ in pts] == [1.0, 2.0]
    assert pts[0][1] == pytest.approx(math.log(0.5))


def test_empirical_log_tail_empty_table():
    table = TailTable(thresholds=(1.0, 2.0), counts=(0, 0), n_paths=100, n_truncated=0)
    with pytest.raises(EmptyTable):
        empirical_log_tail(table)


def test_fit_tail_offset_recovers_planted_shift():
    k = 0.05
    kappa = -2.3
    bs = tuple(float(b) for b in (1, 4, 9, 16, 25, 100, 400))
    n = 10_000_000
    counts = tuple(int(round(n * math.exp(kappa - k * math.sqrt(b)))) for b in bs)
    table = TailTable(thresholds=bs, counts=counts, n_paths=n, n_truncated=0)
    got = fit_tail_offset(table, k)
    assert got == pytest.approx(kappa, abs=1e-4)


def test_fit_tail_offset_needs_populated_bins():
    table = TailTable(thresholds=(1.0, 2.0, 4.0), counts=(150, 99, 12), n_paths=1000, n_truncated=0)
    with pytest.raises(InsufficientData):
        fit_tail_offset(table, 0.05)


def test_fit_tail_offset_min_count_filter():
    # the sparse top bin is excluded, shifting the mean offset
    k = 0.1
    bs = (1.0, 4.0, 9.0, 16.0)
    counts = (1000, 500, 200, 3)
    table = TailTable(thresholds=bs, counts=counts, n_paths=100_000, n_truncated=0)
    got = fit_tail_offset(table, k, min_count=100)
    want = np.mean(
        [math.log(c / 100_000) + k * math.sqrt(b) for b, c in zip(bs, counts) if c >= 100]
    )
    assert got == pytest.approx(float(want), abs=1e-12)
