"""Busy-cycle simulation: single walks and reproducible parallel campaigns.

A cycle runs the walk from 0 until the first step at or below 0 (the first
step itself may end it). Its three statistics are the stopping time ``tau``,
the enclosed area ``S_1 + ... + S_tau`` (terminal value included, so a
one-step cycle has nonpositive area), and the running maximum.

Campaigns assign path ``j`` the keyed stream ``(seed, j)`` and accumulate
per-chunk partial results whose merge is associative and commutative, so the
output is bit-identical for any worker count. Chunk boundaries depend only on
the path count, never on the worker count, which keeps even the float
accumulations byte-stable.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EmptyTable, ExcessiveTruncation, InsufficientData
from .ldp import SampledPath, busy_exponent
from .model import IncrementModel, IncrementSampler

DEFAULT_MAX_STEPS = 100_000_000
_FIRST_BLOCK = 32
_MAX_BLOCK = 1 << 20
# fixed so partial-result boundaries never depend on the worker count
_CHUNK_PATHS = 65_536
_NO_STREAM = 2**64


@dataclass(frozen=True)
class BusyPeriodOutcome:
    """One cycle's statistics.

    ``height`` is the maximum of the partial sums over the whole cycle, so a
    one-step cycle reports its (nonpositive) first step.
    """

    tau: int
    area: float
    height: float
    truncated: bool


def _walk(sampler: IncrementSampler, max_steps: int) -> tuple[int, float, float, bool]:
    tau = 0
    area = 0.0
    height = -math.inf
    offset = 0.0
    block = _FIRST_BLOCK
    while tau < max_steps:
        n = min(block, max_steps - tau)
        s = np.cumsum(sampler.draw(n))
        s += offset
        hit = s <= 0.0
        if hit.any():
            k = int(hit.argmax())
            seg = s[: k + 1]
            return tau + k + 1, area + float(seg.sum()), max(height, float(seg.max())), False
        tau += n
        area += float(s.sum())
        height = max(height, float(s.max()))
        offset = float(s[-1])
        block = min(2 * block, _MAX_BLOCK)
    return tau, area, height, True


def _walk_values(sampler: IncrementSampler, max_steps: int) -> tuple[np.ndarray, bool]:
    segs = []
    tau = 0
    offset = 0.0
    block = _FIRST_BLOCK
    while tau < max_steps:
        n = min(block, max_steps - tau)
        s = np.cumsum(sampler.draw(n))
        s += offset
        hit = s <= 0.0
        if hit.any():
            segs.append(s[: int(hit.argmax()) + 1])
            return np.concatenate(segs), False
        segs.append(s)
        tau += n
        offset = float(s[-1])
        block = min(2 * block, _MAX_BLOCK)
    return np.concatenate(segs) if segs else np.empty(0), True


def run_busy_period(
    model: IncrementModel,
    seed: int,
    stream_id: int = 0,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> BusyPeriodOutcome:
    """Simulate one cycle on the keyed stream ``(seed, stream_id)``."""
    tau, area, height, truncated = _walk(model.sampler(seed, stream_id), max_steps)
    return BusyPeriodOutcome(tau=tau, area=area, height=height, truncated=truncated)


def run_busy_period_path(
    model: IncrementModel,
    seed: int,
    stream_id: int = 0,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> tuple[BusyPeriodOutcome, np.ndarray]:
    """Like ``run_busy_period`` but also return the partial sums S_1..S_tau.

    The outcome's area is recomputed as one sum over the returned values, so
    ``outcome.area == float(values.sum())`` holds exactly.
    """
    values, truncated = _walk_values(model.sampler(seed, stream_id), max_steps)
    outcome = BusyPeriodOutcome(
        tau=len(values),
        area=float(values.sum()),
        height=float(values.max()) if len(values) else -math.inf,
        truncated=truncated,
    )
    return outcome, values


@dataclass(frozen=True)
class TailTable:
    """Exceedance counts of the cycle area over a fixed threshold grid."""

    thresholds: tuple[float, ...]
    counts: tuple[int, ...]
    n_paths: int
    n_truncated: int


@dataclass
class ExtremeRecords:
    """Record-area and record-height cycles of a campaign."""

    area: float
    area_stream_id: int
    area_path: SampledPath
    height: float
    height_stream_id: int
    height_path: SampledPath


@dataclass(frozen=True)
class CampaignConfig:
    n_paths: int
    seed: int
    thresholds: tuple[float, ...] | None = None
    max_steps: int = DEFAULT_MAX_STEPS
    workers: int = 1
    record_extremes: bool = True
    truncation_limit: float = 1e-6


@dataclass
class CampaignResult:
    table: TailTable
    extremes: ExtremeRecords | None
    mean_tau: float
    mean_positive_area: float | None


def default_thresholds(
    n_paths: int,
    tail_rate: float,
    n_points: int = 40,
    b_min: float = 1.0,
) -> tuple[float, ...]:
    """Geometric threshold grid sized to the predicted tail.

    The top threshold is placed where ``n_paths * exp(-tail_rate * sqrt(b))``
    is about 10, so the last bin still collects a handful of hits.
    """
    target = n_paths / 10.0
    if target > 1.0:
        b_max = (math.log(target) / tail_rate) ** 2
    else:
        b_max = 4.0 * b_min
    b_max = max(b_max, 4.0 * b_min)
    ratio = b_max / b_min
    return tuple(b_min * ratio ** (i / (n_points - 1)) for i in range(n_points))


@dataclass
class _Partial:
    hist: np.ndarray
    n_done: int
    n_truncated: int
    sum_tau: int
    sum_positive: float
    n_positive: int
    best_area: float
    best_area_id: int
    best_height: float
    best_height_id: int


def _simulate_range(
    model: IncrementModel,
    seed: int,
    lo: int,
    hi: int,
    thresholds: tuple[float, ...],
    max_steps: int,
) -> _Partial:
    levels = list(thresholds)
    hist = np.zeros(len(levels) + 1, dtype=np.int64)
    n_trunc = 0
    n_ok = 0
    sum_tau = 0
    sum_pos = 0.0
    n_pos = 0
    best_a = -math.inf
    best_a_id = _NO_STREAM
    best_h = -math.inf
    best_h_id = _NO_STREAM
    sampler: IncrementSampler | None = None
    for j in range(lo, hi):
        if sampler is None:
            sampler = model.sampler(seed, j)
        else:
            sampler.reset(seed, j)
        tau, area, height, truncated = _walk(sampler, max_steps)
        if truncated:
            n_trunc += 1
            continue
        n_ok += 1
        sum_tau += tau
        if area > 0.0:
            sum_pos += area
            n_pos += 1
        hist[bisect_right(levels, area)] += 1
        if area > best_a:
            best_a = area
            best_a_id = j
        if height > best_h:
            best_h = height
            best_h_id = j
    return _Partial(
        hist, n_ok, n_trunc, sum_tau, sum_pos, n_pos, best_a, best_a_id, best_h, best_h_id
    )


def _merge(a: _Partial, b: _Partial) -> _Partial:
    # strict-greater keeps the smaller stream id on exact ties, so the merge
    # is commutative even on lattice models where areas collide
    if (b.best_area > a.best_area) or (
        b.best_area == a.best_area and b.best_area_id < a.best_area_id
    ):
        area, area_id = b.best_area, b.best_area_id
    else:
        area, area_id = a.best_area, a.best_area_id
    if (b.best_height > a.best_height) or (
        b.best_height == a.best_height and b.best_height_id < a.best_height_id
    ):
        height, height_id = b.best_height, b.best_height_id
    else:
        height, height_id = a.best_height, a.best_height_id
    return _Partial(
        a.hist + b.hist,
        a.n_done + b.n_done,
        a.n_truncated + b.n_truncated,
        a.sum_tau + b.sum_tau,
        a.sum_positive + b.sum_positive,
        a.n_positive + b.n_positive,
        area,
        area_id,
        height,
        height_id,
    )


def simulate_campaign(model: IncrementModel, config: CampaignConfig) -> CampaignResult:
    """Run ``config.n_paths`` cycles on streams ``(seed, 0..n_paths-1)``.

    Raises:
        ExcessiveTruncation: If the fraction of step-capped cycles exceeds
            ``config.truncation_limit``.
    """
    if config.n_paths < 1:
        raise ValueError(f"n_paths must be at least 1, got {config.n_paths}")
    if config.workers < 1:
        raise ValueError(f"workers must be at least 1, got {config.workers}")
    if config.thresholds is None:
        thresholds = default_thresholds(config.n_paths, busy_exponent(model).K)
    else:
        thresholds = tuple(sorted(float(b) for b in config.thresholds))
        if not thresholds or thresholds[0] <= 0.0:
            raise ValueError("thresholds must be positive")
    ranges = [
        (lo, min(lo + _CHUNK_PATHS, config.n_paths))
        for lo in range(0, config.n_paths, _CHUNK_PATHS)
    ]
    if config.workers == 1 or len(ranges) == 1:
        partials = [
            _simulate_range(model, config.seed, lo, hi, thresholds, config.max_steps)
            for lo, hi in ranges
        ]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(
                    _simulate_range, model, config.seed, lo, hi, thresholds, config.max_steps
                )
                for lo, hi in ranges
            ]
            partials = [f.result() for f in futures]
    total = partials[0]
    for part in partials[1:]:
        total = _merge(total, part)

    frac = total.n_truncated / config.n_paths
    if frac > config.truncation_limit:
        raise ExcessiveTruncation(
            f"{total.n_truncated} of {config.n_paths} cycles hit the "
            f"{config.max_steps}-step cap (fraction {frac:.3g} > {config.truncation_limit:g})"
        )

    suffix = total.hist[::-1].cumsum()[::-1]
    counts = tuple(int(c) for c in suffix[1:])
    table = TailTable(
        thresholds=thresholds,
        counts=counts,
        n_paths=config.n_paths,
        n_truncated=total.n_truncated,
    )

    extremes = None
    if config.record_extremes and total.n_done > 0:
        extremes = ExtremeRecords(
            area=0.0,
            area_stream_id=total.best_area_id,
            area_path=_materialize(model, config, total.best_area_id, "area_sim"),
            height=0.0,
            height_stream_id=total.best_height_id,
            height_path=_materialize(model, config, total.best_height_id, "height_sim"),
        )
        extremes.area = float(extremes.area_path.values[1:].sum())
        extremes.height = float(extremes.height_path.values[1:].max())

    mean_tau = total.sum_tau / total.n_done if total.n_done else math.nan
    mean_pos = total.sum_positive / total.n_positive if total.n_positive else None
    return CampaignResult(
        table=table, extremes=extremes, mean_tau=mean_tau, mean_positive_area=mean_pos
    )


def _materialize(
    model: IncrementModel, config: CampaignConfig, stream_id: int, label: str
) -> SampledPath:
    _, values = run_busy_period_path(model, config.seed, stream_id, config.max_steps)
    return SampledPath(
        times=np.arange(len(values) + 1, dtype=np.float64),
        values=np.concatenate([[0.0], values]),
        label=label,
    )


def empirical_log_tail(table: TailTable) -> list[tuple[float, float]]:
    """``(b, log(count/n))`` for every positive-count threshold.

    Raises:
        EmptyTable: If no threshold collected a single hit.
    """
    out = [
        (b, math.log(c / table.n_paths))
        for b, c in zip(table.thresholds, table.counts)
        if c > 0
    ]
    if not out:
        raise EmptyTable("no threshold has a positive count")
    return out


def fit_tail_offset(table: TailTable, tail_rate: float, min_count: int = 100) -> float:
    """Mean offset of the empirical log-tail above ``-tail_rate * sqrt(b)``.

    Only thresholds with at least ``min_count`` hits enter (sparser bins are
    noise); fewer than three such bins raise ``InsufficientData``.
    """
    pts = [
        (b, math.log(c / table.n_paths))
        for b, c in zip(table.thresholds, table.counts)
        if c >= min_count
    ]
    if len(pts) < 3:
        raise InsufficientData(
            f"offset fit needs 3 thresholds with count >= {min_count}, have {len(pts)}"
        )
    return float(np.mean([lp + tail_rate * math.sqrt(b) for b, lp in pts]))
