"""Day-by-day release engine.

Each day runs the stages in a fixed order: sampling decision, budget
allocation, private partition, perturbation, filtering, feature extraction,
controller update. Only the partition and perturbation stages see raw bins.
Every later stage works from released histograms, which is what keeps the
whole run within the window budget.

Every stage runs inside :func:`stage`, so instrumentation can tell which stage
touched what (see ``tests/test_postprocessing.py``).
"""

from __future__ import annotations

import contextvars
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .budget import AllocationParams, BudgetLedger, allocate_budget, record_spend, remaining_budget
from .core import DayHistogram, ReleaseRecord, StreamPrefix, validate_stream
from .features import FeatureThresholds, extract_features
from .filtering import IdentityFilter, ParticleFilter
from .metrics import UtilityReport, utility_report
from .partition import (
    THRESHOLD_FLOOR,
    Bucket,
    BucketSet,
    PartitionThresholds,
    bucket_layout,
    noisy_thresholds,
    partition_bounds,
)
from .perturbation import DEFAULT_ALPHA, NoiseSource, bucket_scales, perturb_means
from .sampling import SamplerState, next_interval, pearson_feedback, pid_error, schedule, should_sample

# Allocations below this fraction of the window budget are treated as "no budget left".
MIN_SPEND_FRACTION = 1e-9

_STAGE: contextvars.ContextVar[Optional[str]] = contextvars.ContextVar("redpoctor_stage", default=None)


class stage:
    """Context manager labelling the code it wraps as one pipeline stage.

    Only code that reads raw bins is labelled, so any raw read elsewhere
    shows up with no stage at all.
    """

    __slots__ = ("name", "_token")

    def __init__(self, name: str) -> None:
        self.name = name

    def __enter__(self):
        self._token = _STAGE.set(self.name)
        return self

    def __exit__(self, *exc) -> None:
        _STAGE.reset(self._token)


def current_stage() -> Optional[str]:
    """Name of the pipeline stage currently executing, if any."""
    return _STAGE.get()


@dataclass(frozen=True)
class SamplerParams:
    """Initial controller settings. ``max_interval=None`` caps intervals at w."""

    theta_p: float = 0.8
    theta_i: float = 0.2
    theta_d: float = 0.0
    delta: float = 0.05
    eta: float = 2.0
    m: int = 3
    max_interval: Optional[int] = None
    health_term_composition: str = "max"


@dataclass(frozen=True)
class SensitivitySpec:
    """Per-bin sensitivity. ``per_bucket_mean`` divides it by the bucket size
    when noising bucket means (off by default)."""

    alpha: float = DEFAULT_ALPHA
    per_bucket_mean: bool = False

    def __post_init__(self) -> None:
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError("alpha must be finite and > 0")


@dataclass(frozen=True)
class FilterParams:
    enabled: bool = True
    n_particles: int = 100
    process_noise_std: float = 5.0

    def __post_init__(self) -> None:
        if int(self.n_particles) < 1:
            raise ValueError("n_particles must be >= 1")
        if not self.process_noise_std >= 0:
            raise ValueError("process_noise_std must be >= 0")


@dataclass(frozen=True)
class PipelineConfig:
    w: int = 14
    epsilon_total: float = 3.0
    allocation: AllocationParams = field(default_factory=AllocationParams)
    sampler: SamplerParams = field(default_factory=SamplerParams)
    partition: PartitionThresholds = field(default_factory=PartitionThresholds)
    partition_enabled: bool = True
    threshold_floor: float = THRESHOLD_FLOOR
    sensitivity: SensitivitySpec = field(default_factory=SensitivitySpec)
    features: FeatureThresholds = field(default_factory=FeatureThresholds)
    eq10_literal_max: bool = False
    filter: FilterParams = field(default_factory=FilterParams)
    gamma_fraction: float = 0.0005
    baseline_k: int = 7
    seed: int = 0

    def __post_init__(self) -> None:
        if int(self.w) < 1:
            raise ValueError("w must be >= 1")
        if not self.epsilon_total > 0:
            raise ValueError("epsilon_total must be > 0")
        if not self.gamma_fraction > 0:
            raise ValueError("gamma_fraction must be > 0")
        if self.baseline_k < 1:
            raise ValueError("baseline_k must be >= 1")
        self.sampler_state()  # validates the controller settings

    def allocation_params(self) -> AllocationParams:
        return self.allocation.resolve(self.epsilon_total)

    def sampler_state(self) -> SamplerState:
        s = self.sampler
        return SamplerState(
            theta_p=s.theta_p,
            theta_i=s.theta_i,
            theta_d=s.theta_d,
            delta=s.delta,
            eta=s.eta,
            m=s.m,
            max_interval=self.w if s.max_interval is None else s.max_interval,
            health_term_composition=s.health_term_composition,
        )


def singleton_buckets(hist: DayHistogram) -> BucketSet:
    values = hist.bins.tolist()
    return BucketSet(tuple(Bucket(i, i, (v,)) for i, v in enumerate(values)))


class Pipeline:
    """One stream's release state machine. Feed days in order with :meth:`run_day`."""

    def __init__(self, config: PipelineConfig) -> None:
        self.config = config
        self.alloc = config.allocation_params()
        self.rng = NoiseSource(config.seed)
        self.ledger = BudgetLedger(config.w, config.epsilon_total)
        self.sampler = config.sampler_state()
        if config.filter.enabled:
            self.filter = ParticleFilter(config.filter.n_particles, config.filter.process_noise_std)
        else:
            self.filter = IdentityFilter()
        self.day = 0
        self.health = 0.0
        self.last_sampled: Optional[DayHistogram] = None  # unfiltered, for the feedback error
        self._min_spend = MIN_SPEND_FRACTION * config.epsilon_total

    def run_day(self, raw: DayHistogram) -> ReleaseRecord:
        day = raw.day
        if day != self.day + 1:
            raise ValueError(f"expected day {self.day + 1}, got {day}")
        self.day = day

        eps_r = eps_i = 0.0
        if should_sample(self.sampler, day):
            eps_r = remaining_budget(self.ledger, day)
            eps_i = allocate_budget(eps_r, self.sampler.last_interval, self.alloc)
            if eps_i <= self._min_spend:
                # Nothing left to spend: repeat, and try again tomorrow.
                self.sampler.next_sample_day = day + 1
                eps_i = 0.0
        if eps_i > 0.0:
            return self._sampled_day(raw, eps_r, eps_i)
        return self._repeat_day(raw)

    def _sampled_day(self, raw: DayHistogram, eps_r: float, eps_i: float) -> ReleaseRecord:
        cfg = self.config
        day = raw.day
        sens = cfg.sensitivity
        with stage("partition"):
            values = raw.bins
            if cfg.partition_enabled:
                q = self.alloc.q
                t_hat_d, t_hat_r = noisy_thresholds(
                    cfg.partition, q * eps_i, sens.alpha, self.rng, cfg.threshold_floor
                )
                bounds = partition_bounds(values.tolist(), t_hat_d, t_hat_r, cfg.partition.t_s)
                sizes, means = bucket_layout(values, bounds)
                eps_perturb = (1.0 - q) * eps_i
            else:
                sizes, means = np.ones(values.size, dtype=np.int64), values
                eps_perturb = eps_i
        with stage("perturbation"):
            unfiltered = perturb_means(
                sizes,
                means,
                sens.alpha,
                eps_perturb,
                self.rng,
                day=day,
                bin_width_minutes=raw.bin_width_minutes,
                per_bucket_mean=sens.per_bucket_mean,
            )
        if sens.per_bucket_mean:
            obs_scale = np.repeat(bucket_scales(sizes, sens.alpha, eps_perturb, True), sizes)
        else:
            obs_scale = sens.alpha / eps_perturb
        # Everything below works on released data only.
        self.ledger = record_spend(self.ledger, day, eps_i)
        estimate = self.filter.observe(unfiltered, obs_scale, self.rng)
        published = self._as_histogram(estimate, unfiltered)
        self.health = extract_features(published, cfg.features, literal_max=cfg.eq10_literal_max).c
        feedback = 0.0 if self.last_sampled is None else pearson_feedback(self.last_sampled, unfiltered)
        u = pid_error(self.sampler, feedback, day)
        interval = next_interval(self.sampler, u, min(self.health, 1.0), eps_r)
        interval = schedule(self.sampler, day, interval)
        self.last_sampled = unfiltered
        return ReleaseRecord._trusted(day, published, True, eps_i, interval, self.health, len(sizes), unfiltered)

    def _repeat_day(self, raw: DayHistogram) -> ReleaseRecord:
        day = raw.day
        if self.last_sampled is None:
            raise RuntimeError("no sampled release to repeat")
        last = self.last_sampled
        unfiltered = DayHistogram._trusted(day, last.bins, last.bin_width_minutes)
        published = self._as_histogram(self.filter.predict(self.rng), unfiltered)
        return ReleaseRecord._trusted(
            day, published, False, 0.0, self.sampler.last_interval, self.health, None, unfiltered
        )

    @staticmethod
    def _as_histogram(estimate: np.ndarray, unfiltered: DayHistogram) -> DayHistogram:
        if estimate is unfiltered.bins:
            return unfiltered
        est = np.array(estimate, dtype=float)
        est.setflags(write=False)
        return DayHistogram._trusted(unfiltered.day, est, unfiltered.bin_width_minutes)


def run_stream(config: PipelineConfig, stream: StreamPrefix) -> Tuple[List[ReleaseRecord], UtilityReport]:
    """Release every day of ``stream`` and score the result against it.

    Input checks and scoring read the raw stream too; they run under their
    own ``"validation"`` and ``"scoring"`` stage labels, outside the release.
    """
    with stage("validation"):
        validate_stream(stream)
    pipeline = Pipeline(config)
    records = [pipeline.run_day(h) for h in stream]
    with stage("scoring"):
        report = utility_report(records, stream, config.gamma_fraction)
    return records, report
