"""Private release of daily heart-rate histograms under a w-day sliding-window budget."""

from .baselines import BASELINES, run_baseline
from .budget import AllocationParams, BudgetLedger, allocate_budget, record_spend, remaining_budget
from .core import DayHistogram, ReleaseRecord, StreamPrefix, validate_stream
from .features import FeatureThresholds, HealthFeatures, extract_features, health_condition
from .filtering import FilterState, IdentityFilter, ParticleFilter, filter_predict, filter_update, init_filter
from .metrics import UtilityReport, mae, mre
from .partition import (
    Bucket,
    BucketSet,
    PartitionThresholds,
    bucket_layout,
    bucket_means,
    dp_partition,
    noisy_thresholds,
    partition_bounds,
)
from .perturbation import NoiseSource, laplace_sample, perturb_buckets, perturb_means
from .pipeline import FilterParams, Pipeline, PipelineConfig, SamplerParams, SensitivitySpec, run_stream
from .sampling import SamplerState, next_interval, pearson_feedback, pid_error, should_sample
from .synthetic import generate_synthetic

__version__ = "0.1.0"
