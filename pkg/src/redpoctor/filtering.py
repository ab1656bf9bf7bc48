"""Particle-filter post-processing of released histograms.

Each bin runs an independent bootstrap filter with a Gaussian random-walk
process model and a Laplace observation model whose scale is the noise scale
actually used on the observed day. On sampling days the posterior mean is
published; on the other days the prior (predicted) mean is published.

Draw order is fixed so a seed reproduces a run: process noise is drawn as
one ``(n_bins, n_particles)`` block in row-major order (bin by bin), then
one systematic-resampling offset per resampled bin in ascending bin order.

Only released observations and their public noise scales enter here.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DegenerateWeights, Uninitialized
from .perturbation import NoiseSource

# exp(x) underflows to 0.0 below this
_LOG_UNDERFLOW = np.log(np.finfo(float).tiny)


@dataclass(frozen=True, eq=False)
class FilterState:
    """Per-bin particles and normalised weights, both shaped (n_bins, n_particles)."""

    particles: np.ndarray
    weights: np.ndarray
    process_noise_std: float = 5.0

    @property
    def particle_count(self) -> int:
        return self.particles.shape[1]

    def estimate(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.weights, self.particles)


def _column(scale, n_bins: int) -> np.ndarray:
    """Noise scale as an (n_bins, 1) column; accepts a scalar or one value per bin."""
    col = np.asarray(scale, dtype=float).reshape(-1, 1)
    if col.shape[0] not in (1, n_bins):
        raise ValueError("obs_noise_scale must be a scalar or have one entry per bin")
    return np.broadcast_to(col, (n_bins, 1))


def init_filter(
    observation,
    obs_noise_scale: float,
    rng: NoiseSource,
    n_particles: int = 100,
    process_noise_std: float = 5.0,
) -> Tuple[FilterState, np.ndarray]:
    """Seed particles around the first observation with its Laplace noise spread.

    ``obs_noise_scale`` is a scalar or one scale per bin, here and in
    :func:`filter_update`.
    """
    obs = np.asarray(getattr(observation, "bins", observation), dtype=float)
    if n_particles < 1:
        raise ValueError("n_particles must be >= 1")
    if not process_noise_std >= 0:
        raise ValueError("process_noise_std must be >= 0")
    scale = _column(obs_noise_scale, obs.size)
    spread = rng.laplace(1.0, obs.size * n_particles).reshape(obs.size, n_particles)
    particles = obs[:, None] + spread * np.maximum(scale, 0.0)
    weights = np.full_like(particles, 1.0 / n_particles)
    state = FilterState(particles, weights, float(process_noise_std))
    return state, state.estimate()


def filter_predict(state: Optional[FilterState], rng: NoiseSource) -> Tuple[FilterState, np.ndarray]:
    """Random-walk step; returns the prior mean per bin."""
    if state is None:
        raise Uninitialized("filter has not seen a sampled day yet")
    if state.process_noise_std > 0:
        particles = state.particles + rng.normal(state.process_noise_std, state.particles.shape)
    else:
        particles = state.particles
    new = FilterState(particles, state.weights, state.process_noise_std)
    return new, new.estimate()


def effective_sample_size(weights: np.ndarray) -> np.ndarray:
    return 1.0 / np.sum(weights * weights, axis=-1)


def systematic_resample(weights: np.ndarray, rng: NoiseSource) -> np.ndarray:
    """Particle indices per row for the given (rows, N) weights."""
    rows, n = weights.shape
    cum = np.cumsum(weights, axis=1)
    cum[:, -1] = 1.0
    positions = (rng.random(rows)[:, None] + np.arange(n)) / n
    # Offset each row by its index so one flat searchsorted handles all rows.
    offsets = np.arange(rows)[:, None]
    flat = np.searchsorted((cum + offsets).ravel(), (positions + offsets).ravel(), side="right")
    idx = flat.reshape(rows, n) - offsets * n
    return np.minimum(idx, n - 1)


def filter_update(
    state: Optional[FilterState],
    observation,
    obs_noise_scale: float,
    rng: NoiseSource,
) -> Tuple[FilterState, np.ndarray]:
    """Reweight by the Laplace likelihood of ``observation`` and resample bins
    whose effective sample size fell below half the particle count.

    Bins where every likelihood underflows fall back to the observation
    itself (particles collapse onto it, weights reset to uniform) and a
    :class:`DegenerateWeights` warning is issued.
    """
    if state is None:
        raise Uninitialized("filter has not seen a sampled day yet")
    obs = np.asarray(getattr(observation, "bins", observation), dtype=float)
    particles = state.particles
    n = particles.shape[1]
    if obs.shape[0] != particles.shape[0]:
        raise ValueError("observation length does not match the filter")

    scale = _column(obs_noise_scale, obs.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        loglik = -np.abs(particles - obs[:, None]) / scale
    loglik[np.isnan(loglik)] = -np.inf  # zero distance at zero scale
    degenerate = loglik.max(axis=1) < _LOG_UNDERFLOW

    with np.errstate(divide="ignore", invalid="ignore"):
        logw = np.log(state.weights) + loglik
        logw -= logw.max(axis=1, keepdims=True)
        weights = np.exp(logw)
        weights /= weights.sum(axis=1, keepdims=True)

    if degenerate.any():
        warnings.warn(
            f"{int(degenerate.sum())} bin(s) with underflowed likelihoods; using the observation",
            DegenerateWeights,
            stacklevel=2,
        )
        particles = particles.copy()
        particles[degenerate] = obs[degenerate, None]
        weights[degenerate] = 1.0 / n

    resample = effective_sample_size(weights) < n / 2.0
    if resample.any():
        rows = np.flatnonzero(resample)
        idx = systematic_resample(weights[rows], rng)
        if particles is state.particles:
            particles = particles.copy()
        particles[rows] = np.take_along_axis(particles[rows], idx, axis=1)
        weights[rows] = 1.0 / n

    new = FilterState(particles, weights, state.process_noise_std)
    est = new.estimate()
    est[degenerate] = obs[degenerate]
    return new, est


class ParticleFilter:
    """Stateful wrapper the pipeline drives day by day."""

    def __init__(self, n_particles: int = 100, process_noise_std: float = 5.0) -> None:
        self.n_particles = int(n_particles)
        self.process_noise_std = float(process_noise_std)
        self.state: Optional[FilterState] = None

    def observe(self, observation, obs_noise_scale: float, rng: NoiseSource) -> np.ndarray:
        if self.state is None:
            self.state, est = init_filter(
                observation, obs_noise_scale, rng, self.n_particles, self.process_noise_std
            )
            return est
        self.state, _ = filter_predict(self.state, rng)
        self.state, est = filter_update(self.state, observation, obs_noise_scale, rng)
        return est

    def predict(self, rng: NoiseSource) -> np.ndarray:
        self.state, est = filter_predict(self.state, rng)
        return est


class IdentityFilter:
    """Pass-through stage: publishes observations and repeats them on gap days."""

    def __init__(self) -> None:
        self.last: Optional[np.ndarray] = None

    def observe(self, observation, obs_noise_scale: float, rng: NoiseSource) -> np.ndarray:
        self.last = np.asarray(getattr(observation, "bins", observation), dtype=float)
        return self.last

    def predict(self, rng: NoiseSource) -> np.ndarray:
        if self.last is None:
            raise Uninitialized("filter has not seen a sampled day yet")
        return self.last
