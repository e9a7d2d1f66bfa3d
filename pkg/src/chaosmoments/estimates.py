"""Monte Carlo configuration and batch-means estimates."""

import math
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod


@dataclass(frozen=True)
class McConfig:
    total_samples: int = 200_000
    batches: int = 32
    master_seed: int = 0
    unit_variance: bool = False

    def __post_init__(self):
        if self.batches < 8:
            raise ValueError("batches must be >= 8 for stable batch-means stderr")
        if self.total_samples % self.batches != 0:
            raise ValueError("total_samples must be divisible by batches")

    @property
    def batch_size(self):
        return self.total_samples // self.batches


@dataclass(frozen=True)
class McEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    warning: str | None = None


def batched_mean(cfg, batch_fn, transform=None):
    """Batch-means estimate of E f with one counter-based stream per batch.

    ``batch_fn(generator, size)`` returns the per-sample values of one
    batch.  ``transform`` optionally maps the mean (and propagates the
    stderr by the delta method) -- used for p-th roots of moments.
    Reduction order is fixed (ascending batch index) so results are
    bit-identical regardless of scheduling.
    """
    means = np.empty(cfg.batches)
    for b in range(cfg.batches):
        gen = rngmod.stream(cfg.master_seed, rngmod.MC_STREAM + b)
        vals = np.asarray(batch_fn(gen, cfg.batch_size), dtype=float)
        means[b] = vals.mean()
    m = float(means.mean())
    se = float(means.std(ddof=1) / math.sqrt(cfg.batches))
    if transform is not None:
        m, se = transform(m, se)
    return McEstimate(m, se, cfg.total_samples, cfg.master_seed)


def power_mean_transform(p):
    """Map a mean of p-th powers to the p-th root with delta-method stderr."""

    def transform(m, se):
        if m <= 0.0:
            return 0.0, 0.0
        value = m ** (1.0 / p)
        return value, se * m ** (1.0 / p - 1.0) / p

    return transform
