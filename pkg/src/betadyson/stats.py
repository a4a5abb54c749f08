"""Monte Carlo estimates, two-sample comparisons and seeded worker streams."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    n: int

    @classmethod
    def from_samples(cls, values) -> "Estimate":
        values = np.asarray(values, dtype=float)
        n = values.size
        se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
        return cls(float(values.mean()), se, n)

    @classmethod
    def from_antithetic(cls, values, partner) -> "Estimate":
        """Estimate from antithetic pairs: each pair average counts as one draw."""
        pairs = 0.5 * (np.asarray(values, dtype=float) + np.asarray(partner, dtype=float))
        est = cls.from_samples(pairs)
        return cls(est.mean, est.std_error, 2 * pairs.size)

    def z_score(self, reference: float) -> float:
        if self.std_error == 0:
            return 0.0 if self.mean == reference else math.copysign(math.inf, self.mean - reference)
        return (self.mean - reference) / self.std_error

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std_error": self.std_error, "n": self.n}


def two_sample_z(a: Estimate, b: Estimate) -> float:
    se = math.hypot(a.std_error, b.std_error)
    if se == 0:
        return 0.0 if a.mean == b.mean else math.copysign(math.inf, a.mean - b.mean)
    return (a.mean - b.mean) / se


def z_critical(level: float) -> float:
    """Two-sided normal critical value, e.g. 2.576 at the 1% level."""
    from scipy.stats import norm

    return float(norm.isf(level / 2))


def generators(seed: int, workers: int = 1) -> list[np.random.Generator]:
    """One independent stream per worker, derived from ``(seed, worker index)``."""
    children = np.random.SeedSequence(seed).spawn(workers)
    return [np.random.default_rng(s) for s in children]


def split(n: int, workers: int) -> list[int]:
    base, extra = divmod(n, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def run_parallel(fn: Callable[[int, np.random.Generator], np.ndarray], n: int, seed: int, workers: int = 1) -> np.ndarray:
    """Run ``fn(n_w, rng_w)`` on each worker's share and concatenate in worker order.

    Output is reproducible for fixed ``(seed, workers)`` regardless of scheduling.
    """
    rngs = generators(seed, workers)
    sizes = split(n, workers)
    if workers == 1:
        return fn(sizes[0], rngs[0])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, sizes, rngs))
    return np.concatenate(parts, axis=0)
