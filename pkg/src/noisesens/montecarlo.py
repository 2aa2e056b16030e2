"""Seeded Monte Carlo plumbing.

Every sampler takes an explicit integer seed.  Samples are drawn in fixed-size
chunks and chunk ``i`` gets its own counter-based Philox stream keyed by
``(seed, i)``, so the drawn values do not depend on how chunks are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_SEED = 20260101
CHUNK = 4096


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the stream labelled ``(seed, *keys)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int
    seed: int

    def within(self, target: float, sigmas: float = 4.0) -> bool:
        return abs(self.value - target) <= sigmas * self.stderr

    @classmethod
    def from_samples(cls, values, seed: int) -> "Estimate":
        values = np.asarray(values, dtype=np.float64)
        n = values.size
        sd = float(values.std(ddof=1)) if n > 1 else 0.0
        return cls(float(values.mean()), sd / math.sqrt(n), n, seed)

    @classmethod
    def exact(cls, value: float, seed: int = 0) -> "Estimate":
        return cls(float(value), 0.0, 0, seed)


def sample_chunks(
    draw: Callable[[np.random.Generator, int], np.ndarray],
    samples: int,
    seed: int,
    *,
    chunk: int = CHUNK,
    workers: int = 1,
    key: int = 0,
) -> np.ndarray:
    """Concatenate ``draw(rng_i, size_i)`` over chunks in chunk order.

    ``key`` separates streams of different experiments sharing a seed.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    sizes = [chunk] * (samples // chunk)
    if samples % chunk:
        sizes.append(samples % chunk)

    def job(i):
        return np.asarray(draw(stream(seed, key, i), sizes[i]))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    return np.concatenate(parts)
