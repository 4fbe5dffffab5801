"""Small statistical helpers: binomial intervals and empirical total variation."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Hashable

import numpy as np

from .rng import make_rng

Z95 = 1.959963984540054
MAX_TV_CELLS = 1 << 20


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def wilson_half_width(successes: int, trials: int, z: float = Z95) -> float:
    lo, hi = wilson_interval(successes, trials, z)
    return (hi - lo) / 2


def tv_from_counts(c1: Counter, c2: Counter) -> float:
    n1, n2 = sum(c1.values()), sum(c2.values())
    keys = set(c1) | set(c2)
    return 0.5 * sum(abs(c1[k] / n1 - c2[k] / n2) for k in keys)


@dataclass
class TVEstimate:
    tv: float
    ci_low: float
    ci_high: float
    samples: int


def tv_distance_empirical(sampler1: Callable[[int], Hashable], sampler2: Callable[[int], Hashable],
                          n_bits: int, samples: int, bootstrap: int = 200, seed: int = 0) -> TVEstimate:
    """Plug-in TV distance between two samplers on ``n_bits``-bit outcomes.

    ``sampler(i)`` returns the ``i``-th draw. The CI is a basic (pivotal)
    bootstrap over the two count tables.
    """
    if (1 << n_bits) > MAX_TV_CELLS:
        raise ValueError(f"outcome space of {n_bits} bits exceeds {MAX_TV_CELLS} cells")
    if samples < 1:
        raise ValueError("samples must be positive")
    c1 = Counter(sampler1(i) for i in range(samples))
    c2 = Counter(sampler2(i) for i in range(samples))
    return tv_with_bootstrap(c1, c2, bootstrap, seed)


def tv_with_bootstrap(c1: Counter, c2: Counter, bootstrap: int = 200, seed: int = 0) -> TVEstimate:
    tv = tv_from_counts(c1, c2)
    keys = sorted(set(c1) | set(c2), key=repr)
    p1 = np.array([c1[k] for k in keys], dtype=float)
    p2 = np.array([c2[k] for k in keys], dtype=float)
    n1, n2 = int(p1.sum()), int(p2.sum())
    rng = make_rng(seed, "tv-bootstrap")
    reps = []
    for _ in range(bootstrap):
        b1 = rng.multinomial(n1, p1 / n1) / n1
        b2 = rng.multinomial(n2, p2 / n2) / n2
        reps.append(0.5 * np.abs(b1 - b2).sum())
    if not reps:
        return TVEstimate(tv, tv, tv, min(n1, n2))
    # Pivotal interval: the plug-in estimator is biased upward, so reflect the
    # bootstrap quantiles around the point estimate.
    qlo, qhi = np.quantile(reps, [0.025, 0.975])
    return TVEstimate(tv, max(0.0, float(2 * tv - qhi)), float(2 * tv - qlo), min(n1, n2))
