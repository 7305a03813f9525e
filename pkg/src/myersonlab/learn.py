"""Sampling and learned priors: empirical and dominated empirical distributions,
concentration radii, sample-count formulas, and Hellinger distances.

Natural logarithms throughout the sample-count and radius formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log, sqrt

import numpy as np

from .dist import ProductDist, ValueDist, make_discrete


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """count x n matrix of values in [0, 1]; column i is i.i.d. from coordinate i."""

    n: int
    count: int
    values: np.ndarray
    seed: int | None


@dataclass(frozen=True)
class Radius:
    """Probability-scale confidence radius."""

    value: float

    def __post_init__(self):
        if self.value < 0.0:
            raise ValueError("radius must be nonnegative")


def draw_samples(d: ProductDist, count: int, seed) -> SampleMatrix:
    """Inverse-CDF sampling per coordinate; deterministic given the seed."""
    if count < 1:
        raise ValueError("sample count must be at least 1")
    rng = np.random.default_rng(seed)
    u = rng.random((count, d.n))
    cols = []
    for j, dj in enumerate(d):
        cum = np.cumsum(dj.probs)
        idx = np.minimum(np.searchsorted(cum, u[:, j], side="left"), len(dj.support) - 1)
        cols.append(np.asarray(dj.support)[idx])
    values = np.stack(cols, axis=1)
    values.setflags(write=False)
    return SampleMatrix(d.n, count, values, seed if isinstance(seed, int) else None)


def empirical(s: SampleMatrix) -> ProductDist:
    """Product of per-coordinate uniform distributions over the samples."""
    dists = []
    for j in range(s.n):
        vals, counts = np.unique(s.values[:, j], return_counts=True)
        dists.append(make_discrete(vals, counts / s.count))
    return ProductDist(tuple(dists))


def dominated_empirical(s: SampleMatrix, delta: float) -> ProductDist:
    """Empirical distribution inflated so the true prior dominates it w.h.p.

    Per coordinate the empirical CDF is inflated by a Bernstein-style
    radius at each support point, clamped to 1 and made nondecreasing by a
    cumulative max. The inflated CDF is positive below the lowest sample,
    so that mass is realized as an atom at value 0; pushing it to the
    bottom is what keeps dominance implied by the CDF inequality alone.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta {delta!r} outside (0, 1)")
    n, count = s.n, s.count
    coef = log(2.0 * n * count / delta)
    dists = []
    for j in range(n):
        vals, counts = np.unique(s.values[:, j], return_counts=True)
        emp = np.cumsum(counts) / count
        inflated = np.minimum(
            1.0,
            emp + np.sqrt(2.0 * emp * (1.0 - emp) * coef / count) + 4.0 * coef / count,
        )
        inflated = np.maximum.accumulate(inflated)
        bottom = min(1.0, 4.0 * coef / count)
        masses = np.diff(inflated, prepend=bottom)
        dists.append(
            make_discrete([0.0] + [float(v) for v in vals], [bottom] + [float(m) for m in masses])
        )
    return ProductDist(tuple(dists))


def bernstein_radius(mean: float, count: int, delta: float) -> Radius:
    """Two-sided confidence radius for the mean of [0, 1] samples.

    t = sqrt(2 m (1-m) ln(2/delta) / N) + ln(2/delta) / N, which satisfies
    t^2 >= (2 m (1-m) + (2/3) t) ln(2/delta) / N.
    """
    if not 0.0 <= mean <= 1.0:
        raise ValueError(f"mean {mean!r} outside [0, 1]")
    if count < 1:
        raise ValueError("count must be at least 1")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta {delta!r} outside (0, 1)")
    coef = log(2.0 / delta)
    return Radius(sqrt(2.0 * mean * (1.0 - mean) * coef / count) + coef / count)


def required_samples(
    setting: str, n: int, k: float, eps: float, delta: float, C: float
) -> int:
    """Sample count for learning a near-optimal auction at the given scale.

    downward_closed: C (nk / eps^2) ln(nk / (eps delta))
    general:         C (nk^2 / eps^2) ln(nk / eps) ln(nk / (eps delta))
    """
    if min(n, k, eps, delta, C) <= 0 or eps >= 1 or delta >= 1:
        raise ValueError("all parameters positive, eps and delta in (0, 1)")
    if setting == "downward_closed":
        raw = C * (n * k / eps**2) * log(n * k / (eps * delta))
    elif setting == "general":
        raw = C * (n * k**2 / eps**2) * log(n * k / eps) * log(n * k / (eps * delta))
    else:
        raise ValueError(f"unknown setting {setting!r}")
    return ceil(raw)


def hellinger_sq(p: ValueDist, q: ValueDist) -> float:
    """Squared Hellinger distance over the merged support; in [0, 1]."""
    pm = dict(zip(p.support, p.probs))
    qm = dict(zip(q.support, q.probs))
    total = 0.0
    for v in set(pm) | set(qm):
        total += (sqrt(pm.get(v, 0.0)) - sqrt(qm.get(v, 0.0))) ** 2
    return 0.5 * total


def hellinger_sq_product(ps: ProductDist, qs: ProductDist) -> float:
    """Exact squared Hellinger distance of products: 1 - prod(1 - H_i^2).

    Always at most the coordinate sum of squared distances.
    """
    if ps.n != qs.n:
        raise ValueError(f"dimension mismatch: {ps.n} vs {qs.n}")
    compl = 1.0
    for pi, qi in zip(ps, qs):
        compl *= 1.0 - hellinger_sq(pi, qi)
    return 1.0 - compl
