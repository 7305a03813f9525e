"""Finite value distributions on [0, 1].

A distribution is a finite list of atoms. CDFs are right-continuous step
functions, so suprema over values are attained at support points; the
predicates below evaluate only there (plus left limits) and stay exact.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from math import sqrt

MASS_TOL = 1e-12  # tolerance for probability-mass bookkeeping
CDF_TOL = 1e-12  # slack for CDF comparisons at checkpoints


@dataclass(frozen=True)
class ValueDist:
    """Atoms of a discrete distribution: strictly increasing support, positive masses."""

    support: tuple[float, ...]
    probs: tuple[float, ...]

    def to_json(self) -> dict:
        return {"support": list(self.support), "probs": list(self.probs)}

    @staticmethod
    def from_json(obj: dict) -> "ValueDist":
        return make_discrete(obj["support"], obj["probs"])


@dataclass(frozen=True)
class ProductDist:
    """Independent per-bidder value distributions."""

    dists: tuple[ValueDist, ...]

    def __post_init__(self):
        if len(self.dists) < 1:
            raise ValueError("a product distribution needs at least one coordinate")

    @property
    def n(self) -> int:
        return len(self.dists)

    def __iter__(self):
        return iter(self.dists)

    def __getitem__(self, i: int) -> ValueDist:
        return self.dists[i]

    def __len__(self) -> int:
        return len(self.dists)

    def to_json(self) -> list:
        return [d.to_json() for d in self.dists]

    @staticmethod
    def from_json(obj: list) -> "ProductDist":
        return ProductDist(tuple(ValueDist.from_json(o) for o in obj))


def product_dist(*dists: ValueDist) -> ProductDist:
    return ProductDist(tuple(dists))


def make_discrete(values, probs) -> ValueDist:
    """Build a ValueDist from raw atoms.

    Duplicate values are merged (masses added), zero-mass atoms dropped and
    the support sorted ascending. Masses must be nonnegative and sum to 1
    within MASS_TOL; values must lie in [0, 1].
    """
    values = [float(v) for v in values]
    probs = [float(p) for p in probs]
    if len(values) != len(probs):
        raise ValueError(f"{len(values)} values but {len(probs)} probabilities")
    total = sum(probs)
    if abs(total - 1.0) > MASS_TOL:
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    merged: dict[float, float] = {}
    for v, p in zip(values, probs):
        if p < -MASS_TOL:
            raise ValueError(f"negative probability {p!r}")
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"value {v!r} outside [0, 1]")
        merged[v] = merged.get(v, 0.0) + p
    atoms = [(v, p) for v, p in sorted(merged.items()) if p > 0.0]
    if not atoms:
        raise ValueError("no atoms with positive probability")
    support, probs = zip(*atoms)
    return ValueDist(support, probs)


def point_mass(v: float) -> ValueDist:
    return make_discrete([v], [1.0])


def uniform_grid(values) -> ValueDist:
    """Uniform distribution over the given values."""
    values = list(values)
    return make_discrete(values, [1.0 / len(values)] * len(values))


def discretize_uniform_with_atom(
    atom_value: float, atom_mass: float, step: float
) -> ValueDist:
    """Discretize a unit-interval density with one extra atom.

    The continuous part (total mass 1 - atom_mass, uniform on [0, 1]) is
    binned at the given step and each bin is represented by its midpoint;
    the atom keeps its exact value.
    """
    cells = round(1.0 / step)
    cell_mass = (1.0 - atom_mass) / cells
    values = [(j + 0.5) * step for j in range(cells)]
    probs = [cell_mass] * cells
    values.append(atom_value)
    probs.append(atom_mass)
    return make_discrete(values, probs)


def cdf(d: ValueDist, v: float) -> float:
    """Pr[u <= v] for u drawn from d."""
    return sum(d.probs[: bisect_right(d.support, v)])


def cdf_left(d: ValueDist, v: float) -> float:
    """Left limit Pr[u < v]."""
    return sum(d.probs[: bisect_left(d.support, v)])


def _tail(d: ValueDist, idx: int) -> float:
    """Pr[u >= support[idx]], summed from the top.

    Quantiles and revenue-curve breakpoints must agree bitwise, so both are
    accumulated in the same top-down order, and the full-mass tail is
    snapped to exactly 1 just as the curve's final breakpoint is.
    """
    if idx == 0:
        return 1.0
    q = 0.0
    for j in range(len(d.probs) - 1, idx - 1, -1):
        q += d.probs[j]
    return q


def quantile_of_value(d: ValueDist, v: float) -> float:
    """Pr[u > v], the quantile of value v; nonincreasing in v."""
    return _tail(d, bisect_right(d.support, v))


def value_of_quantile(d: ValueDist, q: float) -> float:
    """Smallest value whose quantile is at most q.

    Evaluates to a support value, or to 0 at q = 1 where the infimum runs
    over the whole half-line.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"quantile {q!r} outside [0, 1]")
    if q >= 1.0:
        return 0.0
    for j, v in enumerate(d.support):
        if _tail(d, j + 1) <= q + MASS_TOL:
            return v
    return 0.0  # unreachable: the final tail is 0 <= q


def scale_values(d: ValueDist, factor: float) -> ValueDist:
    """Multiply every support value by factor in (0, 1]; masses unchanged."""
    if not 0.0 < factor <= 1.0:
        raise ValueError(f"scale factor {factor!r} outside (0, 1]")
    return make_discrete([v * factor for v in d.support], d.probs)


def _merged_support(a: ValueDist, b: ValueDist) -> list[float]:
    return sorted(set(a.support) | set(b.support))


def _checkpoint_pairs(a: ValueDist, b: ValueDist):
    """CDF pairs of a and b at merged support points and their left limits."""
    for v in _merged_support(a, b):
        yield cdf(a, v), cdf(b, v)
        yield cdf_left(a, v), cdf_left(b, v)


def dominates(big: ProductDist, small: ProductDist) -> bool:
    """First-order stochastic dominance: big's CDF pointwise below small's."""
    if big.n != small.n:
        raise ValueError(f"dimension mismatch: {big.n} vs {small.n}")
    for bi, si in zip(big, small):
        for v in _merged_support(bi, si):
            if cdf(bi, v) > cdf(si, v) + CDF_TOL:
                return False
    return True


def _check_close_args(a: ProductDist, b: ProductDist, eps: float, n: float, k: float):
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps {eps!r} outside (0, 1]")
    if n < 1 or k < 1:
        raise ValueError(f"n and k must be at least 1, got n={n!r} k={k!r}")


def is_close(a: ProductDist, b: ProductDist, eps: float, n: int, k: float) -> bool:
    """Variance-sensitive closeness of per-bidder CDFs.

    At every checkpoint the gap must stay within
    sqrt(min-variance * eps^2 / (4nk)) + eps^2 / (2nk).
    """
    _check_close_args(a, b, eps, n, k)
    for ai, bi in zip(a, b):
        for fa, fb in _checkpoint_pairs(ai, bi):
            var = max(0.0, min(fa * (1.0 - fa), fb * (1.0 - fb)))
            bound = sqrt(var * eps * eps / (4.0 * n * k)) + eps * eps / (2.0 * n * k)
            if abs(fa - fb) > bound + CDF_TOL:
                return False
    return True


def is_close_uniform(a: ProductDist, b: ProductDist, eps: float, n: int, k: float) -> bool:
    """Uniform closeness: every CDF gap at most eps / sqrt(nk)."""
    _check_close_args(a, b, eps, n, k)
    bound = eps / sqrt(n * k)
    for ai, bi in zip(a, b):
        for fa, fb in _checkpoint_pairs(ai, bi):
            if abs(fa - fb) > bound + CDF_TOL:
                return False
    return True


def min_closeness_eps(a: ProductDist, b: ProductDist, n: int, k: float) -> float:
    """Smallest eps at which is_close(a, b, eps, n, k) holds.

    Solved per checkpoint from the closed-form bound (a quadratic in eps)
    and maximized; may exceed 1, in which case no valid eps exists.
    """
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    worst = 0.0
    qa = 1.0 / (2.0 * n * k)
    for ai, bi in zip(a, b):
        for fa, fb in _checkpoint_pairs(ai, bi):
            gap = abs(fa - fb)
            if gap <= CDF_TOL:
                continue
            var = max(0.0, min(fa * (1.0 - fa), fb * (1.0 - fb)))
            qb = sqrt(var / (4.0 * n * k))
            eps_pt = (-qb + sqrt(qb * qb + 4.0 * qa * gap)) / (2.0 * qa)
            worst = max(worst, eps_pt)
    return worst


def min_uniform_closeness_eps(a: ProductDist, b: ProductDist, n: int, k: float) -> float:
    """Smallest eps at which is_close_uniform(a, b, eps, n, k) holds."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    worst = 0.0
    for ai, bi in zip(a, b):
        for fa, fb in _checkpoint_pairs(ai, bi):
            worst = max(worst, abs(fa - fb))
    return worst * sqrt(n * k)
