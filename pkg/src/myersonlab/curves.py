"""Revenue curves in quantile space, ironing, and ironed virtual values.

The revenue curve of a discrete distribution is piecewise linear with one
breakpoint per atom; ironing replaces it by its upper concave envelope.
The ironed virtual value of a value v is the envelope's right derivative
at the quantile of v.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache, total_ordering

from .dist import ValueDist, quantile_of_value


@total_ordering
class _NegInf:
    """Sentinel ordered below every float. Arithmetic is deliberately undefined."""

    __slots__ = ()

    def __lt__(self, other):
        return not isinstance(other, _NegInf)

    def __eq__(self, other):
        return isinstance(other, _NegInf)

    def __hash__(self):
        return hash("myersonlab.NEG_INF")

    def __repr__(self):
        return "NEG_INF"


NEG_INF = _NegInf()


@dataclass(frozen=True)
class RevenueCurve:
    """Piecewise-linear curve on [0, 1] given by (quantile, revenue) breakpoints."""

    breakpoints: tuple[tuple[float, float], ...]

    @property
    def quantiles(self) -> tuple[float, ...]:
        return tuple(q for q, _ in self.breakpoints)

    def value_at(self, q: float) -> float:
        """Linear interpolation between breakpoints."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"quantile {q!r} outside [0, 1]")
        bps = self.breakpoints
        idx = bisect_right([p[0] for p in bps], q) - 1
        if idx >= len(bps) - 1:
            return bps[-1][1]
        (q0, r0), (q1, r1) = bps[idx], bps[idx + 1]
        if q == q0:
            return r0
        return r0 + (r1 - r0) * (q - q0) / (q1 - q0)

    def right_slope_at(self, q: float) -> float:
        """Slope of the segment to the right of q; undefined at q = 1."""
        if not 0.0 <= q < 1.0:
            raise ValueError(f"no right derivative at quantile {q!r}")
        bps = self.breakpoints
        idx = bisect_right([p[0] for p in bps], q) - 1
        (q0, r0), (q1, r1) = bps[idx], bps[idx + 1]
        return (r1 - r0) / (q1 - q0)

    def to_json(self) -> list:
        return [[q, r] for q, r in self.breakpoints]


def revenue_curve(d: ValueDist) -> RevenueCurve:
    """Revenue curve of d: breakpoint (Pr[u >= v], v * Pr[u >= v]) per atom.

    Atoms are walked in descending value order so quantiles increase; the
    leading breakpoint is (0, 0) and the final quantile is snapped to 1.
    """
    bps = [(0.0, 0.0)]
    acc = 0.0
    m = len(d.support)
    for j in range(m - 1, -1, -1):
        acc += d.probs[j]
        q = 1.0 if j == 0 else acc
        bps.append((q, q * d.support[j]))
    return RevenueCurve(tuple(bps))


def iron(c: RevenueCurve) -> RevenueCurve:
    """Upper concave envelope of the curve over its breakpoints.

    Single monotone-chain sweep; the output breakpoints are a subset of the
    input breakpoints (collinear interior points are dropped).
    """
    hull: list[tuple[float, float]] = []
    for q, r in c.breakpoints:
        while len(hull) >= 2:
            (q0, r0), (q1, r1) = hull[-2], hull[-1]
            # pop the middle point when it is on or below the chord
            if (q1 - q0) * (r - r0) - (r1 - r0) * (q - q0) >= 0.0:
                hull.pop()
            else:
                break
        hull.append((q, r))
    return RevenueCurve(tuple(hull))


@lru_cache(maxsize=None)
def _ironed(d: ValueDist) -> RevenueCurve:
    return iron(revenue_curve(d))


def ironed_virtual(d: ValueDist, v: float):
    """Right derivative of the ironed revenue curve at the quantile of v.

    Values strictly below the lowest atom sit at quantile 1 where no curve
    mass follows; they get the NEG_INF sentinel. Values above the top atom
    sit at quantile 0 and get the envelope's first slope.
    """
    if v < d.support[0]:
        return NEG_INF
    return _ironed(d).right_slope_at(quantile_of_value(d, v))


@dataclass(frozen=True)
class VirtualTable:
    """Ironed virtual values as a right-continuous step function of value.

    Segment j covers [thresholds[j], thresholds[j+1]); the last segment
    extends past the top atom, and values below thresholds[0] map to the
    NEG_INF sentinel (segment index -1).
    """

    thresholds: tuple[float, ...]
    slopes: tuple[float, ...]

    def segment(self, v: float) -> int:
        return bisect_right(self.thresholds, v) - 1

    def at(self, v: float):
        idx = self.segment(v)
        return NEG_INF if idx < 0 else self.slopes[idx]

    def for_segment(self, idx: int):
        return NEG_INF if idx < 0 else self.slopes[idx]


@lru_cache(maxsize=None)
def virtual_table(d: ValueDist) -> VirtualTable:
    return VirtualTable(d.support, tuple(ironed_virtual(d, s) for s in d.support))


def ironing_intervals(d: ValueDist) -> list[tuple[float, float]]:
    """Maximal quantile intervals where the envelope sits strictly above the curve.

    An envelope segment counts as ironed when some raw breakpoint strictly
    inside it lies more than 1e-12 below the envelope.
    """
    raw = revenue_curve(d)
    hull = iron(raw)
    out = []
    for (q0, r0), (q1, r1) in zip(hull.breakpoints, hull.breakpoints[1:]):
        slope = (r1 - r0) / (q1 - q0)
        ironed_here = False
        for q, r in raw.breakpoints:
            if q0 < q < q1 and r0 + slope * (q - q0) - r > 1e-12:
                ironed_here = True
                break
        if ironed_here:
            out.append((q0, q1))
    return out


def monopoly(d: ValueDist) -> tuple[float, float]:
    """Best take-it-or-leave-it price over the support, ties toward the larger price."""
    best_price = best_rev = None
    tail = 0.0
    for j in range(len(d.support) - 1, -1, -1):
        tail += d.probs[j]
        rev = d.support[j] * tail
        if best_rev is None or rev > best_rev:
            best_price, best_rev = d.support[j], rev
    return best_price, best_rev
