"""Threshold selection hitting prescribed survival targets, plus ratio sweeps.

Both target kinds reduce to placing the product of per-coordinate miss
probabilities prod_i Pr((X_i, U_i) < t) at a prescribed value: the product
is 0 below all supports, 1 above them, nondecreasing in the lexicographic
threshold, and continuous except at shared atom locations, where the tie
fraction interpolates across the jump. Bisection on theta handles the
continuous part; a tie solve handles jumps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import AugThreshold
from .engine import Instance, PermutationFamily, family_gambler, prophet_value

GOLDEN_INV = (math.sqrt(5.0) - 1.0) / 2.0
E_TARGET = 1.0 / math.e

_VALID_KINDS = ("max_survival", "product_survival")


@dataclass(frozen=True)
class ThresholdTarget:
    """Either Pr(X_* >= t) = value or prod_i Pr((X_i, U_i) < t) = value."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in _VALID_KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}")
        if not 0.0 < self.value < 1.0:
            raise ValueError(f"target value must lie in (0, 1), got {self.value}")


def max_survival(p: float) -> ThresholdTarget:
    return ThresholdTarget("max_survival", p)


def product_survival(q: float) -> ThresholdTarget:
    return ThresholdTarget("product_survival", q)


def _miss_product_right(inst: Instance, theta: float) -> float:
    """prod_i Pr(X_i <= theta) (tie = 1 limit)."""
    return math.prod(d.cdf(theta) for d in inst.dists)


def _solve_tie(inst: Instance, a: float, target: float) -> float:
    """Tie fraction u with prod_i (Pr(X_i < a) + u * Pr(X_i = a)) = target."""
    lows = [d.cdf(a) - d.point_mass(a) for d in inst.dists]
    masses = [d.point_mass(a) for d in inst.dists]
    carriers = [k for k, m in enumerate(masses) if m > 0.0]
    if len(carriers) == 1:
        k = carriers[0]
        rest = math.prod(lo for i, lo in enumerate(lows) if i != k)
        if rest <= 0.0:
            return 0.0 if target <= 0.0 else 1.0
        return min(max((target / rest - lows[k]) / masses[k], 0.0), 1.0)
    lo_u, hi_u = 0.0, 1.0
    for _ in range(100):
        mid = 0.5 * (lo_u + hi_u)
        val = math.prod(lo + mid * m for lo, m in zip(lows, masses))
        if val >= target:
            hi_u = mid
        else:
            lo_u = mid
    return hi_u


def threshold_for(inst: Instance, target: ThresholdTarget) -> AugThreshold:
    """Find (theta, tie) hitting the target exactly.

    Jumps of the miss product are scanned first; if the target falls inside
    one, the tie fraction resolves it in closed form (single atom) or by
    bisection over the tie. Otherwise plain bisection over theta converges
    to the continuous crossing.
    """
    target_q = 1.0 - target.value if target.kind == "max_survival" else target.value
    for a in inst.jump_points():
        lo = math.prod(d.cdf(a) - d.point_mass(a) for d in inst.dists)
        hi = _miss_product_right(inst, a)
        if hi > lo and lo <= target_q <= hi:
            return AugThreshold(a, _solve_tie(inst, a, target_q))
    lo, hi = -1.0, inst.max_support() + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _miss_product_right(inst, mid) >= target_q:
            hi = mid
        else:
            lo = mid
    # adjacent floats by now; keep whichever lands closer to the target
    if abs(_miss_product_right(inst, lo) - target_q) < abs(
        _miss_product_right(inst, hi) - target_q
    ):
        return AugThreshold(lo, 0.0)
    return AugThreshold(hi, 0.0)


def golden_threshold(inst: Instance) -> AugThreshold:
    """Threshold with Pr(X_* >= t) equal to the inverse golden ratio."""
    return threshold_for(inst, max_survival(GOLDEN_INV))


def e_threshold(inst: Instance) -> AugThreshold:
    """Threshold with miss product prod_i Pr((X_i, U_i) < t) = 1/e."""
    return threshold_for(inst, product_survival(E_TARGET))


@dataclass(frozen=True)
class SweepPoint:
    theta: float
    tie: float
    gambler: float
    prophet: float
    ratio: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepPoint, ...]
    best: SweepPoint
    prophet: float


def _sweep_thetas(inst: Instance, points: int) -> np.ndarray:
    top = inst.max_support()
    grids = [np.linspace(0.0, top, points)]
    intervals = set()
    for d in inst.dists:
        for seg in d.segments:
            bp = seg.breakpoints()
            for a, b in zip(bp, bp[1:]):
                intervals.add((a, b))
    for a, b in sorted(intervals):
        grids.append(np.linspace(a, b, points))
    return np.unique(np.concatenate(grids))


def ratio_sweep(
    inst: Instance,
    family: PermutationFamily,
    points: int = 2000,
    tie_fractions: int = 16,
    refine_rounds: int = 12,
) -> SweepResult:
    """Evaluate the family-averaged rule across a threshold grid.

    The grid is the union of uniform points on [0, max support], uniform
    points inside every segment support, and atom locations with machine
    epsilon neighbors plus a fan of tie fractions. The best grid point is
    then refined locally (shrinking bracket for continuous thetas, tie
    bisection grid at atoms); refined points are included in the rows.
    """
    if points < 1:
        raise ValueError("sweep grid must be nonempty")
    prophet = prophet_value(inst)
    jumps = set(inst.jump_points())

    def evaluate(theta: float, tie: float) -> SweepPoint:
        g = family_gambler(inst, family, AugThreshold(theta, tie))
        return SweepPoint(theta, tie, g, prophet, g / prophet if prophet > 0 else math.nan)

    rows: dict[tuple[float, float], SweepPoint] = {}

    def record(theta: float, tie: float) -> SweepPoint:
        key = (float(theta), float(tie))
        pt = rows.get(key)
        if pt is None:
            pt = evaluate(*key)
            rows[key] = pt
        return pt

    thetas = _sweep_thetas(inst, points)
    for theta in thetas:
        record(float(theta), 0.0)
    for a in sorted(jumps):
        record(np.nextafter(a, -math.inf), 0.0)
        record(np.nextafter(a, math.inf), 0.0)
        for tie in np.linspace(0.0, 1.0, tie_fractions):
            record(a, float(tie))

    def best_point() -> SweepPoint:
        return max(rows.values(), key=lambda r: (r.ratio, -r.theta, -r.tie))

    best = best_point()
    for _ in range(refine_rounds):
        if best.theta in jumps:
            ties = sorted({r.tie for r in rows.values() if r.theta == best.theta})
            k = ties.index(best.tie)
            lo = ties[k - 1] if k > 0 else 0.0
            hi = ties[k + 1] if k + 1 < len(ties) else 1.0
            for tie in np.linspace(lo, hi, 17):
                record(best.theta, float(tie))
        else:
            ths = sorted({r.theta for r in rows.values() if r.tie == 0.0})
            k = ths.index(best.theta)
            lo = ths[k - 1] if k > 0 else best.theta
            hi = ths[k + 1] if k + 1 < len(ths) else best.theta
            if hi <= lo:
                break
            for theta in np.linspace(lo, hi, 17):
                record(float(theta), 0.0)
        best = best_point()

    ordered = tuple(rows[k] for k in sorted(rows))
    return SweepResult(ordered, best, prophet)
