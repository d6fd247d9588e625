"""Nonnegative mixture distributions with lexicographic threshold primitives.

A :class:`ValueDistribution` is a finite mixture of point masses and smooth
segments: uniform pieces, a capped-exponential transform, and a two-level
mixture concentrated near 1 with a rare high spike. Every evaluator in this
package reduces to four primitives implemented here: the CDF, the augmented
survival probability against a lexicographic threshold, the expected value
collected above a threshold, and the mean. All four are exact closed forms,
so downstream expectations are piecewise analytic.

Thresholds are pairs ``(theta, tie)`` in R x [0, 1]. A sample is the pair
``(x, u)`` with ``u`` an auxiliary uniform tie-break draw, and the
comparison ``(x, u) >= (theta, tie)`` is lexicographic. This makes
threshold events involving point masses behave exactly like the atomless
case: the survival probability is ``Pr(X > theta) + (1 - tie) Pr(X = theta)``
and can be tuned continuously through an atom by moving ``tie``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

MASS_TOL = 1e-12


@dataclass(frozen=True)
class AugThreshold:
    """Lexicographic threshold (theta, tie) with tie fraction in [0, 1]."""

    theta: float
    tie: float = 0.0

    def __post_init__(self):
        if math.isnan(self.theta):
            raise ValueError("threshold theta must not be NaN")
        if not 0.0 <= self.tie <= 1.0:
            raise ValueError(f"tie fraction must lie in [0, 1], got {self.tie}")


@dataclass(frozen=True)
class Uniform:
    """Uniform segment on [a, b] carrying mixture weight w."""

    a: float
    b: float
    w: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("uniform endpoints must be finite")
        if self.a < 0 or self.b <= self.a:
            raise ValueError(f"uniform segment needs 0 <= a < b, got [{self.a}, {self.b}]")
        if not 0.0 < self.w <= 1.0:
            raise ValueError(f"segment weight must be in (0, 1], got {self.w}")

    @property
    def weight(self) -> float:
        return self.w

    def cdf_arr(self, x: np.ndarray) -> np.ndarray:
        return self.w * np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)

    def survival_strict(self, theta: float) -> float:
        if theta < self.a:
            return self.w
        if theta >= self.b:
            return 0.0
        return self.w * (self.b - theta) / (self.b - self.a)

    def point_mass(self, x: float) -> float:
        return 0.0

    def value_above_strict(self, theta: float) -> float:
        if theta < self.a:
            return self.w * 0.5 * (self.a + self.b)
        if theta >= self.b:
            return 0.0
        return self.w * (self.b * self.b - theta * theta) / (2.0 * (self.b - self.a))

    def mean(self) -> float:
        return self.w * 0.5 * (self.a + self.b)

    def max_support(self) -> float:
        return self.b

    def breakpoints(self) -> tuple[float, ...]:
        return (self.a, self.b)

    def jump_points(self) -> tuple[float, ...]:
        return ()

    def sample_parts(self):
        return [("uniform", (self.a, self.b), self.w)]


@dataclass(frozen=True)
class ExpCapped:
    """X = 1 - min(Y, 1) with Y exponential of the given rate, weight w.

    Support is [0, 1]; the transform leaves an implicit point mass of
    w * exp(-rate) at 0, which all formulas account for without a separate
    atom entry.
    """

    rate: float
    w: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be positive and finite, got {self.rate}")
        if not 0.0 < self.w <= 1.0:
            raise ValueError(f"segment weight must be in (0, 1], got {self.w}")

    @property
    def weight(self) -> float:
        return self.w

    def cdf_arr(self, x: np.ndarray) -> np.ndarray:
        # F(x) = exp(-rate (1 - x)) on [0, 1); includes the mass at 0.
        inside = self.w * np.exp(-self.rate * (1.0 - np.clip(x, 0.0, 1.0)))
        return np.where(x < 0.0, 0.0, np.where(x >= 1.0, self.w, inside))

    def survival_strict(self, theta: float) -> float:
        if theta < 0.0:
            return self.w
        if theta >= 1.0:
            return 0.0
        return self.w * -math.expm1(-self.rate * (1.0 - theta))

    def point_mass(self, x: float) -> float:
        return self.w * math.exp(-self.rate) if x == 0.0 else 0.0

    def value_above_strict(self, theta: float) -> float:
        if theta >= 1.0:
            return 0.0
        # The atom at 0 contributes no value, so theta <= 0 gives the mean.
        c = 1.0 - max(theta, 0.0)
        lam = self.rate
        return self.w * (1.0 - 1.0 / lam + math.exp(-lam * c) * (c - 1.0 + 1.0 / lam))

    def mean(self) -> float:
        lam = self.rate
        return self.w * (1.0 - (-math.expm1(-lam)) / lam)

    def max_support(self) -> float:
        return 1.0

    def breakpoints(self) -> tuple[float, ...]:
        return (0.0, 1.0)

    def jump_points(self) -> tuple[float, ...]:
        return (0.0,)

    def sample_parts(self):
        return [("exp_capped", (self.rate,), self.w)]


@dataclass(frozen=True)
class TwoLevel:
    """Mixture of uniforms on [1, 1+1/H] and [H+1, H+1+1/H].

    The high interval has mass 1 / ((e-2) n H); the rest sits just above 1.
    Always a complete distribution (weight 1).
    """

    H: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.H) and self.H > 1.0):
            raise ValueError(f"H must be > 1, got {self.H}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.top_mass >= 1.0:
            raise ValueError(
                f"two-level mixture needs (e-2) n H > 1, got n={self.n}, H={self.H}"
            )

    @property
    def top_mass(self) -> float:
        return 1.0 / ((math.e - 2.0) * self.n * self.H)

    @property
    def weight(self) -> float:
        return 1.0

    def _parts(self) -> tuple[Uniform, Uniform]:
        p = self.top_mass
        step = 1.0 / self.H
        return (
            Uniform(1.0, 1.0 + step, 1.0 - p),
            Uniform(self.H + 1.0, self.H + 1.0 + step, p),
        )

    def cdf_arr(self, x: np.ndarray) -> np.ndarray:
        lo, hi = self._parts()
        return lo.cdf_arr(x) + hi.cdf_arr(x)

    def survival_strict(self, theta: float) -> float:
        lo, hi = self._parts()
        return lo.survival_strict(theta) + hi.survival_strict(theta)

    def point_mass(self, x: float) -> float:
        return 0.0

    def value_above_strict(self, theta: float) -> float:
        lo, hi = self._parts()
        return lo.value_above_strict(theta) + hi.value_above_strict(theta)

    def mean(self) -> float:
        lo, hi = self._parts()
        return lo.mean() + hi.mean()

    def max_support(self) -> float:
        return self.H + 1.0 + 1.0 / self.H

    def breakpoints(self) -> tuple[float, ...]:
        lo, hi = self._parts()
        return lo.breakpoints() + hi.breakpoints()

    def jump_points(self) -> tuple[float, ...]:
        return ()

    def sample_parts(self):
        lo, hi = self._parts()
        return lo.sample_parts() + hi.sample_parts()


Segment = Union[Uniform, ExpCapped, TwoLevel]


@dataclass(frozen=True)
class ValueDistribution:
    """Finite mixture of atoms and segments on the nonnegative reals.

    Atoms are (location, mass) pairs; atoms and segments are kept sorted.
    Total mass (atom masses plus segment weights, with the capped
    exponential's implicit zero atom inside its weight) must equal 1.
    """

    atoms: tuple[tuple[float, float], ...] = ()
    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        atoms = tuple(sorted((float(x), float(p)) for x, p in self.atoms))
        segments = tuple(sorted(self.segments, key=lambda s: s.breakpoints()[0]))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "segments", segments)
        for x, p in atoms:
            if not (math.isfinite(x) and x >= 0.0):
                raise ValueError(f"atom location must be finite and >= 0, got {x}")
            if not 0.0 < p <= 1.0:
                raise ValueError(f"atom mass must be in (0, 1], got {p}")
        total = math.fsum(p for _, p in atoms) + math.fsum(s.weight for s in segments)
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"mixture mass must equal 1 within {MASS_TOL}, got {total!r}")
        if not atoms and not segments:
            raise ValueError("distribution must have at least one component")

    # -- probabilistic primitives -------------------------------------------

    def cdf(self, x):
        """Pr(X <= x); right-continuous, accepts scalars or arrays."""
        xs = np.asarray(x, dtype=float)
        out = np.zeros_like(xs, dtype=float)
        for ax, p in self.atoms:
            out = out + p * (xs >= ax)
        for seg in self.segments:
            out = out + seg.cdf_arr(xs)
        if np.ndim(x) == 0:
            return float(out)
        return out

    def point_mass(self, x: float) -> float:
        """Pr(X = x), including the capped exponential's implicit zero atom."""
        m = math.fsum(p for ax, p in self.atoms if ax == x)
        return m + math.fsum(seg.point_mass(x) for seg in self.segments)

    def survival_aug(self, t: AugThreshold) -> float:
        """Pr((X, U) >= (theta, tie)) = Pr(X > theta) + (1 - tie) Pr(X = theta)."""
        strict = math.fsum(p for ax, p in self.atoms if ax > t.theta)
        strict += math.fsum(seg.survival_strict(t.theta) for seg in self.segments)
        return strict + (1.0 - t.tie) * self.point_mass(t.theta)

    def expected_above(self, t: AugThreshold) -> float:
        """E[X 1{(X, U) >= (theta, tie)}]."""
        val = math.fsum(x * p for x, p in self.atoms if x > t.theta)
        val += math.fsum(seg.value_above_strict(t.theta) for seg in self.segments)
        if t.theta >= 0.0:
            val += t.theta * (1.0 - t.tie) * self.point_mass(t.theta)
        return val

    def expected_excess(self, t: AugThreshold) -> float:
        """E[(X - theta) 1{(X, U) >= (theta, tie)}] for finite theta."""
        return self.expected_above(t) - t.theta * self.survival_aug(t)

    def mean(self) -> float:
        return math.fsum(x * p for x, p in self.atoms) + math.fsum(
            seg.mean() for seg in self.segments
        )

    # -- support geometry ----------------------------------------------------

    def max_support(self) -> float:
        top = 0.0
        if self.atoms:
            top = max(top, max(x for x, _ in self.atoms))
        for seg in self.segments:
            top = max(top, seg.max_support())
        return top

    def jump_points(self) -> tuple[float, ...]:
        pts = {x for x, _ in self.atoms}
        for seg in self.segments:
            pts.update(seg.jump_points())
        return tuple(sorted(pts))

    def breakpoints(self) -> tuple[float, ...]:
        pts = set(self.jump_points())
        for seg in self.segments:
            pts.update(seg.breakpoints())
        return tuple(sorted(pts))

    # -- sampling -------------------------------------------------------------

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw samples; consumes exactly two uniforms per sample."""
        parts = [("atom", (x,), p) for x, p in self.atoms]
        for seg in self.segments:
            parts.extend(seg.sample_parts())
        weights = np.array([w for _, _, w in parts])
        edges = np.cumsum(weights)
        u = rng.random(size)
        v = rng.random(size)
        idx = np.minimum(np.searchsorted(edges, u, side="right"), len(parts) - 1)
        out = np.empty(size, dtype=float)
        for k, (kind, params, _) in enumerate(parts):
            mask = idx == k
            if not mask.any():
                continue
            if kind == "atom":
                out[mask] = params[0]
            elif kind == "uniform":
                a, b = params
                out[mask] = a + (b - a) * v[mask]
            else:  # exp_capped
                (rate,) = params
                y = -np.log(1.0 - v[mask]) / rate
                out[mask] = 1.0 - np.minimum(y, 1.0)
        return out


# -- constructors --------------------------------------------------------------


def uniform_dist(a: float, b: float) -> ValueDistribution:
    return ValueDistribution(segments=(Uniform(a, b, 1.0),))


def atoms_dist(points) -> ValueDistribution:
    return ValueDistribution(atoms=tuple((float(x), float(p)) for x, p in points))


def exp_capped_dist(rate: float) -> ValueDistribution:
    return ValueDistribution(segments=(ExpCapped(rate, 1.0),))


def two_level_dist(H: float, n: int) -> ValueDistribution:
    return ValueDistribution(segments=(TwoLevel(H, n),))


def point_dist(x: float) -> ValueDistribution:
    return atoms_dist([(x, 1.0)])


def zero_dist() -> ValueDistribution:
    return point_dist(0.0)
