"""Exact and Monte Carlo evaluation of threshold stopping rules.

The gambler observes an instance's coordinates in the order given by a
permutation and stops at the first sample whose augmented value meets the
lexicographic threshold; the prophet collects the maximum coordinate. Exact
values use the closed-form survival/payoff primitives; the prophet value
integrates 1 - prod F_i by Gauss-Legendre panels between distribution
breakpoints. A backward-induction oracle gives the unrestricted optimal
stopping value for comparison.

Monte Carlo runs are deterministic for a fixed seed regardless of how work
is scheduled: samples are drawn in fixed-size chunks whose generators are
keyed by (seed, chunk index), and chunk sums are accumulated in chunk order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .distributions import AugThreshold, ValueDistribution
from .permutations import Permutation, PermutationFamily

_GL_NODES, _GL_WEIGHTS = leggauss(20)
_MC_CHUNK_VALUES = 4_000_000  # cap on samples*n per chunk


@dataclass(frozen=True)
class Instance:
    """Ordered list of independent value distributions."""

    dists: tuple[ValueDistribution, ...]

    def __post_init__(self):
        object.__setattr__(self, "dists", tuple(self.dists))
        if not self.dists:
            raise ValueError("instance needs at least one distribution")

    @property
    def n(self) -> int:
        return len(self.dists)

    def groups(self) -> list[tuple[ValueDistribution, np.ndarray]]:
        """Distinct distributions with the index arrays they occupy (cached)."""
        cached = self.__dict__.get("_groups")
        if cached is None:
            by_dist: dict[ValueDistribution, list[int]] = {}
            for idx, d in enumerate(self.dists):
                by_dist.setdefault(d, []).append(idx)
            cached = [(d, np.array(ix)) for d, ix in by_dist.items()]
            object.__setattr__(self, "_groups", cached)
        return cached

    def max_support(self) -> float:
        return max(d.max_support() for d in self.dists)

    def jump_points(self) -> tuple[float, ...]:
        pts: set[float] = set()
        for d in self.dists:
            pts.update(d.jump_points())
        return tuple(sorted(pts))


@dataclass(frozen=True)
class EvaluationReport:
    """Family-averaged gambler value with per-index diagnostics.

    q_i is the per-coordinate miss probability Pr((X_i, U_i) < t); a_i and
    b_i are the prefix/suffix products of the q's in index order; c_i is the
    family-averaged probability that the rule is still running when it
    reaches coordinate i; p = 1 - prod q_j and q = prod q_j.
    """

    gambler: float
    prophet: float
    ratio: float
    p: float
    q: float
    q_i: tuple[float, ...]
    c_i: tuple[float, ...]
    a_i: tuple[float, ...]
    b_i: tuple[float, ...]


@dataclass(frozen=True)
class MonteCarloResult:
    gambler: float
    gambler_se: float
    prophet: float
    prophet_se: float
    samples: int
    seed: int


def _threshold_stats(inst: Instance, t: AugThreshold) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate survival s_i and stop payoff e_i, computed once per distinct dist."""
    s = np.empty(inst.n)
    e = np.empty(inst.n)
    for d, idx in inst.groups():
        s[idx] = d.survival_aug(t)
        e[idx] = d.expected_above(t)
    return s, e


def eval_threshold(inst: Instance, perm: Permutation, t: AugThreshold) -> float:
    """Exact expected value collected by the threshold rule along one order."""
    if perm.n != inst.n:
        raise ValueError(f"size mismatch: permutation on [{perm.n}], instance has n={inst.n}")
    s, e = _threshold_stats(inst, t)
    order = np.asarray(perm.map) - 1
    cont = np.concatenate(([1.0], np.cumprod(1.0 - s[order])[:-1]))
    return float(cont @ e[order])


def eval_family(inst: Instance, family: PermutationFamily, t: AugThreshold) -> EvaluationReport:
    """Evaluate the uniform mixture over the family and assemble diagnostics."""
    if family.n != inst.n:
        raise ValueError(f"size mismatch: family on [{family.n}], instance has n={inst.n}")
    s, e = _threshold_stats(inst, t)
    q = 1.0 - s
    m = family.size
    c = np.zeros(inst.n)
    total = 0.0
    for perm in family.perms:
        order = np.asarray(perm.map) - 1
        cont = np.concatenate(([1.0], np.cumprod(q[order])[:-1]))
        c[order] += cont / m
        total += float(cont @ e[order])
    gambler = total / m
    prophet = prophet_value(inst)
    prod_q = float(np.prod(q))
    a = np.concatenate(([1.0], np.cumprod(q)[:-1]))
    b = np.concatenate((np.cumprod(q[::-1])[:-1][::-1], [1.0]))
    return EvaluationReport(
        gambler=gambler,
        prophet=prophet,
        ratio=gambler / prophet if prophet > 0 else math.nan,
        p=1.0 - prod_q,
        q=prod_q,
        q_i=tuple(float(v) for v in q),
        c_i=tuple(float(v) for v in c),
        a_i=tuple(float(v) for v in a),
        b_i=tuple(float(v) for v in b),
    )


def family_gambler(inst: Instance, family: PermutationFamily, t: AugThreshold) -> float:
    """Family-averaged gambler value without the prophet integral (sweep fast path)."""
    if family.n != inst.n:
        raise ValueError(f"size mismatch: family on [{family.n}], instance has n={inst.n}")
    s, e = _threshold_stats(inst, t)
    q = 1.0 - s
    total = 0.0
    for perm in family.perms:
        order = np.asarray(perm.map) - 1
        cont = np.concatenate(([1.0], np.cumprod(q[order])[:-1]))
        total += float(cont @ e[order])
    return total / family.size


def _adaptive_gl(f, lo: float, hi: float, tol: float, depth: int = 0) -> float:
    mid = 0.5 * (lo + hi)
    whole = _gl_panel(f, lo, hi)
    split = _gl_panel(f, lo, mid) + _gl_panel(f, mid, hi)
    if abs(whole - split) <= tol or depth >= 40:
        return split
    return _adaptive_gl(f, lo, mid, 0.5 * tol, depth + 1) + _adaptive_gl(
        f, mid, hi, 0.5 * tol, depth + 1
    )


def _gl_panel(f, lo: float, hi: float) -> float:
    half = 0.5 * (hi - lo)
    xs = lo + half * (_GL_NODES + 1.0)
    return half * float(_GL_WEIGHTS @ f(xs))


def prophet_value(inst: Instance, tol: float = 1e-10) -> float:
    """E[max_i X_i] = integral of 1 - prod_i F_i(x) over [0, max support].

    Panels split at every atom location and segment endpoint, so the
    integrand is smooth inside each panel; identical coordinates are
    collapsed to powers of one CDF.
    """
    groups = inst.groups()
    cuts = {0.0, inst.max_support()}
    for d, _ in groups:
        cuts.update(d.breakpoints())
    grid = sorted(c for c in cuts if 0.0 <= c <= inst.max_support())

    def tail(xs: np.ndarray) -> np.ndarray:
        prod = np.ones_like(xs)
        for d, idx in groups:
            prod *= d.cdf(xs) ** len(idx)
        return 1.0 - prod

    total = 0.0
    for lo, hi in zip(grid, grid[1:]):
        if hi > lo:
            total += _adaptive_gl(tail, lo, hi, tol)
    return total


def optimal_stopping_value(inst: Instance, perm: Permutation) -> float:
    """Backward-induction value of the best (unrestricted) stopping rule."""
    if perm.n != inst.n:
        raise ValueError(f"size mismatch: permutation on [{perm.n}], instance has n={inst.n}")
    value = 0.0
    for k in range(inst.n, 0, -1):
        d = inst.dists[perm.map[k - 1] - 1]
        cont = AugThreshold(value, 1.0)  # strictly-above comparison
        value = value * (1.0 - d.survival_aug(cont)) + d.expected_above(cont)
    return value


# -- Monte Carlo ----------------------------------------------------------------


def mc_chunk_size(n: int) -> int:
    """Chunk layout is a pure function of n, so any scheduling of chunks agrees."""
    return max(1, min(65536, _MC_CHUNK_VALUES // max(n, 1)))


def sample_arrays(
    inst: Instance, seed: int, chunk_index: int, size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Draw a (size, n) value matrix and matching tie-break uniforms.

    The generator is keyed by (seed, chunk_index), so any partition of a run
    into chunks reproduces the same streams.
    """
    rng = np.random.Generator(np.random.Philox(key=[seed % 2**64, chunk_index]))
    X = np.empty((size, inst.n))
    for i, d in enumerate(inst.dists):
        X[:, i] = d.sample(rng, size)
    T = rng.random((size, inst.n))
    return X, T


def stopped_values(
    X: np.ndarray, T: np.ndarray, perm: Permutation, t: AugThreshold
) -> np.ndarray:
    """Realized X_tau per sample row for one observation order (0 when tau is never)."""
    accept = (X > t.theta) | ((X == t.theta) & (T >= t.tie))
    cols = np.asarray(perm.map) - 1
    acc = accept[:, cols]
    hit = acc.any(axis=1)
    first = acc.argmax(axis=1)
    vals = X[:, cols][np.arange(len(X)), first]
    return np.where(hit, vals, 0.0)


def monte_carlo_eval(
    inst: Instance,
    family: PermutationFamily,
    t: AugThreshold,
    samples: int,
    seed: int,
) -> MonteCarloResult:
    """Unbiased gambler/prophet estimates with standard errors.

    The per-sample gambler value is the average of the stopped value over
    all family members (the uniform mixture), so its standard error reflects
    the mixture directly.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if family.n != inst.n:
        raise ValueError(f"size mismatch: family on [{family.n}], instance has n={inst.n}")
    chunk = mc_chunk_size(inst.n)
    sums = np.zeros(4)  # sum g, sum g^2, sum max, sum max^2
    done = 0
    ci = 0
    while done < samples:
        size = min(chunk, samples - done)
        X, T = sample_arrays(inst, seed, ci, size)
        g = np.zeros(size)
        for perm in family.perms:
            g += stopped_values(X, T, perm, t)
        g /= family.size
        mx = X.max(axis=1)
        sums += (g.sum(), (g * g).sum(), mx.sum(), (mx * mx).sum())
        done += size
        ci += 1
    mean_g = float(sums[0] / samples)
    mean_m = float(sums[2] / samples)
    var_g = max(float(sums[1] / samples) - mean_g * mean_g, 0.0)
    var_m = max(float(sums[3] / samples) - mean_m * mean_m, 0.0)
    return MonteCarloResult(
        gambler=mean_g,
        gambler_se=math.sqrt(var_g / samples),
        prophet=mean_m,
        prophet_se=math.sqrt(var_m / samples),
        samples=samples,
        seed=seed,
    )
