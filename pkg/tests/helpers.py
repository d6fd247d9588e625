"""Shared generators and independent oracles for the test suite.

Oracles here deliberately avoid the code paths they check: stopping values
are enumerated outcome by outcome with tie probabilities multiplied in by
hand, expectations fall back to quadrature, and the centeredness optimum is
re-derived on a simplex grid.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from copi import (
    AugThreshold,
    Instance,
    Permutation,
    PermutationFamily,
    ValueDistribution,
    atoms_dist,
)
from copi.distributions import ExpCapped, Uniform


def random_mixture(rng: np.random.Generator, max_atoms: int = 3, max_uniforms: int = 2):
    """Random mixture of <= max_atoms atoms and <= max_uniforms uniform segments."""
    while True:
        na = rng.integers(0, max_atoms + 1)
        nu = rng.integers(0, max_uniforms + 1)
        if na + nu > 0:
            break
    weights = rng.uniform(0.1, 1.0, na + nu)
    weights = weights / weights.sum()
    atoms = []
    for k in range(na):
        atoms.append((float(rng.uniform(0.0, 3.0)), float(weights[k])))
    segments = []
    for k in range(nu):
        a = float(rng.uniform(0.0, 2.0))
        b = a + float(rng.uniform(0.1, 2.0))
        segments.append(Uniform(a, b, float(weights[na + k])))
    return ValueDistribution(tuple(atoms), tuple(segments))


def random_instance(rng: np.random.Generator, n: int) -> Instance:
    return Instance(tuple(random_mixture(rng) for _ in range(n)))


def random_atomic_instance(
    rng: np.random.Generator, n: int, max_atoms: int = 4
) -> Instance:
    dists = []
    for _ in range(n):
        k = int(rng.integers(1, max_atoms + 1))
        w = rng.uniform(0.1, 1.0, k)
        w = w / w.sum()
        xs = rng.uniform(0.0, 3.0, k)
        dists.append(atoms_dist([(float(x), float(p)) for x, p in zip(xs, w)]))
    return Instance(tuple(dists))


def random_permutation(rng: np.random.Generator, n: int) -> Permutation:
    return Permutation(tuple(int(v) for v in rng.permutation(n) + 1))


def brute_force_eval(inst: Instance, perm: Permutation, t: AugThreshold) -> float:
    """Exhaustive enumeration over atom outcomes, ties integrated analytically.

    Only valid for purely atomic instances. Walks the observation order per
    outcome tuple: a value above theta stops surely, a value at theta stops
    with probability 1 - tie, below never.
    """
    assert all(not d.segments for d in inst.dists), "oracle needs purely atomic dists"
    supports = [d.atoms for d in inst.dists]
    total = 0.0
    for combo in itertools.product(*supports):
        prob = math.prod(p for _, p in combo)
        reach = 1.0
        val = 0.0
        for k in range(inst.n):
            x = combo[perm.map[k] - 1][0]
            if x > t.theta:
                accept = 1.0
            elif x == t.theta:
                accept = 1.0 - t.tie
            else:
                accept = 0.0
            val += reach * accept * x
            reach *= 1.0 - accept
        total += prob * val
    return total


def quad_expected_above(d: ValueDistribution, t: AugThreshold) -> float:
    """Quadrature + atom-sum oracle for E[X 1{(X, U) >= t}]."""
    from scipy.integrate import quad

    total = 0.0
    for x, p in d.atoms:
        if x > t.theta:
            total += x * p
        elif x == t.theta:
            total += x * p * (1.0 - t.tie)
    for seg in d.segments:
        if isinstance(seg, Uniform):
            dens = seg.w / (seg.b - seg.a)
            lo = max(seg.a, t.theta)
            if lo < seg.b:
                total += quad(lambda x: x * dens, lo, seg.b)[0]
        elif isinstance(seg, ExpCapped):
            lam = seg.rate
            if t.theta == 0.0:
                total += 0.0  # implicit atom sits at value 0
            lo = max(0.0, t.theta)
            if lo < 1.0:
                total += quad(
                    lambda x: x * seg.w * lam * math.exp(-lam * (1.0 - x)), lo, 1.0
                )[0]
        else:
            for part in seg._parts():
                dens = part.w / (part.b - part.a)
                lo = max(part.a, t.theta)
                if lo < part.b:
                    total += quad(lambda x: x * dens, lo, part.b)[0]
    return total


def simplex_grid_min_sup(V: np.ndarray, steps: int = 64) -> float:
    """min over the step-1/steps simplex grid of max_k |p . V[:, k]|."""
    nn = V.shape[0]
    combos = _compositions(steps, nn)
    P = combos / steps
    vals = np.abs(P @ V).max(axis=1)
    return float(vals.min())


def _compositions(total: int, parts: int) -> np.ndarray:
    if parts == 1:
        return np.array([[total]], dtype=float)
    rows = []
    for first in range(total + 1):
        rest = _compositions(total - first, parts - 1)
        block = np.hstack([np.full((len(rest), 1), first), rest])
        rows.append(block)
    return np.vstack(rows)


def singleton_family(perm: Permutation) -> PermutationFamily:
    return PermutationFamily((perm,), {"kind": "explicit"})
