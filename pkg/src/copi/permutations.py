"""Permutations of [n] = {1, ..., n}, permutation families, and independence checks.

Families are multisets (sampling constructions draw with replacement), and
the uniform choice over the multiset reproduces the intended distribution.
Two verification routines are provided: an exact pairwise-independence count
and a bucketed total-variation check for almost pairwise independence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass(frozen=True)
class Permutation:
    """Bijection on [n], stored as the 1-indexed image tuple (position k holds pi(k))."""

    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.map)
        object.__setattr__(self, "map", m)
        if sorted(m) != list(range(1, len(m) + 1)):
            raise ValueError(f"not a permutation of [{len(m)}]: {m}")

    @property
    def n(self) -> int:
        return len(self.map)

    def __call__(self, k: int) -> int:
        if not 1 <= k <= self.n:
            raise ValueError(f"index {k} outside [1, {self.n}]")
        return self.map[k - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for pos, val in enumerate(self.map, start=1):
            inv[val - 1] = pos
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self . other)(k) = self(other(k))."""
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        return Permutation(tuple(self.map[v - 1] for v in other.map))

    def restrict(self, n: int) -> "Permutation":
        """Keep the elements of [n] in the relative order this permutation visits them."""
        if not 1 <= n <= self.n:
            raise ValueError(f"restriction size {n} outside [1, {self.n}]")
        return Permutation(tuple(v for v in self.map if v <= n))


def identity(n: int) -> Permutation:
    if n < 1:
        raise ValueError("permutation size must be >= 1")
    return Permutation(tuple(range(1, n + 1)))


def reverse(n: int) -> Permutation:
    if n < 1:
        raise ValueError("permutation size must be >= 1")
    return Permutation(tuple(range(n, 0, -1)))


@dataclass(frozen=True)
class PermutationFamily:
    """Nonempty multiset of permutations on a common [n]."""

    perms: tuple[Permutation, ...]
    provenance: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "perms", tuple(self.perms))
        if not self.perms:
            raise ValueError("permutation family must be nonempty")
        n = self.perms[0].n
        if any(p.n != n for p in self.perms):
            raise ValueError("all family members must act on the same [n]")

    @property
    def n(self) -> int:
        return self.perms[0].n

    @property
    def size(self) -> int:
        return len(self.perms)

    def as_array(self) -> np.ndarray:
        return np.array([p.map for p in self.perms], dtype=np.int64)


def forward_reverse_family(n: int) -> PermutationFamily:
    return PermutationFamily((identity(n), reverse(n)), {"kind": "forward_reverse", "n": n})


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def affine_family(n: int) -> PermutationFamily:
    """All maps k -> a k + b mod n (residue 0 written as n), a in [n-1], b in [n].

    Requires n prime; yields n(n-1) distinct permutations whose uniform
    distribution is exactly pairwise independent.
    """
    if not _is_prime(n):
        raise ValueError(f"affine family needs a prime size, got {n}")
    perms = []
    for a in range(1, n):
        for b in range(1, n + 1):
            perms.append(Permutation(tuple((a * k + b) % n or n for k in range(1, n + 1))))
    return PermutationFamily(tuple(perms), {"kind": "affine", "n": n})


def _bucket_count(epsilon: float) -> int:
    k = round(1.0 / epsilon)
    if k < 1 or abs(k * epsilon - 1.0) > 1e-9:
        raise ValueError(f"1/epsilon must be an integer, got epsilon={epsilon}")
    return k


def sample_size(n: int, epsilon: float, delta: float) -> int:
    """Number of uniform draws, ceil(36 (eps delta)^-2 ln n)."""
    return math.ceil(36.0 * (epsilon * delta) ** -2 * math.log(n))


def sample_family(n: int, epsilon: float, delta: float, seed: int) -> PermutationFamily:
    """Draw uniform permutations with replacement, sized for the union bound.

    Requires 1/epsilon integer, n a multiple of 1/epsilon, and
    epsilon * n >= 2/delta. The draw is deterministic per seed and does not
    verify itself; callers should run :func:`verify_almost_pi` and resample
    with a fresh seed on failure.
    """
    if delta <= 0 or delta >= 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    k = _bucket_count(epsilon)
    if n % k != 0:
        raise ValueError(f"n must be a multiple of 1/epsilon = {k}, got n={n}")
    if epsilon * n + 1e-9 < 2.0 / delta:
        raise ValueError(
            f"need epsilon*n >= 2/delta, got {epsilon * n} < {2.0 / delta}"
        )
    m = sample_size(n, epsilon, delta)
    rng = np.random.Generator(np.random.Philox(key=seed % 2**64))
    rows = rng.permuted(np.tile(np.arange(1, n + 1), (m, 1)), axis=1)
    perms = tuple(Permutation(tuple(int(v) for v in row)) for row in rows)
    prov = {"kind": "sampled", "seed": seed, "epsilon": epsilon, "delta": delta, "m": m}
    return PermutationFamily(perms, prov)


def restrict_family(family: PermutationFamily, n: int) -> PermutationFamily:
    """Memberwise restriction to [n] with multiset deduplication."""
    seen: dict[tuple[int, ...], Permutation] = {}
    for p in family.perms:
        r = p.restrict(n)
        seen.setdefault(r.map, r)
    prov = {"kind": "padded", "n": n, "parent": dict(family.provenance)}
    return PermutationFamily(tuple(seen.values()), prov)


@dataclass(frozen=True)
class PairwiseReport:
    passed: bool
    expected_hits: float
    worst_pair: tuple[int, int]
    worst_deviation: float


def verify_pairwise_independent(family: PermutationFamily) -> PairwiseReport:
    """Exact check: every ordered position pair is hit equally often.

    For each i != j the multiset {(sigma(i), sigma(j)) : sigma in family}
    must cover the n(n-1) ordered pairs with identical integer counts.
    """
    n, m = family.n, family.size
    if n < 2:
        raise ValueError("pairwise independence needs n >= 2")
    cells = n * (n - 1)
    expected = m / cells
    arr = family.as_array() - 1
    worst_pair = (1, 2)
    worst_dev = 0.0
    exact = m % cells == 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            codes = arr[:, i] * n + arr[:, j]
            counts = np.bincount(codes, minlength=n * n).astype(float)
            offdiag = np.delete(counts, np.arange(n) * n + np.arange(n))
            dev = float(np.abs(offdiag - expected).max())
            if dev > worst_dev:
                worst_dev = dev
                worst_pair = (i + 1, j + 1)
    return PairwiseReport(exact and worst_dev == 0.0, expected, worst_pair, worst_dev)


@dataclass(frozen=True)
class AlmostPairwiseReport:
    passed: bool
    max_tv: float
    worst_pair: tuple[int, int]
    epsilon: float
    delta: float


def verify_almost_pi(
    family: PermutationFamily, epsilon: float, delta: float
) -> AlmostPairwiseReport:
    """Bucketed total-variation check for almost pairwise independence.

    Positions are grouped into 1/epsilon buckets of epsilon*n consecutive
    slots; for every ordered index pair the empirical bucket-pair
    distribution must be within total variation delta of uniform.
    Requires only the bucket geometry (1/epsilon integer, n a multiple of
    it); the sampling hypothesis epsilon*n >= 2/delta is not needed to run
    the check.
    """
    n, m = family.n, family.size
    k = _bucket_count(epsilon)
    if n % k != 0:
        raise ValueError(f"n must be a multiple of 1/epsilon = {k}, got n={n}")
    bucket = n // k
    arr = family.as_array()
    B = (arr - 1) // bucket  # 0-indexed bucket of each position
    uniform_cell = 1.0 / (k * k)
    max_tv = -1.0
    worst_pair = (1, 2)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            codes = B[:, i] * k + B[:, j]
            counts = np.bincount(codes, minlength=k * k)
            tv = float(np.clip(uniform_cell - counts / m, 0.0, None).sum())
            if tv > max_tv:
                max_tv = tv
                worst_pair = (i + 1, j + 1)
    return AlmostPairwiseReport(max_tv <= delta, max_tv, worst_pair, epsilon, delta)
