"""Centeredness certificates, adversarial instances, and ratio certification.

An index j is nearly centered for a permutation family when some weighting
of the other indices puts close to half its mass before and after j in
every observation order. The gap is measured by a small linear program over
sign vectors of relative positions; its optimum r* certifies that j is
eps-centered for every eps > r*/2 (primal witness) and for none below
(dual witness). Nearly centered indices convert into adversarial instances
that pin the family's threshold ratio near the inverse golden ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (
    AugThreshold,
    ExpCapped,
    ValueDistribution,
    atoms_dist,
    two_level_dist,
    uniform_dist,
    zero_dist,
)
from .engine import EvaluationReport, Instance, eval_family
from .lp import solve_standard_form
from .permutations import (
    PermutationFamily,
    identity,
    reverse,
    verify_pairwise_independent,
)
from .thresholds import GOLDEN_INV, e_threshold, golden_threshold

E_BOUND = 1.0 - 1.0 / math.e
LP_TOL = 1e-9
_DELTA_MAX = 0.07  # small-delta regime of the adversarial constructions


@dataclass(frozen=True, eq=False)
class SignVectorSet:
    """For each i != j, the +-1 vector of sign(sigma_k(i) - sigma_k(j)) over members k."""

    j: int
    indices: tuple[int, ...]
    vectors: np.ndarray  # shape (len(indices), family size)


def sign_vectors(family: PermutationFamily, j: int) -> SignVectorSet:
    n = family.n
    if not 1 <= j <= n:
        raise ValueError(f"index {j} outside [1, {n}]")
    if n < 2:
        raise ValueError("sign vectors need n >= 2")
    positions = np.array([p.inverse().map for p in family.perms], dtype=float).T  # (n, m)
    others = [i for i in range(1, n + 1) if i != j]
    V = np.sign(positions[[i - 1 for i in others], :] - positions[j - 1, :])
    return SignVectorSet(j=j, indices=tuple(others), vectors=V)


@dataclass(frozen=True, eq=False)
class CenterednessCertificate:
    """LP output: j is eps-centered for every eps > epsilon = r*/2 (open threshold)."""

    j: int
    epsilon: float
    witness_p: dict[int, float]
    dual_w: tuple[float, ...]
    dual_objective: float
    lp_gap: float
    lp_value: float


def centeredness_lp(family: PermutationFamily, j: int) -> CenterednessCertificate:
    """Minimize the sup-norm of a convex combination of j's sign vectors.

    Primal: min r st. r >= +-(sum_i p_i v_ij)_k for all members k, p a
    probability vector over i != j. The dual witness (w, z) satisfies
    <w, v_ij> >= z for all i with ||w||_1 <= 1, and strong duality makes
    z = r* up to the solver tolerance.
    """
    sv = sign_vectors(family, j)
    V = sv.vectors  # (n-1, m)
    nn, m = V.shape
    # standard form variables: p (nn), r, slacks for the 2m inequalities
    nv = nn + 1 + 2 * m
    A = np.zeros((2 * m + 1, nv))
    b = np.zeros(2 * m + 1)
    for k in range(m):
        A[k, :nn] = -V[:, k]
        A[k, nn] = 1.0
        A[k, nn + 1 + k] = -1.0
        A[m + k, :nn] = V[:, k]
        A[m + k, nn] = 1.0
        A[m + k, nn + 1 + m + k] = -1.0
    A[2 * m, :nn] = 1.0
    b[2 * m] = 1.0
    c = np.zeros(nv)
    c[nn] = 1.0
    sol = solve_standard_form(c, A, b, tol=LP_TOL)
    p = sol.x[:nn]
    r_star = float(sol.objective)
    y = sol.duals
    w = y[:m] - y[m : 2 * m]
    z = float(y[2 * m])
    return CenterednessCertificate(
        j=j,
        epsilon=r_star / 2.0,
        witness_p={i: float(pi) for i, pi in zip(sv.indices, p)},
        dual_w=tuple(float(v) for v in w),
        dual_objective=z,
        lp_gap=r_star - z,
        lp_value=r_star,
    )


def most_centered_index(family: PermutationFamily) -> tuple[int, CenterednessCertificate]:
    """Exhaustive argmin of the centeredness epsilon over all indices."""
    if family.n < 2:
        raise ValueError("centeredness needs n >= 2 (no i != j exists for n=1)")
    best: CenterednessCertificate | None = None
    for j in range(1, family.n + 1):
        cert = centeredness_lp(family, j)
        if best is None or cert.epsilon < best.epsilon:
            best = cert
    return best.j, best


# -- adversarial instances -------------------------------------------------------


def _check_delta(delta: float):
    if not 0.0 < delta < _DELTA_MAX:
        raise ValueError(f"delta must lie in (0, {_DELTA_MAX}), got {delta}")


def golden_hard_instance(delta: float) -> Instance:
    """Three coordinates: uniforms near 1 around a rare high spike.

    X1, X3 ~ U[1-delta, 1]; X2 = (sqrt 5 - 1)/delta with probability delta,
    else 0. Its best threshold ratio over {forward, reverse} tends to the
    inverse golden ratio as delta -> 0. The construction is valid for any
    delta in (0, 1); the tightness guarantee needs delta small.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    u = uniform_dist(1.0 - delta, 1.0)
    spike = atoms_dist([(0.0, 1.0 - delta), ((math.sqrt(5.0) - 1.0) / delta, delta)])
    return Instance((u, spike, u))


def hard_instance_from_center(
    family: PermutationFamily,
    j: int,
    cert: CenterednessCertificate,
    delta: float,
) -> Instance:
    """Embed the spike at a nearly centered index, capped exponentials elsewhere.

    Coordinate i != j gets 1 - X_i = min(Y_i, 1) with Y_i exponential of
    rate p(i)/delta, where p is the centeredness witness; zero-weight
    indices become identically zero.
    """
    _check_delta(delta)
    n = family.n
    if not 1 <= j <= n:
        raise ValueError(f"index {j} outside [1, {n}]")
    dists: list[ValueDistribution] = []
    for i in range(1, n + 1):
        if i == j:
            dists.append(
                atoms_dist([(0.0, 1.0 - delta), ((math.sqrt(5.0) - 1.0) / delta, delta)])
            )
            continue
        weight = cert.witness_p.get(i, 0.0)
        if weight > 0.0:
            dists.append(ValueDistribution(segments=(ExpCapped(weight / delta, 1.0),)))
        else:
            dists.append(zero_dist())
    return Instance(tuple(dists))


def iid_hard_instance(n: int, H: float) -> Instance:
    """n i.i.d. two-level coordinates; caps the single-order ratio near 1 - 1/e."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    d = two_level_dist(H, n)
    return Instance(tuple(d for _ in range(n)))


# -- geometric-mean floor used by the 1 - 1/e bound ------------------------------


def lemma_1e_f(k: int) -> float:
    """f(k) = (1/(k+1)) (1 - e^{-(k+1)/k}) / (1 - e^{-1/k}).

    Decreasing in k with limit 1 - 1/e; dominates the averaged geometric
    series in :func:`lemma_1e_check` at the extremal ratio.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return (1.0 - math.exp(-(k + 1.0) / k)) / ((k + 1.0) * -math.expm1(-1.0 / k))


def lemma_1e_check(k: int, r: float) -> bool:
    """True when (1 + r + ... + r^k) / (k+1) >= 1 - 1/e, given r^k >= 1/e.

    The hypothesis is tested with a tiny relative slack because r^k for
    r = e^{-1/k} rounds below 1/e about half the time in doubles.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0.0 < r <= 1.0:
        raise ValueError(f"r must lie in (0, 1], got {r}")
    if r**k < (1.0 / math.e) * (1.0 - 1e-9):
        raise ValueError(f"hypothesis r^k >= 1/e fails: r={r}, k={k}")
    avg = 1.0 if r == 1.0 else (1.0 - r ** (k + 1)) / ((k + 1.0) * (1.0 - r))
    return avg >= E_BOUND - 1e-12


# -- certification ----------------------------------------------------------------


@dataclass(frozen=True)
class TPRCertification:
    mode: str
    bound: float
    threshold: AugThreshold
    report: EvaluationReport
    passed: bool


def certify_tpr_lower(
    inst: Instance, family: PermutationFamily, mode: str
) -> TPRCertification:
    """Pick the mode's prescribed threshold and check the guaranteed ratio.

    golden mode requires the family to be exactly the forward/reverse pair
    (equal multiplicities); e mode requires exact pairwise independence.
    A family/mode mismatch raises rather than silently certifying.
    """
    n = inst.n
    if family.n != n:
        raise ValueError(f"size mismatch: family on [{family.n}], instance has n={n}")
    if mode == "golden":
        members = set(p.map for p in family.perms)
        want = {identity(n).map, reverse(n).map}
        counts = [sum(1 for p in family.perms if p.map == w) for w in want]
        if members != want or len(set(counts)) != 1:
            raise ValueError("golden mode requires exactly the forward/reverse pair")
        threshold = golden_threshold(inst)
        bound = GOLDEN_INV
    elif mode == "e":
        check = verify_pairwise_independent(family)
        if not check.passed:
            raise ValueError(
                "e mode requires an exactly pairwise independent family "
                f"(worst pair {check.worst_pair}, deviation {check.worst_deviation})"
            )
        threshold = e_threshold(inst)
        bound = E_BOUND
    else:
        raise ValueError(f"unknown certification mode {mode!r}")
    report = eval_family(inst, family, threshold)
    passed = report.gambler >= (bound - 1e-9) * report.prophet
    return TPRCertification(mode, bound, threshold, report, passed)
