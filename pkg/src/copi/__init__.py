"""Constrained-order prophet inequalities for threshold stopping rules.

A gambler observes independent nonnegative values in an order drawn from a
fixed permutation family and stops at the first value meeting a threshold;
the prophet takes the maximum. This package constructs the permutation
families (forward/reverse, affine pairwise independent, sampled almost
pairwise independent, padded restrictions), selects thresholds hitting
prescribed survival targets, evaluates gambler and prophet values exactly
and by Monte Carlo, generates the matching adversarial instances, and
solves the centeredness linear program that witnesses upper bounds.
"""

from .distributions import (
    AugThreshold,
    ExpCapped,
    TwoLevel,
    Uniform,
    ValueDistribution,
    atoms_dist,
    exp_capped_dist,
    point_dist,
    two_level_dist,
    uniform_dist,
    zero_dist,
)
from .engine import (
    EvaluationReport,
    Instance,
    MonteCarloResult,
    eval_family,
    eval_threshold,
    monte_carlo_eval,
    optimal_stopping_value,
    prophet_value,
    sample_arrays,
    stopped_values,
)
from .permutations import (
    AlmostPairwiseReport,
    PairwiseReport,
    Permutation,
    PermutationFamily,
    affine_family,
    forward_reverse_family,
    identity,
    restrict_family,
    reverse,
    sample_family,
    verify_almost_pi,
    verify_pairwise_independent,
)
from .thresholds import (
    E_TARGET,
    GOLDEN_INV,
    SweepPoint,
    SweepResult,
    ThresholdTarget,
    e_threshold,
    golden_threshold,
    max_survival,
    product_survival,
    ratio_sweep,
    threshold_for,
)
from .analysis import (
    E_BOUND,
    CenterednessCertificate,
    SignVectorSet,
    TPRCertification,
    centeredness_lp,
    certify_tpr_lower,
    golden_hard_instance,
    hard_instance_from_center,
    iid_hard_instance,
    lemma_1e_check,
    lemma_1e_f,
    most_centered_index,
    sign_vectors,
)

__version__ = "0.1.0"

__all__ = [
    "AugThreshold",
    "ExpCapped",
    "TwoLevel",
    "Uniform",
    "ValueDistribution",
    "atoms_dist",
    "exp_capped_dist",
    "point_dist",
    "two_level_dist",
    "uniform_dist",
    "zero_dist",
    "EvaluationReport",
    "Instance",
    "MonteCarloResult",
    "eval_family",
    "eval_threshold",
    "monte_carlo_eval",
    "optimal_stopping_value",
    "prophet_value",
    "sample_arrays",
    "stopped_values",
    "AlmostPairwiseReport",
    "PairwiseReport",
    "Permutation",
    "PermutationFamily",
    "affine_family",
    "forward_reverse_family",
    "identity",
    "restrict_family",
    "reverse",
    "sample_family",
    "verify_almost_pi",
    "verify_pairwise_independent",
    "E_TARGET",
    "GOLDEN_INV",
    "SweepPoint",
    "SweepResult",
    "ThresholdTarget",
    "e_threshold",
    "golden_threshold",
    "max_survival",
    "product_survival",
    "ratio_sweep",
    "threshold_for",
    "E_BOUND",
    "CenterednessCertificate",
    "SignVectorSet",
    "TPRCertification",
    "centeredness_lp",
    "certify_tpr_lower",
    "golden_hard_instance",
    "hard_instance_from_center",
    "iid_hard_instance",
    "lemma_1e_check",
    "lemma_1e_f",
    "most_centered_index",
    "sign_vectors",
]
