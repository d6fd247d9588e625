import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from copi import (
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
from copi.permutations import sample_size

from helpers import random_permutation


def full_symmetric(n):
    return PermutationFamily(
        tuple(Permutation(p) for p in itertools.permutations(range(1, n + 1)))
    )


class TestBasics:
    def test_identity_reverse(self):
        assert identity(3).map == (1, 2, 3)
        assert reverse(3).map == (3, 2, 1)
        assert reverse(1).map == (1,)

    def test_zero_size_rejected(self):
        with pytest.raises(ValueError):
            identity(0)
        with pytest.raises(ValueError):
            reverse(0)

    def test_inverse(self):
        assert Permutation((3, 1, 2)).inverse().map == (2, 3, 1)

    def test_compose_identity_law(self):
        rho = reverse(4)
        assert identity(4).compose(rho) == rho
        assert rho.compose(identity(4)) == rho

    def test_compose_involution(self):
        swap = Permutation((2, 1, 3))
        assert swap.compose(swap) == identity(3)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            identity(3).compose(identity(4))

    def test_non_bijection_rejected(self):
        with pytest.raises(ValueError):
            Permutation((1, 1, 3))

    @given(st.integers(0, 2**32 - 1), st.integers(2, 10))
    def test_group_laws(self, seed, n):
        rng = np.random.default_rng(seed)
        p = random_permutation(rng, n)
        q = random_permutation(rng, n)
        r = random_permutation(rng, n)
        assert p.inverse().compose(p) == identity(n)
        assert p.compose(p.inverse()) == identity(n)
        assert p.compose(q.compose(r)) == p.compose(q).compose(r)


class TestRestrict:
    def test_example(self):
        assert Permutation((3, 5, 1, 4, 2)).restrict(3).map == (3, 1, 2)

    def test_identity_and_reverse(self):
        assert identity(7).restrict(4) == identity(4)
        assert reverse(5).restrict(3) == reverse(3)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            identity(3).restrict(0)
        with pytest.raises(ValueError):
            identity(3).restrict(4)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 12))
    def test_tower_property(self, seed, n):
        rng = np.random.default_rng(seed)
        p = random_permutation(rng, n)
        assert p.restrict(n) == p
        k = int(rng.integers(1, n + 1))
        j = int(rng.integers(1, k + 1))
        assert p.restrict(k).restrict(j) == p.restrict(j)

    def test_family_restriction_dedupes(self):
        fam = affine_family(5)
        small = restrict_family(fam, 3)
        assert small.size <= fam.size
        assert len({p.map for p in small.perms}) == small.size
        assert small.provenance["kind"] == "padded"


class TestPairwiseIndependence:
    @pytest.mark.parametrize("n", [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31])
    def test_affine_exact_for_primes(self, n):
        fam = affine_family(n)
        assert fam.size == n * (n - 1)
        report = verify_pairwise_independent(fam)
        assert report.passed, f"n={n}: worst {report.worst_pair} dev {report.worst_deviation}"

    def test_affine_small_is_full_group(self):
        fam = affine_family(3)
        assert {p.map for p in fam.perms} == {
            p for p in itertools.permutations((1, 2, 3))
        }
        assert fam.size == 6

    def test_affine_example_member(self):
        fam = affine_family(5)
        assert Permutation((5, 2, 4, 1, 3)) in fam.perms  # a=2, b=3

    def test_composite_rejected(self):
        with pytest.raises(ValueError, match="prime"):
            affine_family(6)

    def test_singleton_fails(self):
        report = verify_pairwise_independent(PermutationFamily((identity(3),)))
        assert not report.passed

    def test_forward_reverse_fails(self):
        report = verify_pairwise_independent(forward_reverse_family(3))
        assert not report.passed

    def test_full_group_passes(self):
        assert verify_pairwise_independent(full_symmetric(4)).passed

    def test_inverse_closure_of_affine(self):
        # inverses of affine maps are affine: the family equals its inverse set
        fam = affine_family(7)
        members = {p.map for p in fam.perms}
        assert {p.inverse().map for p in fam.perms} == members


class TestAlmostPairwise:
    def test_full_s3_tv(self):
        report = verify_almost_pi(full_symmetric(3), 1 / 3, 0.5)
        assert report.max_tv == pytest.approx(1 / 3, abs=1e-12)
        assert report.passed

    def test_affine5_tv(self):
        report = verify_almost_pi(affine_family(5), 1 / 5, 0.25)
        assert report.max_tv == pytest.approx(1 / 5, abs=1e-12)
        assert report.passed

    def test_single_identity_tv(self):
        report = verify_almost_pi(PermutationFamily((identity(2),)), 1 / 2, 0.9)
        assert report.max_tv == pytest.approx(3 / 4, abs=1e-12)

    def test_bucket_geometry_enforced(self):
        with pytest.raises(ValueError, match="integer"):
            verify_almost_pi(full_symmetric(3), 0.3, 0.5)
        with pytest.raises(ValueError, match="multiple"):
            verify_almost_pi(full_symmetric(3), 0.5, 0.5)


class TestSampleFamily:
    def test_size_formula(self):
        assert sample_size(20, 0.25, 0.4) == 10785

    def test_preconditions(self):
        with pytest.raises(ValueError, match="integer"):
            sample_family(20, 0.3, 0.4, seed=0)
        with pytest.raises(ValueError, match="2/delta"):
            sample_family(20, 0.25, 0.1, seed=0)
        with pytest.raises(ValueError, match="multiple"):
            sample_family(21, 0.25, 0.4, seed=0)

    def test_deterministic_per_seed(self):
        a = sample_family(8, 0.5, 0.5, seed=5)
        b = sample_family(8, 0.5, 0.5, seed=5)
        c = sample_family(8, 0.5, 0.5, seed=6)
        assert [p.map for p in a.perms] == [p.map for p in b.perms]
        assert [p.map for p in a.perms] != [p.map for p in c.perms]

    def test_sampled_family_cell_floor(self):
        # families that pass the TV check also keep every bucket cell heavy
        eps, delta = 0.25, 0.4
        fam = sample_family(20, eps, delta, seed=0)
        report = verify_almost_pi(fam, eps, delta)
        assert report.passed
        arr = fam.as_array()
        k = 4
        bucket = fam.n // k
        B = (arr - 1) // bucket
        floor = eps * eps * (1 - delta)
        worst = 1.0
        for i in range(fam.n):
            for j in range(fam.n):
                if i == j:
                    continue
                codes = B[:, i] * k + B[:, j]
                counts = np.bincount(codes, minlength=k * k)
                worst = min(worst, counts.min() / fam.size)
        assert worst > floor
