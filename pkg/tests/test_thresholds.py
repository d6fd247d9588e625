import math

import numpy as np
import pytest

from copi import (
    GOLDEN_INV,
    Instance,
    ThresholdTarget,
    atoms_dist,
    e_threshold,
    eval_family,
    forward_reverse_family,
    golden_hard_instance,
    golden_threshold,
    identity,
    iid_hard_instance,
    max_survival,
    product_survival,
    prophet_value,
    ratio_sweep,
    threshold_for,
    uniform_dist,
)

from helpers import random_instance, singleton_family


def miss_product(inst, t):
    return math.prod(1.0 - d.survival_aug(t) for d in inst.dists)


def survival_of_max(inst, t):
    return 1.0 - miss_product(inst, t)


class TestThresholdFor:
    def test_atom_tie_resolution(self):
        inst = Instance((atoms_dist([(5.0, 1.0)]),))
        t = threshold_for(inst, max_survival(0.3))
        assert t.theta == 5.0
        assert t.tie == pytest.approx(0.7, abs=1e-12)

    def test_golden_identity_two_uniforms(self):
        t = threshold_for(Instance((uniform_dist(0, 1),) * 2), max_survival(GOLDEN_INV))
        assert t.theta == pytest.approx(GOLDEN_INV, abs=1e-12)

    def test_single_uniform_product_target(self):
        t = threshold_for(Instance((uniform_dist(0, 1),)), product_survival(1 / math.e))
        assert t.theta == pytest.approx(1 / math.e, abs=1e-12)

    def test_value_domain(self):
        with pytest.raises(ValueError):
            ThresholdTarget("max_survival", 0.0)
        with pytest.raises(ValueError):
            ThresholdTarget("max_survival", 1.0)
        with pytest.raises(ValueError):
            ThresholdTarget("median", 0.5)

    @pytest.mark.parametrize("kind", ["max_survival", "product_survival"])
    def test_residuals_on_random_instances(self, kind):
        rng = np.random.default_rng(202)
        for trial in range(200):
            inst = random_instance(rng, int(rng.integers(1, 7)))
            value = float(rng.uniform(0.02, 0.98))
            target = ThresholdTarget(kind, value)
            t = threshold_for(inst, target)
            got = (
                survival_of_max(inst, t) if kind == "max_survival" else miss_product(inst, t)
            )
            assert got == pytest.approx(value, abs=1e-12), f"trial {trial}"

    def test_shared_atom_location(self):
        # two coordinates with the same atom: tie solve is a quadratic
        inst = Instance((atoms_dist([(2.0, 1.0)]), atoms_dist([(2.0, 1.0)])))
        t = threshold_for(inst, product_survival(0.49))
        assert t.theta == 2.0
        assert miss_product(inst, t) == pytest.approx(0.49, abs=1e-12)


class TestPrescribedThresholds:
    def test_golden_two_uniforms(self):
        t = golden_threshold(Instance((uniform_dist(0, 1),) * 2))
        assert t.theta == pytest.approx(GOLDEN_INV, abs=1e-12)

    def test_golden_single_atom(self):
        t = golden_threshold(Instance((atoms_dist([(1.0, 1.0)]),)))
        assert t.theta == 1.0
        assert t.tie == pytest.approx(1 - GOLDEN_INV, abs=1e-12)

    def test_golden_hard_instance_residual(self):
        inst = golden_hard_instance(1e-3)
        t = golden_threshold(inst)
        assert 1 - 1e-3 <= t.theta <= 1.0
        assert survival_of_max(inst, t) == pytest.approx(GOLDEN_INV, abs=1e-9)

    def test_e_single_uniform(self):
        t = e_threshold(Instance((uniform_dist(0, 1),)))
        assert t.theta == pytest.approx(1 / math.e, abs=1e-12)

    def test_e_iid_uniforms(self):
        for n in (2, 5, 9):
            t = e_threshold(Instance((uniform_dist(0, 1),) * n))
            assert t.theta == pytest.approx(math.exp(-1 / n), abs=1e-12)

    def test_e_iid_hard_instance_residual(self):
        # the miss product moves ~8e-12 per ulp of theta here (slope ~3.7e4),
        # so the best representable threshold carries a residual of that size
        inst = iid_hard_instance(2000, 50)
        t = e_threshold(inst)
        slope = 2000 * 50.0 * math.exp(-1.0)
        assert miss_product(inst, t) == pytest.approx(
            1 / math.e, abs=slope * math.ulp(t.theta)
        )


class TestRatioSweep:
    def test_single_uniform_argmax_at_zero(self):
        inst = Instance((uniform_dist(0, 1),))
        res = ratio_sweep(inst, singleton_family(identity(1)), points=200)
        assert res.best.theta == 0.0
        assert res.best.gambler == pytest.approx(0.5, abs=1e-12)
        assert res.best.ratio == pytest.approx(1.0, abs=1e-12)

    def test_row_schema_and_order(self):
        inst = Instance((uniform_dist(0, 1),))
        res = ratio_sweep(inst, singleton_family(identity(1)), points=10, refine_rounds=2)
        assert len(res.rows) >= 10
        keys = [(r.theta, r.tie) for r in res.rows]
        assert keys == sorted(keys)
        assert all(r.prophet == res.prophet for r in res.rows)

    def test_empty_grid_rejected(self):
        inst = Instance((uniform_dist(0, 1),))
        with pytest.raises(ValueError, match="nonempty"):
            ratio_sweep(inst, singleton_family(identity(1)), points=0)

    def test_atom_tie_refinement_present(self):
        inst = Instance((atoms_dist([(1.0, 0.4), (2.0, 0.6)]),))
        res = ratio_sweep(inst, singleton_family(identity(1)), points=16, refine_rounds=0)
        ties_at_two = {r.tie for r in res.rows if r.theta == 2.0}
        assert len(ties_at_two) >= 16

    def test_golden_hard_single_order_cap(self):
        # one fixed order cannot beat the golden ratio on its hard instance
        inst = golden_hard_instance(1e-4)
        res = ratio_sweep(inst, singleton_family(identity(3)), points=400)
        assert res.best.ratio <= GOLDEN_INV + 10 * 1e-4

    def test_forward_reverse_attains_golden(self):
        inst = golden_hard_instance(1e-4)
        res = ratio_sweep(inst, forward_reverse_family(3), points=400)
        assert res.best.ratio >= GOLDEN_INV - 1e-9


class TestGuaranteeProperties:
    def test_golden_guarantee_randomized(self):
        rng = np.random.default_rng(77)
        for _ in range(40):
            inst = random_instance(rng, int(rng.integers(1, 8)))
            fam = forward_reverse_family(inst.n)
            rep = eval_family(inst, fam, golden_threshold(inst))
            assert rep.gambler >= (GOLDEN_INV - 1e-9) * rep.prophet

    def test_e_guarantee_randomized_prime(self):
        from copi import affine_family

        rng = np.random.default_rng(78)
        fam = affine_family(7)
        for _ in range(25):
            inst = random_instance(rng, 7)
            rep = eval_family(inst, fam, e_threshold(inst))
            assert rep.gambler >= (1 - 1 / math.e - 1e-9) * rep.prophet

    def test_prophet_consistency_between_paths(self):
        inst = random_instance(np.random.default_rng(5), 4)
        res = ratio_sweep(inst, forward_reverse_family(4), points=50, refine_rounds=0)
        assert res.prophet == pytest.approx(prophet_value(inst), abs=1e-10)
