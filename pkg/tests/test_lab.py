"""Experiment harness: reports, counterexamples, inequality checks, trials."""

import json

import numpy as np
import pytest

from myersonlab.auction import EnumerationCapError, expected_revenue, myerson
from myersonlab.dist import (
    ProductDist,
    make_discrete,
    min_closeness_eps,
    point_mass,
    product_dist,
    uniform_grid,
)
from myersonlab.feasible import (
    all_or_nothing,
    from_independent_sets,
    minimum_non_matroid,
    uniform_matroid,
)
from myersonlab.lab import (
    PreconditionError,
    Report,
    check_approx_monotone,
    check_single_bidder_bound,
    dominated_pair,
    embed_counterexample,
    lipschitz_eps_for,
    nonmonotone_gadget,
    random_feasible,
    random_product,
    run_copies,
    run_lb_family,
    run_lipschitz_lb,
    run_nonmonotone,
    run_sample_complexity,
    shift_down,
)

MINNON_SETS = [(), (0,), (1,), (2,), (1, 2)]


class TestReport:
    def test_json_shape_and_reproducibility(self):
        r = run_nonmonotone(0.1)
        obj = r.to_json()
        assert set(obj) == {"experiment", "params", "metrics", "verdict", "seed"}
        assert obj["verdict"] in ("pass", "fail")
        assert r.json_str() == run_nonmonotone(0.1).json_str()

    def test_csv_rows(self):
        r = run_nonmonotone(0.1)
        rows = r.csv_rows()
        assert len(rows) == len(r.metrics)
        assert rows[0].startswith("nonmonotone,eps=0.1,")
        assert rows[0].endswith(",pass")


class TestNonmonotone:
    def test_frozen_values(self):
        r = run_nonmonotone(0.1)
        assert r.metrics["revenue_on_design_prior"] == pytest.approx(0.605, abs=1e-9)
        assert r.metrics["revenue_on_dominating"] == pytest.approx(0.2, abs=1e-9)
        assert r.metrics["gap"] == pytest.approx(0.405, abs=1e-9)
        assert r.passed

    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
    def test_stable_across_eps(self, eps):
        r = run_nonmonotone(eps)
        assert r.passed
        assert r.metrics["revenue_on_dominating"] == pytest.approx(2 * eps, abs=1e-9)
        assert r.metrics["revenue_on_design_prior"] > 0.5

    def test_eps_validation(self):
        with pytest.raises(ValueError):
            run_nonmonotone(0.5)


class TestCopies:
    @pytest.mark.parametrize("k,gap", [(2, 0.405), (3, 0.405), (4, 0.810)])
    def test_gap_scales_with_copies(self, k, gap):
        r = run_copies(k)
        assert r.metrics["gap"] == pytest.approx(gap, abs=1e-9)
        assert r.passed

    def test_k_validation(self):
        with pytest.raises(ValueError):
            run_copies(1)

    def test_exact_mode_cap(self):
        with pytest.raises(EnumerationCapError):
            run_copies(10)

    def test_monte_carlo_agrees_with_exact(self):
        exact = run_copies(4)
        mc = run_copies(4, trials=4000, seed=3)
        se = mc.metrics["stderr_design"] + mc.metrics["stderr_dominating"]
        assert abs(mc.metrics["gap"] - exact.metrics["gap"]) <= 4 * se


class TestEmbed:
    def test_minimum_non_matroid_scaled_gap(self):
        r = embed_counterexample(minimum_non_matroid())
        assert r.metrics["revenue_on_design_prior"] == pytest.approx(0.605 / 3, abs=1e-9)
        assert r.metrics["revenue_on_dominating"] == pytest.approx(0.2 / 3, abs=1e-9)
        assert r.metrics["gap"] == pytest.approx(0.405 / 3, abs=1e-9)
        assert r.passed

    def test_dummy_bidder_adds_intersection_revenue(self):
        sets = [tuple(sorted(set(s) | set(t))) for s in MINNON_SETS for t in [(), (3,)]]
        r = embed_counterexample(from_independent_sets(4, sets))
        assert r.metrics["intersection_size"] == 1
        assert r.metrics["revenue_on_design_prior"] == pytest.approx(1 + 0.605 / 4, abs=1e-9)
        assert r.metrics["revenue_on_dominating"] == pytest.approx(1 + 0.2 / 4, abs=1e-9)
        assert r.metrics["gap"] == pytest.approx(0.405 / 4, abs=1e-9)

    def test_matroid_rejected(self):
        with pytest.raises(PreconditionError, match="matroid"):
            embed_counterexample(uniform_matroid(3, 2))

    def test_not_downward_closed_rejected(self):
        with pytest.raises(PreconditionError, match="downward-closed"):
            embed_counterexample(from_independent_sets(2, [(), (0, 1)]))

    def test_fractional_rejected(self):
        with pytest.raises(PreconditionError, match="binary"):
            embed_counterexample(all_or_nothing(2, 1))

    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
    def test_stable_across_eps(self, eps):
        assert embed_counterexample(minimum_non_matroid(), eps).passed


class TestApproxMonotone:
    def test_identical_pair_trivially_passes(self):
        d = product_dist(uniform_grid([0.2, 0.6, 1.0]), point_mass(0.5))
        r = check_approx_monotone(d, d, 0.3, uniform_matroid(2, 1))
        assert r.passed

    def test_gadget_pair_is_not_close(self):
        dtilde, d, fs = nonmonotone_gadget(0.1)
        with pytest.raises(PreconditionError, match="closeness"):
            check_approx_monotone(d, dtilde, 0.1, fs)

    def test_dominance_precondition(self):
        dtilde, d, fs = nonmonotone_gadget(0.1)
        with pytest.raises(PreconditionError, match="dominance"):
            check_approx_monotone(dtilde, d, 0.1, fs)

    def _fuzz(self, uniform, count, seed):
        rng = np.random.default_rng(seed)
        done = 0
        while done < count:
            n = int(rng.integers(1, 4))
            big, small = dominated_pair(rng, n, strength=0.25)
            fs = random_feasible(rng, n)
            if uniform:
                from myersonlab.dist import min_uniform_closeness_eps

                eps = min_uniform_closeness_eps(big, small, n, fs.rank)
            else:
                eps = min_closeness_eps(big, small, n, fs.rank)
            eps = eps * (1 + 1e-9) + 1e-12
            if eps > 1.0:
                continue
            r = check_approx_monotone(big, small, eps, fs, uniform=uniform)
            assert r.passed, r.to_json()
            done += 1

    def test_fuzz_nonuniform(self):
        self._fuzz(uniform=False, count=80, seed=101)

    def test_fuzz_uniform_variant(self):
        self._fuzz(uniform=True, count=80, seed=102)


class TestSingleBidderBound:
    def test_theta_zero(self):
        d = product_dist(point_mass(0.5))
        r = check_single_bidder_bound(d, d, 0.5, 1, 1, 0, 0.0)
        assert r.metrics["lhs"] == 0.0
        assert r.passed

    def test_identity_on_concave_pair(self):
        d0 = make_discrete([0.25, 0.75], [0.5, 0.5])
        p = product_dist(d0)
        from myersonlab.curves import revenue_curve

        r = check_single_bidder_bound(p, p, 0.5, 1, 1, 0, 0.4)
        assert r.metrics["lhs"] == pytest.approx(revenue_curve(d0).value_at(0.4), abs=1e-12)
        assert r.passed

    def test_irregular_design_prior_rejected(self):
        irregular = make_discrete([0.4, 0.5, 1.0], [0.8, 0.1, 0.1])
        p = product_dist(irregular)
        with pytest.raises(PreconditionError, match="regular"):
            check_single_bidder_bound(p, p, 0.5, 1, 1, 0, 0.4)

    def test_fuzz_regular_pairs(self):
        from myersonlab.curves import ironing_intervals

        rng = np.random.default_rng(17)
        done = 0
        worst = 1.0
        while done < 500:
            n = int(rng.integers(1, 4))
            k = int(rng.integers(1, n + 1))
            big = random_product(rng, n)
            small = ProductDist(tuple(shift_down(rng, dj, 0.25) for dj in big))
            i = int(rng.integers(0, n))
            if ironing_intervals(small[i]):
                continue
            eps = min_closeness_eps(big, small, n, k) * (1 + 1e-9) + 1e-12
            if eps > 1.0:
                continue
            theta = float(rng.choice([0.0, 0.1, 0.3, 0.5, 0.9, 1.0]))
            try:
                r = check_single_bidder_bound(big, small, eps, n, k, i, theta)
            except PreconditionError:
                continue
            assert r.passed, r.to_json()
            worst = min(worst, r.metrics["rhs"] - r.metrics["lhs"])
            done += 1
        assert worst >= -1e-9


class TestLipschitzLowerBound:
    def test_frozen_instance(self):
        r = run_lipschitz_lb(2, 1, 0.01)
        assert r.metrics["opt_on_smaller"] == pytest.approx(0.5625, abs=1e-12)
        assert r.metrics["opt_on_larger"] == pytest.approx(0.5643765625, abs=1e-12)
        assert r.metrics["difference"] == pytest.approx(1.8765625e-3, abs=1e-12)
        assert r.passed

    def test_difference_matches_closed_form(self):
        for n, k, eps in [(2, 1, 0.01), (3, 2, 0.008), (4, 4, 0.005)]:
            r = run_lipschitz_lb(n, k, eps)
            assert r.metrics["difference"] == pytest.approx(
                r.metrics["closed_form_difference"], abs=1e-12
            )

    def test_zero_eps_degenerates(self):
        r = run_lipschitz_lb(2, 1, 0.0)
        assert r.metrics["difference"] == pytest.approx(0.0, abs=1e-15)
        assert r.passed

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            run_lipschitz_lb(2, 3, 0.01)


class TestLipschitzUpperFuzz:
    """Close pairs without dominance keep the design-prior revenue nearly intact."""

    @pytest.mark.parametrize("c", [0.25, 0.5])
    def test_swept_constant(self, c):
        rng = np.random.default_rng(21)
        done = 0
        while done < 100:
            n = int(rng.integers(2, 4))
            base = random_product(rng, n)
            one = ProductDist(tuple(shift_down(rng, dj, 0.08) for dj in base))
            other = ProductDist(tuple(shift_down(rng, dj, 0.08) for dj in base))
            fs = random_feasible(rng, n)
            eps_prime = min_closeness_eps(other, one, n, fs.rank) * (1 + 1e-9) + 1e-12
            if eps_prime > 0.5:
                continue
            eps = lipschitz_eps_for(eps_prime, n, fs.rank, c)
            if eps is None or eps > 1.0:
                continue
            a = myerson(one, fs)
            assert (
                expected_revenue(a, other)
                >= expected_revenue(a, one) - eps - 1e-9
            )
            done += 1


class TestSampleComplexity:
    def test_point_mass_prior_never_fails(self):
        d = product_dist(point_mass(0.4), point_mass(0.8))
        r = run_sample_complexity(uniform_matroid(2, 1), d, 0.1, 0.1, 1.0, 20, 0)
        assert r.metrics["failure_frequency"] == 0.0
        assert r.passed

    def test_setting_detection(self):
        d = product_dist(point_mass(0.4), point_mass(0.8))
        r1 = run_sample_complexity(uniform_matroid(2, 1), d, 0.1, 0.1, 1.0, 5, 0)
        r2 = run_sample_complexity(all_or_nothing(2, 1), d, 0.1, 0.1, 1.0, 5, 0)
        assert r1.params["setting"] == "downward_closed"
        assert r2.params["setting"] == "general"
        assert r2.metrics["samples_per_trial"] > r1.metrics["samples_per_trial"]

    def test_reports_are_reproducible(self):
        d = ProductDist((uniform_grid([0.2, 0.5, 1.0]),))
        fs = uniform_matroid(1, 1)
        a = run_sample_complexity(fs, d, 0.2, 0.2, 1.0, 30, 4)
        b = run_sample_complexity(fs, d, 0.2, 0.2, 1.0, 30, 4)
        assert a.json_str() == b.json_str()


class TestLbFamily:
    def test_metrics_and_bounds(self):
        r = run_lb_family(4, 2, 0.01, sample_budget=1, trials=10, seed=5)
        # gadget shift 48 eps / (nk) = 0.06
        assert r.metrics["hellinger_sq_bound"] == pytest.approx(2 * 0.06**2 * 4, abs=1e-15)
        assert r.metrics["hellinger_sq"] <= r.metrics["hellinger_sq_bound"]
        assert r.metrics["min_profile_prob"] >= 1 / (8 * 4)
        assert r.metrics["family_size"] == 16
        assert r.passed

    def test_uninformative_budget_forces_regret(self):
        r = run_lb_family(4, 2, 0.01, sample_budget=1, trials=10, seed=5)
        if r.metrics["budget_product"] <= 0.01:
            assert r.metrics["avg_regret"] >= 0.01

    def test_eps_cap(self):
        with pytest.raises(ValueError, match="1/100"):
            run_lb_family(4, 2, 0.02, 10, 5, 0)

    def test_large_n_subsamples_family(self):
        r = run_lb_family(9, 4, 0.005, sample_budget=2, trials=2, seed=1, family_cap=8)
        assert r.metrics["family_size"] == 8


class TestOptRevenueLipschitzFuzz:
    """Dominated close pairs keep the optimal revenue within eps (downward-closed)."""

    def test_fuzz(self):
        from myersonlab.auction import opt_revenue

        rng = np.random.default_rng(13)
        done = 0
        while done < 80:
            n = int(rng.integers(1, 4))
            big, small = dominated_pair(rng, n, strength=0.25)
            fs = random_feasible(rng, n, families=("uniform", "minnon"))
            eps = min_closeness_eps(big, small, n, fs.rank) * (1 + 1e-9) + 1e-12
            if eps > 1.0:
                continue
            assert opt_revenue(small, fs) >= opt_revenue(big, fs) - eps - 1e-9
            done += 1
