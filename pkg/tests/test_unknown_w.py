"""Case-level WoE with unknown trace error probability."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import random_case
from snpwoe.evidence import (
    CaseData,
    DegenerateCaseError,
    MarkerObservation,
    joint_prob_h1,
    joint_prob_h2,
    log10_lik_h1,
    log10_lik_h2,
    woe_known,
)
from snpwoe.genotypes import GenotypePriors, hwe_priors
from snpwoe.scaled_beta import ScaledBeta
from snpwoe.unknown_w import (
    METHOD_INTEGRATE_MC,
    METHOD_INTEGRATE_QUAD,
    METHOD_KNOWN,
    METHOD_PLUGIN,
    METHOD_PROFILE,
    METHODS,
    QuadratureError,
    WoEResult,
    woe_integrate_mc,
    woe_integrate_quad,
    woe_known_result,
    woe_plugin,
    woe_profile,
)

PRIORS75 = hwe_priors(0.75)
UNIFORM = ScaledBeta(1.0, 1.0)


def one_marker_case(a, b, priors=PRIORS75):
    return CaseData((MarkerObservation(a, b, priors),))


def oracle_quad_woe(case, prior, w_r, prior_h2=None):
    """Direct w-space integral of the expected per-marker log10 LR."""
    p_h2 = prior if prior_h2 is None else prior_h2
    total = 0.0
    for mk in case.markers:
        a, b, pr = mk.x_t.dosage, mk.x_r.dosage, mk.priors

        def f1(w):
            return prior.pdf(w) * math.log10(joint_prob_h1(a, b, pr, w, w_r))

        def f2(w):
            return p_h2.pdf(w) * math.log10(joint_prob_h2(a, b, pr, w, w_r))

        i1, _ = quad(f1, 0.0, 0.5, limit=300)
        i2, _ = quad(f2, 0.0, 0.5, limit=300)
        total += i1 - i2
    return total


class TestWoEResult:
    def test_method_whitelist(self):
        assert set(METHODS) == {METHOD_KNOWN, METHOD_PLUGIN, METHOD_INTEGRATE_MC,
                                METHOD_INTEGRATE_QUAD, METHOD_PROFILE}
        with pytest.raises(ValueError):
            WoEResult(1.0, "bogus")

    def test_maximizers_only_for_profile(self):
        with pytest.raises(ValueError):
            WoEResult(1.0, METHOD_PROFILE)
        with pytest.raises(ValueError):
            WoEResult(1.0, METHOD_KNOWN, w_hat_h1=0.1, w_hat_h2=0.1)
        r = WoEResult(1.0, METHOD_PROFILE, w_hat_h1=0.1, w_hat_h2=0.2)
        assert r.w_hat_h2 == 0.2

    def test_mc_std_error_pairing(self):
        with pytest.raises(ValueError):
            WoEResult(1.0, METHOD_INTEGRATE_MC)
        with pytest.raises(ValueError):
            WoEResult(1.0, METHOD_KNOWN, mc_std_error=0.1)
        with pytest.raises(ValueError):
            WoEResult(1.0, METHOD_INTEGRATE_MC, mc_std_error=-1e-9)

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            WoEResult(float("nan"), METHOD_KNOWN)

    def test_infinite_woe_allowed(self):
        assert WoEResult(-math.inf, METHOD_PLUGIN).woe == -math.inf


class TestKnownAndPlugin:
    def test_known_wraps_value(self):
        case = one_marker_case(0, 0)
        r = woe_known_result(case, 1e-3, 1e-4)
        assert r.method == METHOD_KNOWN
        assert r.woe == woe_known(case, 1e-3, 1e-4)

    def test_plugin_is_known_at_w_r(self):
        rng = np.random.default_rng(21)
        case = random_case(rng, m=10, n_priors=2)
        assert woe_plugin(case, 1e-4).woe == woe_known(case, 1e-4, 1e-4)


class TestIntegrateQuad:
    def test_uniform_prior_matches_w_space_oracle(self):
        # includes a mismatching pair, whose integrand is log-singular at 0
        case = CaseData((
            MarkerObservation(0, 0, PRIORS75),
            MarkerObservation(1, 1, hwe_priors(0.9)),
            MarkerObservation(0, 1, PRIORS75),
        ))
        got = woe_integrate_quad(case, UNIFORM, w_r=1e-4)
        assert got.method == METHOD_INTEGRATE_QUAD
        want = oracle_quad_woe(case, UNIFORM, 1e-4)
        assert math.isclose(got.woe, want, rel_tol=0, abs_tol=1e-6)

    def test_skewed_prior_matches_w_space_oracle(self):
        prior = ScaledBeta.from_moments(1e-2, 1e-4)
        case = CaseData((
            MarkerObservation(2, 2, hwe_priors(0.6)),
            MarkerObservation(2, 0, hwe_priors(0.6)),
        ))
        got = woe_integrate_quad(case, prior, w_r=1e-4).woe
        want = oracle_quad_woe(case, prior, 1e-4)
        assert math.isclose(got, want, rel_tol=0, abs_tol=1e-6)

    def test_marker_additivity(self):
        rng = np.random.default_rng(23)
        case = random_case(rng, m=6, n_priors=2)
        prior = ScaledBeta.from_moments(5e-3, 1e-6)
        whole = woe_integrate_quad(case, prior, w_r=1e-4).woe
        parts = [
            woe_integrate_quad(CaseData((mk,)), prior, w_r=1e-4).woe
            for mk in case.markers
        ]
        assert math.isclose(whole, math.fsum(parts), rel_tol=0, abs_tol=1e-9)

    def test_near_point_mass_recovers_known(self):
        prior = ScaledBeta.from_moments(1e-2, 1e-12)
        rng = np.random.default_rng(24)
        case = random_case(rng, m=5)
        got = woe_integrate_quad(case, prior, w_r=1e-4).woe
        assert math.isclose(got, woe_known(case, 1e-2, 1e-4),
                            rel_tol=0, abs_tol=1e-4)

    def test_distinct_h2_prior(self):
        case = one_marker_case(1, 1)
        base = woe_integrate_quad(case, UNIFORM, w_r=1e-4)
        same = woe_integrate_quad(case, UNIFORM, w_r=1e-4, prior_h2=UNIFORM)
        assert same.woe == base.woe
        # A near-point-mass H2 prior pins the H2 term at its mean, so the
        # result is the uniform H1 integral minus one fixed-w log10 term.
        narrow = ScaledBeta.from_moments(1e-3, 1e-12)
        shifted = woe_integrate_quad(case, UNIFORM, w_r=1e-4, prior_h2=narrow)

        def f1(w):
            return UNIFORM.pdf(w) * math.log10(
                joint_prob_h1(1, 1, PRIORS75, w, 1e-4))

        i1, _ = quad(f1, 0.0, 0.5, limit=300)
        want = i1 - math.log10(joint_prob_h2(1, 1, PRIORS75, 1e-3, 1e-4))
        assert math.isclose(shifted.woe, want, rel_tol=0, abs_tol=1e-4)

    def test_unreachable_tolerance_reports_marker(self):
        case = CaseData((MarkerObservation(0, 0, PRIORS75),), ids=("rs17",))
        with pytest.raises(QuadratureError, match="rs17"):
            woe_integrate_quad(case, UNIFORM, w_r=1e-4, tol=1e-300)

    def test_validation(self):
        case = one_marker_case(0, 0)
        with pytest.raises(ValueError):
            woe_integrate_quad(case, UNIFORM, w_r=0.5)
        with pytest.raises(ValueError):
            woe_integrate_quad(case, UNIFORM, w_r=1e-4, tol=0.0)

    def test_impossible_reference_observation(self):
        case = one_marker_case(0, 2, GenotypePriors(1.0, 0.0, 0.0))
        with pytest.raises(DegenerateCaseError):
            woe_integrate_quad(case, UNIFORM, w_r=0.0)


class TestIntegrateMc:
    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(30)
        case = random_case(rng, m=12)
        prior = ScaledBeta.from_moments(1e-2, 1e-5)
        r1 = woe_integrate_mc(case, prior, 1e-4,
                              np.random.default_rng(np.random.SeedSequence(7)))
        r2 = woe_integrate_mc(case, prior, 1e-4,
                              np.random.default_rng(np.random.SeedSequence(7)))
        assert r1.woe == r2.woe and r1.mc_std_error == r2.mc_std_error
        assert r1.method == METHOD_INTEGRATE_MC and r1.mc_std_error > 0.0

    def test_marker_order_invariance_is_bitwise(self):
        rng = np.random.default_rng(31)
        case = random_case(rng, m=20, n_priors=2)
        flipped = CaseData(tuple(reversed(case.markers)))
        prior = ScaledBeta.from_moments(1e-2, 1e-5)
        a = woe_integrate_mc(case, prior, 1e-4,
                             np.random.default_rng(np.random.SeedSequence(8)))
        b = woe_integrate_mc(flipped, prior, 1e-4,
                             np.random.default_rng(np.random.SeedSequence(8)))
        assert a.woe == b.woe

    def test_agrees_with_quadrature(self):
        rng = np.random.default_rng(32)
        case = random_case(rng, m=25, n_priors=2)
        prior = ScaledBeta.from_moments(1e-2, 1e-5)
        exact = woe_integrate_quad(case, prior, 1e-4).woe
        mc = woe_integrate_mc(case, prior, 1e-4,
                              np.random.default_rng(np.random.SeedSequence(9)),
                              n_samples=4000)
        assert abs(mc.woe - exact) <= 4.0 * mc.mc_std_error + 1e-6

    def test_near_point_mass_recovers_known(self):
        prior = ScaledBeta.from_moments(1e-2, 1e-14)
        rng = np.random.default_rng(33)
        case = random_case(rng, m=5)
        r = woe_integrate_mc(case, prior, 1e-4,
                             np.random.default_rng(np.random.SeedSequence(10)))
        assert math.isclose(r.woe, woe_known(case, 1e-2, 1e-4),
                            rel_tol=0, abs_tol=1e-3)
        assert r.mc_std_error < 1e-3

    def test_distinct_h2_prior_agrees_with_quad(self):
        case = one_marker_case(1, 1)
        prior = ScaledBeta.from_moments(1e-2, 1e-5)
        prior_h2 = ScaledBeta.from_moments(1e-3, 1e-8)
        rng = np.random.default_rng(np.random.SeedSequence(11))
        r = woe_integrate_mc(case, prior, 1e-4, rng, n_samples=4000,
                             prior_h2=prior_h2)
        want = woe_integrate_quad(case, prior, 1e-4, prior_h2=prior_h2).woe
        assert abs(r.woe - want) <= 4.0 * r.mc_std_error + 1e-6

    def test_validation(self):
        case = one_marker_case(0, 0)
        rng = np.random.default_rng(0)
        prior = ScaledBeta.from_moments(1e-2, 1e-5)
        with pytest.raises(ValueError):
            woe_integrate_mc(case, prior, 1e-4, rng, n_samples=1)
        with pytest.raises(ValueError):
            woe_integrate_mc(case, prior, -0.1, rng)

    def test_default_sample_count(self):
        # per-draw case sums have positive spread, so the standard error of
        # the mean at the default draw count is visibly nonzero
        case = one_marker_case(2, 0)
        prior = ScaledBeta.from_moments(1e-2, 1e-5)
        r = woe_integrate_mc(case, prior, 1e-4,
                             np.random.default_rng(np.random.SeedSequence(12)))
        assert r.mc_std_error > 0.0


class TestProfile:
    def test_all_match_case_maximizes_h1_at_zero(self):
        case = CaseData(tuple(MarkerObservation(0, 0, PRIORS75)
                              for _ in range(10)))
        r = woe_profile(case, w_r=1e-4)
        assert r.method == METHOD_PROFILE
        assert r.w_hat_h1 == 0.0
        assert 0.0 <= r.w_hat_h2 < 0.5

    def test_reconstruction_identity(self):
        rng = np.random.default_rng(40)
        case = random_case(rng, m=15, n_priors=2)
        r = woe_profile(case, w_r=1e-4)
        l1 = float(log10_lik_h1(case, r.w_hat_h1, 1e-4))
        l2 = float(log10_lik_h2(case, r.w_hat_h2, 1e-4))
        assert math.isclose(r.woe, l1 - l2, rel_tol=0, abs_tol=1e-9)

    def test_per_hypothesis_dominance_on_grid(self):
        rng = np.random.default_rng(41)
        case = random_case(rng, m=12, n_priors=2)
        r = woe_profile(case, w_r=1e-4)
        grid = np.linspace(0.0, 0.5 - 1e-12, 301)
        l1_max = float(log10_lik_h1(case, r.w_hat_h1, 1e-4))
        l2_max = float(log10_lik_h2(case, r.w_hat_h2, 1e-4))
        assert l1_max >= np.max(log10_lik_h1(case, grid, 1e-4)) - 1e-9
        assert l2_max >= np.max(log10_lik_h2(case, grid, 1e-4)) - 1e-9

    def test_restricted_interval(self):
        case = CaseData(tuple(MarkerObservation(0, 0, PRIORS75)
                              for _ in range(10)))
        r = woe_profile(case, w_r=1e-4, lower=0.05, upper=0.2)
        assert r.w_hat_h1 == 0.05

    def test_bound_validation(self):
        case = one_marker_case(0, 0)
        with pytest.raises(ValueError):
            woe_profile(case, 1e-4, lower=0.2, upper=0.1)
        with pytest.raises(ValueError):
            woe_profile(case, 1e-4, lower=-0.1)
        with pytest.raises(ValueError):
            woe_profile(case, 1e-4, upper=0.6)
        with pytest.raises(ValueError, match="collapses"):
            woe_profile(case, 1e-4, lower=0.5 - 1e-13, upper=0.5)

    def test_impossible_reference_observation(self):
        case = one_marker_case(1, 1, GenotypePriors(0.5, 0.0, 0.5))
        with pytest.raises(DegenerateCaseError):
            woe_profile(case, w_r=0.0)


class TestCrossMethodConsistency:
    def test_point_mass_prior_collapses_to_known(self):
        # a concentrated prior makes both integration flavours reproduce the
        # fixed-w evidence at the prior mean
        w0 = 5e-3
        prior = ScaledBeta.from_moments(w0, w0 * w0 * 1e-8)
        case = CaseData((
            MarkerObservation(0, 0, PRIORS75),
            MarkerObservation(1, 1, PRIORS75),
            MarkerObservation(2, 2, hwe_priors(0.9)),
        ))
        known = woe_known(case, w0, 1e-4)
        q = woe_integrate_quad(case, prior, 1e-4).woe
        m = woe_integrate_mc(case, prior, 1e-4,
                             np.random.default_rng(np.random.SeedSequence(50))).woe
        assert math.isclose(q, known, rel_tol=0, abs_tol=1e-6)
        assert math.isclose(m, known, rel_tol=0, abs_tol=1e-4)

    def test_expected_h2_woe_is_negative(self):
        # a trace/reference pair from different donors should on average
        # give negative evidence under every method
        rng = np.random.default_rng(51)
        priors = hwe_priors(0.75)
        prior = ScaledBeta.from_moments(1e-3, 1e-8)
        markers = []
        for _ in range(150):
            z_t = rng.choice(3, p=priors.as_array())
            z_r = rng.choice(3, p=priors.as_array())
            markers.append(MarkerObservation(int(z_t), int(z_r), priors))
        case = CaseData(tuple(markers))
        assert woe_known(case, 1e-3, 1e-4) < 0
        assert woe_integrate_quad(case, prior, 1e-4).woe < 0
        assert woe_profile(case, 1e-4).woe < 0
