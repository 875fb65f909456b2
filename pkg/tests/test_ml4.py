import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from replirate.core.exceptions import DataFileError, DomainError, ImproperPosteriorError, InsufficientDrawsError
from replirate.core.ml4 import (
    GROUPS,
    ContrastSummary,
    EffectSizeRecord,
    Ml4Pipeline,
    MuRhoDraws,
    NigDraws,
    NigHyper,
    NigPosterior,
    SufficientStats,
    bundled_path,
    expand_groups,
    group_contrast,
    hdi_continuous,
    hedges_correction,
    hedges_from_cohen,
    load_records,
    load_summary,
    nig_sample,
    nig_update,
    propagate_mu_rho,
    propagate_mu_rho_analytic,
    select_group,
    se_hedges,
    standard_error,
    summarize_draws,
)
from replirate.core.seqmodels import effective_sample_size, operational_variance, two_point_variance

ML4_SUMMARY = SufficientStats.from_summary(17, 0.055, 0.250)


def fixed_draws(rho, mu=0.5, seed=0):
    rho = np.asarray(rho, dtype=float)
    return MuRhoDraws(
        mu=np.full(rho.size, mu),
        rho=rho,
        rho_defined=np.ones(rho.size, dtype=bool),
        seed=seed,
    )


class TestEffectSizes:
    def test_hedges_correction(self):
        assert hedges_correction(12, 11) == pytest.approx(1 - 3 / 83)
        assert hedges_from_cohen(1.34, 12, 11) == pytest.approx(1.29, abs=5e-3)

    def test_zero_effect(self):
        assert hedges_from_cohen(0.0, 30, 30) == 0.0

    def test_correction_vanishes(self):
        assert hedges_from_cohen(1.0, 10**6, 10**6) == pytest.approx(1.0, abs=1e-6)

    def test_degrees_of_freedom(self):
        with pytest.raises(DomainError):
            hedges_correction(1, 1)

    def test_standard_error(self):
        assert standard_error(0.0, 50, 50) == pytest.approx(0.2)
        assert standard_error(1.29, 12, 11) == pytest.approx(0.4625, abs=2e-3)
        assert standard_error(0.7, 20, 35) == standard_error(0.7, 35, 20)

    def test_record_standard_error(self):
        rec = EffectSizeRecord(site_id="s1", g=0.0, n1=50, n2=50, protocol="AA")
        assert se_hedges(rec) == pytest.approx(0.2)

    def test_record_protocol_checked(self):
        with pytest.raises(ValidationError):
            EffectSizeRecord(site_id="s1", g=0.1, n1=50, n2=50, protocol="XX")


class TestConjugateUpdate:
    def test_sufficient_statistics(self):
        assert ML4_SUMMARY.m == 17
        assert ML4_SUMMARY.ss == pytest.approx(1.0, abs=1e-15)

    def test_from_values(self):
        stats_ = SufficientStats.from_values([0.1, 0.3, 0.2])
        assert stats_.mean_g == pytest.approx(0.2)
        assert stats_.ss == pytest.approx(0.02)

    def test_jeffreys(self):
        post = nig_update(ML4_SUMMARY, NigHyper.parse("jeffreys"))
        assert post.kappa_n == pytest.approx(17, abs=1e-12)
        assert post.mu_n == pytest.approx(0.055, abs=1e-12)
        assert post.alpha_n == pytest.approx(8.5, abs=1e-12)
        assert post.beta_n == pytest.approx(0.5, abs=1e-12)

    def test_weakly_informative(self):
        post = nig_update(ML4_SUMMARY, NigHyper.parse("weak"))
        assert post.kappa_n == pytest.approx(18, abs=1e-12)
        assert post.mu_n == pytest.approx(17 * 0.055 / 18, abs=1e-12)
        assert post.alpha_n == pytest.approx(9.5, abs=1e-12)
        assert post.beta_n == pytest.approx(1.5 + 17 * 0.055**2 / 36, abs=1e-12)

    def test_vanishing_prior_weight_centres_on_mean(self):
        post = nig_update(ML4_SUMMARY, NigHyper(mu0=5.0, kappa0=1e-12, alpha0=1.0, beta0=1.0))
        assert post.mu_n == pytest.approx(0.055, abs=1e-9)

    def test_jeffreys_improper(self):
        with pytest.raises(ImproperPosteriorError):
            nig_update(SufficientStats(m=1, mean_g=0.2, ss=0.0), NigHyper())
        with pytest.raises(ImproperPosteriorError):
            nig_update(SufficientStats(m=5, mean_g=0.2, ss=0.0), NigHyper())

    def test_unknown_prior(self):
        with pytest.raises(DomainError):
            NigHyper.parse("flat")


class TestSampling:
    @pytest.fixture(scope="class")
    def posterior(self):
        return nig_update(ML4_SUMMARY, NigHyper.parse("jeffreys"))

    @pytest.fixture(scope="class")
    def draws(self, posterior):
        return nig_sample(posterior, 300_000, seed=1234)

    def test_theta_mean(self, posterior, draws):
        se = draws.theta.std() / np.sqrt(draws.theta.size)
        assert abs(draws.theta.mean() - posterior.mu_n) < 4 * se

    def test_theta_marginal_is_student_t(self, posterior, draws):
        result = stats.kstest(draws.theta, posterior.theta_marginal().cdf)
        assert result.statistic < 0.005

    def test_variances_positive(self, draws):
        assert np.all(draws.sigma2 > 0.0)

    def test_reproducible_and_thread_independent(self, posterior):
        one = nig_sample(posterior, 20_000, seed=9, chunk_size=5_000, workers=1)
        many = nig_sample(posterior, 20_000, seed=9, chunk_size=5_000, workers=4)
        np.testing.assert_array_equal(one.theta, many.theta)
        np.testing.assert_array_equal(one.sigma2, many.sigma2)

    def test_seed_changes_draws(self, posterior):
        a = nig_sample(posterior, 1_000, seed=1)
        b = nig_sample(posterior, 1_000, seed=2)
        assert not np.array_equal(a.theta, b.theta)


class TestPropagation:
    def test_no_heterogeneity_gives_zero_rho(self):
        draws = NigDraws(theta=np.linspace(-0.5, 0.5, 2_000), sigma2=np.full(2_000, 1e-24), seed=0)
        result = propagate_mu_rho(draws, [0.3] * 10, seed=0)
        np.testing.assert_allclose(result.rho, 0.0, atol=1e-9)

    def test_rho_in_unit_interval(self):
        post = nig_update(ML4_SUMMARY, NigHyper.parse("jeffreys"))
        result = propagate_mu_rho(nig_sample(post, 20_000, seed=3), [0.2] * 17, seed=3)
        rho = result.defined_rho
        assert np.all((rho >= 0.0) & (rho <= 1.0))
        assert result.clamped_fraction < 0.001

    def test_analytic_agrees_with_simulation(self):
        post = nig_update(ML4_SUMMARY, NigHyper.parse("jeffreys"))
        sample = nig_sample(post, 20_000, seed=5)
        simulated = propagate_mu_rho(sample, [0.25] * 17, seed=5)
        analytic = propagate_mu_rho_analytic(sample, [0.25] * 17)
        assert analytic.mapping == "delta"
        assert simulated.mu.mean() == pytest.approx(analytic.mu.mean(), abs=0.01)

    def test_standard_errors_checked(self):
        draws = NigDraws(theta=np.zeros(10), sigma2=np.ones(10), seed=0)
        with pytest.raises(DomainError):
            propagate_mu_rho(draws, [0.2], seed=0)
        with pytest.raises(DomainError):
            propagate_mu_rho(draws, [0.2, -0.1], seed=0)


class TestSummaries:
    def test_uniform_draws(self):
        draws = np.random.default_rng(0).uniform(size=100_000)
        interval = hdi_continuous(draws, 0.95)
        assert interval.width == pytest.approx(0.95, abs=0.01)

    def test_symmetric_draws(self):
        draws = np.random.default_rng(1).normal(2.0, 1.0, size=200_000)
        interval = hdi_continuous(draws, 0.95)
        assert (interval.lower + interval.upper) / 2 == pytest.approx(2.0, abs=0.02)
        assert interval.width == pytest.approx(2 * 1.96, abs=0.03)

    def test_nan_ignored(self):
        draws = np.concatenate([np.linspace(0.0, 1.0, 2_000), [np.nan] * 50])
        assert hdi_continuous(draws).attained_mass >= 0.95

    def test_too_few_draws(self):
        with pytest.raises(InsufficientDrawsError):
            hdi_continuous(np.linspace(0.0, 1.0, 999))

    def test_identical_groups(self):
        draws = fixed_draws(np.random.default_rng(2).uniform(size=5_000))
        contrast = group_contrast(draws, draws)
        assert contrast.exceedance == pytest.approx(0.5)
        assert contrast.mean_diff == 0.0

    def test_disjoint_groups(self):
        rng = np.random.default_rng(3)
        low = fixed_draws(rng.uniform(0.0, 0.2, size=5_000))
        high = fixed_draws(rng.uniform(0.5, 0.7, size=5_000))
        contrast = group_contrast(low, high)
        assert contrast.exceedance == 1.0
        assert contrast.interval.lower > 0.0

    def test_mismatched_sizes(self):
        with pytest.raises(DomainError):
            group_contrast(fixed_draws(np.zeros(1_000)), fixed_draws(np.zeros(2_000)))


class TestIngestion:
    def test_bundled_summary(self):
        summaries = load_summary(bundled_path("ml4_summary.csv"))
        assert set(summaries) == {"ml4", "ml4+ref"}
        assert summaries["ml4"] == ML4_SUMMARY
        assert summaries["ml4+ref"].m == 18

    def test_bundled_reference_converts_d(self):
        (reference,) = load_records(bundled_path("ml4_reference.csv"))
        assert reference.protocol.value == "REFERENCE"
        assert reference.g == pytest.approx(1.29, abs=5e-3)

    def test_records(self, site_records):
        records = load_records(site_records)
        assert len(records) == 12
        assert len(select_group(records, "aa")) == 6
        assert len(select_group(records, "ml4")) == 12

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFileError):
            load_records(tmp_path / "absent.csv")

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("site_id,n1,n2\na,10,10\n")
        with pytest.raises(DataFileError):
            load_records(path)

    def test_invalid_protocol(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("site_id,g,n1,n2,protocol\na,0.1,10,10,ZZ\n")
        with pytest.raises(DomainError):
            load_records(path)

    def test_groups(self):
        assert expand_groups("all") == list(GROUPS)
        assert expand_groups("AA, ih") == ["aa", "ih"]
        with pytest.raises(DomainError):
            expand_groups("aa,zz")


class TestPipeline:
    @pytest.mark.parametrize("prior", ["jeffreys", "weak"])
    def test_reference_raises_rho(self, prior):
        summaries = load_summary(bundled_path("ml4_summary.csv"))
        pipeline = Ml4Pipeline(draws=20_000, seed=11)
        without, _ = pipeline.run_summary(summaries["ml4"], "ml4", prior)
        with_ref, _ = pipeline.run_summary(summaries["ml4+ref"], "ml4+ref", prior)
        assert with_ref.rho_mean > without.rho_mean
        assert 0.0 <= without.rho_hdi_lo <= without.rho_hdi_hi <= 1.0
        assert without.clamped_fraction < 0.001

    def test_records(self, site_records):
        pipeline = Ml4Pipeline(draws=5_000, seed=4)
        summary, draws = pipeline.run_records(load_records(site_records), "aa", "jeffreys")
        assert summary.m == 6
        assert summary.S == 5_000
        assert summary.seed == 4
        assert draws.S == 5_000
        assert 0.0 < summary.mu_mean < 1.0

    def test_reproducible(self, site_records):
        records = load_records(site_records)
        first, _ = Ml4Pipeline(draws=5_000, seed=8).run_records(records, "ih", "weak")
        second, _ = Ml4Pipeline(draws=5_000, seed=8).run_records(records, "ih", "weak")
        assert first == second

    def test_group_too_small(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("site_id,g,n1,n2,protocol\na,0.1,10,10,AA\nb,0.3,10,10,IH\n")
        with pytest.raises(DomainError):
            Ml4Pipeline(draws=5_000).run_records(load_records(path), "aa", "jeffreys")

    @pytest.mark.slow
    def test_same_seed_contrast_is_even(self, site_records):
        records = load_records(site_records)
        pipeline = Ml4Pipeline(seed=21)
        _, a = pipeline.run_records(records, "aa", "jeffreys")
        _, b = pipeline.run_records(records, "aa", "jeffreys")
        assert group_contrast(a, b).exceedance == pytest.approx(0.5, abs=0.005)


class TestPublicSurface:
    @pytest.mark.parametrize(
        "obj",
        [
            NigPosterior,
            NigDraws,
            ContrastSummary,
            Ml4Pipeline.run_records,
            hedges_from_cohen,
            nig_update,
            select_group,
            summarize_draws,
            two_point_variance,
            effective_sample_size,
            operational_variance,
        ],
        ids=lambda obj: obj.__qualname__,
    )
    def test_documented(self, obj):
        assert obj.__doc__ and obj.__doc__.strip()
