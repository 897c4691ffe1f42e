import numpy as np
import pytest

import oracles
from cases import BBAR_TWO_CLIQUES_MW
from maxlindag import (
    Dag,
    NoiseSpec,
    SampleBlock,
    TailSampleError,
    ValidationError,
    WeightedModel,
    empirical_tdm,
    homogeneous_model,
    limit_cdf,
    mlcm_from_weights,
    model_from_std_mlcm,
    sample,
    scaled_block_maxima,
    standardize,
    tdm_from_std_mlcm,
    unit_frechet_points,
)


def single_edge_model(b: float, alpha: float = 1.0) -> WeightedModel:
    bbar = np.array([[1.0, b], [0.0, 1.0 - b]])
    return model_from_std_mlcm(bbar, alpha)


class TestNoiseSpec:
    def test_families_normalized(self):
        assert NoiseSpec("Pareto", 1.0).family == "pareto"
        assert NoiseSpec("Fréchet", 2.0).family == "frechet"

    def test_unsupported_family(self):
        with pytest.raises(ValidationError):
            NoiseSpec("gumbel", 1.0)

    def test_bad_alpha(self):
        with pytest.raises(ValidationError):
            NoiseSpec("pareto", -1.0)


class TestSample:
    def test_deterministic_per_seed(self):
        model = single_edge_model(0.5)
        a = sample(model, NoiseSpec("frechet", 1.0), 500, seed=42)
        b = sample(model, NoiseSpec("frechet", 1.0), 500, seed=42)
        np.testing.assert_array_equal(a.values, b.values)
        c = sample(model, NoiseSpec("frechet", 1.0), 500, seed=43)
        assert not np.array_equal(a.values, c.values)

    def test_shape_and_positivity(self):
        model = single_edge_model(0.3)
        block = sample(model, NoiseSpec("pareto", 1.0), 257, seed=1)
        assert block.values.shape == (257, 2)
        assert (block.values > 0).all()

    def test_pareto_noise_has_unit_lower_bound(self):
        dag = Dag(1)
        model = WeightedModel(dag, {}, (1.0,), 2.0)
        block = sample(model, NoiseSpec("pareto", 2.0), 4000, seed=5)
        assert block.values.min() >= 1.0

    def test_alpha_mismatch_rejected(self):
        model = single_edge_model(0.5, alpha=1.0)
        with pytest.raises(ValidationError):
            sample(model, NoiseSpec("frechet", 2.0), 10, seed=0)

    def test_sample_size_validated(self):
        model = single_edge_model(0.5)
        with pytest.raises(ValidationError):
            sample(model, NoiseSpec("frechet", 1.0), 0, seed=0)


class TestEmpiricalTdm:
    def test_independent_components_near_zero(self):
        dag = Dag(2)
        model = WeightedModel(dag, {}, (1.0, 1.0), 1.0)
        block = sample(model, NoiseSpec("frechet", 1.0), 100_000, seed=7)
        chi_hat = empirical_tdm(block, 0.98)
        # 3 binomial standard errors around zero for 2000 exceedances
        assert abs(chi_hat[0, 1]) <= 3 * np.sqrt(0.98 * 0.02 / 2000) + 0.02

    def test_comonotone_components_exactly_one(self):
        x = np.random.default_rng(3).pareto(2.0, size=5000) + 1.0
        model = single_edge_model(0.5)
        block = SampleBlock(np.column_stack([x, x]), 0, model, NoiseSpec("frechet", 1.0))
        chi_hat = empirical_tdm(block, 0.95)
        assert chi_hat[0, 1] == 1.0

    def test_single_edge_model_estimate(self):
        model = single_edge_model(0.5)
        block = sample(model, NoiseSpec("frechet", 1.0), 200_000, seed=11)
        chi_hat = empirical_tdm(block, 0.98)
        assert chi_hat[0, 1] == pytest.approx(0.5, abs=0.05)

    def test_symmetry_and_unit_diagonal(self):
        model = single_edge_model(0.7)
        block = sample(model, NoiseSpec("pareto", 1.0), 20_000, seed=2)
        chi_hat = empirical_tdm(block, 0.97)
        np.testing.assert_array_equal(chi_hat, chi_hat.T)
        np.testing.assert_array_equal(np.diag(chi_hat), [1.0, 1.0])

    def test_tail_floor_enforced(self):
        model = single_edge_model(0.5)
        block = sample(model, NoiseSpec("frechet", 1.0), 1000, seed=0)
        with pytest.raises(TailSampleError):
            empirical_tdm(block, 0.99)

    def test_quantile_level_validated(self):
        model = single_edge_model(0.5)
        block = sample(model, NoiseSpec("frechet", 1.0), 1000, seed=0)
        with pytest.raises(ValidationError):
            empirical_tdm(block, 1.0)


class TestLimitCdf:
    def test_standardized_marginal_is_standard_frechet(self):
        model = model_from_std_mlcm(BBAR_TWO_CLIQUES_MW, 1.0)
        for i in range(1, 5):
            assert limit_cdf(model, 1.0, i=i) == pytest.approx(np.exp(-1.0))
            assert limit_cdf(model, 2.0, i=i) == pytest.approx(np.exp(-0.5))

    def test_bivariate_marginalization_consistency(self):
        model = single_edge_model(0.4, alpha=2.0)
        for xj in (0.5, 1.0, 3.0):
            joint = limit_cdf(model, (np.inf, xj), i=1, j=2)
            assert joint == pytest.approx(limit_cdf(model, xj, i=2), rel=1e-12)

    def test_full_vector_matches_bivariate_for_two_nodes(self):
        model = single_edge_model(0.4)
        point = np.array([1.3, 0.8])
        assert limit_cdf(model, point) == pytest.approx(
            limit_cdf(model, (1.3, 0.8), i=1, j=2), rel=1e-12
        )

    def test_log_identity_reproduces_tail_dependence(self, corpus):
        for entry in corpus[:40]:
            model = entry.model
            points = unit_frechet_points(model)
            d = model.d
            for i in range(1, d + 1):
                for j in range(1, d + 1):
                    value = 2.0 + np.log(
                        limit_cdf(model, (points[i - 1], points[j - 1]), i=i, j=j)
                    )
                    assert value == pytest.approx(entry.chi[i - 1, j - 1], abs=1e-12)

    def test_rejects_nonpositive_points(self):
        model = single_edge_model(0.4)
        with pytest.raises(ValidationError):
            limit_cdf(model, 0.0, i=1)
        with pytest.raises(ValidationError):
            limit_cdf(model, np.array([1.0, -2.0]))

    def test_unit_frechet_points_of_standardized_model(self):
        model = model_from_std_mlcm(BBAR_TWO_CLIQUES_MW, 1.0)
        np.testing.assert_allclose(unit_frechet_points(model), np.ones(4), atol=1e-12)


class TestScaledBlockMaxima:
    def test_deterministic(self):
        model = single_edge_model(0.5)
        noise = NoiseSpec("frechet", 1.0)
        a = scaled_block_maxima(model, noise, 64, 100, seed=9)
        b = scaled_block_maxima(model, noise, 64, 100, seed=9)
        np.testing.assert_array_equal(a, b)
        assert a.shape == (100, 2)

    def test_frechet_maxima_match_the_limit_marginals(self):
        dag = Dag(3, {(1, 2), (2, 3)})
        model = homogeneous_model(dag, 1.0)
        noise = NoiseSpec("frechet", 1.0)
        maxima = scaled_block_maxima(model, noise, 128, 4000, seed=21)
        for i in range(1, 4):
            distance = oracles.kolmogorov_distance(
                maxima[:, i - 1], lambda x: limit_cdf(model, x, i=i)
            )
            assert distance <= 0.03

    def test_alpha_mismatch_rejected(self):
        model = single_edge_model(0.5, alpha=2.0)
        with pytest.raises(ValidationError):
            scaled_block_maxima(model, NoiseSpec("frechet", 1.0), 10, 10, seed=0)


class TestNoiseFamiliesAgree:
    def test_same_tdm_for_pareto_and_frechet(self):
        # same standardized matrix, alpha 2; both estimates near the truth
        bbar = BBAR_TWO_CLIQUES_MW
        chi = tdm_from_std_mlcm(bbar)
        model = model_from_std_mlcm(bbar, 2.0)
        fre = empirical_tdm(sample(model, NoiseSpec("frechet", 2.0), 100_000, 31), 0.98)
        par = empirical_tdm(sample(model, NoiseSpec("pareto", 2.0), 100_000, 32), 0.98)
        assert np.abs(fre - chi).max() <= 0.06
        assert np.abs(par - chi).max() <= 0.06
        assert np.abs(fre - par).max() <= 0.05

    def test_standardization_is_alpha_consistent(self):
        # the pareto-alpha-2 model's coefficient matrix standardizes back
        model = model_from_std_mlcm(BBAR_TWO_CLIQUES_MW, 2.0)
        again = standardize(mlcm_from_weights(model), 2.0)
        np.testing.assert_allclose(again, BBAR_TWO_CLIQUES_MW, atol=1e-12)
