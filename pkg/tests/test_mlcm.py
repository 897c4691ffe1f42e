import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from cases import (
    BBAR_DENSE4_DIRECT,
    BBAR_DENSE4_THROUGH,
    BBAR_TRIANGLE_INVALID,
    BBAR_TRIANGLE_VALID,
    DENSE4_EDGES,
)
from maxlindag import (
    Dag,
    ValidationError,
    WeightedModel,
    destandardize,
    homogeneous_model,
    is_mlcm,
    is_rmwm_mlcm,
    max_weighted_triple,
    minimum_ml_dag,
    mlcm_from_weights,
    model_from_std_mlcm,
    random_weighted_model,
    sign_pattern,
    standardize,
    tdm_from_std_mlcm,
    transitive_reduction,
)


class TestWeightedModelValidation:
    def test_weight_keys_must_match_edges(self):
        dag = Dag(2, {(1, 2)})
        with pytest.raises(ValidationError):
            WeightedModel(dag, {}, (1.0, 1.0), 1.0)

    def test_weights_must_be_positive(self):
        dag = Dag(2, {(1, 2)})
        with pytest.raises(ValidationError):
            WeightedModel(dag, {(1, 2): 0.0}, (1.0, 1.0), 1.0)
        with pytest.raises(ValidationError):
            WeightedModel(dag, {(1, 2): 1.0}, (1.0, -1.0), 1.0)

    def test_alpha_must_be_finite_positive(self):
        dag = Dag(1)
        with pytest.raises(ValidationError):
            WeightedModel(dag, {}, (1.0,), 0.0)
        with pytest.raises(ValidationError):
            WeightedModel(dag, {}, (1.0,), float("inf"))


class TestMlcmFromWeights:
    def test_single_edge_single_path(self):
        model = WeightedModel(Dag(2, {(1, 2)}), {(1, 2): 0.5}, (1.0, 1.0), 1.0)
        assert mlcm_from_weights(model).tolist() == [[1.0, 0.5], [0.0, 1.0]]

    def test_diamond_takes_the_heavier_route(self):
        dag = Dag(4, {(1, 2), (1, 3), (2, 4), (3, 4)})
        weights = {(1, 2): 1.0, (1, 3): 1.0, (2, 4): 2.0, (3, 4): 3.0}
        model = WeightedModel(dag, weights, (1.0, 1.0, 1.0, 1.0), 1.0)
        b = mlcm_from_weights(model)
        assert b[0, 3] == 3.0  # max(1*2, 1*3)

    def test_homogeneous_closed_form(self):
        dag = Dag(4, DENSE4_EDGES)
        alpha = 2.0
        b = mlcm_from_weights(homogeneous_model(dag, alpha))
        for i in range(1, 5):
            size = len(dag.ancestors_closed(i))
            for j in dag.ancestors_closed(i):
                assert b[j - 1, i - 1] == pytest.approx(size ** (-1 / alpha), rel=1e-12)

    def test_matches_path_enumeration_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            d = int(rng.integers(1, 7))
            model = random_weighted_model(d, float(rng.uniform(0, 1)), (0.3, 3.0), 1.0, rng)
            expected = oracles.mlcm(
                d,
                set(model.dag.edges),
                dict(model.edge_weights),
                {i: model.noise_scales[i - 1] for i in range(1, d + 1)},
            )
            np.testing.assert_allclose(mlcm_from_weights(model), expected, rtol=1e-12)


class TestStandardize:
    def test_two_node_example(self):
        out = standardize(np.array([[1.0, 0.5], [0.0, 1.0]]), 1.0)
        np.testing.assert_allclose(out, [[1.0, 1 / 3], [0.0, 2 / 3]])

    def test_normalized_matrix_is_a_fixed_point(self):
        bbar = np.array([[1.0, 0.25], [0.0, 0.75]])
        np.testing.assert_allclose(standardize(bbar, 1.0), bbar)

    def test_alpha_two_squares_then_normalizes(self):
        out = standardize(np.array([[1.0, 1.0], [0.0, 1.0]]), 2.0)
        np.testing.assert_allclose(out, [[1.0, 0.5], [0.0, 0.5]])

    def test_columns_sum_to_one(self, corpus):
        for entry in corpus[:120]:
            np.testing.assert_allclose(entry.bbar.sum(axis=0), 1.0, atol=1e-12)

    def test_sign_pattern_preserved(self, corpus):
        for entry in corpus[:120]:
            b = mlcm_from_weights(entry.model)
            assert np.array_equal(sign_pattern(b), sign_pattern(entry.bbar))
            assert np.array_equal(sign_pattern(b), entry.reach)

    def test_strict_row_dominance(self, corpus):
        for entry in corpus[:120]:
            bbar = entry.bbar
            d = bbar.shape[0]
            for j in range(d):
                for i in range(d):
                    if i != j:
                        assert bbar[j, j] > bbar[j, i]

    def test_rejects_negative_entries(self):
        with pytest.raises(ValidationError):
            standardize(np.array([[1.0, -0.1], [0.0, 1.0]]), 1.0)


class TestDestandardize:
    def test_unit_scalings_alpha_one_is_identity(self):
        bbar = np.array([[1.0, 1 / 3], [0.0, 2 / 3]])
        np.testing.assert_allclose(destandardize(bbar, 1.0, 1.0), bbar)

    def test_componentwise_example(self):
        bbar = np.array([[1.0, 1 / 3], [0.0, 2 / 3]])
        out = destandardize(bbar, (1.0, 3.0), 1.0)
        np.testing.assert_allclose(out, [[1.0, 1.0], [0.0, 2.0]])

    def test_nonpositive_scaling_rejected(self):
        with pytest.raises(ValidationError):
            destandardize(np.eye(2), (1.0, 0.0), 1.0)

    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(0, 10_000),
        st.floats(0.2, 4.0),
        st.lists(st.floats(0.1, 10.0), min_size=5, max_size=5),
    )
    def test_round_trip_property(self, seed, alpha_tilde, betas):
        model = random_weighted_model(5, 0.6, (0.5, 2.0), 1.0, seed)
        bbar = standardize(mlcm_from_weights(model), 1.0)
        rebuilt = standardize(destandardize(bbar, betas, alpha_tilde), alpha_tilde)
        np.testing.assert_allclose(rebuilt, bbar, atol=1e-9)


class TestMaxWeightedTriple:
    def test_route_through_middle_is_max_weighted(self):
        verdict = max_weighted_triple(BBAR_DENSE4_THROUGH, 2, 3, 4)
        assert verdict.ok and verdict.residual <= 1e-9

    def test_direct_edge_dominates(self):
        verdict = max_weighted_triple(BBAR_DENSE4_DIRECT, 2, 3, 4)
        assert not verdict.ok
        # 0.8 * 0.04 / 0.1 = 0.32 against 0.5
        assert verdict.residual == pytest.approx((0.5 - 0.32) / 0.5)

    def test_homogeneous_triples_always_max_weighted(self):
        dag = Dag(4, DENSE4_EDGES)
        bbar = standardize(mlcm_from_weights(homogeneous_model(dag, 1.0)), 1.0)
        for j, k, i in [(1, 3, 4), (2, 3, 4)]:
            assert max_weighted_triple(bbar, j, k, i).ok

    def test_product_never_exceeds_direct_coefficient(self, corpus):
        for entry in corpus[:150]:
            bbar = entry.bbar
            d = bbar.shape[0]
            for i in range(1, d + 1):
                for k in entry.dag.ancestors(i):
                    for j in entry.dag.ancestors(k):
                        bound = bbar[j - 1, k - 1] * bbar[k - 1, i - 1] / bbar[k - 1, k - 1]
                        assert bbar[j - 1, i - 1] >= bound - 1e-12

    def test_chain_precondition_enforced(self):
        with pytest.raises(ValidationError):
            max_weighted_triple(BBAR_DENSE4_THROUGH, 3, 2, 4)


class TestIsRmwmMlcm:
    def test_two_cliques_matrices(self):
        from cases import BBAR_TWO_CLIQUES_GENERAL, BBAR_TWO_CLIQUES_MW

        assert is_rmwm_mlcm(BBAR_TWO_CLIQUES_MW).ok
        verdict = is_rmwm_mlcm(BBAR_TWO_CLIQUES_GENERAL)
        assert not verdict.ok
        # triple (4,2,3): 0.5*0.1/0.5 = 0.1 against 0.5
        assert verdict.residual == pytest.approx((0.5 - 0.1) / 0.5)

    def test_identity_has_no_paths(self):
        assert is_rmwm_mlcm(np.eye(3)).ok

    def test_polytree_and_homogeneous_models_are_max_weighted(self, rmwm_corpus):
        for entry in rmwm_corpus[:160]:
            assert is_rmwm_mlcm(entry.bbar).ok

    def test_invalid_pattern_is_a_precondition_error(self):
        bad = np.array([[1.0, 0.5, 0.2], [0.0, 1.0, 0.0], [0.0, 0.5, 1.0]])
        # 3 reaches 2 and 1 reaches 2, but 1 does not reach ... pattern not closed
        bad_pattern = np.array([[1.0, 0.5, 0.0], [0.0, 1.0, 0.5], [0.0, 0.0, 1.0]])
        assert is_rmwm_mlcm(bad).ok in (True, False)  # closed pattern, no error
        with pytest.raises(ValidationError):
            is_rmwm_mlcm(bad_pattern)


class TestMinimumMlDag:
    def test_two_cliques_mw_dag(self):
        from cases import BBAR_TWO_CLIQUES_MW

        assert minimum_ml_dag(BBAR_TWO_CLIQUES_MW).edges == frozenset(
            {(1, 3), (2, 3), (2, 4)}
        )

    def test_homogeneous_redundant_edge_dropped(self):
        dag = Dag(3, {(1, 2), (2, 3), (1, 3)})
        bbar = standardize(mlcm_from_weights(homogeneous_model(dag, 1.0)), 1.0)
        assert minimum_ml_dag(bbar).edges == frozenset({(1, 2), (2, 3)})

    def test_dominating_direct_edge_kept(self):
        # 0.5 > 0.8 * 0.04 / 0.1 = 0.32, so 2->4 must stay
        assert (2, 4) in minimum_ml_dag(BBAR_DENSE4_DIRECT).edges

    def test_equals_transitive_reduction_for_max_weighted_models(self, rmwm_corpus):
        for entry in rmwm_corpus[:120]:
            assert minimum_ml_dag(entry.bbar) == transitive_reduction(entry.dag)

    def test_same_for_raw_and_standardized_matrix(self, corpus):
        for entry in corpus[:120]:
            raw = mlcm_from_weights(entry.model)
            assert minimum_ml_dag(raw) == minimum_ml_dag(entry.bbar)


class TestIsMlcm:
    def test_triangle_valid_matrix_accepted(self):
        assert is_mlcm(BBAR_TRIANGLE_VALID).ok

    def test_triangle_invalid_matrix_rejected_by_recomposition(self):
        verdict = is_mlcm(BBAR_TRIANGLE_INVALID)
        assert not verdict.ok
        assert verdict.reason == "recomposition"

    def test_bad_sign_pattern_reason(self):
        not_closed = np.array([[1.0, 0.5, 0.0], [0.0, 1.0, 0.5], [0.0, 0.0, 1.0]])
        verdict = is_mlcm(not_closed)
        assert not verdict.ok and verdict.reason == "sign_pattern"
        verdict = is_mlcm(np.array([[1.0, -0.1], [0.0, 1.0]]))
        assert not verdict.ok and verdict.reason == "sign_pattern"

    def test_every_standardized_model_matrix_accepted(self, corpus):
        for entry in corpus[:250]:
            assert is_mlcm(entry.bbar).ok

    def test_agrees_with_reconstruction_oracle(self, corpus):
        rng = np.random.default_rng(91)
        checked = 0
        for entry in corpus:
            if entry.bbar.shape[0] > 4:
                continue
            candidates = [entry.bbar]
            # systematic single-entry perturbations, valid and broken alike
            bbar = entry.bbar.copy()
            d = bbar.shape[0]
            for _ in range(4):
                i, j = int(rng.integers(0, d)), int(rng.integers(0, d))
                mutated = bbar.copy()
                mutated[i, j] = max(mutated[i, j] + float(rng.uniform(-0.2, 0.2)), 0.0)
                candidates.append(mutated)
            for candidate in candidates:
                ours = bool(is_mlcm(candidate))
                assert ours == oracles.is_mlcm_by_reconstruction(candidate)
                checked += 1
            if checked > 300:
                break
        assert checked > 100

    def test_non_square_raises(self):
        with pytest.raises(ValidationError):
            is_mlcm(np.ones((2, 3)))


class TestHomogeneousModel:
    def test_chain_column_is_uniform(self):
        dag = Dag(3, {(1, 2), (2, 3)})
        bbar = standardize(mlcm_from_weights(homogeneous_model(dag, 1.0)), 1.0)
        np.testing.assert_allclose(bbar[:, 2], [1 / 3, 1 / 3, 1 / 3])

    def test_single_node(self):
        model = homogeneous_model(Dag(1), 1.7)
        assert model.noise_scales == (1.0,)

    def test_tdm_is_ancestor_overlap_ratio(self):
        dag = Dag(4, DENSE4_EDGES)
        model = homogeneous_model(dag, 2.0)
        chi = tdm_from_std_mlcm(standardize(mlcm_from_weights(model), 2.0))
        for i in range(1, 5):
            for j in range(1, 5):
                an_i = dag.ancestors_closed(i)
                an_j = dag.ancestors_closed(j)
                expected = len(an_i & an_j) / max(len(an_i), len(an_j))
                assert chi[i - 1, j - 1] == pytest.approx(expected, abs=1e-12)


class TestModelFromStdMlcm:
    def test_round_trip(self, corpus):
        for entry in corpus[:60]:
            rebuilt = model_from_std_mlcm(entry.bbar, entry.alpha)
            again = standardize(mlcm_from_weights(rebuilt), entry.alpha)
            np.testing.assert_allclose(again, entry.bbar, atol=1e-9)

    def test_rejects_invalid_matrix(self):
        with pytest.raises(ValidationError):
            model_from_std_mlcm(BBAR_TRIANGLE_INVALID, 1.0)
