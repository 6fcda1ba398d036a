import numpy as np
import pytest

from credal_aode.credal import (
    BMA_STAR,
    COMP_STAR,
    CredalPrediction,
    CredalSpec,
    bma_dominates,
    comp_dominates,
    comp_upper_pi,
    nondominated,
    predict_credal,
)
from credal_aode.ensemble import (
    EnsembleScores,
    fit_ensemble,
    model_posteriors,
    raw_compression,
)

from conftest import toy_dataset
from grids import bma_grid_nondominated, comp_grid_nondominated


def make_scores(rng, k, n=60, n_classes=2, spread=8.0):
    """Scores with SPODE likelihoods comfortably above the null baseline."""
    entropy = np.log(n_classes) * float(rng.uniform(0.6, 1.0))
    ll0 = -n * entropy - float(rng.uniform(0.0, 0.5))
    lls = ll0 + rng.uniform(2.0, 2.0 + spread, size=k)
    return EnsembleScores(
        log_likelihoods=lls,
        null_log_likelihood=ll0,
        class_entropy=entropy,
        n_train=n,
    )


def random_posteriors(rng, k, n_classes):
    return rng.dirichlet(np.ones(n_classes) * 1.5, size=k)


class TestCredalSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            CredalSpec(k=3, epsilon=0.0)
        with pytest.raises(ValueError):
            CredalSpec(k=200, epsilon=0.01)
        with pytest.raises(ValueError):
            CredalSpec(k=3, epsilon=0.3, includes_null=True)
        CredalSpec(k=3, epsilon=0.3)  # fine without the null model
        CredalSpec(k=99, epsilon=0.01, includes_null=True)  # boundary allowed


class TestNondominated:
    def test_vacuous_predicate_keeps_all(self):
        assert nondominated(range(4), lambda a, b: False) == [0, 1, 2, 3]

    def test_total_order_leaves_top(self):
        assert nondominated(range(3), lambda a, b: a < b) == [0]

    def test_random_transitive_relations_match_comprehension(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(2, 6))
            score = rng.normal(size=n)
            tau = float(rng.uniform(0.0, 1.5))

            def dom(a, b):
                return score[a] > score[b] + tau

            want = sorted(
                c for c in range(n)
                if not any(dom(o, c) for o in range(n) if o != c)
            )
            assert nondominated(range(n), dom) == want


class TestBmaDominates:
    def test_single_model_reduces_to_comparison(self):
        scores = make_scores(np.random.default_rng(1), k=1)
        spec = CredalSpec(k=1)
        post = np.array([[0.7, 0.3]])
        assert bma_dominates(0, 1, None, scores, spec, posteriors=post)
        assert not bma_dominates(1, 0, None, scores, spec, posteriors=post)

    def test_identical_posteriors_no_dominance(self):
        rng = np.random.default_rng(2)
        scores = make_scores(rng, k=3)
        spec = CredalSpec(k=3)
        p = rng.dirichlet(np.ones(3), size=3)
        post = np.stack([p[:, 0], p[:, 0], p[:, 2]], axis=1)  # c0 == c1 columns
        assert not bma_dominates(0, 1, None, scores, spec, posteriors=post)
        assert not bma_dominates(1, 0, None, scores, spec, posteriors=post)

    def test_matches_grid_enumeration(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            k = int(rng.integers(1, 4))
            n_classes = int(rng.integers(2, 5))
            scores = make_scores(rng, k, n_classes=n_classes)
            spec = CredalSpec(k=k)
            post = random_posteriors(rng, k, n_classes)
            want = bma_grid_nondominated(post, scores.log_likelihoods, spec.epsilon)
            pred = predict_credal(BMA_STAR, None, scores, spec, posteriors=post)
            assert list(pred.classes) == want

    def test_coarse_grid_agreement_at_k4(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            scores = make_scores(rng, 4, n_classes=3)
            spec = CredalSpec(k=4)
            post = random_posteriors(rng, 4, 3)
            pred = predict_credal(BMA_STAR, None, scores, spec, posteriors=post)
            # 4-variable lattice is too big at 1e-3; sanity-check coarsely
            grid = bma_grid_like_k4(post, scores.log_likelihoods, spec.epsilon)
            assert set(grid) <= set(pred.classes)


def bma_grid_like_k4(posteriors, lls, epsilon, step=0.02):
    lik = np.exp(lls - lls.max())
    axis = np.arange(epsilon, 1.0, step)
    pts = []
    for a in axis:
        for b in axis:
            for c in axis:
                d = 1.0 - a - b - c
                if d >= epsilon - 1e-12:
                    pts.append((a, b, c, d))
    grid = np.asarray(pts)
    masses = grid @ (posteriors * lik[:, None])
    n_classes = posteriors.shape[1]
    nd = set(range(n_classes))
    for c1 in range(n_classes):
        for c2 in range(n_classes):
            if c1 != c2 and float(np.min(masses[:, c1] - masses[:, c2])) > 0.0:
                nd.discard(c2)
    return sorted(nd)


class TestCompUpperPi:
    def test_point_estimate_inside_interval(self):
        rng = np.random.default_rng(5)
        scores = make_scores(rng, k=4)
        spec = CredalSpec(k=4, includes_null=True)
        lower, upper = comp_upper_pi(scores, spec)
        point = raw_compression(scores, spec.epsilon)
        assert np.all(point >= lower - 1e-12)
        assert np.all(point <= upper + 1e-12)

    def test_perfect_predictor_upper_bound(self):
        scores = EnsembleScores(
            log_likelihoods=np.zeros(5),
            null_log_likelihood=-100 * np.log(2.0),
            class_entropy=np.log(2.0),
            n_train=100,
        )
        spec = CredalSpec(k=5, includes_null=True)
        _, upper = comp_upper_pi(scores, spec)
        expected = 1.0 - np.log(1.0 - 5 * 0.01) / (-100 * np.log(2.0) + np.log(0.01))
        assert upper[0] == pytest.approx(expected, abs=1e-12)
        assert upper[0] == pytest.approx(0.99931, abs=5e-6)

    def test_lower_below_upper(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            k = int(rng.integers(1, 8))
            scores = make_scores(rng, k)
            spec = CredalSpec(k=k, includes_null=True)
            lower, upper = comp_upper_pi(scores, spec)
            assert np.all(lower <= upper + 1e-15)


class TestCompDominates:
    def test_identical_columns_no_dominance(self):
        rng = np.random.default_rng(7)
        scores = make_scores(rng, k=3)
        spec = CredalSpec(k=3, includes_null=True)
        p = rng.dirichlet(np.ones(2), size=3)
        post = np.stack([p[:, 0], p[:, 0]], axis=1)
        assert not comp_dominates(0, 1, None, scores, spec, posteriors=post)
        assert not comp_dominates(1, 0, None, scores, spec, posteriors=post)

    def test_single_feasible_model_fixed_numbers(self):
        rng = np.random.default_rng(8)
        scores = make_scores(rng, k=1)
        spec = CredalSpec(k=1, includes_null=True)
        post = np.array([[0.8, 0.2]])
        assert comp_dominates(0, 1, None, scores, spec, posteriors=post)
        assert not comp_dominates(1, 0, None, scores, spec, posteriors=post)

    def test_matches_grid_enumeration(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            k = int(rng.integers(1, 4))
            n_classes = int(rng.integers(2, 5))
            scores = make_scores(rng, k, n_classes=n_classes)
            spec = CredalSpec(k=k, includes_null=True)
            post = random_posteriors(rng, k, n_classes)
            want = comp_grid_nondominated(
                post, scores.log_likelihoods, scores.null_log_likelihood,
                scores.n_train, scores.class_entropy, spec.epsilon)
            pred = predict_credal(COMP_STAR, None, scores, spec, posteriors=post)
            assert list(pred.classes) == want


class TestPredictCredal:
    def test_crossing_mixtures_return_both_classes(self):
        scores = EnsembleScores(
            log_likelihoods=np.array([-20.0, -20.0]),
            null_log_likelihood=-25.0,
            class_entropy=np.log(2.0),
            n_train=40,
        )
        post = np.array([[0.8, 0.2], [0.3, 0.7]])
        pred = predict_credal(BMA_STAR, None, scores, CredalSpec(k=2),
                              posteriors=post)
        assert pred.classes == (0, 1)
        assert pred.prior_dependent

    def test_stable_argmax_gives_singleton(self):
        scores = EnsembleScores(
            log_likelihoods=np.array([-20.0, -21.0]),
            null_log_likelihood=-25.0,
            class_entropy=np.log(2.0),
            n_train=40,
        )
        post = np.array([[0.9, 0.1], [0.8, 0.2]])
        spec = CredalSpec(k=2)
        # grid-stability oracle: the argmax never changes over the prior grid
        assert bma_grid_nondominated(post, scores.log_likelihoods, 0.01) == [0]
        pred = predict_credal(BMA_STAR, None, scores, spec, posteriors=post)
        assert pred.classes == (0,)
        assert not pred.prior_dependent
        assert int(np.argmax(pred.posterior)) == 0

    def test_containment_on_fitted_models(self):
        rng = np.random.default_rng(10)
        ds = toy_dataset(rng, n=50, cards=(2, 3, 2), n_classes=3)
        models, null, scores = fit_ensemble(ds)
        post_all = model_posteriors(models, ds.X[:12])
        for variant, spec in ((BMA_STAR, CredalSpec(k=3)),
                              (COMP_STAR, CredalSpec(k=3, includes_null=True))):
            for i in range(12):
                pred = predict_credal(variant, models, scores, spec,
                                      posteriors=post_all[:, i, :],
                                      null_model=null)
                assert int(np.argmax(pred.posterior)) in pred.classes
                if len(pred.classes) == 1:
                    assert pred.classes[0] == int(np.argmax(pred.posterior))

    def test_epsilon_monotonicity(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            k, n_classes = 3, 3
            scores = make_scores(rng, k, n_classes=n_classes)
            post = random_posteriors(rng, k, n_classes)
            small = predict_credal(BMA_STAR, None, scores,
                                   CredalSpec(k=k, epsilon=0.01),
                                   posteriors=post)
            large = predict_credal(BMA_STAR, None, scores,
                                   CredalSpec(k=k, epsilon=0.05),
                                   posteriors=post)
            assert set(large.classes) <= set(small.classes)

    def test_dominance_is_strict_partial_order(self):
        rng = np.random.default_rng(12)
        scores = make_scores(rng, k=3, n_classes=4)
        spec = CredalSpec(k=3)
        post = random_posteriors(rng, 3, 4)

        def dom(a, b):
            return bma_dominates(a, b, None, scores, spec, posteriors=post)

        for a in range(4):
            assert not dom(a, a)
            for b in range(4):
                if a != b and dom(a, b):
                    assert not dom(b, a)
                    for c in range(4):
                        if c not in (a, b) and dom(b, c):
                            assert dom(a, c)

    def test_empty_prediction_rejected(self):
        with pytest.raises(ValueError):
            CredalPrediction(classes=(), posterior=np.array([1.0]),
                             prior_dependent=False)
