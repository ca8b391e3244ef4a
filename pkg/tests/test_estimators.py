"""Tests of the training-speed estimators and the effective budget."""
import math
import numpy as np
import pytest
from conftest import make_curve
from conftest import random_curve
from framework.core.curves import epoch_sums
from framework.core.estimators import EstimatorKind
from framework.core.estimators import EstimatorSpec
from framework.core.estimators import effective_budget
from framework.core.estimators import overfit_epoch
from framework.core.estimators import pac_bayes_bound
from framework.core.estimators import pac_bayes_score
from framework.core.estimators import parse_estimator_spec
from framework.core.estimators import score
from framework.core.estimators import sovacc
from framework.core.estimators import sovl
from framework.core.estimators import sovl_e
from framework.core.estimators import tlmini_scores
from framework.core.estimators import tse
from framework.core.estimators import tse_e
from framework.core.estimators import tse_ema
from framework.core.estimators import vacc_es
from framework.core.stats import Orientation
from framework.errors import EstimatorUnavailableError
from framework.errors import InvalidInputError


def crossing_curve(t_end, crossing=None, batches=2):
    """A curve whose mean epoch loss drops below 0.1 at epoch `crossing`."""
    losses = np.ones((t_end, batches))
    if crossing is not None:
        losses[crossing - 1:] = 0.05
    return make_curve(losses)


class TestTseFamily:
    """Sums of training losses and their identities."""

    def test_tse_on_a_small_curve(self):
        curve = make_curve([[1.0, 3.0], [2.0, 2.0], [0.5, 0.5]])
        assert tse(curve, 1) == pytest.approx(2.0)
        assert tse(curve, 3) == pytest.approx(4.5)
        assert tse_e(curve, 3, 2) == pytest.approx(2.5)
        assert tse_ema(curve, 2, 0.5) == pytest.approx(0.5 * 2.0 + 2.0)

    def test_identities_on_random_curves(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            curve = random_curve(rng)
            sums = epoch_sums(curve)
            previous = 0.0
            for T in range(1, curve.t_end + 1):
                expected = tse(curve, T)
                assert abs(tse_e(curve, T, T) - expected) <= 1e-12
                assert abs(tse_ema(curve, T, 1.0) - expected) <= 1e-12
                assert abs(expected - previous - sums[T - 1]) <= 1e-12
                for E in range(1, T + 1):
                    prefix = tse(curve, T - E) if E < T else 0.0
                    assert abs(tse_e(curve, T, E) - (expected - prefix)) <= 1e-12
                previous = expected

    def test_scaling_losses_keeps_the_ranking(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            t_end = int(rng.integers(2, 10))
            batches = int(rng.integers(1, 5))
            population = [
                random_curve(rng, t_end=t_end, batches=batches)
                for _ in range(int(rng.integers(2, 12)))
            ]
            scale = float(rng.uniform(0.1, 10.0))
            scaled = [
                make_curve(c.minibatch_train_losses * scale)
                for c in population
            ]
            T = int(rng.integers(1, t_end + 1))
            E = int(rng.integers(1, T + 1))
            gamma = float(rng.uniform(0.5, 1.0))
            for estimator in (lambda c: tse(c, T), lambda c: tse_e(c, T, E),
                              lambda c: tse_ema(c, T, gamma)):
                original = np.array([estimator(c) for c in population])
                rescaled = np.array([estimator(c) for c in scaled])
                np.testing.assert_array_equal(
                    np.argsort(original, kind='stable'),
                    np.argsort(rescaled, kind='stable'))
                np.testing.assert_allclose(rescaled, scale * original,
                                           rtol=1e-12)

    def test_documented_examples(self):
        curve = make_curve([[1.0, 0.8], [0.6, 0.4]])
        assert tse(curve, 2) == pytest.approx(1.4, abs=1e-12)
        assert tse_e(curve, 2, 1) == pytest.approx(0.5, abs=1e-12)
        assert tse_ema(curve, 2, 0.9) == pytest.approx(1.31, abs=1e-12)

    def test_vanishing_gamma_keeps_the_last_epoch(self):
        curve = random_curve(np.random.default_rng(42), t_end=8, batches=3)
        assert abs(tse_ema(curve, 5, 1e-12) - epoch_sums(curve)[4]) <= 1e-9

    def test_window_is_a_difference_of_prefixes(self):
        curve = random_curve(np.random.default_rng(7), t_end=10, batches=4)
        window = tse_e(curve, 7, 3)
        assert abs(window - (tse(curve, 7) - tse(curve, 4))) <= 1e-12

    def test_ema_weights_recent_epochs_most(self):
        curve = make_curve([[1.0], [0.0]])
        assert tse_ema(curve, 2, 0.5) == pytest.approx(0.5)

    @pytest.mark.parametrize('gamma', [0.0, 1.5])
    def test_invalid_gamma(self, gamma):
        with pytest.raises(InvalidInputError):
            tse_ema(make_curve([[1.0]]), 1, gamma)

    @pytest.mark.parametrize('E', [0, 3])
    def test_invalid_window(self, E):
        with pytest.raises(InvalidInputError):
            tse_e(make_curve([[1.0], [1.0]]), 2, E)

    def test_budget_out_of_range(self):
        with pytest.raises(InvalidInputError):
            tse(make_curve([[1.0]]), 2)


class TestValidationEstimators:
    """Estimators reading validation losses and accuracies."""

    curve = make_curve([[1.0], [1.0], [1.0]],
                       val_acc=[0.2, 0.5, 0.6],
                       val_loss=[1.5, 1.0, 0.5])

    def test_values(self):
        assert sovl(self.curve, 2) == pytest.approx(2.5)
        assert sovl_e(self.curve, 3, 2) == pytest.approx(1.5)
        assert sovacc(self.curve, 3) == pytest.approx(1.3)
        assert vacc_es(self.curve, 2) == pytest.approx(0.5)

    def test_missing_fields_make_estimators_unavailable(self):
        curve = make_curve([[1.0]])
        for estimator in (sovl, sovacc, vacc_es):
            with pytest.raises(EstimatorUnavailableError):
                estimator(curve, 1)

    def test_tlmini_returns_one_epoch(self):
        curve = make_curve([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(tlmini_scores(curve, 2), [3.0, 4.0])


class TestPacBayes:
    """The PAC-Bayes bound estimate."""

    def test_zero_loss_gives_lower_bound(self):
        assert pac_bayes_bound(0.0, 10, 0.0, 1.0, 1.0) == pytest.approx(0.0)

    def test_half_way_point(self):
        n = 8
        c = 1.0 / (1.0 - math.exp(-1.0))
        assert pac_bayes_bound(n * math.log(2.0), n, 0.0, 1.0,
                               1.0) == pytest.approx(c / 2.0)

    def test_monotone_in_loss_and_bounded(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            a = float(rng.uniform(0.0, 1.0))
            b = a + float(rng.uniform(0.1, 3.0))
            delta = float(rng.uniform(0.01, 1.0))
            n = int(rng.integers(1, 50))
            c = (b - a) / (1.0 - math.exp(a - b))
            sums = np.linspace(n * a, n * a + 5 * n, 20)
            values = [pac_bayes_bound(s, n, a, b, delta) for s in sums]
            assert all(x < y for x, y in zip(values, values[1:])), (a, b,
                                                                    delta, n)
            assert all(a <= v <= a + c for v in values)

    def test_score_uses_every_minibatch(self):
        curve = make_curve([[0.1, 0.2], [0.3, 0.4], [9.0, 9.0]])
        assert pac_bayes_score(curve, 2, 0.0, 1.0,
                               0.5) == pytest.approx(
                                   pac_bayes_bound(1.0, 4, 0.0, 1.0, 0.5))

    @pytest.mark.parametrize('sum_nll, n, a, b, delta',
                             [(1.0, 0, 0.0, 1.0, 0.1),
                              (1.0, 5, 1.0, 1.0, 0.1),
                              (1.0, 5, 0.0, 1.0, 0.0),
                              (-1.0, 5, 0.0, 1.0, 0.1),
                              (math.inf, 5, 0.0, 1.0, 0.1)])
    def test_invalid_arguments(self, sum_nll, n, a, b, delta):
        with pytest.raises(InvalidInputError):
            pac_bayes_bound(sum_nll, n, a, b, delta)


class TestEffectiveBudget:
    """Overfitting epochs and the 90% rule."""

    def test_overfit_epoch(self):
        assert overfit_epoch(crossing_curve(10, 4), 0.1) == 4
        assert overfit_epoch(crossing_curve(10), 0.1) == 10

    def test_earliest_crossing_wins(self):
        curves = [crossing_curve(200, c) for c in (50, 80, 120)]
        assert effective_budget(curves, threshold=0.1) == 45

    def test_no_crossing_uses_t_end(self):
        curves = [crossing_curve(200), crossing_curve(200)]
        assert effective_budget(curves) == 180
        assert effective_budget([crossing_curve(15)]) == 13

    def test_clamped_to_one_epoch(self):
        assert effective_budget([crossing_curve(10, 1)]) == 1

    def test_invalid_inputs(self):
        with pytest.raises(InvalidInputError):
            effective_budget([])
        with pytest.raises(InvalidInputError):
            effective_budget([crossing_curve(10)], threshold=0.0)
        with pytest.raises(InvalidInputError):
            effective_budget([crossing_curve(10), crossing_curve(12)])


class TestEstimatorSpec:
    """Parsing, labels and dispatch of estimator specs."""

    def test_parse_with_parameters(self):
        spec = parse_estimator_spec('tse-ema@T=10,g=0.5')
        assert spec.kind is EstimatorKind.TSE_EMA
        assert spec.T == 10
        assert spec.gamma == 0.5
        assert spec.label == 'tse-ema@T=10,g=0.5'
        assert spec.family_label == 'tse-ema@g=0.5'

    def test_labels_parse_back(self):
        for text in ('tse', 'tse-e@T=5,E=2', 'pacbayes@T=3,a=0,b=2,d=0.05',
                     'vacc-es@T=4', 'tlmini@T=1'):
            spec = parse_estimator_spec(text)
            assert parse_estimator_spec(spec.label) == spec

    def test_defaults_fill_unset_parameters(self):
        spec = parse_estimator_spec('tse-ema', {'gamma': 0.9})
        assert spec.gamma == 0.9
        assert spec.T is None
        spec = parse_estimator_spec('tse-ema@g=0.5', {'gamma': 0.9})
        assert spec.gamma == 0.5

    def test_default_hyperparameters(self):
        spec = EstimatorSpec(EstimatorKind.TSE_E)
        assert spec.E == 1
        assert spec.gamma == 0.999

    def test_orientation(self):
        assert parse_estimator_spec(
            'vacc-es').orientation is Orientation.HIGHER_IS_BETTER
        assert parse_estimator_spec(
            'sovacc').orientation is Orientation.HIGHER_IS_BETTER
        assert parse_estimator_spec(
            'tse').orientation is Orientation.LOWER_IS_BETTER

    @pytest.mark.parametrize('text', [
        'unknown', 'tse@T=0', 'tse@Q=3', 'tse@T=x', 'tse-e@T=2,E=3',
        'tse-ema@g=1.5', 'pacbayes@a=2,b=1'
    ])
    def test_invalid_specs(self, text):
        with pytest.raises(InvalidInputError):
            parse_estimator_spec(text)

    def test_score_dispatch(self):
        curve = make_curve([[1.0, 3.0], [2.0, 2.0]], val_acc=[0.3, 0.4])
        assert score(parse_estimator_spec('tse@T=2'), curve) == 4.0
        assert score(parse_estimator_spec('vacc-es@T=1'), curve) == 0.3
        np.testing.assert_array_equal(
            score(parse_estimator_spec('tlmini@T=1'), curve), [1.0, 3.0])
        with pytest.raises(InvalidInputError):
            score(parse_estimator_spec('tse'), curve)
