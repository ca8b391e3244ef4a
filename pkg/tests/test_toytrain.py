"""Tests of the synthetic data, the toy networks and the SGD trainer."""
import numpy as np
import pytest
from conftest import numerical_gradient
from framework.core.estimators import tse
from framework.core.toytrain.benchmark import build_toy_benchmark
from framework.core.toytrain.data import make_synthetic_dataset
from framework.core.toytrain.network import Mlp
from framework.core.toytrain.network import ToyArchSpec
from framework.core.toytrain.network import enumerate_toy_space
from framework.core.toytrain.network import softmax_cross_entropy
from framework.core.toytrain.trainer import SgdTrainer
from framework.core.toytrain.trainer import build_model
from framework.core.toytrain.trainer import train
from framework.errors import InvalidInputError
from framework.utils.seedutils import derive_rng
from framework.utils.seedutils import derive_seed


class TestSeedStreams:
    """Named random streams."""

    def test_streams_are_reproducible_and_independent(self):
        first = derive_rng(3, 'shuffle', 1).random(5)
        np.testing.assert_array_equal(first,
                                      derive_rng(3, 'shuffle', 1).random(5))
        assert not np.array_equal(first, derive_rng(3, 'shuffle', 2).random(5))
        assert not np.array_equal(first, derive_rng(3, 'init', 1).random(5))

    def test_derived_seeds(self):
        seed = derive_seed(0, 'rs', 4)
        assert seed == derive_seed(0, 'rs', 4)
        assert 0 <= seed < 2**31
        assert seed != derive_seed(0, 'rs', 5)


class TestSyntheticDataset:
    """Gaussian-cluster classification data."""

    def test_same_seed_gives_identical_data(self):
        args = dict(dim=3, classes=2, n_train=20, n_val=10, n_test=10,
                    difficulty=0.5)
        first = make_synthetic_dataset(seed=1, **args)
        assert first.same_as(make_synthetic_dataset(seed=1, **args))
        assert not first.same_as(make_synthetic_dataset(seed=2, **args))

    def test_splits_are_disjoint(self, small_dataset):
        indices = np.concatenate([
            small_dataset.train_index, small_dataset.val_index,
            small_dataset.test_index
        ])
        assert len(set(indices.tolist())) == 96 + 48 + 48
        assert small_dataset.x_train.shape == (96, 4)
        assert set(small_dataset.y_train.tolist()) <= {0, 1, 2}

    @pytest.mark.parametrize('overrides', [{
        'classes': 1
    }, {
        'difficulty': 0.0
    }, {
        'n_train': 0
    }])
    def test_invalid_arguments(self, overrides):
        args = dict(dim=3, classes=2, n_train=20, n_val=10, n_test=10,
                    difficulty=0.5, seed=0)
        args.update(overrides)
        with pytest.raises(InvalidInputError):
            make_synthetic_dataset(**args)


class TestToySpace:
    """Enumeration of the toy architectures."""

    def test_enumeration_order_and_encoding(self):
        space = enumerate_toy_space([8, 4], [1, 2], ['tanh', 'relu'])
        assert len(space) == (2 + 4) * 2
        assert space[0].arch_id == 'relu-4'
        assert space[0].encoding == (0, 0)
        assert space[-1].arch_id == 'tanh-8x8'
        assert space[-1].encoding == (1, 1, 1)

    @pytest.mark.parametrize('widths, activation', [((), 'relu'),
                                                    ((1, 2, 3, 4, 5), 'relu'),
                                                    ((0, ), 'relu'),
                                                    ((4, ), 'sigmoid')])
    def test_invalid_architectures(self, widths, activation):
        with pytest.raises(InvalidInputError):
            ToyArchSpec(widths, activation)


class TestMlp:
    """Forward pass and backpropagation of the toy network."""

    @pytest.mark.parametrize('activation', ['relu', 'tanh'])
    def test_gradients_match_finite_differences(self, activation):
        rng = np.random.default_rng(42)
        arch = ToyArchSpec((5, 3), activation)
        model = Mlp(arch, 4, 3, rng)
        x = rng.normal(size=(6, 4))
        y = rng.integers(0, 3, size=6)
        _, gradients = model.loss_and_gradients(x, y)
        for parameter, gradient in zip(model.parameters, gradients):
            expected = numerical_gradient(lambda: model.loss(x, y), parameter)
            np.testing.assert_allclose(gradient, expected, atol=1e-4)

    def test_cross_entropy_of_uniform_logits(self):
        loss, d_logits = softmax_cross_entropy(np.zeros((2, 4)),
                                               np.array([0, 3]))
        assert loss == pytest.approx(np.log(4.0))
        np.testing.assert_allclose(d_logits.sum(axis=1), [0.0, 0.0],
                                   atol=1e-12)

    def test_decay_mask_skips_biases(self):
        model = Mlp(ToyArchSpec((3, ), 'relu'), 2, 2,
                    np.random.default_rng(42))
        assert model.decay_mask == [True, False, True, False]

    def test_random_coordinates_match_finite_differences(self):
        rng = np.random.default_rng(42)
        step = 1e-5
        for _ in range(24):
            depth = int(rng.integers(1, 4))
            widths = tuple(int(w) for w in rng.integers(2, 7, size=depth))
            activation = ('relu', 'tanh')[int(rng.integers(2))]
            model = Mlp(ToyArchSpec(widths, activation), 3, 4, rng)
            x = rng.normal(size=(5, 3))
            y = rng.integers(0, 4, size=5)
            _, gradients = model.loss_and_gradients(x, y)
            which = int(rng.integers(len(model.parameters)))
            parameter = model.parameters[which]
            index = tuple(int(rng.integers(n)) for n in parameter.shape)
            original = parameter[index]
            parameter[index] = original + step
            plus = model.loss(x, y)
            parameter[index] = original - step
            minus = model.loss(x, y)
            parameter[index] = original
            numeric = (plus - minus) / (2 * step)
            analytic = gradients[which][index]
            error = abs(analytic - numeric) / max(abs(analytic), abs(numeric),
                                                  1e-6)
            assert error < 1e-4, (widths, activation, which, index)


class TestSgdTrainer:
    """Recording of learning curves."""

    arch = ToyArchSpec((8, ), 'relu')

    def test_curve_shape(self, small_dataset, train_config):
        curve = train(self.arch, small_dataset, train_config)
        assert curve.t_end == 3
        assert curve.batches_per_epoch == 96 // 16
        assert curve.epoch_val_acc.shape == (3, )
        assert 0.0 <= curve.final_test_acc <= 1.0

    def test_training_is_deterministic(self, small_dataset, train_config):
        first = train(self.arch, small_dataset, train_config)
        second = train(self.arch, small_dataset, train_config)
        np.testing.assert_array_equal(first.minibatch_train_losses,
                                      second.minibatch_train_losses)
        assert first.final_test_acc == second.final_test_acc

    def test_loss_decreases(self, small_dataset, train_config):
        config = train_config.copy(update={'epochs': 10})
        curve = train(self.arch, small_dataset, config)
        losses = curve.minibatch_train_losses.mean(axis=1)
        assert losses[-1] < losses[0]

    def test_recorded_losses_are_pre_update_losses(self, small_dataset,
                                                   train_config):
        trainer = SgdTrainer(train_config, capture_trajectory=True)
        curve = train(self.arch, small_dataset, train_config, trainer=trainer)
        model = build_model(self.arch, small_dataset, train_config)
        assert len(trainer.trajectory) == curve.t_end * curve.batches_per_epoch
        for step in (0, 5, len(trainer.trajectory) - 1):
            parameters, indices = trainer.trajectory[step]
            model.set_parameters(parameters)
            expected = model.loss(small_dataset.x_train[indices],
                                  small_dataset.y_train[indices])
            epoch, batch = divmod(step, curve.batches_per_epoch)
            assert curve.minibatch_train_losses[epoch, batch] == pytest.approx(
                expected, rel=1e-12)

    def test_cosine_schedule(self, train_config):
        assert train_config.learning_rate(1) == pytest.approx(0.1)
        assert train_config.learning_rate(3) < train_config.learning_rate(2)
        constant = train_config.copy(update={'schedule': 'constant'})
        assert constant.learning_rate(3) == pytest.approx(0.1)

    def test_batch_larger_than_data(self, small_dataset, train_config):
        config = train_config.copy(update={'batch_size': 1000})
        with pytest.raises(InvalidInputError):
            train(self.arch, small_dataset, config)

    def test_zero_learning_rate_keeps_the_initial_loss(self, small_dataset,
                                                       train_config):
        config = train_config.copy(update={'lr': 0.0})
        trainer = SgdTrainer(config, capture_trajectory=True)
        curve = train(self.arch, small_dataset, config, trainer=trainer)
        model = build_model(self.arch, small_dataset, config)
        initial = model.copy_parameters()
        for step, (parameters, indices) in enumerate(trainer.trajectory):
            for before, after in zip(initial, parameters):
                np.testing.assert_array_equal(before, after)
            epoch, batch = divmod(step, curve.batches_per_epoch)
            assert curve.minibatch_train_losses[epoch, batch] == pytest.approx(
                model.loss(small_dataset.x_train[indices],
                           small_dataset.y_train[indices]),
                rel=1e-12)
        full_loss = model.loss(small_dataset.x_train, small_dataset.y_train)
        assert tse(curve, 3) == pytest.approx(3 * full_loss, rel=1e-12)

    def test_single_full_batch(self, small_dataset, train_config):
        config = train_config.copy(update={'epochs': 1, 'batch_size': 96})
        curve = train(self.arch, small_dataset, config)
        assert curve.minibatch_train_losses.shape == (1, 1)

    def test_separable_data_is_learned(self, train_config):
        data = make_synthetic_dataset(dim=4,
                                      classes=3,
                                      n_train=192,
                                      n_val=48,
                                      n_test=96,
                                      difficulty=0.02,
                                      seed=11)
        config = train_config.copy(update={'epochs': 20})
        curve = train(ToyArchSpec((16, ), 'relu'), data, config)
        assert curve.final_test_acc >= 0.95

    def test_model_must_match_the_features(self, small_dataset, train_config):
        model = Mlp(self.arch, small_dataset.dim + 1, small_dataset.classes,
                    np.random.default_rng(42))
        with pytest.raises(InvalidInputError, match="input features"):
            SgdTrainer(train_config).fit(model, small_dataset)


class TestToyBenchmark:
    """Assembling a benchmark from training runs."""

    def test_parallel_runs_match_sequential_runs(self, small_dataset,
                                                 train_config, tmp_path):
        space = enumerate_toy_space([2, 4], [1], ['relu'])
        sequential = build_toy_benchmark(space, small_dataset, train_config,
                                         [0, 1])
        parallel = build_toy_benchmark(space,
                                       small_dataset,
                                       train_config, [0, 1],
                                       jobs=2,
                                       path=tmp_path / 'bench.jsonl')
        assert (tmp_path / 'bench.jsonl').is_file()
        assert parallel.metadata.t_end == 3
        assert parallel.metadata.batches_per_epoch == 6
        for first, second in zip(sequential, parallel):
            assert first.arch_id == second.arch_id
            for seed in (0, 1):
                np.testing.assert_array_equal(
                    first.seeds[seed].minibatch_train_losses,
                    second.seeds[seed].minibatch_train_losses)

    def test_seeds_give_different_curves(self, small_dataset, train_config):
        space = enumerate_toy_space([4], [1], ['tanh'])
        bench = build_toy_benchmark(space, small_dataset, train_config, [0, 1])
        record = bench.get('tanh-4')
        assert not np.array_equal(record.seeds[0].minibatch_train_losses,
                                  record.seeds[1].minibatch_train_losses)

    def test_duplicate_architectures(self, small_dataset, train_config):
        arch = ToyArchSpec((4, ), 'relu')
        with pytest.raises(InvalidInputError):
            build_toy_benchmark([arch, arch], small_dataset, train_config, [0])

    def test_reruns_write_identical_files(self, small_dataset, train_config,
                                          tmp_path):
        space = enumerate_toy_space([2, 4], [1], ['relu', 'tanh'])
        for name in ('first.jsonl', 'second.jsonl'):
            build_toy_benchmark(space,
                                small_dataset,
                                train_config, [0, 1],
                                path=tmp_path / name)
        assert (tmp_path / 'first.jsonl').read_bytes() == (
            tmp_path / 'second.jsonl').read_bytes()
