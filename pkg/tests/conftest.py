"""Shared fixtures: learning curves and tabular benchmarks from parametric loss models.

The parametric benchmarks let search and evaluation tests run in
milliseconds; the toy trainer is exercised by its own tests.
"""
import itertools
import numpy as np
import pytest
from framework.core.curves import ArchitectureRecord
from framework.core.curves import BenchmarkDataset
from framework.core.curves import BenchmarkMetadata
from framework.core.curves import LearningCurve
from framework.core.toytrain.data import make_synthetic_dataset
from framework.core.toytrain.trainer import TrainConfig


def pytest_addoption(parser):
    parser.addoption('--run-slow',
                     action='store_true',
                     default=False,
                     help="run the experiments marked as slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption('--run-slow'):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


def make_curve(losses, val_acc=None, test_acc=0.5, val_loss=None):
    """Build a curve from nested loss lists."""
    return LearningCurve(minibatch_train_losses=np.asarray(losses, dtype=float),
                         epoch_val_acc=val_acc,
                         final_test_acc=test_acc,
                         epoch_val_loss=val_loss)


def random_curve(rng, t_end=None, batches=None, with_validation=True):
    """Draw a curve with random positive losses and accuracies."""
    t_end = t_end or int(rng.integers(1, 12))
    batches = batches or int(rng.integers(1, 6))
    return LearningCurve(
        minibatch_train_losses=rng.uniform(0.01, 3.0, size=(t_end, batches)),
        epoch_val_acc=rng.uniform(0, 1, size=t_end) if with_validation else None,
        final_test_acc=float(rng.uniform(0, 1)),
        epoch_val_loss=rng.uniform(0.01, 3.0, size=t_end)
        if with_validation else None)


def parametric_curve(speed, rng, t_end, batches, noise=0.01):
    """Model a run whose loss decays at `speed`; faster runs generalize better.

    The final test accuracy grows with `speed`, so TSE-style estimators rank
    such a population correctly.
    """
    epochs = np.arange(1, t_end + 1)
    mean = 2.0 * np.exp(-speed * epochs) + 0.05
    losses = mean[:, None] * (1.0 + noise * rng.standard_normal((t_end, batches)))
    val_acc = np.clip(0.95 - 0.7 * np.exp(-speed * epochs) +
                      noise * rng.standard_normal(t_end), 0.0, 1.0)
    val_loss = mean * 1.1 + 0.1
    test_acc = float(np.clip(0.5 + 0.4 * (1.0 - np.exp(-3.0 * speed)) +
                             noise * rng.standard_normal(), 0.0, 1.0))
    return LearningCurve(minibatch_train_losses=np.abs(losses),
                         epoch_val_acc=val_acc,
                         final_test_acc=test_acc,
                         epoch_val_loss=val_loss)


def build_parametric_benchmark(domains=(2, 4, 4),
                               seeds=(0, 1),
                               t_end=20,
                               batches=4,
                               seed=0,
                               noise=0.01):
    """Build a benchmark over the full grid of categorical encodings.

    The speed of an architecture grows with every position of its encoding,
    most of all with the last one, so the best architecture is the
    encoding made of the largest value everywhere.
    """
    rng = np.random.default_rng(seed)
    records = []
    for encoding in itertools.product(*(range(d) for d in domains)):
        quality = sum((i + 1) * value / max(d - 1, 1)
                      for i, (value, d) in enumerate(zip(encoding, domains)))
        speed = 0.05 + 0.1 * quality
        curves = {
            s: parametric_curve(speed, rng, t_end, batches, noise)
            for s in seeds
        }
        arch_id = "arch-" + "".join(str(v) for v in encoding)
        records.append(ArchitectureRecord(arch_id, encoding, curves))
    metadata = BenchmarkMetadata(name='parametric',
                                 t_end=t_end,
                                 batches_per_epoch=batches)
    return BenchmarkDataset(records=tuple(records), metadata=metadata)


@pytest.fixture(scope='session')
def parametric_benchmark():
    """A 32-architecture benchmark with two seeds, t_end=20 and B=4."""
    return build_parametric_benchmark()


@pytest.fixture(scope='session')
def small_dataset():
    """A small, easy synthetic classification task."""
    return make_synthetic_dataset(dim=4,
                                  classes=3,
                                  n_train=96,
                                  n_val=48,
                                  n_test=48,
                                  difficulty=0.3,
                                  seed=7)


@pytest.fixture
def train_config():
    """A short training protocol for the small dataset."""
    return TrainConfig(epochs=3,
                       batch_size=16,
                       lr=0.1,
                       schedule='cosine',
                       momentum=0.9,
                       weight_decay=0.0,
                       seed=0)


def numerical_gradient(function, parameter, epsilon=1e-6):
    """Central finite differences of a scalar function of an array, perturbed in place."""
    gradient = np.zeros_like(parameter)
    for index in np.ndindex(parameter.shape):
        original = parameter[index]
        parameter[index] = original + epsilon
        plus = function()
        parameter[index] = original - epsilon
        minus = function()
        parameter[index] = original
        gradient[index] = (plus - minus) / (2 * epsilon)
    return gradient
