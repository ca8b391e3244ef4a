"""Synthetic classification data made of Gaussian clusters."""
from dataclasses import dataclass
import numpy as np
from framework.errors import InvalidInputError
from framework.utils.seedutils import derive_rng


@dataclass(frozen=True, eq=False)
class SyntheticDataset:
    """Train, validation and test splits of a synthetic classification task.

    The `*_index` arrays hold the positions of the split's samples in the
    generated pool, so the splits are disjoint by construction.
    """

    x_train: np.ndarray
    y_train: np.ndarray
    x_val: np.ndarray
    y_val: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    train_index: np.ndarray
    val_index: np.ndarray
    test_index: np.ndarray
    dim: int
    classes: int
    seed: int

    def __post_init__(self):
        """Freeze the arrays of the dataset."""
        for name in ('x_train', 'y_train', 'x_val', 'y_val', 'x_test',
                     'y_test', 'train_index', 'val_index', 'test_index'):
            getattr(self, name).flags.writeable = False

    @property
    def n_train(self) -> int:
        """Get the number of training samples."""
        return int(self.y_train.shape[0])

    def same_as(self, other: 'SyntheticDataset') -> bool:
        """Return True if both datasets hold bit-identical samples."""
        names = ('x_train', 'y_train', 'x_val', 'y_val', 'x_test', 'y_test')
        return all(
            np.array_equal(getattr(self, n), getattr(other, n)) for n in names)


def make_synthetic_dataset(dim: int,
                           classes: int,
                           n_train: int,
                           n_val: int,
                           n_test: int,
                           difficulty: float,
                           seed: int,
                           clusters_per_class: int = 1) -> SyntheticDataset:
    """Generate a classification task with Gaussian class clusters.

    Cluster centers are drawn from a standard normal distribution; samples
    spread around their center with standard deviation `difficulty`, so small
    values give well separated classes.

    Parameters
    ----------
    dim: int, required
        The number of features.
    classes: int, required
        The number of classes; at least 2.
    n_train: int, required
        The number of training samples.
    n_val: int, required
        The number of validation samples.
    n_test: int, required
        The number of test samples.
    difficulty: float, required
        The spread of the clusters, in (0, 1].
    seed: int, required
        The seed of the generator; equal seeds give bit-identical datasets.
    clusters_per_class: int, optional
        The number of clusters of every class; more than one makes the
        decision boundary non-linear.

    Returns
    -------
    dataset: SyntheticDataset
        The generated splits.
    """
    for name, value in (('dim', dim), ('n_train', n_train), ('n_val', n_val),
                        ('n_test', n_test), ('clusters_per_class',
                                             clusters_per_class)):
        if int(value) != value or value < 1:
            raise InvalidInputError(
                "{} must be a positive integer, got {}".format(name, value))
    if int(classes) != classes or classes < 2:
        raise InvalidInputError("classes must be >= 2, got {}".format(classes))
    if not 0.0 < difficulty <= 1.0:
        raise InvalidInputError("difficulty must be in (0, 1], got {}".format(
            difficulty))

    rng = derive_rng(seed, 'dataset')
    n_clusters = classes * clusters_per_class
    centers = rng.normal(size=(n_clusters, dim))
    n_total = n_train + n_val + n_test
    components = rng.integers(n_clusters, size=n_total)
    features = centers[components] + difficulty * rng.normal(size=(n_total,
                                                                    dim))
    labels = (components % classes).astype(np.int64)

    order = rng.permutation(n_total)
    train_index = order[:n_train]
    val_index = order[n_train:n_train + n_val]
    test_index = order[n_train + n_val:]
    return SyntheticDataset(x_train=features[train_index],
                            y_train=labels[train_index],
                            x_val=features[val_index],
                            y_val=labels[val_index],
                            x_test=features[test_index],
                            y_test=labels[test_index],
                            train_index=train_index,
                            val_index=val_index,
                            test_index=test_index,
                            dim=int(dim),
                            classes=int(classes),
                            seed=int(seed))
