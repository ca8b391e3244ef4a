"""Ranking, Spearman rank correlation and aggregation of repeated runs."""
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple
import numpy as np
from scipy import stats as scipy_stats
from framework.errors import InvalidInputError


class Orientation(enum.Enum):
    """Whether lower or higher scores indicate a better architecture."""

    LOWER_IS_BETTER = 'lower-is-better'
    HIGHER_IS_BETTER = 'higher-is-better'

    @property
    def sign(self) -> int:
        """Get the factor turning a raw correlation into an oriented one."""
        return -1 if self is Orientation.LOWER_IS_BETTER else 1

    def is_better(self, candidate, incumbent) -> bool:
        """Return True if `candidate` is strictly better than `incumbent`."""
        if self is Orientation.LOWER_IS_BETTER:
            return candidate < incumbent
        return candidate > incumbent


class ScoredArchitecture(NamedTuple):
    """An architecture with an estimator score and its true test accuracy."""

    arch_id: str
    score: float
    final_test_acc: float


@dataclass(frozen=True)
class RankCorrelationReport:
    """The rank correlation of one estimator at one budget.

    `rho` is oriented: positive values mean the estimator ranks architectures
    in agreement with their test accuracy.
    """

    budget_T: int
    estimator_name: str
    rho: float
    n: int
    mean_over_seeds: bool
    seed: Optional[int] = None

    def __post_init__(self):
        """Validate the report."""
        if self.n < 2:
            raise InvalidInputError("n must be >= 2, got {}".format(self.n))
        if not math.isnan(self.rho) and abs(self.rho) > 1.0:
            raise InvalidInputError("|rho| must be <= 1, got {}".format(
                self.rho))

    def to_row(self) -> dict:
        """Convert the report into a CSV row."""
        return {
            'estimator': self.estimator_name,
            'T': self.budget_T,
            'rho': self.rho,
            'n': self.n,
            'seed': 'mean' if self.mean_over_seeds else self.seed
        }


def _as_finite_vector(values, name) -> np.ndarray:
    """Convert values into a float vector, rejecting NaN."""
    array = np.asarray(values, dtype=np.float64)
    if array.ndim != 1:
        raise InvalidInputError("{} must be one-dimensional".format(name))
    if np.any(np.isnan(array)):
        raise InvalidInputError("{} contains NaN".format(name))
    if not np.all(np.isfinite(array)):
        raise InvalidInputError("{} contains infinite values".format(name))
    return array


def ranks(values: Sequence[float]) -> np.ndarray:
    """Compute 1-based ranks; tied values receive the average of their ranks.

    Parameters
    ----------
    values: sequence of float, required
        The values to rank; at least one, all finite.

    Returns
    -------
    ranks: array of float
        The rank of every value.
    """
    array = _as_finite_vector(values, 'values')
    if array.size == 0:
        raise InvalidInputError("cannot rank an empty sequence")
    return scipy_stats.rankdata(array, method='average')


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Compute Spearman's rank correlation with average-rank tie handling.

    Parameters
    ----------
    x: sequence of float, required
        The first sample.
    y: sequence of float, required
        The second sample, of the same length.

    Returns
    -------
    rho: float
        The Pearson correlation of the ranks of x and y, in [-1, 1].
    """
    x = _as_finite_vector(x, 'x')
    y = _as_finite_vector(y, 'y')
    if x.size != y.size:
        raise InvalidInputError("length mismatch: {} vs {}".format(
            x.size, y.size))
    if x.size < 2:
        raise InvalidInputError("at least two observations are required")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise InvalidInputError(
            "correlation is undefined for a constant sequence")
    rank_x = ranks(x) - (x.size + 1) / 2.0
    rank_y = ranks(y) - (y.size + 1) / 2.0
    rho = np.dot(rank_x, rank_y) / math.sqrt(
        np.dot(rank_x, rank_x) * np.dot(rank_y, rank_y))
    return float(np.clip(rho, -1.0, 1.0))


def topk_mean_final_acc(population: Sequence[ScoredArchitecture], k: int,
                        orientation: Orientation) -> float:
    """Average the test accuracy of the k best-scored architectures.

    Ties on score are broken by the lexicographic order of arch_id.

    Parameters
    ----------
    population: sequence of ScoredArchitecture, required
        The scored architectures.
    k: int, required
        The number of architectures to select; 1 <= k <= len(population).
    orientation: Orientation, required
        Whether lower or higher scores are better.

    Returns
    -------
    mean_acc: float
        The mean final test accuracy of the selected architectures.
    """
    if not 1 <= k <= len(population):
        raise InvalidInputError("k must be in [1, {}], got {}".format(
            len(population), k))
    sign = 1.0 if orientation is Orientation.LOWER_IS_BETTER else -1.0
    ordered = sorted(population, key=lambda a: (sign * a.score, a.arch_id))
    return float(np.mean([a.final_test_acc for a in ordered[:k]]))


def aggregate(runs: Sequence[float]) -> Tuple[float, float]:
    """Compute the mean and standard error of repeated runs.

    Parameters
    ----------
    runs: sequence of float, required
        The values of the runs; at least one.

    Returns
    -------
    mean: float
        The sample mean.
    stderr: float
        The sample standard deviation divided by sqrt(n); 0 for a single run.
    """
    values = np.asarray(runs, dtype=np.float64)
    if values.size == 0:
        raise InvalidInputError("cannot aggregate an empty sequence of runs")
    if values.size == 1:
        return float(values[0]), 0.0
    return float(np.mean(values)), float(scipy_stats.sem(values, ddof=1))
