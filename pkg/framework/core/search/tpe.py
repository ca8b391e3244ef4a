"""Tree-structured Parzen estimator search over categorical encodings."""
import logging
import math
from typing import List, Sequence, Tuple
import numpy as np
from framework.core.curves import BenchmarkDataset
from framework.core.search.evaluation import Evaluator
from framework.core.search.evaluation import SearchSession
from framework.core.search.evaluation import SearchTrace
from framework.core.search.randomsearch import search_rng
from framework.core.search.space import SearchSpace
from framework.core.stats import Orientation
from framework.errors import InvalidInputError

DEFAULT_N_INIT = 10
DEFAULT_GAMMA_SPLIT = 0.25
DEFAULT_N_CANDIDATES = 24


class TpeModel:
    """Per-position categorical densities of the good and the bad observations.

    Frequencies use add-one smoothing, so every value keeps a non-zero
    probability.
    """

    def __init__(self, space: SearchSpace, gamma_split: float):
        """Create an unfitted model.

        Parameters
        ----------
        space: SearchSpace, required
            The space whose domains the densities cover.
        gamma_split: float, required
            The fraction of observations forming the good set, in (0, 1).
        """
        if not 0.0 < gamma_split < 1.0:
            raise InvalidInputError(
                "gamma_split must be in (0, 1), got {}".format(gamma_split))
        self.space = space
        self.gamma_split = gamma_split
        self.good_marginals: List[np.ndarray] = []
        self.bad_marginals: List[np.ndarray] = []
        self.degenerate = True

    def fit(self, observations: Sequence[Tuple[Sequence[int], float]],
            orientation: Orientation) -> 'TpeModel':
        """Split observations at the gamma quantile and fit both densities.

        Parameters
        ----------
        observations: sequence of (encoding, score) tuples, required
            The queried encodings with their scores, in query order.
        orientation: Orientation, required
            Whether lower or higher scores are better.

        Returns
        -------
        model: TpeModel
            The fitted model; `degenerate` is True when every score is equal.
        """
        scores = np.array([s for _, s in observations], dtype=np.float64)
        self.degenerate = len(scores) == 0 or bool(np.all(scores == scores[0]))
        sign = 1.0 if orientation is Orientation.LOWER_IS_BETTER else -1.0
        ranked = sorted(range(len(observations)),
                        key=lambda i: (sign * scores[i], i))
        n_good = max(1, math.ceil(self.gamma_split * len(observations)))
        padded = [self.space.pad(encoding) for encoding, _ in observations]
        good = [padded[i] for i in ranked[:n_good]]
        bad = [padded[i] for i in ranked[n_good:]]
        self.good_marginals = self.__smoothed(good)
        self.bad_marginals = self.__smoothed(bad)
        return self

    def __smoothed(self, encodings):
        return [(counts + 1.0) / (counts.sum() + counts.size)
                for counts in self.space.value_counts(encodings)]

    def sample(self, rng, count: int) -> List[Tuple[int, ...]]:
        """Draw padded encodings from the good density, position by position."""
        draws = [
            rng.choice(len(p), size=count, p=p) for p in self.good_marginals
        ]
        return [
            tuple(self.space.domains[position][int(draws[position][i])]
                  for position in range(self.space.length))
            for i in range(count)
        ]

    def log_ratio(self, padded: Sequence[int]) -> float:
        """Get log l(x) - log g(x) of a padded encoding."""
        total = 0.0
        for position, value in enumerate(padded):
            index = self.space.position_index(position, value)
            total += math.log(self.good_marginals[position][index])
            total -= math.log(self.bad_marginals[position][index])
        return total


def tpe_search(bench: BenchmarkDataset,
               ev: Evaluator,
               budget: float,
               gamma_split: float,
               seed: int,
               n_init: int = DEFAULT_N_INIT,
               n_candidates: int = DEFAULT_N_CANDIDATES) -> SearchTrace:
    """Search with a density-ratio (TPE) sampler after a random warm start.

    Parameters
    ----------
    bench: BenchmarkDataset, required
        The tabular benchmark.
    ev: Evaluator, required
        The evaluator scoring queries.
    budget: float, required
        The total simulated cost; at least one query.
    gamma_split: float, required
        The quantile splitting good from bad observations, in (0, 1).
    seed: int, required
        The seed of the run.
    n_init: int, optional
        The number of random queries before the model is used.
    n_candidates: int, optional
        The number of candidates drawn from the good density per query.

    Returns
    -------
    trace: SearchTrace
        The queries of the run.
    """
    if n_init < 1 or n_candidates < 1:
        raise InvalidInputError("n_init and n_candidates must be positive")
    session = SearchSession(bench, ev, budget, 'tpe', seed)
    space = SearchSpace(bench)
    model = TpeModel(space, gamma_split)
    rng = search_rng(seed)

    order = rng.permutation(len(bench))
    for index in order[:n_init]:
        record = bench.records[int(index)]
        if not session.can_afford(record):
            return session.trace
        session.query(record)

    while not session.exhausted:
        observations = [(record.encoding, value)
                        for record, value in session.observations()]
        model.fit(observations, ev.orientation)
        record = None
        if model.degenerate:
            logging.info("All %s observed scores are equal; sampling uniformly.",
                         len(observations))
        else:
            candidates = sorted(set(model.sample(rng, n_candidates)))
            ratios = [model.log_ratio(c) for c in candidates]
            for position in np.argsort(ratios, kind='stable')[::-1]:
                candidate = space.lookup(candidates[int(position)])
                if candidate is not None and not session.is_queried(candidate):
                    record = candidate
                    break
        if record is None:
            unseen = [r for r in bench if not session.is_queried(r)]
            record = unseen[int(rng.integers(len(unseen)))]
        if not session.can_afford(record):
            break
        session.query(record)
    return session.trace
