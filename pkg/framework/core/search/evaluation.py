"""Evaluators, cost accounting and traces of query-based searches.

Costs are counted in simulated epochs: an estimator at budget T costs T epochs
per query, the ground truth costs the full t_end epochs.
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import numpy as np
from framework.core.curves import ArchitectureRecord
from framework.core.curves import BenchmarkDataset
from framework.core.estimators import EstimatorKind
from framework.core.estimators import EstimatorSpec
from framework.core.estimators import parse_estimator_spec
from framework.core.estimators import score
from framework.core.stats import Orientation
from framework.errors import InvalidInputError
from framework.utils.fileutils import load_json
from framework.utils.fileutils import save_json

GROUND_TRUTH_LABEL = 'gt'


class EvaluatorMode(enum.Enum):
    """How an evaluator scores a queried architecture."""

    GROUND_TRUTH = 'ground_truth'
    ESTIMATOR = 'estimator'


@dataclass(frozen=True)
class Evaluator:
    """Score queried architectures and charge their simulated cost.

    The ground-truth evaluator scores an architecture by its final validation
    accuracy after t_end epochs.
    """

    mode: EvaluatorMode
    spec: EstimatorSpec
    t_end: int

    def __post_init__(self):
        """Validate the evaluator."""
        if self.spec.T is None or not 1 <= self.spec.T <= self.t_end:
            raise InvalidInputError(
                "evaluator budget must be in [1, {}], got {}".format(
                    self.t_end, self.spec.T))
        if self.spec.is_vector:
            raise InvalidInputError(
                "{} yields one score per minibatch and cannot drive a search".
                format(self.spec.label))

    @classmethod
    def ground_truth(cls, t_end: int) -> 'Evaluator':
        """Create the evaluator returning final validation accuracy."""
        return cls(EvaluatorMode.GROUND_TRUTH,
                   EstimatorSpec(EstimatorKind.VACC_ES, T=t_end), t_end)

    @classmethod
    def estimator(cls, spec: EstimatorSpec, t_end: int) -> 'Evaluator':
        """Create an evaluator backed by an estimator."""
        return cls(EvaluatorMode.ESTIMATOR, spec, t_end)

    @property
    def cost_per_query(self) -> int:
        """Get the simulated cost of one query, in epochs."""
        if self.mode is EvaluatorMode.GROUND_TRUTH:
            return self.t_end
        return self.spec.T

    @property
    def orientation(self) -> Orientation:
        """Get the orientation of the scores."""
        return self.spec.orientation

    @property
    def label(self) -> str:
        """Get the label of the evaluator in reports."""
        if self.mode is EvaluatorMode.GROUND_TRUTH:
            return GROUND_TRUTH_LABEL
        return self.spec.label

    @property
    def charges_duplicates(self) -> bool:
        """Return True if querying an already queried architecture costs again.

        A tabular lookup of the ground truth is free; an estimator models a
        new training run.
        """
        return self.mode is EvaluatorMode.ESTIMATOR

    def score(self, record: ArchitectureRecord) -> float:
        """Score an architecture, averaging over its training seeds."""
        return float(
            np.mean([score(self.spec, curve) for curve in record.seeds.values()]))


def parse_evaluator(text: str, t_end: int) -> Evaluator:
    """Parse an evaluator: `gt` or an estimator spec such as `tse-ema@T=10`.

    Parameters
    ----------
    text: str, required
        The evaluator string.
    t_end: int, required
        The number of epochs of the benchmark.

    Returns
    -------
    evaluator: Evaluator
        The parsed evaluator.
    """
    if text.strip().lower() == GROUND_TRUTH_LABEL:
        return Evaluator.ground_truth(t_end)
    return Evaluator.estimator(parse_estimator_spec(text), t_end)


@dataclass(frozen=True)
class SearchEvent:
    """One query of a search."""

    step: int
    arch_id: str
    encoding: Tuple[int, ...]
    score: float
    cumulative_cost: float
    best_true_test_acc: float
    incumbent_arch_id: str
    incumbent_true_test_acc: float

    def to_dict(self) -> dict:
        """Convert the event into its JSON representation."""
        return {
            'step': self.step,
            'arch_id': self.arch_id,
            'encoding': list(self.encoding),
            'score': self.score,
            'cumulative_cost': self.cumulative_cost,
            'best_true_test_acc': self.best_true_test_acc,
            'incumbent_arch_id': self.incumbent_arch_id,
            'incumbent_true_test_acc': self.incumbent_true_test_acc
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'SearchEvent':
        """Create an event from its JSON representation."""
        return cls(**dict(data, encoding=tuple(data['encoding'])))


@dataclass
class SearchTrace:
    """The time-ordered queries of one search run."""

    strategy: str
    evaluator: str
    seed: int
    budget: float
    events: List[SearchEvent] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        """Get the terminal summary of the run."""
        last = self.events[-1] if self.events else None
        return {
            'queries': len(self.events),
            'unique_architectures': len({e.arch_id for e in self.events}),
            'total_cost': last.cumulative_cost if last else 0.0,
            'best_true_test_acc': last.best_true_test_acc if last else None,
            'incumbent_arch_id': last.incumbent_arch_id if last else None,
            'incumbent_true_test_acc':
            last.incumbent_true_test_acc if last else None
        }

    def to_dict(self) -> dict:
        """Convert the trace into its JSON representation."""
        return {
            'strategy': self.strategy,
            'evaluator': self.evaluator,
            'seed': self.seed,
            'budget': self.budget,
            'events': [e.to_dict() for e in self.events],
            'summary': self.summary
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'SearchTrace':
        """Create a trace from its JSON representation."""
        return cls(strategy=data['strategy'],
                   evaluator=data['evaluator'],
                   seed=data['seed'],
                   budget=data['budget'],
                   events=[SearchEvent.from_dict(e) for e in data['events']])

    def save(self, file_name):
        """Save the trace into a JSON file."""
        save_json(self.to_dict(), file_name)

    @classmethod
    def load(cls, file_name) -> 'SearchTrace':
        """Load a trace from a JSON file."""
        return cls.from_dict(load_json(file_name))


class SearchSession:
    """Issue queries against a benchmark within a cost budget and trace them."""

    def __init__(self, bench: BenchmarkDataset, evaluator: Evaluator,
                 budget: float, strategy: str, seed: int):
        """Create a new session.

        Parameters
        ----------
        bench: BenchmarkDataset, required
            The tabular benchmark.
        evaluator: Evaluator, required
            The evaluator scoring queries.
        budget: float, required
            The total simulated cost allowed; at least one query.
        strategy: str, required
            The name of the search strategy, stored in the trace.
        seed: int, required
            The seed of the run, stored in the trace.
        """
        if evaluator.t_end != bench.t_end:
            raise InvalidInputError(
                "evaluator t_end={} does not match the benchmark's {}".format(
                    evaluator.t_end, bench.t_end))
        if budget < evaluator.cost_per_query:
            raise InvalidInputError(
                "budget {} is below the cost of one query ({})".format(
                    budget, evaluator.cost_per_query))
        self.bench = bench
        self.evaluator = evaluator
        self.budget = float(budget)
        self.trace = SearchTrace(strategy=strategy,
                                 evaluator=evaluator.label,
                                 seed=seed,
                                 budget=self.budget)
        self.cost = 0.0
        self.__scores: Dict[str, float] = {}
        self.__best_true_test_acc = -np.inf
        self.__incumbent: Optional[Tuple[str, float, float]] = None

    @property
    def queried_ids(self):
        """Get the ids of the architectures queried so far."""
        return self.__scores.keys()

    @property
    def exhausted(self) -> bool:
        """Return True when every architecture of the benchmark was queried."""
        return len(self.__scores) == len(self.bench)

    def is_queried(self, record: ArchitectureRecord) -> bool:
        """Return True if the architecture was already queried."""
        return record.arch_id in self.__scores

    def charge_for(self, record: ArchitectureRecord) -> float:
        """Get the cost of querying an architecture now."""
        if self.is_queried(record) and not self.evaluator.charges_duplicates:
            return 0.0
        return float(self.evaluator.cost_per_query)

    def can_afford(self, record: ArchitectureRecord) -> bool:
        """Return True if querying the architecture fits in the remaining budget."""
        return self.cost + self.charge_for(record) <= self.budget

    def observations(self) -> List[Tuple[ArchitectureRecord, float]]:
        """Get the distinct queried architectures with their scores, in query order."""
        return [(self.bench.get(arch_id), s)
                for arch_id, s in self.__scores.items()]

    def query(self, record: ArchitectureRecord) -> float:
        """Query an architecture, charge its cost and record the event.

        Parameters
        ----------
        record: ArchitectureRecord, required
            The architecture to query.

        Returns
        -------
        score: float
            The evaluator's score of the architecture.
        """
        charge = self.charge_for(record)
        if self.is_queried(record):
            value = self.__scores[record.arch_id]
            logging.debug("Duplicate query of %s charged %s.", record.arch_id,
                          charge)
        else:
            value = self.evaluator.score(record)
            self.__scores[record.arch_id] = value
        self.cost += charge

        true_acc = record.mean_test_acc
        self.__best_true_test_acc = max(self.__best_true_test_acc, true_acc)
        if self.__incumbent is None or self.evaluator.orientation.is_better(
                value, self.__incumbent[1]):
            self.__incumbent = (record.arch_id, value, true_acc)
        self.trace.events.append(
            SearchEvent(step=len(self.trace.events) + 1,
                        arch_id=record.arch_id,
                        encoding=tuple(record.encoding),
                        score=value,
                        cumulative_cost=self.cost,
                        best_true_test_acc=float(self.__best_true_test_acc),
                        incumbent_arch_id=self.__incumbent[0],
                        incumbent_true_test_acc=self.__incumbent[2]))
        return value
