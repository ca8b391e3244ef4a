"""Run grids of search strategies and evaluators and aggregate their traces."""
import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple
import numpy as np
import pandas as pd
from framework.core.curves import BenchmarkDataset
from framework.core.search.evaluation import Evaluator
from framework.core.search.evaluation import SearchTrace
from framework.core.search.evolution import regularized_evolution
from framework.core.search.randomsearch import random_search
from framework.core.search.tpe import DEFAULT_GAMMA_SPLIT
from framework.core.search.tpe import DEFAULT_N_CANDIDATES
from framework.core.search.tpe import DEFAULT_N_INIT
from framework.core.search.tpe import tpe_search
from framework.core.stats import aggregate
from framework.errors import InvalidInputError
from framework.utils.dataframeutils import build_data_frame
from framework.utils.parallelutils import run_in_pool
from framework.utils.seedutils import derive_seed

REPORT_COLUMNS = [
    'strategy', 'evaluator', 'cost', 'mean_acc', 'stderr', 'mean_incumbent_acc',
    'incumbent_stderr', 'n_runs'
]
TRACE_VALUES = ('best_true_test_acc', 'incumbent_true_test_acc')


@dataclass(frozen=True)
class StrategyOptions:
    """Hyper-parameters of the search strategies."""

    pop_size: int = 10
    sample_size: int = 3
    gamma_split: float = DEFAULT_GAMMA_SPLIT
    n_init: int = DEFAULT_N_INIT
    n_candidates: int = DEFAULT_N_CANDIDATES


def _random_search(bench, ev, budget, seed, options):
    return random_search(bench, ev, budget, seed)


def _regularized_evolution(bench, ev, budget, seed, options):
    return regularized_evolution(bench, ev, budget, options.pop_size,
                                 options.sample_size, seed)


def _tpe_search(bench, ev, budget, seed, options):
    return tpe_search(bench,
                      ev,
                      budget,
                      options.gamma_split,
                      seed,
                      n_init=options.n_init,
                      n_candidates=options.n_candidates)


STRATEGIES = {
    'rs': _random_search,
    're': _regularized_evolution,
    'tpe': _tpe_search
}


def check_strategies(names: Sequence[str]) -> List[str]:
    """Validate strategy names.

    Parameters
    ----------
    names: sequence of str, required
        The names to check.

    Returns
    -------
    names: list of str
        The names, lower-cased.
    """
    names = [name.strip().lower() for name in names]
    unknown = [name for name in names if name not in STRATEGIES]
    if unknown:
        raise InvalidInputError(
            "unknown strategy {}; valid strategies are {}".format(
                ', '.join(unknown), ', '.join(sorted(STRATEGIES))))
    if len(names) == 0:
        raise InvalidInputError("at least one strategy is required")
    return names


def run_strategy(name: str,
                 bench: BenchmarkDataset,
                 ev: Evaluator,
                 budget: float,
                 seed: int,
                 options: Optional[StrategyOptions] = None) -> SearchTrace:
    """Run one search by strategy name."""
    name, = check_strategies([name])
    return STRATEGIES[name](bench, ev, budget, seed, options or
                            StrategyOptions())


def cost_grid(budget: float, grid_points: int) -> np.ndarray:
    """Get `grid_points` evenly spaced costs in (0, budget]."""
    if grid_points < 1:
        raise InvalidInputError(
            "grid_points must be positive, got {}".format(grid_points))
    return budget * np.arange(1, grid_points + 1) / grid_points


def check_trace_value(value: str):
    """Reject event fields that cannot be resampled."""
    if value not in TRACE_VALUES:
        raise InvalidInputError("cannot resample {}; expected one of {}".format(
            value, ", ".join(TRACE_VALUES)))


def resample_trace(trace: SearchTrace,
                   grid: Sequence[float],
                   value: str = 'best_true_test_acc') -> np.ndarray:
    """Sample the true test accuracy of a trace on a cost grid.

    Parameters
    ----------
    trace: SearchTrace, required
        The trace to resample.
    grid: sequence of float, required
        The costs, in ascending order.
    value: str, optional
        The event field to sample: the best true test accuracy of every
        queried architecture, or `incumbent_true_test_acc`, the true test
        accuracy of the architecture the evaluator ranks best.

    Returns
    -------
    values: numpy.ndarray
        The value of the last event at or below every cost; NaN before the
        first query.
    """
    check_trace_value(value)
    costs = np.array([e.cumulative_cost for e in trace.events])
    best = np.array([getattr(e, value) for e in trace.events])
    positions = np.searchsorted(costs, np.asarray(grid, dtype=np.float64),
                                side='right') - 1
    values = np.full(len(positions), np.nan)
    reached = positions >= 0
    values[reached] = best[positions[reached]]
    return values


def cost_to_reach(trace: SearchTrace,
                  level: float,
                  value: str = 'best_true_test_acc') -> float:
    """Get the cost at which a trace first reaches a true test accuracy.

    `value` selects the event field as in `resample_trace`.

    Returns
    -------
    cost: float
        The cumulative cost of the first event reaching `level`; inf when the
        trace never does.
    """
    check_trace_value(value)
    for event in trace.events:
        if getattr(event, value) >= level:
            return event.cumulative_cost
    return float('inf')


def _search_task(task):
    bench, strategy, ev, budget, seed, options = task
    return STRATEGIES[strategy](bench, ev, budget, seed, options)


@dataclass
class ComparisonResult:
    """The aggregated report of a comparison and the traces behind it."""

    report: pd.DataFrame
    traces: Mapping[Tuple[str, str, int], SearchTrace]


def compare_strategies(bench: BenchmarkDataset,
                       evaluators: Sequence[Evaluator],
                       strategies: Sequence[str],
                       budget: float,
                       n_seeds: int,
                       grid_points: int = 50,
                       master_seed: int = 0,
                       jobs: int = 1,
                       options: Optional[StrategyOptions] = None
                       ) -> ComparisonResult:
    """Run every (strategy, evaluator) cell for several seeds.

    The seed of run i of a strategy is derived from the master seed, the
    strategy and i, so all evaluators of a strategy share their seeds.

    Parameters
    ----------
    bench: BenchmarkDataset, required
        The tabular benchmark.
    evaluators: sequence of Evaluator, required
        The evaluators to compare.
    strategies: sequence of str, required
        The names of the strategies; see `STRATEGIES`.
    budget: float, required
        The simulated cost budget of every run.
    n_seeds: int, required
        The number of runs per cell.
    grid_points: int, optional
        The number of points of the cost grid of the report.
    master_seed: int, optional
        The master seed.
    jobs: int, optional
        The number of worker processes.
    options: StrategyOptions, optional
        The hyper-parameters of the strategies.

    Returns
    -------
    result: ComparisonResult
        The report with columns `REPORT_COLUMNS`, one row per cell and grid
        point reached by at least one run, and the traces keyed by
        (strategy, evaluator label, seed index).
    """
    strategies = check_strategies(strategies)
    if len(evaluators) == 0:
        raise InvalidInputError("at least one evaluator is required")
    if n_seeds < 1:
        raise InvalidInputError("n_seeds must be positive, got {}".format(n_seeds))
    options = options or StrategyOptions()
    grid = cost_grid(budget, grid_points)

    keys = []
    tasks = []
    for strategy in strategies:
        for ev in evaluators:
            for index in range(n_seeds):
                seed = derive_seed(master_seed, strategy, index)
                keys.append((strategy, ev.label, index))
                tasks.append((bench, strategy, ev, budget, seed, options))
    logging.info("Running %s searches (%s strategies, %s evaluators, %s seeds).",
                 len(tasks), len(strategies), len(evaluators), n_seeds)
    traces: Dict[Tuple[str, str, int], SearchTrace] = dict(
        zip(keys, run_in_pool(_search_task, tasks, jobs=jobs,
                              description='search')))

    rows = []
    for strategy in strategies:
        for ev in evaluators:
            runs = [
                traces[(strategy, ev.label, index)] for index in range(n_seeds)
            ]
            best = np.array([resample_trace(t, grid) for t in runs])
            incumbent = np.array([
                resample_trace(t, grid, TRACE_VALUES[1]) for t in runs
            ])
            for point, cost in enumerate(grid):
                reached = np.isfinite(best[:, point])
                if not np.any(reached):
                    continue
                mean, stderr = aggregate(best[reached, point])
                incumbent_mean, incumbent_stderr = aggregate(
                    incumbent[reached, point])
                rows.append({
                    'strategy': strategy,
                    'evaluator': ev.label,
                    'cost': float(cost),
                    'mean_acc': mean,
                    'stderr': stderr,
                    'mean_incumbent_acc': incumbent_mean,
                    'incumbent_stderr': incumbent_stderr,
                    'n_runs': int(reached.sum())
                })
    return ComparisonResult(report=build_data_frame(rows, REPORT_COLUMNS),
                            traces=traces)
