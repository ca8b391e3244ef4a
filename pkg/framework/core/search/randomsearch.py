"""Random search without replacement."""
import logging
from framework.core.curves import BenchmarkDataset
from framework.core.search.evaluation import Evaluator
from framework.core.search.evaluation import SearchSession
from framework.core.search.evaluation import SearchTrace
from framework.utils.seedutils import derive_rng


def search_rng(seed: int):
    """Get the random generator shared by the strategies for a run seed.

    Every strategy starts by drawing the same random order of the benchmark,
    so runs with equal seeds share their random phase.
    """
    return derive_rng(seed, 'search')


def random_search(bench: BenchmarkDataset, ev: Evaluator, budget: float,
                  seed: int) -> SearchTrace:
    """Query architectures in a uniformly random order until the budget is spent.

    Parameters
    ----------
    bench: BenchmarkDataset, required
        The tabular benchmark.
    ev: Evaluator, required
        The evaluator scoring queries.
    budget: float, required
        The total simulated cost; at least one query.
    seed: int, required
        The seed of the run.

    Returns
    -------
    trace: SearchTrace
        The queries of the run.
    """
    session = SearchSession(bench, ev, budget, 'rs', seed)
    rng = search_rng(seed)
    for index in rng.permutation(len(bench)):
        record = bench.records[int(index)]
        if not session.can_afford(record):
            break
        session.query(record)
    logging.debug("Random search issued %s queries at cost %s.",
                  len(session.trace.events), session.cost)
    return session.trace
