"""Regularized (aging) evolution over the encodings of a tabular benchmark."""
import collections
import logging
from typing import Optional
from framework.core.curves import ArchitectureRecord
from framework.core.curves import BenchmarkDataset
from framework.core.search.evaluation import Evaluator
from framework.core.search.evaluation import SearchSession
from framework.core.search.evaluation import SearchTrace
from framework.core.search.randomsearch import search_rng
from framework.core.search.space import SearchSpace
from framework.errors import InvalidInputError

Member = collections.namedtuple('Member', ['record', 'score', 'birth'])


def propose_mutation(space: SearchSpace, parent: ArchitectureRecord,
                     session: SearchSession, rng) -> ArchitectureRecord:
    """Mutate one position of the parent's encoding.

    Positions are visited in uniformly random order and, within a position,
    the other values in uniformly random order; the first child present in
    the benchmark and not yet queried is returned. When every child was
    already queried an existing one is resampled; when the parent has no
    child in the benchmark a random architecture is drawn.

    Parameters
    ----------
    space: SearchSpace, required
        The space of the benchmark.
    parent: ArchitectureRecord, required
        The architecture to mutate.
    session: SearchSession, required
        The session, used to know which architectures were queried.
    rng: numpy.random.Generator, required
        The random generator.

    Returns
    -------
    child: ArchitectureRecord
        The mutated architecture.
    """
    encoding = space.pad(parent.encoding)
    fallback: Optional[ArchitectureRecord] = None
    for position in rng.permutation(space.length):
        domain = [v for v in space.domains[position] if v != encoding[position]]
        for value_index in rng.permutation(len(domain)):
            child = list(encoding)
            child[position] = domain[value_index]
            record = space.lookup(child)
            if record is None:
                continue
            if not session.is_queried(record):
                return record
            if fallback is None:
                fallback = record
    if fallback is not None:
        logging.info(
            "Every mutation of %s was already queried; resampling %s.",
            parent.arch_id, fallback.arch_id)
        return fallback
    record = space.random_record(rng)
    logging.info("%s has no mutation in the benchmark; drawing %s.",
                 parent.arch_id, record.arch_id)
    return record


def regularized_evolution(bench: BenchmarkDataset,
                          ev: Evaluator,
                          budget: float,
                          pop_size: int,
                          sample_size: int,
                          seed: int,
                          max_steps: Optional[int] = None) -> SearchTrace:
    """Run regularized evolution: mutate the best of a sample, evict the oldest.

    Parameters
    ----------
    bench: BenchmarkDataset, required
        The tabular benchmark.
    ev: Evaluator, required
        The evaluator scoring queries.
    budget: float, required
        The total simulated cost; at least `pop_size` queries.
    pop_size: int, required
        The size P of the population.
    sample_size: int, required
        The number S of members sampled to select a parent; S <= P.
    seed: int, required
        The seed of the run.
    max_steps: int, optional
        The maximum number of evolution steps; defaults to ten times the
        number of queries the budget allows. Bounds runs whose duplicate
        queries are free.

    Returns
    -------
    trace: SearchTrace
        The queries of the run.
    """
    if pop_size < 1 or not 1 <= sample_size <= pop_size:
        raise InvalidInputError(
            "need 1 <= sample_size <= pop_size, got P={}, S={}".format(
                pop_size, sample_size))
    if budget < pop_size * ev.cost_per_query:
        raise InvalidInputError(
            "budget {} cannot pay for the initial population of {} ({} each)".
            format(budget, pop_size, ev.cost_per_query))
    session = SearchSession(bench, ev, budget, 're', seed)
    space = SearchSpace(bench)
    rng = search_rng(seed)
    if max_steps is None:
        max_steps = 10 * int(budget // ev.cost_per_query)

    population = collections.deque()
    order = rng.permutation(len(bench))
    for member_index in range(pop_size):
        record = bench.records[int(order[member_index % len(bench)])]
        value = session.query(record)
        population.append(Member(record, value, member_index))

    for step in range(pop_size, pop_size + max_steps):
        if session.exhausted and not ev.charges_duplicates:
            logging.info("Every architecture was queried; stopping evolution.")
            break
        sample = [population[int(i)] for i in
                  rng.choice(pop_size, size=sample_size, replace=False)]
        parent = sample[0]
        for member in sample[1:]:
            if ev.orientation.is_better(member.score, parent.score) or (
                    member.score == parent.score and
                    member.birth > parent.birth):
                parent = member
        child = propose_mutation(space, parent.record, session, rng)
        if not session.can_afford(child):
            break
        value = session.query(child)
        population.append(Member(child, value, step))
        population.popleft()
    else:
        logging.warning("Evolution stopped after %s steps.", max_steps)
    return session.trace
