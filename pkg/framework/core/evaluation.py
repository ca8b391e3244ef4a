"""Rank-correlation protocol: how well estimator scores rank a population."""
import logging
from typing import List, Optional, Sequence
import numpy as np
from framework.core.curves import BenchmarkDataset
from framework.core.estimators import EstimatorSpec
from framework.core.estimators import score
from framework.core.stats import RankCorrelationReport
from framework.core.stats import ScoredArchitecture
from framework.core.stats import spearman
from framework.core.stats import topk_mean_final_acc
from framework.errors import InvalidInputError


def population_scores(bench: BenchmarkDataset, spec: EstimatorSpec,
                      seed: int) -> List[ScoredArchitecture]:
    """Score every architecture of a benchmark using the curve of one seed.

    Parameters
    ----------
    bench: BenchmarkDataset, required
        The population.
    spec: EstimatorSpec, required
        A scalar estimator with its budget set.
    seed: int, required
        The training seed whose curves are scored.

    Returns
    -------
    population: list of ScoredArchitecture
        The raw scores and test accuracies, in benchmark order.
    """
    if spec.is_vector:
        raise InvalidInputError("{} yields one score per minibatch".format(
            spec.label))
    population = []
    for record in bench:
        curve = record.seeds[seed]
        population.append(
            ScoredArchitecture(record.arch_id, score(spec, curve),
                               curve.final_test_acc))
    return population


def tlmini_rank_correlation(score_matrix: np.ndarray,
                            test_accs: Sequence[float]) -> float:
    """Average the rank correlation of each minibatch index with test accuracy.

    Parameters
    ----------
    score_matrix: array of shape (population, B), required
        The minibatch losses of one epoch for every architecture.
    test_accs: sequence of float, required
        The test accuracy of every architecture.

    Returns
    -------
    rho: float
        The mean raw Spearman correlation over minibatch indices whose losses
        are not constant across the population.
    """
    score_matrix = np.asarray(score_matrix, dtype=np.float64)
    correlations = []
    for index in range(score_matrix.shape[1]):
        column = score_matrix[:, index]
        if np.all(column == column[0]):
            logging.debug("Skipping constant minibatch index %s.", index)
            continue
        correlations.append(spearman(column, test_accs))
    if len(correlations) == 0:
        raise InvalidInputError(
            "every minibatch index has constant losses across the population")
    return float(np.mean(correlations))


def seed_rank_correlation(bench: BenchmarkDataset, spec: EstimatorSpec,
                          seed: int) -> RankCorrelationReport:
    """Compute the oriented rank correlation of an estimator for one seed.

    Parameters
    ----------
    bench: BenchmarkDataset, required
        The population.
    spec: EstimatorSpec, required
        The estimator with its budget set.
    seed: int, required
        The training seed.

    Returns
    -------
    report: RankCorrelationReport
        The report; rho > 0 means agreement with the test-accuracy ranking.
    """
    test_accs = [record.seeds[seed].final_test_acc for record in bench]
    if spec.is_vector:
        matrix = np.stack([score(spec, record.seeds[seed]) for record in bench])
        rho = tlmini_rank_correlation(matrix, test_accs)
    else:
        population = population_scores(bench, spec, seed)
        rho = spearman([a.score for a in population], test_accs)
    return RankCorrelationReport(budget_T=spec.T,
                                 estimator_name=spec.family_label,
                                 rho=spec.orientation.sign * rho,
                                 n=len(bench),
                                 mean_over_seeds=False,
                                 seed=seed)


def rank_correlation(
        bench: BenchmarkDataset,
        spec: EstimatorSpec,
        seeds: Optional[Sequence[int]] = None) -> List[RankCorrelationReport]:
    """Compute per-seed rank correlations and their mean over seeds.

    Parameters
    ----------
    bench: BenchmarkDataset, required
        The population.
    spec: EstimatorSpec, required
        The estimator with its budget set.
    seeds: sequence of int, optional
        The seeds to evaluate; defaults to the seeds common to every record.

    Returns
    -------
    reports: list of RankCorrelationReport
        One report per seed followed by the seed-averaged report.
    """
    if seeds is None:
        seeds = bench.common_seeds()
    if len(seeds) == 0:
        raise InvalidInputError("no seed is shared by every record")
    reports = [seed_rank_correlation(bench, spec, seed) for seed in seeds]
    reports.append(
        RankCorrelationReport(budget_T=spec.T,
                              estimator_name=spec.family_label,
                              rho=float(np.mean([r.rho for r in reports])),
                              n=len(bench),
                              mean_over_seeds=True))
    return reports


def topk_accuracy(bench: BenchmarkDataset,
                  spec: EstimatorSpec,
                  k: int,
                  seeds: Optional[Sequence[int]] = None) -> float:
    """Average over seeds the mean test accuracy of the k best-scored architectures.

    Parameters
    ----------
    bench: BenchmarkDataset, required
        The population.
    spec: EstimatorSpec, required
        A scalar estimator with its budget set.
    k: int, required
        The number of architectures selected per seed.
    seeds: sequence of int, optional
        The seeds to evaluate; defaults to the seeds common to every record.

    Returns
    -------
    accuracy: float
        The seed-averaged top-k test accuracy.
    """
    if seeds is None:
        seeds = bench.common_seeds()
    return float(
        np.mean([
            topk_mean_final_acc(population_scores(bench, spec, seed), k,
                                spec.orientation) for seed in seeds
        ]))
