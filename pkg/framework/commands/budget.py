"""The `budget` command: effective training budget over random architecture samples."""
import logging
from pathlib import Path
from typing import Sequence
import numpy as np
from framework.commands.manifest import RunManifest
from framework.config import BudgetConfig
from framework.core.curves import BenchmarkDataset
from framework.core.curves import load_benchmark
from framework.core.curves import mean_over_seeds
from framework.core.estimators import effective_budget
from framework.core.stats import aggregate
from framework.errors import InvalidInputError
from framework.utils.dataframeutils import build_data_frame
from framework.utils.dataframeutils import save_data_frame
from framework.utils.seedutils import derive_rng

BUDGET_FILE = 'budget.csv'
BUDGET_COLUMNS = [
    'sample_size', 'repeats', 'threshold', 'mean_T', 'stderr_T', 'min_T',
    'max_T'
]


def sample_budgets(bench: BenchmarkDataset, sample_size: int, repeats: int,
                   threshold: float, seed: int) -> np.ndarray:
    """Compute the effective budget of random samples of architectures.

    Parameters
    ----------
    bench: BenchmarkDataset, required
        The population.
    sample_size: int, required
        The number of architectures drawn without replacement per repeat.
    repeats: int, required
        The number of samples.
    threshold: float, required
        The overfitting threshold.
    seed: int, required
        The master seed.

    Returns
    -------
    budgets: numpy.ndarray
        The effective budget of every sample, in epochs.
    """
    if not 1 <= sample_size <= len(bench):
        raise InvalidInputError(
            "sample size {} must be in [1, {}]".format(sample_size, len(bench)))
    curves = [mean_over_seeds(record) for record in bench]
    rng = derive_rng(seed, 'budget', sample_size)
    budgets = np.empty(repeats, dtype=np.int64)
    for repeat in range(repeats):
        chosen = rng.choice(len(bench), size=sample_size, replace=False)
        budgets[repeat] = effective_budget([curves[i] for i in chosen],
                                           threshold=threshold,
                                           t_end=bench.t_end)
    return budgets


def budget_table(bench: BenchmarkDataset, sample_sizes: Sequence[int],
                 repeats: int, threshold: float, seed: int):
    """Summarize the effective budget for every sample size."""
    rows = []
    for sample_size in sample_sizes:
        budgets = sample_budgets(bench, sample_size, repeats, threshold, seed)
        mean, stderr = aggregate(budgets)
        logging.info("N_s=%s: effective budget %.2f +/- %.2f epochs.",
                     sample_size, mean, stderr)
        rows.append({
            'sample_size': sample_size,
            'repeats': repeats,
            'threshold': threshold,
            'mean_T': mean,
            'stderr_T': stderr,
            'min_T': int(budgets.min()),
            'max_T': int(budgets.max())
        })
    return build_data_frame(rows, BUDGET_COLUMNS)


def run_budget(config: BudgetConfig, out_dir) -> RunManifest:
    """Compute the effective budget table of a config and write it.

    Parameters
    ----------
    config: BudgetConfig, required
        The configuration of the command.
    out_dir: str or Path, required
        The output directory.

    Returns
    -------
    manifest: RunManifest
        The manifest of the run, already saved.
    """
    out_dir = Path(out_dir)
    manifest = RunManifest(command='budget',
                           config=config.snapshot(),
                           seeds=[config.seed])
    bench = load_benchmark(config.benchmark)
    table = budget_table(bench, config.sample_sizes, config.repeats,
                         config.threshold, config.seed)
    path = out_dir / BUDGET_FILE
    save_data_frame(table, path)
    logging.info("Saved %s.", path)
    manifest.add_artifacts(out_dir, [path])
    manifest.save(out_dir)
    return manifest
