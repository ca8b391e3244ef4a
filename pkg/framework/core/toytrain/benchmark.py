"""Build tabular benchmarks by training every architecture of a toy space."""
import logging
from typing import Optional, Sequence
from framework.core.curves import ArchitectureRecord
from framework.core.curves import BenchmarkDataset
from framework.core.curves import BenchmarkMetadata
from framework.core.curves import save_benchmark
from framework.core.toytrain.data import SyntheticDataset
from framework.core.toytrain.network import ToyArchSpec
from framework.core.toytrain.trainer import SgdTrainer
from framework.core.toytrain.trainer import TrainConfig
from framework.core.toytrain.trainer import train
from framework.errors import InvalidInputError
from framework.errors import NumericalError
from framework.errors import TrainingRunError
from framework.utils.parallelutils import run_in_pool


def _train_task(task):
    """Train one (architecture, seed) pair; runs inside a worker process."""
    arch, data, cfg, seed = task
    try:
        return train(arch, data, cfg.with_seed(seed))
    except InvalidInputError as e:
        raise InvalidInputError("arch_id={}, seed={}: {}".format(
            arch.arch_id, seed, e)) from e
    except NumericalError as e:
        raise TrainingRunError("arch_id={}, seed={}: {}".format(
            arch.arch_id, seed, e)) from e


def build_toy_benchmark(space: Sequence[ToyArchSpec],
                        data: SyntheticDataset,
                        cfg: TrainConfig,
                        seeds: Sequence[int],
                        jobs: int = 1,
                        path=None,
                        name: str = 'toy',
                        notes: str = '') -> BenchmarkDataset:
    """Train every architecture with every seed and assemble a benchmark.

    Parameters
    ----------
    space: sequence of ToyArchSpec, required
        The architectures to train.
    data: SyntheticDataset, required
        The classification task.
    cfg: TrainConfig, required
        The training protocol; its seed is replaced by each of `seeds`.
    seeds: sequence of int, required
        The training seeds.
    jobs: int, optional
        The number of worker processes.
    path: str or Path, optional
        When provided, the benchmark is also written to this file.
    name: str, optional
        The name stored in the benchmark metadata.
    notes: str, optional
        The notes stored in the benchmark metadata.

    Returns
    -------
    benchmark: BenchmarkDataset
        One record per architecture, one curve per seed.
    """
    space = list(space)
    seeds = [int(seed) for seed in seeds]
    if len(space) == 0 or len(seeds) == 0:
        raise InvalidInputError("the space and the seeds must be non-empty")
    arch_ids = [arch.arch_id for arch in space]
    if len(set(arch_ids)) != len(arch_ids):
        raise InvalidInputError("architecture ids must be unique")

    logging.info("Training %s architectures with %s seeds.", len(space),
                 len(seeds))
    tasks = [(arch, data, cfg, seed) for arch in space for seed in seeds]
    curves = run_in_pool(_train_task,
                         tasks,
                         jobs=jobs,
                         description='training')
    curves_by_key = {(arch.arch_id, seed): curve
                     for (arch, _, _, seed), curve in zip(tasks, curves)}

    records = tuple(
        ArchitectureRecord(arch_id=arch.arch_id,
                           encoding=arch.encoding,
                           seeds={
                               seed: curves_by_key[(arch.arch_id, seed)]
                               for seed in seeds
                           }) for arch in space)
    metadata = BenchmarkMetadata(
        name=name,
        t_end=cfg.epochs,
        batches_per_epoch=SgdTrainer(cfg).batches_per_epoch(data.n_train),
        notes=notes)
    benchmark = BenchmarkDataset(records=records, metadata=metadata)
    if path is not None:
        save_benchmark(benchmark, path)
    return benchmark
