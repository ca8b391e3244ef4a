"""The `gen-toy` command: generate the toy tabular benchmark."""
import logging
from pathlib import Path
from framework.commands.manifest import RunManifest
from framework.config import GenToyConfig
from framework.core.toytrain.benchmark import build_toy_benchmark
from framework.core.toytrain.data import make_synthetic_dataset
from framework.core.toytrain.network import enumerate_toy_space

BENCHMARK_FILE = 'benchmark.jsonl'


def run_gen_toy(config: GenToyConfig, out_dir, jobs: int = 1) -> RunManifest:
    """Train every architecture of the toy space and write the benchmark.

    Parameters
    ----------
    config: GenToyConfig, required
        The configuration of the command.
    out_dir: str or Path, required
        The output directory.
    jobs: int, optional
        The number of worker processes.

    Returns
    -------
    manifest: RunManifest
        The manifest of the run, already saved.
    """
    out_dir = Path(out_dir)
    manifest = RunManifest(command='gen-toy',
                           config=config.snapshot(),
                           seeds=[config.seed] + list(config.seeds))
    dataset = config.dataset
    data = make_synthetic_dataset(dim=dataset.dim,
                                  classes=dataset.classes,
                                  n_train=dataset.n_train,
                                  n_val=dataset.n_val,
                                  n_test=dataset.n_test,
                                  difficulty=dataset.difficulty,
                                  seed=config.seed,
                                  clusters_per_class=dataset.clusters_per_class)
    space = enumerate_toy_space(config.space.widths, config.space.depths,
                                config.space.activations)
    logging.info("Generating benchmark %s with %s architectures.", config.name,
                 len(space))
    path = out_dir / BENCHMARK_FILE
    build_toy_benchmark(space,
                        data,
                        config.training,
                        config.seeds,
                        jobs=jobs,
                        path=path,
                        name=config.name,
                        notes=config.notes)
    logging.info("Benchmark saved to %s.", path)
    manifest.add_artifacts(out_dir, [path])
    manifest.save(out_dir)
    return manifest
