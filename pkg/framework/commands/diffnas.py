"""The `diffnas` command: DARTS and DARTS-TSE on the toy cell."""
import logging
from pathlib import Path
import pandas as pd
from framework.commands.manifest import RunManifest
from framework.config import DiffNasCommandConfig
from framework.core.diffnas.darts import TRACE_COLUMNS
from framework.core.diffnas.darts import DiffNasConfig
from framework.core.diffnas.darts import build_cell
from framework.core.diffnas.darts import darts_run
from framework.core.diffnas.darts import darts_tse_run
from framework.core.toytrain.data import make_synthetic_dataset
from framework.utils.dataframeutils import build_data_frame
from framework.utils.dataframeutils import save_data_frame
from framework.utils.parallelutils import run_in_pool
from framework.utils.svgutils import LineChart

REPORT_FILE = 'diffnas.csv'
CHART_FILE = 'diffnas.svg'
TRACES_DIR = 'traces'
REPORT_COLUMNS = ['seed'] + TRACE_COLUMNS

METHODS = {'darts': darts_run, 'darts-tse': darts_tse_run}


def _diffnas_task(task):
    method, data, cfg = task
    return METHODS[method](build_cell(data, cfg), data, cfg)


def diffnas_chart(report) -> LineChart:
    """Plot the retrained test accuracy of derived cells against w-updates."""
    chart = LineChart("Derived architectures", "weight updates (minibatches)",
                      "retrained test accuracy")
    for (method, seed), group in report.groupby(['method', 'seed'], sort=False):
        chart.add_series("{} (seed {})".format(method, seed),
                         group.w_updates.to_numpy(dtype=float),
                         group.retrain_test_acc.to_numpy(dtype=float))
    return chart


def run_diffnas(config: DiffNasCommandConfig,
                out_dir,
                jobs: int = 1,
                svg: bool = False) -> RunManifest:
    """Run every method of a config with every seed and write the traces.

    Parameters
    ----------
    config: DiffNasCommandConfig, required
        The configuration of the command.
    out_dir: str or Path, required
        The output directory.
    jobs: int, optional
        The number of worker processes.
    svg: bool, optional
        When True, also write the chart of the derived architectures.

    Returns
    -------
    manifest: RunManifest
        The manifest of the run, already saved.
    """
    out_dir = Path(out_dir)
    manifest = RunManifest(command='diffnas',
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
    tasks = [(method, data,
              DiffNasConfig(**dict(config.search.dict(), seed=seed)))
             for method in config.methods for seed in config.seeds]
    logging.info("Running %s differentiable searches.", len(tasks))
    traces = run_in_pool(_diffnas_task, tasks, jobs=jobs, description='diffnas')

    outputs = [out_dir / REPORT_FILE]
    frames = []
    for trace in traces:
        path = out_dir / TRACES_DIR / "{}-seed{}.json".format(
            trace.method, trace.seed)
        trace.save(path)
        outputs.append(path)
        frame = trace.to_data_frame()
        frame.insert(0, 'seed', trace.seed)
        frames.append(frame)
        logging.info("%s (seed %s): final architecture %s.", trace.method,
                     trace.seed, trace.events[-1].derived_arch_id
                     if trace.events else None)
    report = pd.concat(frames, ignore_index=True) if frames else \
        build_data_frame([], REPORT_COLUMNS)
    save_data_frame(report[REPORT_COLUMNS], outputs[0])
    if svg:
        outputs.append(out_dir / CHART_FILE)
        diffnas_chart(report).save(outputs[-1])
    manifest.add_artifacts(out_dir, outputs)
    manifest.save(out_dir)
    return manifest
