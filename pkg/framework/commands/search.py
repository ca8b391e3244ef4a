"""The `search` command: compare search strategies and evaluators on a benchmark."""
import logging
import re
from pathlib import Path
from framework.commands.manifest import RunManifest
from framework.config import SearchConfig
from framework.core.curves import load_benchmark
from framework.core.search.comparison import StrategyOptions
from framework.core.search.comparison import check_strategies
from framework.core.search.comparison import compare_strategies
from framework.core.search.evaluation import parse_evaluator
from framework.utils.dataframeutils import build_data_frame
from framework.utils.dataframeutils import save_data_frame
from framework.utils.svgutils import LineChart

REPORT_FILE = 'search.csv'
SUMMARY_FILE = 'search-summary.csv'
CHART_FILE = 'search.svg'
TRACES_DIR = 'traces'
SUMMARY_COLUMNS = [
    'strategy', 'evaluator', 'seed_index', 'seed', 'queries',
    'unique_architectures', 'total_cost', 'best_true_test_acc',
    'incumbent_arch_id', 'incumbent_true_test_acc'
]


def trace_file_name(strategy: str, evaluator: str, index: int) -> str:
    """Get a file-system safe name for the trace of one run."""
    label = re.sub(r'[^A-Za-z0-9.-]+', '_', evaluator).strip('_')
    return "{}-{}-{:03d}.json".format(strategy, label, index)


def search_chart(report) -> LineChart:
    """Plot the mean best test accuracy against cost, one line per cell."""
    chart = LineChart("Search performance", "cost (epochs)",
                      "best test accuracy")
    for (strategy, evaluator), group in report.groupby(
            ['strategy', 'evaluator'], sort=False):
        chart.add_series("{} / {}".format(strategy, evaluator),
                         group.cost.to_numpy(), group.mean_acc.to_numpy())
    return chart


def run_search(config: SearchConfig,
               out_dir,
               jobs: int = 1,
               svg: bool = False) -> RunManifest:
    """Run the strategy and evaluator grid of a config and write its reports.

    Parameters
    ----------
    config: SearchConfig, required
        The configuration of the command.
    out_dir: str or Path, required
        The output directory.
    jobs: int, optional
        The number of worker processes.
    svg: bool, optional
        When True, also write the chart of the report.

    Returns
    -------
    manifest: RunManifest
        The manifest of the run, already saved.
    """
    out_dir = Path(out_dir)
    strategies = check_strategies(config.strategies)
    manifest = RunManifest(command='search',
                           config=config.snapshot(),
                           seeds=[config.seed])
    bench = load_benchmark(config.benchmark)
    evaluators = [parse_evaluator(text, bench.t_end) for text in config.evaluators]
    options = StrategyOptions(pop_size=config.re.pop_size,
                              sample_size=config.re.sample_size,
                              gamma_split=config.tpe.gamma_split,
                              n_init=config.tpe.n_init,
                              n_candidates=config.tpe.n_candidates)
    result = compare_strategies(bench,
                                evaluators,
                                strategies,
                                config.budget,
                                config.n_seeds,
                                grid_points=config.grid_points,
                                master_seed=config.seed,
                                jobs=jobs,
                                options=options)
    manifest.seeds.extend(sorted({t.seed for t in result.traces.values()}))

    outputs = [out_dir / REPORT_FILE, out_dir / SUMMARY_FILE]
    save_data_frame(result.report, outputs[0])
    summaries = []
    for (strategy, evaluator, index), trace in result.traces.items():
        path = out_dir / TRACES_DIR / trace_file_name(strategy, evaluator,
                                                      index)
        trace.save(path)
        outputs.append(path)
        summaries.append(
            dict(trace.summary,
                 strategy=strategy,
                 evaluator=evaluator,
                 seed_index=index,
                 seed=trace.seed))
    save_data_frame(build_data_frame(summaries, SUMMARY_COLUMNS), outputs[1])
    if svg:
        outputs.append(out_dir / CHART_FILE)
        search_chart(result.report).save(outputs[-1])
    logging.info("Saved the report and %s traces to %s.", len(result.traces),
                 out_dir)
    manifest.add_artifacts(out_dir, outputs)
    manifest.save(out_dir)
    return manifest
