"""The `rankeval` command: rank correlation of estimators over a budget grid."""
import logging
from pathlib import Path
from typing import List
import numpy as np
from tqdm import tqdm
from framework.commands.manifest import RunManifest
from framework.config import RankEvalConfig
from framework.config import estimator_defaults
from framework.core.curves import BenchmarkDataset
from framework.core.curves import load_benchmark
from framework.core.estimators import EstimatorSpec
from framework.core.estimators import parse_estimator_spec
from framework.core.evaluation import population_scores
from framework.core.evaluation import rank_correlation
from framework.core.evaluation import topk_accuracy
from framework.errors import EstimatorUnavailableError
from framework.errors import InvalidInputError
from framework.utils.dataframeutils import build_data_frame
from framework.utils.dataframeutils import save_data_frame
from framework.utils.loggingutils import progress_disabled
from framework.utils.svgutils import LineChart

RHO_FILE = 'rankeval.csv'
SCORES_FILE = 'scores.csv'
TOPK_FILE = 'topk.csv'
CHART_FILE = 'rankeval.svg'
RHO_COLUMNS = ['estimator', 'T', 'rho', 'n', 'seed', 'status']
SCORE_COLUMNS = ['estimator', 'T', 'seed', 'arch_id', 'score', 'final_test_acc']
TOPK_COLUMNS = ['estimator', 'T', 'k', 'mean_final_acc']


def expand_grid(config: RankEvalConfig) -> List[EstimatorSpec]:
    """Combine the estimators of a config with its budgets.

    An estimator that sets its own T is evaluated at that budget only.
    Budgets shorter than the window E of an estimator are skipped.
    """
    defaults = estimator_defaults(config)
    specs = []
    for text in config.estimators:
        spec = parse_estimator_spec(text, defaults)
        if spec.T is not None:
            specs.append(spec)
            continue
        for T in config.budgets:
            try:
                specs.append(spec.with_budget(T))
            except InvalidInputError as e:
                logging.warning("Skipping %s at T=%s: %s", spec.label, T, e)
    return specs


def _unavailable_row(spec, n, status):
    return {
        'estimator': spec.family_label,
        'T': spec.T,
        'rho': float('nan'),
        'n': n,
        'seed': 'mean',
        'status': status
    }


def evaluate_grid(bench: BenchmarkDataset, specs, seeds=None, top_k=()):
    """Evaluate every spec of a grid; failing cells are marked and skipped.

    Returns
    -------
    rho_rows: list of dict
        The rank correlations, per seed and averaged, with their status.
    score_rows: list of dict
        The raw scores of the scalar estimators.
    topk_rows: list of dict
        The top-k test accuracies of the scalar estimators.
    """
    if seeds is None:
        seeds = bench.common_seeds()
    rho_rows, score_rows, topk_rows = [], [], []
    for spec in tqdm(specs, desc='rankeval', disable=progress_disabled()):
        if spec.T > bench.t_end:
            logging.warning("Skipping %s: T exceeds t_end=%s.", spec.label,
                            bench.t_end)
            rho_rows.append(_unavailable_row(spec, len(bench), 'unavailable'))
            continue
        try:
            reports = rank_correlation(bench, spec, seeds)
        except EstimatorUnavailableError as e:
            logging.warning("Estimator %s is unavailable: %s", spec.label, e)
            rho_rows.append(_unavailable_row(spec, len(bench), 'unavailable'))
            continue
        except InvalidInputError as e:
            logging.warning("Rank correlation of %s is undefined: %s",
                            spec.label, e)
            rho_rows.append(_unavailable_row(spec, len(bench), 'undefined'))
            continue
        rho_rows.extend(dict(r.to_row(), status='ok') for r in reports)
        if spec.is_vector:
            continue
        for seed in seeds:
            score_rows.extend({
                'estimator': spec.family_label,
                'T': spec.T,
                'seed': seed,
                'arch_id': a.arch_id,
                'score': a.score,
                'final_test_acc': a.final_test_acc
            } for a in population_scores(bench, spec, seed))
        for k in top_k:
            if k > len(bench):
                logging.warning("Skipping top-%s: the benchmark has %s records.",
                                k, len(bench))
                continue
            topk_rows.append({
                'estimator': spec.family_label,
                'T': spec.T,
                'k': k,
                'mean_final_acc': topk_accuracy(bench, spec, k, seeds)
            })
    return rho_rows, score_rows, topk_rows


def rank_correlation_chart(rho_frame) -> LineChart:
    """Plot the seed-averaged rank correlation against T, one line per estimator."""
    chart = LineChart("Rank correlation with final test accuracy",
                      "training budget T (epochs)", "Spearman rank correlation")
    means = rho_frame[(rho_frame.seed.astype(str) == 'mean') &
                      (rho_frame.status == 'ok')]
    for name, group in means.groupby('estimator', sort=False):
        group = group.sort_values('T')
        chart.add_series(name, group['T'].to_numpy(dtype=np.float64),
                         group.rho.to_numpy(dtype=np.float64))
    return chart


def run_rankeval(config: RankEvalConfig, out_dir, svg: bool = False) -> RunManifest:
    """Evaluate the estimator grid of a config and write the reports.

    Parameters
    ----------
    config: RankEvalConfig, required
        The configuration of the command.
    out_dir: str or Path, required
        The output directory.
    svg: bool, optional
        When True, also write the rank correlation chart.

    Returns
    -------
    manifest: RunManifest
        The manifest of the run, already saved.
    """
    out_dir = Path(out_dir)
    manifest = RunManifest(command='rankeval',
                           config=config.snapshot(),
                           seeds=list(config.seeds or []))
    bench = load_benchmark(config.benchmark)
    specs = expand_grid(config)
    logging.info("Evaluating %s estimator cells on %s architectures.",
                 len(specs), len(bench))
    rho_rows, score_rows, topk_rows = evaluate_grid(bench, specs,
                                                    config.seeds,
                                                    config.top_k)
    rho_frame = build_data_frame(rho_rows, RHO_COLUMNS)
    outputs = [out_dir / RHO_FILE, out_dir / SCORES_FILE]
    save_data_frame(rho_frame, outputs[0])
    save_data_frame(build_data_frame(score_rows, SCORE_COLUMNS), outputs[1])
    if config.top_k:
        outputs.append(out_dir / TOPK_FILE)
        save_data_frame(build_data_frame(topk_rows, TOPK_COLUMNS), outputs[-1])
    if svg:
        outputs.append(out_dir / CHART_FILE)
        rank_correlation_chart(rho_frame).save(outputs[-1])
    for path in outputs:
        logging.info("Saved %s.", path)
    manifest.add_artifacts(out_dir, outputs)
    manifest.save(out_dir)
    return manifest
