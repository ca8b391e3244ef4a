"""Directional experiments on the shipped 32-architecture toy benchmark.

Generating the benchmark takes minutes of CPU time, so these tests only run
with `pytest --run-slow`.
"""
from pathlib import Path
import numpy as np
import pytest
from framework.commands.gentoy import BENCHMARK_FILE
from framework.commands.gentoy import run_gen_toy
from framework.config import GenToyConfig
from framework.config import load_config
from framework.core.curves import epoch_sums
from framework.core.curves import load_benchmark
from framework.core.curves import mean_over_seeds
from framework.core.estimators import parse_estimator_spec
from framework.core.evaluation import rank_correlation
from framework.core.search.evaluation import parse_evaluator
from framework.core.search.evolution import regularized_evolution
from framework.core.search.randomsearch import random_search
from framework.core.stats import spearman

CONFIG_DIR = Path(__file__).resolve().parent.parent / 'configs'
SEARCH_SEEDS = range(20)

pytestmark = pytest.mark.slow


@pytest.fixture(scope='module')
def toy_benchmark(tmp_path_factory):
    """The benchmark of configs/gen-toy.json: 32 MLPs, 3 seeds, 40 epochs."""
    config = load_config(CONFIG_DIR / 'gen-toy.json', GenToyConfig)
    out_dir = tmp_path_factory.mktemp('gen-toy')
    run_gen_toy(config, out_dir, jobs=4)
    return load_benchmark(out_dir / BENCHMARK_FILE)


def mean_rho(bench, text):
    """Get the seed-averaged rank correlation of an estimator."""
    return rank_correlation(bench, parse_estimator_spec(text))[-1].rho


def final_best(trace):
    """Get the best true test accuracy found by a run."""
    return trace.events[-1].best_true_test_acc


class TestRankCorrelation:
    """Rank correlations at a quarter of the training budget."""

    def test_training_speed_ranks_early(self, toy_benchmark):
        assert len(toy_benchmark) == 32
        assert toy_benchmark.t_end == 40
        tse_ema = mean_rho(toy_benchmark, 'tse-ema@T=10')
        tse_ema_early = mean_rho(toy_benchmark, 'tse-ema@T=2')
        vacc_es = mean_rho(toy_benchmark, 'vacc-es@T=10')
        print("tse-ema@T=10 rho={:.3f} tse-ema@T=2 rho={:.3f} "
              "vacc-es@T=10 rho={:.3f}".format(tse_ema, tse_ema_early,
                                               vacc_es))
        assert tse_ema >= 0.3

    def test_final_training_loss_tracks_test_accuracy(self, toy_benchmark):
        final_losses = [
            epoch_sums(mean_over_seeds(r))[-1] for r in toy_benchmark.records
        ]
        test_accs = [r.mean_test_acc for r in toy_benchmark.records]
        rho = spearman(final_losses, test_accs)
        print("spearman(final training loss, test acc)={:.3f}".format(rho))
        assert rho < 0


class TestSearch:
    """Searches over the tabular toy benchmark."""

    def test_evolution_with_early_estimates_nears_the_optimum(
            self, toy_benchmark):
        optimum = max(r.mean_test_acc for r in toy_benchmark.records)
        ev = parse_evaluator('tse-ema@T=10', toy_benchmark.t_end)
        budget = 0.25 * len(toy_benchmark) * toy_benchmark.t_end
        bests = [
            final_best(
                regularized_evolution(toy_benchmark, ev, budget, 10, 3, seed))
            for seed in SEARCH_SEEDS
        ]
        print("optimum={:.4f} median={:.4f}".format(optimum,
                                                    np.median(bests)))
        assert np.median(bests) >= optimum - 0.01

    def test_evolution_matches_random_search(self, toy_benchmark):
        ev = parse_evaluator('gt', toy_benchmark.t_end)
        budget = 20 * ev.cost_per_query
        evolution = [
            final_best(
                regularized_evolution(toy_benchmark, ev, budget, 10, 3, seed))
            for seed in SEARCH_SEEDS
        ]
        baseline = [
            final_best(random_search(toy_benchmark, ev, budget, seed))
            for seed in SEARCH_SEEDS
        ]
        print("evolution median={:.4f} random median={:.4f}".format(
            np.median(evolution), np.median(baseline)))
        assert np.median(evolution) >= np.median(baseline)
