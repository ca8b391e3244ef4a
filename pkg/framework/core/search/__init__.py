"""Query-based architecture search over tabular benchmarks."""
from framework.core.search.comparison import STRATEGIES
from framework.core.search.comparison import ComparisonResult
from framework.core.search.comparison import StrategyOptions
from framework.core.search.comparison import compare_strategies
from framework.core.search.comparison import cost_to_reach
from framework.core.search.comparison import resample_trace
from framework.core.search.comparison import run_strategy
from framework.core.search.evaluation import Evaluator
from framework.core.search.evaluation import SearchEvent
from framework.core.search.evaluation import SearchTrace
from framework.core.search.evaluation import parse_evaluator
from framework.core.search.evolution import regularized_evolution
from framework.core.search.randomsearch import random_search
from framework.core.search.space import SearchSpace
from framework.core.search.space import mutate_encoding
from framework.core.search.tpe import tpe_search

__all__ = [
    'STRATEGIES', 'ComparisonResult', 'StrategyOptions', 'compare_strategies',
    'cost_to_reach', 'resample_trace', 'run_strategy', 'Evaluator',
    'SearchEvent', 'SearchTrace', 'parse_evaluator', 'regularized_evolution',
    'random_search', 'SearchSpace', 'mutate_encoding', 'tpe_search'
]
