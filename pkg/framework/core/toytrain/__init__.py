"""Ground-truth learning curves from tiny networks trained on synthetic data."""
from framework.core.toytrain.benchmark import build_toy_benchmark
from framework.core.toytrain.data import SyntheticDataset
from framework.core.toytrain.data import make_synthetic_dataset
from framework.core.toytrain.network import Mlp
from framework.core.toytrain.network import ToyArchSpec
from framework.core.toytrain.network import enumerate_toy_space
from framework.core.toytrain.trainer import SgdTrainer
from framework.core.toytrain.trainer import TrainConfig
from framework.core.toytrain.trainer import train

__all__ = [
    'Mlp', 'SgdTrainer', 'SyntheticDataset', 'ToyArchSpec', 'TrainConfig',
    'build_toy_benchmark', 'enumerate_toy_space', 'make_synthetic_dataset',
    'train'
]
