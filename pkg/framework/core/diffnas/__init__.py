"""Toy differentiable architecture search (DARTS and DARTS-TSE)."""
from framework.core.diffnas.cell import OPERATIONS
from framework.core.diffnas.cell import DerivedCell
from framework.core.diffnas.cell import DerivedCellNetwork
from framework.core.diffnas.cell import ToyCell
from framework.core.diffnas.cell import derive_architecture
from framework.core.diffnas.cell import mixed_op_forward
from framework.core.diffnas.darts import DiffNasConfig
from framework.core.diffnas.darts import DiffNasTrace
from framework.core.diffnas.darts import build_cell
from framework.core.diffnas.darts import darts_run
from framework.core.diffnas.darts import darts_step
from framework.core.diffnas.darts import darts_tse_run

__all__ = [
    'OPERATIONS', 'DerivedCell', 'DerivedCellNetwork', 'ToyCell',
    'derive_architecture', 'mixed_op_forward', 'DiffNasConfig',
    'DiffNasTrace', 'build_cell', 'darts_run', 'darts_step', 'darts_tse_run'
]
