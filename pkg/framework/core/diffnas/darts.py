"""First-order DARTS and its training-speed variant on the toy cell."""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Tuple
import numpy as np
from pydantic import BaseModel, Extra, confloat, conint
from tqdm import tqdm
from framework.core.diffnas.cell import DEFAULT_MENU
from framework.core.diffnas.cell import DerivedCell
from framework.core.diffnas.cell import DerivedCellNetwork
from framework.core.diffnas.cell import ToyCell
from framework.core.diffnas.cell import check_menu
from framework.core.diffnas.cell import derive_architecture
from framework.core.toytrain.data import SyntheticDataset
from framework.core.toytrain.trainer import SgdTrainer
from framework.core.toytrain.trainer import TrainConfig
from framework.errors import InvalidInputError
from framework.utils.dataframeutils import build_data_frame
from framework.utils.fileutils import load_json
from framework.utils.fileutils import save_json
from framework.utils.loggingutils import progress_disabled
from framework.utils.seedutils import derive_rng

DEFAULT_K = 100
TRACE_COLUMNS = [
    'method', 'step', 'alpha_updates', 'w_updates', 'derived_arch_id',
    'derived_encoding', 'retrain_test_acc'
]


class DiffNasConfig(BaseModel):
    """Settings of a differentiable search run on the toy cell."""

    epochs: conint(ge=1)
    batch_size: conint(ge=1)
    lr_w: confloat(gt=0)
    lr_alpha: confloat(gt=0)
    K: conint(ge=1) = DEFAULT_K
    nodes: conint(ge=1) = 3
    hidden: conint(ge=1) = 8
    menu: Tuple[str, ...] = DEFAULT_MENU
    seed: conint(ge=0) = 0
    retrain: Optional[TrainConfig] = None

    class Config:
        extra = Extra.forbid
        allow_mutation = False

    def batches_per_epoch(self, n_train: int) -> int:
        """Get the number B of minibatches per epoch; the remainder is dropped."""
        batches = n_train // self.batch_size
        if batches < 1:
            raise InvalidInputError(
                "batch size {} exceeds the {} training samples".format(
                    self.batch_size, n_train))
        return batches


def build_cell(data: SyntheticDataset, cfg: DiffNasConfig) -> ToyCell:
    """Create the initial supernetwork cell of a run."""
    return ToyCell(data.dim,
                   data.classes,
                   derive_rng(cfg.seed, 'cell'),
                   nodes=cfg.nodes,
                   hidden=cfg.hidden,
                   menu=check_menu(cfg.menu))


def _minibatches(seed: int, component: str, n_samples: int, batch_size: int,
                 epoch: int) -> Iterator[np.ndarray]:
    """Yield the drop-last minibatch indices of one epoch."""
    order = derive_rng(seed, component, epoch).permutation(n_samples)
    for batch in range(n_samples // batch_size):
        yield order[batch * batch_size:(batch + 1) * batch_size]


def darts_step(cell: ToyCell, train_batch, val_batch, lr_w: float,
               lr_alpha: float) -> ToyCell:
    """Update alpha on a validation batch, then w on a training batch.

    Parameters
    ----------
    cell: ToyCell, required
        The cell, updated in place.
    train_batch: tuple of (x, y), required
        The training minibatch.
    val_batch: tuple of (x, y), required
        The validation minibatch.
    lr_w: float, required
        The learning rate of the weights.
    lr_alpha: float, required
        The learning rate of the architecture parameters.

    Returns
    -------
    cell: ToyCell
        The updated cell.
    """
    _, _, alpha_gradient = cell.loss_and_gradients(*val_batch)
    cell.update_alphas(alpha_gradient, lr_alpha)
    _, weight_gradients, _ = cell.loss_and_gradients(*train_batch)
    cell.update_weights(weight_gradients, lr_w)
    return cell


@dataclass(frozen=True)
class DiffNasEvent:
    """The derived architecture after one outer step of a search."""

    step: int
    alpha_updates: int
    w_updates: int
    derived_arch_id: str
    derived_encoding: Tuple[int, ...]
    retrain_test_acc: Optional[float]

    def to_dict(self) -> dict:
        """Convert the event into its JSON representation."""
        return {
            'step': self.step,
            'alpha_updates': self.alpha_updates,
            'w_updates': self.w_updates,
            'derived_arch_id': self.derived_arch_id,
            'derived_encoding': list(self.derived_encoding),
            'retrain_test_acc': self.retrain_test_acc
        }


@dataclass
class DiffNasTrace:
    """The outer steps of a DARTS or DARTS-TSE run."""

    method: str
    seed: int
    events: List[DiffNasEvent] = field(default_factory=list)
    alpha_updates: int = 0
    w_updates: int = 0
    final_alphas: Optional[np.ndarray] = None
    last_accumulator: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        """Convert the trace into its JSON representation."""
        return {
            'method': self.method,
            'seed': self.seed,
            'alpha_updates': self.alpha_updates,
            'w_updates': self.w_updates,
            'final_alphas': None if self.final_alphas is None else
            self.final_alphas.tolist(),
            'events': [e.to_dict() for e in self.events]
        }

    def to_data_frame(self):
        """Convert the events into rows with the columns `TRACE_COLUMNS`."""
        rows = [
            dict(e.to_dict(),
                 method=self.method,
                 derived_encoding=" ".join(str(i) for i in e.derived_encoding))
            for e in self.events
        ]
        return build_data_frame(rows, TRACE_COLUMNS)

    def save(self, file_name):
        """Save the trace into a JSON file."""
        save_json(self.to_dict(), file_name)

    @classmethod
    def load(cls, file_name) -> 'DiffNasTrace':
        """Load a trace from a JSON file."""
        data = load_json(file_name)
        events = [
            DiffNasEvent(**dict(e, derived_encoding=tuple(e['derived_encoding'])))
            for e in data['events']
        ]
        alphas = data.get('final_alphas')
        return cls(method=data['method'],
                   seed=data['seed'],
                   events=events,
                   alpha_updates=data['alpha_updates'],
                   w_updates=data['w_updates'],
                   final_alphas=None if alphas is None else np.array(alphas))


class RetrainEvaluator:
    """Retrain derived cells from scratch and cache their test accuracy by encoding."""

    def __init__(self, data: SyntheticDataset, cfg: DiffNasConfig):
        """Create the evaluator; nothing is retrained when `cfg.retrain` is None."""
        self.data = data
        self.cfg = cfg
        self.__cache: Dict[Tuple[int, ...], float] = {}

    def __call__(self, derived: DerivedCell) -> Optional[float]:
        """Get the test accuracy of a derived cell after retraining."""
        retrain = self.cfg.retrain
        if retrain is None:
            return None
        if derived.encoding not in self.__cache:
            network = DerivedCellNetwork(derived, self.data.dim,
                                         self.data.classes,
                                         derive_rng(retrain.seed, 'init'),
                                         hidden=self.cfg.hidden)
            curve = SgdTrainer(retrain).fit(network, self.data)
            self.__cache[derived.encoding] = float(curve.final_test_acc)
            logging.debug("Retrained %s: test accuracy %.4f.", derived.arch_id,
                          curve.final_test_acc)
        return self.__cache[derived.encoding]


def _record(trace, step, cell, evaluate):
    derived = derive_architecture(cell.alphas, cell.menu)
    trace.events.append(
        DiffNasEvent(step=step,
                     alpha_updates=trace.alpha_updates,
                     w_updates=trace.w_updates,
                     derived_arch_id=derived.arch_id,
                     derived_encoding=derived.encoding,
                     retrain_test_acc=evaluate(derived)))


def darts_run(cell: ToyCell,
              data: SyntheticDataset,
              cfg: DiffNasConfig,
              after_step: Optional[Callable[[ToyCell], None]] = None
              ) -> DiffNasTrace:
    """Run first-order DARTS: one alpha and one w update per minibatch.

    The derived architecture is recorded after every epoch.

    Parameters
    ----------
    cell: ToyCell, required
        The cell, updated in place.
    data: SyntheticDataset, required
        The task; alpha follows the validation split, w the training split.
    cfg: DiffNasConfig, required
        The settings of the run.
    after_step: callable, optional
        Called with the cell after every update.

    Returns
    -------
    trace: DiffNasTrace
        The derived architectures over the epochs.
    """
    batches = cfg.batches_per_epoch(data.n_train)
    val_batch_size = min(cfg.batch_size, data.x_val.shape[0])
    evaluate = RetrainEvaluator(data, cfg)
    trace = DiffNasTrace(method='darts', seed=cfg.seed)
    for epoch in tqdm(range(1, cfg.epochs + 1),
                      desc='darts',
                      disable=progress_disabled()):
        val_batches = list(
            _minibatches(cfg.seed, 'val-shuffle', data.x_val.shape[0],
                         val_batch_size, epoch))
        train_batches = _minibatches(cfg.seed, 'shuffle', data.n_train,
                                     cfg.batch_size, epoch)
        for batch, indices in enumerate(train_batches):
            val_indices = val_batches[batch % len(val_batches)]
            darts_step(cell, (data.x_train[indices], data.y_train[indices]),
                       (data.x_val[val_indices], data.y_val[val_indices]),
                       cfg.lr_w, cfg.lr_alpha)
            trace.alpha_updates += 1
            trace.w_updates += 1
            if after_step is not None:
                after_step(cell)
        _record(trace, epoch, cell, evaluate)
    logging.info("DARTS finished after %s updates of %s minibatches per epoch.",
                 trace.w_updates, batches)
    trace.final_alphas = cell.alphas.copy()
    return trace


def darts_tse_run(cell: ToyCell,
                  data: SyntheticDataset,
                  cfg: DiffNasConfig,
                  freeze_weights: bool = False,
                  after_step: Optional[Callable[[ToyCell], None]] = None
                  ) -> DiffNasTrace:
    """Run DARTS-TSE: update alpha with the summed training-loss gradients of K minibatches.

    Every outer step first descends the accumulator of the previous window
    (zero on the first step), then resets it and consumes K minibatches: each
    one updates w and adds its alpha-gradient, both taken at the weights
    before that update. Minibatches left after the last full window only
    update w. The derived architecture is recorded after every outer step.

    Parameters
    ----------
    cell: ToyCell, required
        The cell, updated in place.
    data: SyntheticDataset, required
        The task; only the training split drives the search.
    cfg: DiffNasConfig, required
        The settings of the run.
    freeze_weights: bool, optional
        When True, w is never updated.
    after_step: callable, optional
        Called with the cell after every alpha update.

    Returns
    -------
    trace: DiffNasTrace
        The derived architectures over the outer steps.
    """
    batches = cfg.batches_per_epoch(data.n_train)
    total = batches * cfg.epochs
    if cfg.K > total:
        raise InvalidInputError(
            "K={} exceeds the {} minibatches of the run".format(cfg.K, total))
    steps = total // cfg.K
    stream = (indices for epoch in range(1, cfg.epochs + 1)
              for indices in _minibatches(cfg.seed, 'shuffle', data.n_train,
                                          cfg.batch_size, epoch))
    evaluate = RetrainEvaluator(data, cfg)
    trace = DiffNasTrace(method='darts-tse', seed=cfg.seed)
    accumulator = np.zeros_like(cell.alphas)

    def consume(indices):
        _, weight_gradients, alpha_gradient = cell.loss_and_gradients(
            data.x_train[indices], data.y_train[indices])
        if not freeze_weights:
            cell.update_weights(weight_gradients, cfg.lr_w)
            trace.w_updates += 1
        return alpha_gradient

    for step in tqdm(range(1, steps + 1),
                     desc='darts-tse',
                     disable=progress_disabled()):
        cell.update_alphas(accumulator, cfg.lr_alpha)
        trace.alpha_updates += 1
        if after_step is not None:
            after_step(cell)
        accumulator = np.zeros_like(cell.alphas)
        for _ in range(cfg.K):
            accumulator += consume(next(stream))
        _record(trace, step, cell, evaluate)
    for indices in stream:
        consume(indices)
    logging.info("DARTS-TSE finished: %s alpha updates, %s w updates.",
                 trace.alpha_updates, trace.w_updates)
    trace.final_alphas = cell.alphas.copy()
    trace.last_accumulator = accumulator
    return trace
