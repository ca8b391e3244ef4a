"""Minibatch SGD trainer that records real per-minibatch learning curves."""
import logging
import math
from typing import List, Optional
import numpy as np
from pydantic import BaseModel, Extra, confloat, conint
from typing_extensions import Literal, Protocol
from framework.core.curves import LearningCurve
from framework.core.toytrain.data import SyntheticDataset
from framework.core.toytrain.network import Mlp
from framework.core.toytrain.network import ToyArchSpec
from framework.errors import InvalidInputError
from framework.errors import TrainingDivergedError
from framework.utils.seedutils import derive_rng


class TrainConfig(BaseModel):
    """The fixed training protocol shared by every architecture.

    Every field is required so that a config file fully determines the runs.
    """

    epochs: conint(ge=1)
    batch_size: conint(ge=1)
    lr: confloat(ge=0)
    schedule: Literal['constant', 'cosine']
    momentum: confloat(ge=0, lt=1)
    weight_decay: confloat(ge=0)
    seed: conint(ge=0)

    class Config:
        extra = Extra.forbid
        allow_mutation = False

    def with_seed(self, seed: int) -> 'TrainConfig':
        """Get a copy of the config using another seed."""
        return TrainConfig(**dict(self.dict(), seed=seed))

    def learning_rate(self, epoch: int) -> float:
        """Get the learning rate of a 1-based epoch."""
        if self.schedule == 'constant':
            return float(self.lr)
        progress = (epoch - 1) / self.epochs
        return float(self.lr) * 0.5 * (1.0 + math.cos(math.pi * progress))


class TrainableModel(Protocol):
    """A model the SGD trainer can optimize."""

    parameters: List[np.ndarray]
    input_dim: int

    @property
    def decay_mask(self) -> List[bool]:
        ...

    def loss_and_gradients(self, x, y):
        ...

    def evaluate(self, x, y):
        ...


class SgdTrainer:
    """Train a model with momentum SGD and record its learning curve.

    The loss recorded for a minibatch is the loss at the parameters before the
    minibatch's update, i.e. the loss whose gradient drives that step.
    """

    def __init__(self, cfg: TrainConfig, capture_trajectory: bool = False):
        """Create a new instance of the trainer.

        Parameters
        ----------
        cfg: TrainConfig, required
            The training protocol.
        capture_trajectory: bool, optional
            When True, the parameters before every update are kept in
            `trajectory`, together with the indices of the minibatch.
        """
        self.cfg = cfg
        self.capture_trajectory = capture_trajectory
        self.trajectory = []

    def batches_per_epoch(self, n_train: int) -> int:
        """Get the number of minibatches per epoch; the remainder is dropped."""
        batches = n_train // self.cfg.batch_size
        if batches < 1:
            raise InvalidInputError(
                "batch size {} exceeds the {} training samples".format(
                    self.cfg.batch_size, n_train))
        return batches

    def fit(self, model: TrainableModel,
            data: SyntheticDataset) -> LearningCurve:
        """Train the model and record its learning curve.

        Parameters
        ----------
        model: TrainableModel, required
            The model; its parameters are updated in place.
        data: SyntheticDataset, required
            The classification task.

        Returns
        -------
        curve: LearningCurve
            The minibatch losses, per-epoch validation loss and accuracy and the
            final test accuracy.
        """
        cfg = self.cfg
        if model.input_dim != data.x_train.shape[1]:
            raise InvalidInputError(
                "the model expects {} input features, the dataset has {}".format(
                    model.input_dim, data.x_train.shape[1]))
        batches = self.batches_per_epoch(data.n_train)
        velocities = [np.zeros_like(p) for p in model.parameters]
        decay_mask = model.decay_mask
        losses = np.empty((cfg.epochs, batches))
        val_losses = np.empty(cfg.epochs)
        val_accs = np.empty(cfg.epochs)
        self.trajectory = []

        for epoch in range(1, cfg.epochs + 1):
            lr = cfg.learning_rate(epoch)
            order = derive_rng(cfg.seed, 'shuffle', epoch).permutation(
                data.n_train)
            for batch in range(batches):
                indices = order[batch * cfg.batch_size:(batch + 1) *
                                cfg.batch_size]
                if self.capture_trajectory:
                    self.trajectory.append(
                        ([p.copy() for p in model.parameters], indices))
                loss, gradients = model.loss_and_gradients(
                    data.x_train[indices], data.y_train[indices])
                if not math.isfinite(loss):
                    raise TrainingDivergedError(epoch, batch + 1)
                if not all(np.all(np.isfinite(g)) for g in gradients):
                    raise TrainingDivergedError(epoch, batch + 1,
                                                "non-finite gradient")
                losses[epoch - 1, batch] = loss
                for parameter, gradient, velocity, decays in zip(
                        model.parameters, gradients, velocities, decay_mask):
                    if decays and cfg.weight_decay > 0:
                        gradient = gradient + cfg.weight_decay * parameter
                    velocity *= cfg.momentum
                    velocity += gradient
                    parameter -= lr * velocity
            val_losses[epoch - 1], val_accs[epoch - 1] = model.evaluate(
                data.x_val, data.y_val)
            if not math.isfinite(val_losses[epoch - 1]):
                raise TrainingDivergedError(epoch, batches,
                                            "non-finite validation loss")
            logging.debug("Epoch %s: train loss %.4f, val acc %.4f.", epoch,
                          losses[epoch - 1].mean(), val_accs[epoch - 1])

        _, test_acc = model.evaluate(data.x_test, data.y_test)
        return LearningCurve(minibatch_train_losses=losses,
                             epoch_val_acc=val_accs,
                             final_test_acc=test_acc,
                             epoch_val_loss=val_losses)


def build_model(arch: ToyArchSpec, data: SyntheticDataset,
                cfg: TrainConfig) -> Mlp:
    """Create the initial network of an architecture for a training run."""
    return Mlp(arch, data.dim, data.classes, derive_rng(cfg.seed, 'init'))


def train(arch: ToyArchSpec,
          data: SyntheticDataset,
          cfg: TrainConfig,
          trainer: Optional[SgdTrainer] = None) -> LearningCurve:
    """Train an architecture from scratch and record its learning curve.

    Parameters
    ----------
    arch: ToyArchSpec, required
        The architecture.
    data: SyntheticDataset, required
        The classification task.
    cfg: TrainConfig, required
        The training protocol; `cfg.seed` drives initialization and shuffling.
    trainer: SgdTrainer, optional
        The trainer to use, e.g. one capturing the trajectory.

    Returns
    -------
    curve: LearningCurve
        The recorded learning curve.
    """
    if trainer is None:
        trainer = SgdTrainer(cfg)
    return trainer.fit(build_model(arch, data, cfg), data)
