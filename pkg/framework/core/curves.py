"""Learning curves, architecture records and the benchmark file format.

A benchmark file is UTF-8 JSON lines. The first line holds the metadata::

    {"kind": "meta", "name": str, "t_end": int, "B": int, "notes": str}

and every following line one architecture record::

    {"kind": "record", "arch_id": str, "encoding": [int, ...],
     "seeds": {"0": {"mtl": [[float, ...], ...], "val_loss": [float, ...] | null,
                     "val_acc": [float, ...] | null, "test_acc": float}, ...}}

`mtl[t - 1][i - 1]` is the loss of minibatch i in epoch t; epochs are 1-based in
the estimator formulas and 0-based in the serialized arrays.
"""
import json
import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional, Sequence, Tuple
import numpy as np
from framework.errors import BenchmarkFormatError
from framework.errors import CurveValidationError
from framework.errors import InvalidInputError
from framework.utils.fileutils import iter_json_lines
from framework.utils.fileutils import save_json_lines


def _frozen_array(values, ndim, name):
    """Convert values into a read-only float64 array with the expected rank."""
    try:
        array = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise CurveValidationError(
            name, "values must form a rectangular array of numbers") from e
    if array.ndim != ndim:
        raise CurveValidationError(
            name, "expected {} dimension(s), found {}".format(ndim, array.ndim))
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class LearningCurve:
    """The recorded training history of one architecture for one seed.

    Parameters
    ----------
    minibatch_train_losses: array of shape (t_end, B), required
        The training loss of every minibatch, grouped by epoch.
    epoch_val_acc: array of shape (t_end,), optional
        The validation accuracy at the end of every epoch.
    final_test_acc: float, required
        The test accuracy after `t_end` epochs.
    epoch_val_loss: array of shape (t_end,), optional
        The validation loss at the end of every epoch.
    """

    minibatch_train_losses: np.ndarray
    epoch_val_acc: Optional[np.ndarray]
    final_test_acc: float
    epoch_val_loss: Optional[np.ndarray] = None

    def __post_init__(self):
        """Validate the curve and freeze its arrays."""
        losses = _frozen_array(self.minibatch_train_losses, 2,
                               'minibatch_train_losses')
        if losses.shape[0] < 1 or losses.shape[1] < 1:
            raise CurveValidationError(
                'minibatch_train_losses',
                "at least one epoch with at least one minibatch is required")
        if not np.all(np.isfinite(losses)) or np.any(losses < 0):
            raise CurveValidationError(
                'minibatch_train_losses', "losses must be finite and >= 0")
        object.__setattr__(self, 'minibatch_train_losses', losses)
        t_end = losses.shape[0]

        if self.epoch_val_acc is not None:
            accs = _frozen_array(self.epoch_val_acc, 1, 'epoch_val_acc')
            self.__check_length(accs, t_end, 'epoch_val_acc')
            if not np.all((accs >= 0.0) & (accs <= 1.0)):
                raise CurveValidationError('epoch_val_acc',
                                           "accuracies must lie in [0, 1]")
            object.__setattr__(self, 'epoch_val_acc', accs)

        if self.epoch_val_loss is not None:
            val_losses = _frozen_array(self.epoch_val_loss, 1,
                                       'epoch_val_loss')
            self.__check_length(val_losses, t_end, 'epoch_val_loss')
            if not np.all(np.isfinite(val_losses)) or np.any(val_losses < 0):
                raise CurveValidationError(
                    'epoch_val_loss', "losses must be finite and >= 0")
            object.__setattr__(self, 'epoch_val_loss', val_losses)

        try:
            test_acc = float(self.final_test_acc)
        except (TypeError, ValueError) as e:
            raise CurveValidationError('final_test_acc',
                                       "must be a number") from e
        if not 0.0 <= test_acc <= 1.0:
            raise CurveValidationError('final_test_acc',
                                       "accuracy must lie in [0, 1]")
        object.__setattr__(self, 'final_test_acc', test_acc)

    @staticmethod
    def __check_length(values, t_end, name):
        if values.shape[0] != t_end:
            raise CurveValidationError(
                name, "expected {} epochs, found {}".format(
                    t_end, values.shape[0]))

    @property
    def t_end(self) -> int:
        """Get the number of recorded epochs."""
        return int(self.minibatch_train_losses.shape[0])

    @property
    def batches_per_epoch(self) -> int:
        """Get the number of minibatches per epoch (B)."""
        return int(self.minibatch_train_losses.shape[1])

    def check_budget(self, T):
        """Raise an error unless 1 <= T <= t_end.

        Parameters
        ----------
        T: int, required
            The training budget in epochs.
        """
        if isinstance(T, bool) or int(T) != T or not 1 <= T <= self.t_end:
            raise InvalidInputError(
                "T must be an integer in [1, {}], got {}".format(self.t_end, T))

    def to_dict(self) -> dict:
        """Convert the curve into its JSON representation."""
        return {
            'mtl': self.minibatch_train_losses.tolist(),
            'val_loss': (None if self.epoch_val_loss is None else
                         self.epoch_val_loss.tolist()),
            'val_acc': (None if self.epoch_val_acc is None else
                        self.epoch_val_acc.tolist()),
            'test_acc': self.final_test_acc
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'LearningCurve':
        """Create a curve from its JSON representation.

        Parameters
        ----------
        data: dict, required
            The dictionary with keys `mtl`, `val_loss`, `val_acc` and `test_acc`.

        Returns
        -------
        curve: LearningCurve
            The validated curve.
        """
        for key in ('mtl', 'test_acc'):
            if key not in data:
                raise CurveValidationError(key, "field is missing")
        return cls(minibatch_train_losses=data['mtl'],
                   epoch_val_acc=data.get('val_acc'),
                   final_test_acc=data['test_acc'],
                   epoch_val_loss=data.get('val_loss'))


@dataclass(frozen=True, eq=False)
class ArchitectureRecord:
    """An architecture and its learning curves, one per training seed."""

    arch_id: str
    encoding: Tuple[int, ...]
    seeds: Mapping[int, LearningCurve]

    def __post_init__(self):
        """Validate the record and freeze its containers."""
        if not isinstance(self.arch_id, str) or len(self.arch_id) == 0:
            raise CurveValidationError('arch_id', "must be a non-empty string")
        object.__setattr__(self, 'encoding',
                           tuple(int(choice) for choice in self.encoding))
        if len(self.seeds) == 0:
            raise CurveValidationError('seeds', "at least one seed is required")
        seeds = {int(seed): curve for seed, curve in sorted(
            self.seeds.items(), key=lambda item: int(item[0]))}
        shapes = {curve.minibatch_train_losses.shape for curve in seeds.values()}
        if len(shapes) > 1:
            raise CurveValidationError(
                'seeds', "all curves must share t_end and B, found {}".format(
                    sorted(shapes)))
        object.__setattr__(self, 'seeds', MappingProxyType(seeds))

    def __reduce__(self):
        return (ArchitectureRecord, (self.arch_id, self.encoding,
                                     dict(self.seeds)))

    @property
    def t_end(self) -> int:
        """Get the number of epochs of the record's curves."""
        return next(iter(self.seeds.values())).t_end

    @property
    def batches_per_epoch(self) -> int:
        """Get the number of minibatches per epoch of the record's curves."""
        return next(iter(self.seeds.values())).batches_per_epoch

    @property
    def mean_test_acc(self) -> float:
        """Get the final test accuracy averaged over seeds."""
        return float(np.mean([c.final_test_acc for c in self.seeds.values()]))

    def to_dict(self) -> dict:
        """Convert the record into its JSON representation."""
        return {
            'kind': 'record',
            'arch_id': self.arch_id,
            'encoding': list(self.encoding),
            'seeds': {
                str(seed): curve.to_dict()
                for seed, curve in self.seeds.items()
            }
        }


@dataclass(frozen=True)
class BenchmarkMetadata:
    """Description of a benchmark file."""

    name: str
    t_end: int
    batches_per_epoch: int
    notes: str = ""

    def to_dict(self) -> dict:
        """Convert the metadata into its JSON representation."""
        return {
            'kind': 'meta',
            'name': self.name,
            't_end': self.t_end,
            'B': self.batches_per_epoch,
            'notes': self.notes
        }


@dataclass(frozen=True, eq=False)
class BenchmarkDataset:
    """A population of architecture records trained under one protocol."""

    records: Tuple[ArchitectureRecord, ...]
    metadata: BenchmarkMetadata
    _index: Mapping[str, ArchitectureRecord] = field(init=False, repr=False)
    _by_encoding: Mapping[Tuple[int, ...], ArchitectureRecord] = field(
        init=False, repr=False)

    def __post_init__(self):
        """Validate the dataset and build its lookup tables."""
        records = tuple(self.records)
        if len(records) == 0:
            raise InvalidInputError("no records")
        index = {}
        by_encoding = {}
        for record in records:
            if record.arch_id in index:
                raise InvalidInputError("duplicate arch_id {}".format(
                    record.arch_id))
            if (record.t_end != self.metadata.t_end or
                    record.batches_per_epoch !=
                    self.metadata.batches_per_epoch):
                raise InvalidInputError(
                    "record {} has t_end={}, B={}; metadata declares "
                    "t_end={}, B={}".format(record.arch_id, record.t_end,
                                            record.batches_per_epoch,
                                            self.metadata.t_end,
                                            self.metadata.batches_per_epoch))
            index[record.arch_id] = record
            by_encoding.setdefault(record.encoding, record)
        object.__setattr__(self, 'records', records)
        object.__setattr__(self, '_index', MappingProxyType(index))
        object.__setattr__(self, '_by_encoding', MappingProxyType(by_encoding))

    def __reduce__(self):
        return (BenchmarkDataset, (self.records, self.metadata))

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def t_end(self) -> int:
        """Get the number of epochs every architecture was trained for."""
        return self.metadata.t_end

    def get(self, arch_id: str) -> ArchitectureRecord:
        """Get the record with the provided id.

        Parameters
        ----------
        arch_id: str, required
            The id of the architecture.

        Returns
        -------
        record: ArchitectureRecord
            The record of the architecture.
        """
        try:
            return self._index[arch_id]
        except KeyError:
            raise InvalidInputError(
                "unknown arch_id {}".format(arch_id)) from None

    def find(self, encoding: Sequence[int]) -> Optional[ArchitectureRecord]:
        """Get the record with the provided encoding, if the benchmark has one."""
        return self._by_encoding.get(tuple(int(e) for e in encoding))

    def common_seeds(self) -> Tuple[int, ...]:
        """Get the seeds present in every record, in ascending order."""
        seeds = set(self.records[0].seeds)
        for record in self.records[1:]:
            seeds &= set(record.seeds)
        return tuple(sorted(seeds))

    def subset(self, arch_ids: Sequence[str]) -> 'BenchmarkDataset':
        """Build a benchmark containing only the provided architectures."""
        return BenchmarkDataset(records=tuple(self.get(a) for a in arch_ids),
                                metadata=self.metadata)


def load_benchmark(path) -> BenchmarkDataset:
    """Load and validate a benchmark file.

    Parameters
    ----------
    path: str or Path, required
        The path of the JSON-lines benchmark file.

    Returns
    -------
    dataset: BenchmarkDataset
        The validated benchmark.
    """
    metadata = None
    records = []
    seen_ids = set()
    try:
        lines = list(iter_json_lines(path))
    except FileNotFoundError:
        raise BenchmarkFormatError(path, "file not found") from None
    except UnicodeDecodeError as e:
        raise BenchmarkFormatError(path, "file is not UTF-8") from e

    for line_number, line in lines:
        try:
            item = json.loads(line)
        except json.JSONDecodeError as e:
            raise BenchmarkFormatError(path,
                                       "malformed JSON: {}".format(e.msg),
                                       line_number=line_number) from e
        if not isinstance(item, dict):
            raise BenchmarkFormatError(path,
                                       "expected a JSON object",
                                       line_number=line_number)
        if metadata is None:
            metadata = _parse_metadata(path, line_number, item)
            continue
        record = _parse_record(path, line_number, item, metadata)
        if record.arch_id in seen_ids:
            raise BenchmarkFormatError(path,
                                       "duplicate arch_id",
                                       line_number=line_number,
                                       arch_id=record.arch_id)
        seen_ids.add(record.arch_id)
        records.append(record)

    if metadata is None:
        raise BenchmarkFormatError(path, "missing metadata line")
    if len(records) == 0:
        raise BenchmarkFormatError(path, "no records")
    logging.info("Loaded %s records from %s.", len(records), path)
    return BenchmarkDataset(records=tuple(records), metadata=metadata)


def _parse_metadata(path, line_number, item) -> BenchmarkMetadata:
    """Parse the metadata line of a benchmark file."""
    if item.get('kind') != 'meta':
        raise BenchmarkFormatError(path,
                                   "first line must be the metadata line",
                                   line_number=line_number)
    try:
        t_end = item['t_end']
        batches = item['B']
    except KeyError as e:
        raise BenchmarkFormatError(
            path, "metadata field {} is missing".format(e.args[0]),
            line_number=line_number) from None
    for name, value in (('t_end', t_end), ('B', batches)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise BenchmarkFormatError(
                path, "metadata field {} must be a positive integer".format(
                    name),
                line_number=line_number)
    return BenchmarkMetadata(name=str(item.get('name', '')),
                             t_end=t_end,
                             batches_per_epoch=batches,
                             notes=str(item.get('notes', '')))


def _parse_record(path, line_number, item,
                  metadata: BenchmarkMetadata) -> ArchitectureRecord:
    """Parse and validate one record line of a benchmark file."""
    arch_id = item.get('arch_id')
    if item.get('kind') != 'record':
        raise BenchmarkFormatError(path,
                                   "expected a record line",
                                   line_number=line_number,
                                   arch_id=arch_id)
    seeds = item.get('seeds')
    if not isinstance(seeds, dict):
        raise BenchmarkFormatError(path,
                                   "seeds: expected an object",
                                   line_number=line_number,
                                   arch_id=arch_id)
    try:
        curves = {}
        for seed, data in seeds.items():
            try:
                seed_number = int(seed)
            except ValueError:
                raise CurveValidationError(
                    'seeds', "seed {!r} is not an integer".format(seed)) from None
            curve = LearningCurve.from_dict(data)
            if curve.t_end != metadata.t_end:
                raise CurveValidationError(
                    'mtl', "seed {}: expected {} epochs, found {}".format(
                        seed, metadata.t_end, curve.t_end))
            if curve.batches_per_epoch != metadata.batches_per_epoch:
                raise CurveValidationError(
                    'mtl', "seed {}: expected B={}, found {}".format(
                        seed, metadata.batches_per_epoch,
                        curve.batches_per_epoch))
            curves[seed_number] = curve
        return ArchitectureRecord(arch_id=arch_id,
                                  encoding=item.get('encoding', ()),
                                  seeds=curves)
    except (CurveValidationError, TypeError, ValueError) as e:
        raise BenchmarkFormatError(path,
                                   str(e),
                                   line_number=line_number,
                                   arch_id=arch_id) from e


def save_benchmark(dataset: BenchmarkDataset, path):
    """Write a benchmark in the JSON-lines format read by `load_benchmark`.

    Parameters
    ----------
    dataset: BenchmarkDataset, required
        The benchmark to write.
    path: str or Path, required
        The path of the output file.
    """
    items = [dataset.metadata.to_dict()]
    items.extend(record.to_dict() for record in dataset.records)
    save_json_lines(items, path)
    logging.info("Saved %s records to %s.", len(dataset), path)


def truncate(curve: LearningCurve, T: int) -> LearningCurve:
    """Get the view of a curve after T epochs of training.

    Parameters
    ----------
    curve: LearningCurve, required
        The full curve.
    T: int, required
        The number of epochs to keep; 1 <= T <= curve.t_end.

    Returns
    -------
    truncated: LearningCurve
        The first T epochs of every per-epoch field; the final test accuracy is kept.
    """
    curve.check_budget(T)
    if T == curve.t_end:
        return curve
    return LearningCurve(
        minibatch_train_losses=curve.minibatch_train_losses[:T],
        epoch_val_acc=(None if curve.epoch_val_acc is None else
                       curve.epoch_val_acc[:T]),
        final_test_acc=curve.final_test_acc,
        epoch_val_loss=(None if curve.epoch_val_loss is None else
                        curve.epoch_val_loss[:T]))


def epoch_sums(curve: LearningCurve) -> np.ndarray:
    """Compute the per-epoch mean minibatch loss, (1/B) * sum_i loss(t, i).

    Parameters
    ----------
    curve: LearningCurve, required
        The curve.

    Returns
    -------
    sums: array of shape (t_end,)
        One value per epoch.
    """
    return curve.minibatch_train_losses.sum(
        axis=1) / curve.batches_per_epoch


def mean_over_seeds(record: ArchitectureRecord) -> LearningCurve:
    """Average the curves of a record element-wise over its seeds.

    Parameters
    ----------
    record: ArchitectureRecord, required
        The record.

    Returns
    -------
    curve: LearningCurve
        The seed-averaged curve; optional fields are kept only when every seed has them.
    """
    curves = list(record.seeds.values())
    if len(curves) == 1:
        return curves[0]

    def mean_of(name):
        values = [getattr(c, name) for c in curves]
        if any(v is None for v in values):
            return None
        return np.mean(values, axis=0)

    return LearningCurve(
        minibatch_train_losses=mean_of('minibatch_train_losses'),
        epoch_val_acc=mean_of('epoch_val_acc'),
        final_test_acc=float(np.mean([c.final_test_acc for c in curves])),
        epoch_val_loss=mean_of('epoch_val_loss'))
