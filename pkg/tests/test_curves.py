"""Tests of learning curves, records and the benchmark file format."""
import json
import pickle
import numpy as np
import pytest
from conftest import build_parametric_benchmark
from conftest import make_curve
from framework.core.curves import ArchitectureRecord
from framework.core.curves import BenchmarkDataset
from framework.core.curves import BenchmarkMetadata
from framework.core.curves import epoch_sums
from framework.core.curves import load_benchmark
from framework.core.curves import mean_over_seeds
from framework.core.curves import save_benchmark
from framework.core.curves import truncate
from framework.errors import BenchmarkFormatError
from framework.errors import CurveValidationError
from framework.errors import InvalidInputError


class TestLearningCurve:
    """Validation and accessors of a single curve."""

    def test_shape_accessors(self):
        curve = make_curve([[1.0, 2.0, 3.0], [0.5, 0.5, 0.5]])
        assert curve.t_end == 2
        assert curve.batches_per_epoch == 3

    def test_arrays_are_read_only(self):
        curve = make_curve([[1.0, 2.0]], val_acc=[0.5])
        with pytest.raises(ValueError):
            curve.minibatch_train_losses[0, 0] = 3.0
        with pytest.raises(ValueError):
            curve.epoch_val_acc[0] = 0.1

    @pytest.mark.parametrize('losses', [[[1.0, -0.1]], [[np.nan, 1.0]],
                                        [[np.inf]]])
    def test_rejects_invalid_losses(self, losses):
        with pytest.raises(CurveValidationError) as error:
            make_curve(losses)
        assert error.value.field == 'minibatch_train_losses'

    def test_rejects_ragged_losses(self):
        with pytest.raises(CurveValidationError):
            make_curve([[1.0, 2.0], [1.0]])

    def test_rejects_validation_length_mismatch(self):
        with pytest.raises(CurveValidationError) as error:
            make_curve([[1.0], [1.0]], val_acc=[0.5])
        assert error.value.field == 'epoch_val_acc'

    @pytest.mark.parametrize('test_acc', [-0.1, 1.5])
    def test_rejects_accuracy_out_of_range(self, test_acc):
        with pytest.raises(CurveValidationError):
            make_curve([[1.0]], test_acc=test_acc)

    @pytest.mark.parametrize('T', [0, 3, 1.5, True])
    def test_check_budget_rejects_out_of_range(self, T):
        curve = make_curve([[1.0], [1.0]])
        with pytest.raises(InvalidInputError):
            curve.check_budget(T)

    def test_errors_survive_pickling(self):
        error = CurveValidationError('mtl', "broken")
        restored = pickle.loads(pickle.dumps(error))
        assert restored.field == 'mtl'
        assert str(restored) == str(error)


class TestCurveViews:
    """Truncation, per-epoch sums and seed averaging."""

    def test_epoch_sums_are_means_over_minibatches(self):
        curve = make_curve([[1.0, 3.0], [2.0, 4.0]])
        np.testing.assert_allclose(epoch_sums(curve), [2.0, 3.0])

    def test_truncate_keeps_prefix_and_test_accuracy(self):
        curve = make_curve([[1.0], [2.0], [3.0]],
                           val_acc=[0.1, 0.2, 0.3],
                           test_acc=0.9)
        view = truncate(curve, 2)
        np.testing.assert_array_equal(view.minibatch_train_losses, [[1.0],
                                                                    [2.0]])
        np.testing.assert_array_equal(view.epoch_val_acc, [0.1, 0.2])
        assert view.epoch_val_loss is None
        assert view.final_test_acc == 0.9

    def test_truncate_at_t_end_is_identity(self):
        curve = make_curve([[1.0], [2.0]])
        assert truncate(curve, 2) is curve

    def test_mean_over_seeds(self):
        record = ArchitectureRecord(
            'a', (0, ), {
                0: make_curve([[1.0]], val_acc=[0.2], test_acc=0.4),
                1: make_curve([[3.0]], test_acc=0.6)
            })
        curve = mean_over_seeds(record)
        np.testing.assert_allclose(curve.minibatch_train_losses, [[2.0]])
        assert curve.epoch_val_acc is None
        assert curve.final_test_acc == pytest.approx(0.5)
        assert record.mean_test_acc == pytest.approx(0.5)


class TestBenchmarkDataset:
    """Records, lookups and invariants of a benchmark."""

    def test_record_seeds_are_sorted_and_frozen(self):
        record = ArchitectureRecord('a', [1, 2], {
            '2': make_curve([[1.0]]),
            0: make_curve([[1.0]])
        })
        assert list(record.seeds) == [0, 2]
        assert record.encoding == (1, 2)
        with pytest.raises(TypeError):
            record.seeds[3] = make_curve([[1.0]])

    def test_record_rejects_mixed_shapes(self):
        with pytest.raises(CurveValidationError):
            ArchitectureRecord('a', (), {
                0: make_curve([[1.0]]),
                1: make_curve([[1.0], [1.0]])
            })

    def test_empty_benchmark_is_rejected(self):
        with pytest.raises(InvalidInputError, match="no records"):
            BenchmarkDataset(records=(),
                             metadata=BenchmarkMetadata('x', 1, 1))

    def test_duplicate_arch_ids_are_rejected(self):
        record = ArchitectureRecord('a', (0, ), {0: make_curve([[1.0]])})
        with pytest.raises(InvalidInputError, match="duplicate"):
            BenchmarkDataset(records=(record, record),
                             metadata=BenchmarkMetadata('x', 1, 1))

    def test_lookups(self, parametric_benchmark):
        record = parametric_benchmark.get('arch-123')
        assert record.encoding == (1, 2, 3)
        assert parametric_benchmark.find([1, 2, 3]) is record
        assert parametric_benchmark.find([5, 5, 5]) is None
        with pytest.raises(InvalidInputError):
            parametric_benchmark.get('missing')

    def test_common_seeds_and_subset(self, parametric_benchmark):
        assert parametric_benchmark.common_seeds() == (0, 1)
        subset = parametric_benchmark.subset(['arch-000', 'arch-133'])
        assert len(subset) == 2
        assert [r.arch_id for r in subset] == ['arch-000', 'arch-133']

    def test_benchmark_survives_pickling(self, parametric_benchmark):
        restored = pickle.loads(pickle.dumps(parametric_benchmark))
        assert len(restored) == len(parametric_benchmark)
        original = parametric_benchmark.get('arch-021').seeds[1]
        copy = restored.get('arch-021').seeds[1]
        np.testing.assert_array_equal(copy.minibatch_train_losses,
                                      original.minibatch_train_losses)


class TestBenchmarkFile:
    """Writing and loading the JSON-lines benchmark format."""

    def test_save_then_load_is_bit_exact(self, tmp_path):
        bench = build_parametric_benchmark(domains=(2, 2), t_end=3, batches=2)
        path = tmp_path / 'bench.jsonl'
        save_benchmark(bench, path)
        loaded = load_benchmark(path)
        assert loaded.metadata == bench.metadata
        for original, copy in zip(bench, loaded):
            assert copy.arch_id == original.arch_id
            for seed, curve in original.seeds.items():
                np.testing.assert_array_equal(
                    copy.seeds[seed].minibatch_train_losses,
                    curve.minibatch_train_losses)
                assert copy.seeds[seed].final_test_acc == curve.final_test_acc

    def _write(self, path, lines):
        path.write_text("\n".join(json.dumps(line) for line in lines) + "\n",
                        encoding='utf8')
        return path

    def test_missing_file(self, tmp_path):
        with pytest.raises(BenchmarkFormatError, match="file not found"):
            load_benchmark(tmp_path / 'missing.jsonl')

    def test_reports_line_and_arch_id(self, tmp_path):
        meta = {'kind': 'meta', 'name': 'x', 't_end': 2, 'B': 1}
        good = {
            'kind': 'record',
            'arch_id': 'a',
            'encoding': [0],
            'seeds': {
                '0': {
                    'mtl': [[1.0], [0.5]],
                    'val_loss': None,
                    'val_acc': None,
                    'test_acc': 0.5
                }
            }
        }
        bad = dict(good,
                   arch_id='b',
                   seeds={'0': dict(good['seeds']['0'], mtl=[[1.0]])})
        path = self._write(tmp_path / 'bench.jsonl', [meta, good, bad])
        with pytest.raises(BenchmarkFormatError) as error:
            load_benchmark(path)
        assert error.value.line_number == 3
        assert error.value.arch_id == 'b'

    def test_metadata_must_come_first(self, tmp_path):
        path = self._write(tmp_path / 'bench.jsonl', [{'kind': 'record'}])
        with pytest.raises(BenchmarkFormatError, match="metadata"):
            load_benchmark(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / 'bench.jsonl'
        path.write_text('{"kind": "meta", "t_end": 1, "B": 1}\n{oops\n',
                        encoding='utf8')
        with pytest.raises(BenchmarkFormatError) as error:
            load_benchmark(path)
        assert error.value.line_number == 2

    def test_file_without_records(self, tmp_path):
        path = self._write(tmp_path / 'bench.jsonl',
                           [{'kind': 'meta', 't_end': 1, 'B': 1}])
        with pytest.raises(BenchmarkFormatError, match="no records"):
            load_benchmark(path)
