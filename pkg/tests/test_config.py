"""Tests of configuration parsing and of the shipped configuration files."""
import json
from pathlib import Path
import pytest
from framework.config import COMMAND_CONFIGS
from framework.config import BudgetConfig
from framework.config import DiffNasCommandConfig
from framework.config import GenToyConfig
from framework.config import RankEvalConfig
from framework.config import SearchConfig
from framework.config import estimator_defaults
from framework.config import load_config
from framework.config import override
from framework.config import parse_config
from framework.errors import ConfigError

CONFIG_DIR = Path(__file__).resolve().parent.parent / 'configs'


def rankeval_data(**overrides):
    """A minimal valid rankeval configuration."""
    data = {
        'schema': 1,
        'benchmark': 'bench.jsonl',
        'estimators': ['tse'],
        'budgets': [1, 2]
    }
    data.update(overrides)
    return data


class TestShippedConfigs:
    """The configuration files under configs/."""

    @pytest.mark.parametrize('file_name, config_class', [
        ('gen-toy.json', GenToyConfig),
        ('rankeval.json', RankEvalConfig),
        ('rankeval-e-sweep.json', RankEvalConfig),
        ('rankeval-gamma-sweep.json', RankEvalConfig),
        ('budget.json', BudgetConfig),
        ('search.json', SearchConfig),
        ('diffnas.json', DiffNasCommandConfig),
    ])
    def test_configs_are_valid(self, file_name, config_class):
        config = load_config(CONFIG_DIR / file_name, config_class)
        assert config.schema_version == 1

    def test_documented_defaults(self):
        rankeval = load_config(CONFIG_DIR / 'rankeval.json', RankEvalConfig)
        assert rankeval.E == 1
        assert rankeval.gamma == 0.999
        budget = load_config(CONFIG_DIR / 'budget.json', BudgetConfig)
        assert budget.threshold == 0.1
        search = load_config(CONFIG_DIR / 'search.json', SearchConfig)
        assert search.tpe.n_init == 10
        diffnas = load_config(CONFIG_DIR / 'diffnas.json',
                              DiffNasCommandConfig)
        assert diffnas.search.K == 100

    def test_every_command_has_a_config(self):
        assert set(COMMAND_CONFIGS) == {
            'gen-toy', 'rankeval', 'budget', 'search', 'diffnas'
        }


class TestParsing:
    """Validation errors and defaults."""

    def test_defaults(self):
        config = parse_config(rankeval_data(), RankEvalConfig)
        assert config.seed == 0
        assert config.top_k == []
        assert config.seeds is None
        assert estimator_defaults(config) == {'E': 1, 'gamma': 0.999}
        search = parse_config(
            {
                'schema': 1,
                'benchmark': 'b',
                'strategies': ['rs'],
                'evaluators': ['gt'],
                'budget': 10,
                'n_seeds': 1
            }, SearchConfig)
        assert search.re.pop_size == 10
        assert search.re.sample_size == 3
        assert search.tpe.gamma_split == 0.25

    def test_unknown_keys_are_rejected(self):
        with pytest.raises(ConfigError, match="bogus"):
            parse_config(rankeval_data(bogus=1), RankEvalConfig)

    def test_schema_is_required(self):
        data = rankeval_data()
        del data['schema']
        with pytest.raises(ConfigError, match="schema"):
            parse_config(data, RankEvalConfig)
        with pytest.raises(ConfigError, match="schema"):
            parse_config(rankeval_data(schema=2), RankEvalConfig)

    def test_errors_name_nested_fields(self):
        data = json.loads((CONFIG_DIR / 'gen-toy.json').read_text())
        del data['training']['lr']
        with pytest.raises(ConfigError, match=r"training\.lr: field required"):
            parse_config(data, GenToyConfig)

    def test_invalid_values(self):
        with pytest.raises(ConfigError, match="budgets"):
            parse_config(rankeval_data(budgets=[]), RankEvalConfig)
        with pytest.raises(ConfigError, match="gamma"):
            parse_config(rankeval_data(gamma=1.5), RankEvalConfig)

    def test_manifest_is_accepted(self):
        manifest = {
            'manifest_version': 1,
            'command': 'rankeval',
            'config': rankeval_data(seed=4)
        }
        assert parse_config(manifest, RankEvalConfig).seed == 4
        with pytest.raises(ConfigError):
            parse_config({'manifest_version': 1}, RankEvalConfig)

    def test_snapshot_parses_back(self):
        config = load_config(CONFIG_DIR / 'diffnas.json', DiffNasCommandConfig)
        snapshot = config.snapshot()
        assert snapshot['schema'] == 1
        assert parse_config(snapshot, DiffNasCommandConfig) == config

    def test_override(self):
        config = parse_config(rankeval_data(), RankEvalConfig)
        assert override(config, seed=None) is config
        assert override(config, seed=9).seed == 9
        with pytest.raises(ConfigError):
            override(config, seed=-1)


class TestLoading:
    """Reading configuration files."""

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="does not exist"):
            load_config(tmp_path / 'missing.json', RankEvalConfig)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'config.json'
        path.write_text('{"schema": 1,\n oops}', encoding='utf8')
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config(path, RankEvalConfig)

    def test_errors_carry_the_path(self, tmp_path):
        path = tmp_path / 'config.json'
        path.write_text(json.dumps(rankeval_data(budgets='x')),
                        encoding='utf8')
        with pytest.raises(ConfigError, match="config.json: budgets"):
            load_config(path, RankEvalConfig)
