"""Configuration files of the commands.

Every file is a JSON object with `"schema": 1`. Unknown keys are rejected and
validation errors name the offending field, e.g. `training.lr: field required`.
A run manifest written by a previous command is accepted in place of a
configuration file; its config snapshot is used.
"""
import json
import logging
from pathlib import Path
from typing import List, Optional, Type, TypeVar
from pydantic import BaseModel, Extra, ValidationError, confloat, conint, validator
from typing_extensions import Literal
from framework.core.diffnas.darts import DiffNasConfig
from framework.core.estimators import DEFAULT_E
from framework.core.estimators import DEFAULT_GAMMA
from framework.core.estimators import DEFAULT_OVERFIT_THRESHOLD
from framework.core.search.tpe import DEFAULT_GAMMA_SPLIT
from framework.core.search.tpe import DEFAULT_N_CANDIDATES
from framework.core.search.tpe import DEFAULT_N_INIT
from framework.core.toytrain.trainer import TrainConfig
from framework.errors import ConfigError
from framework.utils.fileutils import load_json

SCHEMA_VERSION = 1
DEFAULT_REPEATS = 100

ConfigType = TypeVar('ConfigType', bound='CommandConfig')


class StrictModel(BaseModel):
    """Base of the configuration blocks: unknown keys are errors."""

    class Config:
        extra = Extra.forbid
        allow_mutation = False


class CommandConfig(StrictModel):
    """Fields shared by the configuration of every command."""

    schema_version: Literal[1]
    seed: conint(ge=0) = 0

    class Config:
        fields = {'schema_version': 'schema'}
        allow_population_by_field_name = True

    def snapshot(self) -> dict:
        """Get the JSON representation of the config, as read from a file."""
        return json.loads(self.json(by_alias=True))


class DatasetConfig(StrictModel):
    """The synthetic classification task."""

    dim: conint(ge=1)
    classes: conint(ge=2)
    n_train: conint(ge=1)
    n_val: conint(ge=1)
    n_test: conint(ge=1)
    difficulty: confloat(gt=0, le=1)
    clusters_per_class: conint(ge=1) = 1


class SpaceConfig(StrictModel):
    """The toy architecture space."""

    widths: List[conint(ge=1)]
    depths: List[conint(ge=1)]
    activations: List[Literal['relu', 'tanh']]

    @validator('widths', 'depths', 'activations')
    def _not_empty(cls, value):
        if len(value) == 0:
            raise ValueError("must not be empty")
        return value


class GenToyConfig(CommandConfig):
    """Configuration of `gen-toy`: train every toy architecture with every seed.

    `seed` drives the dataset; `training.seed` is replaced by each of `seeds`.
    """

    name: str = 'toy'
    notes: str = ''
    dataset: DatasetConfig
    space: SpaceConfig
    training: TrainConfig
    seeds: List[conint(ge=0)]

    @validator('seeds')
    def _distinct_seeds(cls, value):
        if len(value) == 0 or len(set(value)) != len(value):
            raise ValueError("must hold at least one seed, without repeats")
        return value


class RankEvalConfig(CommandConfig):
    """Configuration of `rankeval`: rank correlation over an estimator and budget grid."""

    benchmark: str
    estimators: List[str]
    budgets: List[conint(ge=1)]
    E: conint(ge=1) = DEFAULT_E
    gamma: confloat(gt=0, le=1) = DEFAULT_GAMMA
    top_k: List[conint(ge=1)] = []
    seeds: Optional[List[int]] = None

    @validator('estimators', 'budgets')
    def _not_empty(cls, value):
        if len(value) == 0:
            raise ValueError("must not be empty")
        return value


class BudgetConfig(CommandConfig):
    """Configuration of `budget`: effective training budget over random samples."""

    benchmark: str
    sample_sizes: List[conint(ge=1)]
    repeats: conint(ge=1) = DEFAULT_REPEATS
    threshold: confloat(gt=0) = DEFAULT_OVERFIT_THRESHOLD


class EvolutionConfig(StrictModel):
    """Regularized evolution settings."""

    pop_size: conint(ge=1) = 10
    sample_size: conint(ge=1) = 3


class TpeConfig(StrictModel):
    """Density-ratio sampler settings."""

    gamma_split: confloat(gt=0, lt=1) = DEFAULT_GAMMA_SPLIT
    n_init: conint(ge=1) = DEFAULT_N_INIT
    n_candidates: conint(ge=1) = DEFAULT_N_CANDIDATES


class SearchConfig(CommandConfig):
    """Configuration of `search`: compare strategies and evaluators on a benchmark."""

    benchmark: str
    strategies: List[str]
    evaluators: List[str]
    budget: confloat(gt=0)
    n_seeds: conint(ge=1)
    grid_points: conint(ge=1) = 50
    re: EvolutionConfig = EvolutionConfig()
    tpe: TpeConfig = TpeConfig()


class DiffNasCommandConfig(CommandConfig):
    """Configuration of `diffnas`: DARTS and DARTS-TSE on the toy cell.

    `seed` drives the dataset; `seeds` are the seeds of the search runs.
    """

    dataset: DatasetConfig
    search: DiffNasConfig
    methods: List[Literal['darts', 'darts-tse']] = ['darts', 'darts-tse']
    seeds: List[conint(ge=0)] = [0]


COMMAND_CONFIGS = {
    'gen-toy': GenToyConfig,
    'rankeval': RankEvalConfig,
    'budget': BudgetConfig,
    'search': SearchConfig,
    'diffnas': DiffNasCommandConfig
}


def format_validation_error(error: ValidationError) -> str:
    """Format a validation error as `field.path: message` lines."""
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item['loc'])
        lines.append("{}: {}".format(path, item['msg']))
    return "; ".join(lines)


def parse_config(data: dict, config_class: Type[ConfigType]) -> ConfigType:
    """Validate the contents of a configuration file.

    Parameters
    ----------
    data: dict, required
        The parsed JSON.
    config_class: type, required
        The configuration class of the command.

    Returns
    -------
    config: CommandConfig
        The validated configuration.
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    if 'manifest_version' in data:
        logging.info("Reading the config snapshot of a %s run manifest.",
                     data.get('command'))
        data = data.get('config')
        if not isinstance(data, dict):
            raise ConfigError("config: the manifest holds no config snapshot")
    try:
        return config_class.parse_obj(data)
    except ValidationError as e:
        raise ConfigError(format_validation_error(e)) from None


def load_config(path, config_class: Type[ConfigType]) -> ConfigType:
    """Load and validate a configuration file or a run manifest.

    Parameters
    ----------
    path: str or Path, required
        The path of the JSON file.
    config_class: type, required
        The configuration class of the command.

    Returns
    -------
    config: CommandConfig
        The validated configuration.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config file {} does not exist".format(path))
    try:
        data = load_json(path)
    except json.JSONDecodeError as e:
        raise ConfigError("{}:{}: invalid JSON: {}".format(
            path, e.lineno, e.msg)) from None
    try:
        return parse_config(data, config_class)
    except ConfigError as e:
        raise ConfigError("{}: {}".format(path, e)) from None


def override(config: ConfigType, **values) -> ConfigType:
    """Get a validated copy of a config with some top-level fields replaced.

    Fields whose value is None are left unchanged.
    """
    values = {k: v for k, v in values.items() if v is not None}
    if not values:
        return config
    return parse_config(dict(config.snapshot(), **values), type(config))


def estimator_defaults(config: RankEvalConfig) -> dict:
    """Get the estimator hyperparameters a rankeval config sets for every estimator."""
    return {'E': config.E, 'gamma': config.gamma}

