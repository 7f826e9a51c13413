import json
import os
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..config import BASE_SEED, DEFAULT_CHECKPOINTS, logger
from ..core.schema import instance_from_dict, load_instance
from ..core.types import InstanceSpec
from ..environment.stream import ArrivalMode, ArrivalProcess, load_adversarial_sequence
from ..errors import ConfigurationError
from ..ingest.trace import load_quantized_trace
from ..policies.settings import PolicyConfig


class ArrivalsConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    mode: Literal['stochastic', 'adversarial', 'trace-replay', 'trace-sample'] = 'stochastic'
    path: Optional[str] = None

    @model_validator(mode='after')
    def _path_when_needed(self) -> 'ArrivalsConfig':
        if self.mode != 'stochastic' and not self.path:
            raise ValueError(f'arrivals mode {self.mode!r} needs a path')
        return self


class ExperimentConfig(BaseModel):
    '''One experiment: instance, arrivals, policies, seeds, horizon, checkpoints, output'''
    model_config = ConfigDict(extra='forbid')

    instance: Union[str, Dict[str, Any]]
    arrivals: ArrivalsConfig = Field(default_factory=ArrivalsConfig)
    policies: List[PolicyConfig] = Field(min_length=1)
    seeds: int = Field(default=100, ge=1)
    base_seed: int = Field(default=BASE_SEED, ge=0)
    T: int = Field(default=100000, ge=1)
    checkpoints: Optional[List[int]] = None
    out: Optional[str] = None

    @field_validator('instance')
    @classmethod
    def _instance_file_exists(cls, v):
        if isinstance(v, str) and not os.path.isfile(v):
            raise ValueError(f'instance file {v!r} does not exist')
        return v

    @model_validator(mode='after')
    def _checkpoints_within_horizon(self) -> 'ExperimentConfig':
        if self.checkpoints is None:
            self.checkpoints = [c for c in DEFAULT_CHECKPOINTS if c < self.T] + [self.T]
        cps = self.checkpoints
        if not cps or cps[0] < 1 or cps[-1] > self.T or any(b <= a for a, b in zip(cps, cps[1:])):
            raise ValueError(f'checkpoints must be strictly increasing within [1, T={self.T}]')
        if self.arrivals.path and not os.path.isfile(self.arrivals.path):
            raise ValueError(f'arrivals file {self.arrivals.path!r} does not exist')
        return self

    @property
    def seed_list(self) -> List[int]:
        '''seed_i = base_seed + i'''
        return [self.base_seed + i for i in range(self.seeds)]


def parse_experiment(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f'Invalid experiment config: {e}')


def load_experiment_file(path: str) -> Dict[str, Any]:
    '''Raw experiment JSON; validation happens after CLI overrides are merged'''
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f'Cannot read config {path}: {e}')
    if not isinstance(data, dict):
        raise ConfigurationError(f'Config {path} must hold a JSON object.')
    logger.debug(f'Loaded experiment config from {path}')
    return data


def resolve_instance(config: ExperimentConfig) -> InstanceSpec:
    if isinstance(config.instance, str):
        return load_instance(config.instance)
    return instance_from_dict(config.instance)


def resolve_arrivals(config: ExperimentConfig, instance: InstanceSpec) -> ArrivalProcess:
    mode = ArrivalMode(config.arrivals.mode)
    if mode is ArrivalMode.STOCHASTIC:
        return ArrivalProcess.stochastic()
    if mode is ArrivalMode.ADVERSARIAL:
        return ArrivalProcess.adversarial(load_adversarial_sequence(config.arrivals.path))
    qt = load_quantized_trace(config.arrivals.path, instance.grid)
    if mode is ArrivalMode.TRACE_REPLAY:
        return ArrivalProcess.trace_replay(qt.bins, qt.correct)
    return ArrivalProcess.trace_sample(qt.bins, qt.correct)
