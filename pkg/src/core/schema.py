import hashlib
import json
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, ValidationError

from ..config import logger
from ..errors import ConfigurationError
from .types import AccuracyProfile, ConfidenceGrid, CostModel, CostVariant, InstanceSpec


class CostDocument(BaseModel):
    '''JSON form of a cost model'''
    model_config = ConfigDict(extra='forbid')

    variant: Literal['fixed', 'bernoulli', 'discrete']
    gamma: Optional[float] = None
    support: Optional[List[Tuple[float, float]]] = None

    def to_model(self) -> CostModel:
        if self.variant == 'discrete':
            return CostModel.discrete(self.support or [])
        return CostModel(CostVariant(self.variant), gamma=self.gamma)


class InstanceDocument(BaseModel):
    '''JSON form of an instance: {"grid", "f", "weights", "cost"}'''
    model_config = ConfigDict(extra='forbid')

    grid: List[float]
    f: List[float]
    weights: Optional[List[float]] = None
    cost: CostDocument


def cost_to_dict(cost: CostModel) -> Dict[str, Any]:
    if cost.variant is CostVariant.DISCRETE:
        return {'variant': 'discrete', 'support': [[v, p] for v, p in cost.support]}
    return {'variant': cost.variant.value, 'gamma': cost.gamma}


def instance_to_dict(instance: InstanceSpec) -> Dict[str, Any]:
    return {
        'grid': list(instance.grid.values),
        'f': list(instance.profile.f),
        'weights': None if instance.weights is None else list(instance.weights),
        'cost': cost_to_dict(instance.cost),
    }


def instance_from_dict(data: Dict[str, Any]) -> InstanceSpec:
    '''Validate an instance document and build the instance'''
    try:
        doc = InstanceDocument.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f'Invalid instance document: {e}')
    instance = InstanceSpec(
        grid=ConfidenceGrid(tuple(doc.grid)),
        profile=AccuracyProfile(tuple(doc.f)),
        cost=doc.cost.to_model(),
        weights=None if doc.weights is None else tuple(doc.weights),
    )
    if not instance.profile.monotone:
        logger.warning('Instance accuracy profile is not monotone in confidence')
    return instance


def load_instance(path: str) -> InstanceSpec:
    '''Load an instance JSON file'''
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f'Cannot read instance file {path}: {e}')
    logger.debug(f'Loaded instance from {path}')
    return instance_from_dict(data)


def save_instance(instance: InstanceSpec, path: str) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(instance_to_dict(instance), f, indent=2)


def instance_fingerprint(instance: InstanceSpec) -> str:
    '''SHA-256 of the canonical JSON form'''
    canonical = json.dumps(instance_to_dict(instance), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
