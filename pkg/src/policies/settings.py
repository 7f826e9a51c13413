from typing import Any, Dict, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..config import DEFAULT_ALPHA
from ..errors import ConfigurationError

PolicyName = Literal['hi-lcb', 'hi-lcb-lite', 'optimal', 'hedge', 'always-offload', 'always-accept']

LCB_POLICIES = ('hi-lcb', 'hi-lcb-lite')


class PolicyConfig(BaseModel):
    '''Policy selection: {"policy", "alpha", "cost_mode", "gamma", "eta", ...}'''
    model_config = ConfigDict(extra='forbid', frozen=True)

    policy: PolicyName
    alpha: float = Field(default_factory=lambda: DEFAULT_ALPHA)
    cost_mode: Literal['iid', 'fixed'] = 'iid'
    gamma: Optional[float] = None  # known cost for cost_mode=fixed; the instance's mean when omitted
    eta: Union[float, Literal['auto']] = 'auto'
    horizon_hint: Optional[int] = None
    strict_force_offload: bool = False

    @field_validator('alpha')
    @classmethod
    def _alpha_above_half(cls, v: float) -> float:
        if not v > 0.5:
            raise ValueError(f'alpha must be > 0.5, got {v}')
        return v

    @field_validator('gamma')
    @classmethod
    def _gamma_in_unit(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not 0.0 <= v <= 1.0:
            raise ValueError(f'gamma must lie in [0, 1], got {v}')
        return v

    @field_validator('eta')
    @classmethod
    def _eta_positive(cls, v):
        if v != 'auto' and not v > 0:
            raise ValueError(f'eta must be > 0 or "auto", got {v}')
        return v

    @field_validator('horizon_hint')
    @classmethod
    def _horizon_positive(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError(f'horizon_hint must be >= 1, got {v}')
        return v

    @model_validator(mode='after')
    def _gamma_only_when_fixed(self) -> 'PolicyConfig':
        if self.gamma is not None and self.cost_mode != 'fixed':
            raise ValueError('gamma is only meaningful with cost_mode "fixed"')
        return self

    @property
    def label(self) -> str:
        '''Name used in output rows'''
        if self.policy in LCB_POLICIES:
            return f'{self.policy}(alpha={self.alpha:g},{self.cost_mode})'
        if self.policy == 'hedge':
            return 'hedge' if self.eta == 'auto' else f'hedge(eta={self.eta:g})'
        return self.policy


def parse_policy_config(data: Dict[str, Any]) -> PolicyConfig:
    try:
        return PolicyConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f'Invalid policy config: {e}')
