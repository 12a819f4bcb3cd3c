'''ExperimentConfig: one scan job, or a reference to a preset of jobs.'''

from __future__ import annotations

import math
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..circuit import CircuitProtocol
from ..config.numerics import NumericsConfig
from ..config.paths import DecoherePaths
from ..models import CouplingAngle, ModelKind, ModelSpec


def _axis(value: Any) -> list[float]:
    '''A list of floats, or {"start", "stop", "num"} expanded with linspace.'''
    if isinstance(value, dict):
        return [float(v) for v in np.linspace(value['start'], value['stop'], int(value['num']))]
    return [float(v) for v in value]


class GridSpec(BaseModel):
    '''(h_x, h_y) grid of a susceptibility map.'''

    hx: list[float] = Field(min_length=1, description='h_x axis')
    hy: list[float] = Field(min_length=1, description='h_y axis')

    @field_validator('hx', 'hy', mode='before')
    @classmethod
    def _expand(cls, value: Any) -> list[float]:
        return _axis(value)


def sector_dim(spec: ModelSpec) -> int:
    if spec.kind is ModelKind.FERMI:
        return math.comb(2 * spec.n_sites, spec.filling if spec.filling is not None else spec.n_sites)
    return 2 ** spec.n_sites


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra='forbid', validate_assignment=True, populate_by_name=True)

    experiment_name: str = 'decohere_run'
    storage_root: str = Field(default_factory=lambda: str(DecoherePaths.load().runs))
    name: str = ''                       # job label inside a preset
    preset: str | None = None
    model: ModelSpec | None = None
    task: Literal['trace', 'map', 'circuit'] = 'trace'
    t_max: float = Field(default=3.0, gt=0.0)
    steps: int = Field(default=60, ge=1)
    hy_values: list[float] = Field(default_factory=list)
    theta_values: list[float] = Field(default_factory=list)   # radians
    delta_magnitude: float | None = Field(default=None, ge=0.0)
    grid: GridSpec | None = None
    method: Literal['krylov', 'dense'] = 'krylov'
    shots: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)
    circuit: CircuitProtocol = CircuitProtocol()
    n_override: int | None = Field(default=None, ge=2, alias='N')

    @field_validator('hy_values', 'theta_values', mode='before')
    @classmethod
    def _expand_axis(cls, value: Any) -> list[float]:
        return _axis(value)

    @model_validator(mode='after')
    def _check(self) -> 'ExperimentConfig':
        if (self.preset is None) == (self.model is None):
            raise ValueError('exactly one of preset / model must be given')
        if self.model is None:
            return self
        if self.task == 'map' and self.grid is None:
            raise ValueError('a map task needs a grid')
        if self.method == 'dense':
            numerics = NumericsConfig.load()
            dim = sector_dim(self.resolved_spec())
            if dim > numerics.dense_cap:
                raise ValueError(f'dense method at dimension {dim} exceeds dense_cap {numerics.dense_cap}; use krylov')
        return self

    # -----------------------------------------------------------------------
    # Resolution
    # -----------------------------------------------------------------------

    def resolved_spec(self) -> ModelSpec:
        if self.model is None:
            raise ValueError(f"config refers to preset '{self.preset}'; expand it first")
        if self.n_override is None or self.n_override == self.model.n_sites:
            return self.model
        update: dict[str, Any] = {'n_sites': self.n_override}
        if self.model.kind is ModelKind.FERMI:
            update['filling'] = self.n_override
        return ModelSpec.model_validate({**self.model.model_dump(), **update})

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps + 1)

    def coupling_magnitude(self) -> float:
        if self.delta_magnitude is not None:
            return self.delta_magnitude
        return math.hypot(*self.resolved_spec().delta)

    def points(self) -> list[tuple[str, ModelSpec]]:
        '''Cartesian product theta x h_y; empty axes contribute the model's own value.'''
        base = self.resolved_spec()
        prefix = self.name or base.kind.value
        thetas: list[float | None] = list(self.theta_values) or [None]
        hys = list(self.hy_values) or [base.h[1]]
        out = []
        for theta in thetas:
            for hy in hys:
                spec = base.with_field(hy=hy)
                label = f'{prefix}_hy{hy:g}'
                if theta is not None:
                    spec = spec.with_angle(CouplingAngle(magnitude=self.coupling_magnitude(), theta=theta))
                    label += f'_theta{theta:.6g}'
                out.append((label, spec))
        return out


_MODEL_KEYS = ('J', 'U')


def apply_overrides(config: ExperimentConfig, overrides: dict[str, Any]) -> ExperimentConfig:
    '''Apply flag-style overrides to a config.

    Keys: N, J, U, hx, hy, dx, dy, theta, t_max, steps, method, shots, seed,
    workers, plus the axes hy_values, theta_values and delta_magnitude.

    On a model, hy sets the field; when the config scans h_y it replaces
    the axis with the single value. dx/dy fix delta and drop any theta axis.
    '''
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if not overrides:
        return config
    data = config.model_dump(by_alias=False, exclude={'model', 'circuit', 'grid'})
    data['circuit'] = config.circuit
    data['grid'] = config.grid
    model = config.model.model_dump() if config.model is not None else None

    for key in ('t_max', 'steps', 'method', 'shots', 'seed', 'workers', 'hy_values', 'theta_values', 'delta_magnitude'):
        if key in overrides:
            data[key] = overrides[key]
    if 'N' in overrides:
        data['n_override'] = int(overrides['N'])
    if model is not None:
        for key in _MODEL_KEYS:
            if key in overrides:
                model[key] = float(overrides[key])
        hx, hy = model['h']
        if 'hx' in overrides:
            hx = float(overrides['hx'])
        if 'hy' in overrides:
            if data['hy_values']:
                data['hy_values'] = [float(overrides['hy'])]
            else:
                hy = float(overrides['hy'])
        model['h'] = (hx, hy)
        if 'dx' in overrides or 'dy' in overrides:
            dx, dy = model['delta']
            model['delta'] = (float(overrides.get('dx', dx)), float(overrides.get('dy', dy)))
            if 'theta_values' not in overrides:
                data['theta_values'] = []
    if 'theta' in overrides:
        data['theta_values'] = [float(overrides['theta'])]
    data['model'] = model
    return ExperimentConfig.model_validate(data)
