'''Model specifications: which environment, its size and its parameters.'''

from __future__ import annotations

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ModelKind(str, Enum):
    ISING = 'ising'
    HEISENBERG = 'heisenberg'
    FERMI = 'fermi'

    @classmethod
    def from_value(cls, value: 'ModelKind | str') -> 'ModelKind':
        if isinstance(value, ModelKind):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            available = ', '.join(k.value for k in cls)
            raise ValueError(f"Unknown model kind '{value}'. Available: {available}") from None

    @property
    def is_spin(self) -> bool:
        return self is not ModelKind.FERMI


class CouplingAngle(BaseModel):
    '''Coupling written as magnitude and orientation: (dx, dy) = |d|(sin theta, cos theta).'''

    model_config = ConfigDict(frozen=True)

    magnitude: float = Field(ge=0.0, description='|delta|')
    theta: float = Field(description='Orientation in radians; pi/4 gives dx = dy, pi/2 gives dy = 0.')

    def to_delta(self) -> tuple[float, float]:
        return theta_to_delta(self)


def theta_to_delta(c: CouplingAngle) -> tuple[float, float]:
    '''(dx, dy) = |d| (sin theta, cos theta).'''
    return (c.magnitude * math.sin(c.theta), c.magnitude * math.cos(c.theta))


class ModelSpec(BaseModel):
    '''Environment model and all of its physical parameters.

    Periodic boundaries throughout; ``filling`` is the conserved particle
    number of the fermion model and defaults to N (half filling).
    '''

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra='forbid')

    kind: ModelKind = Field(default=ModelKind.ISING, description='ising | heisenberg | fermi')
    n_sites: int = Field(default=12, ge=2, alias='N', description='Lattice sites')
    J: float = Field(default=0.5, description='Exchange / hopping strength')
    U: float = Field(default=0.0, description='On-site interaction (fermi only)')
    h: tuple[float, float] = Field(default=(1.0, 0.0), description='(h_x, h_y) field')
    delta: tuple[float, float] = Field(default=(0.0, 0.0), description='(delta_x, delta_y) qubit coupling')
    filling: int | None = Field(default=None, description='Particle number sector (fermi only, default N)')

    @field_validator('kind', mode='before')
    @classmethod
    def _coerce_kind(cls, value: object) -> ModelKind:
        return ModelKind.from_value(value)  # type: ignore[arg-type]

    @field_validator('J', 'U')
    @classmethod
    def _finite_scalar(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError('parameters must be finite')
        return value

    @field_validator('h', 'delta')
    @classmethod
    def _finite_pair(cls, value: tuple[float, float]) -> tuple[float, float]:
        if not all(math.isfinite(v) for v in value):
            raise ValueError('field components must be finite')
        return (float(value[0]), float(value[1]))

    @model_validator(mode='before')
    @classmethod
    def _default_filling(cls, data: object) -> object:
        if isinstance(data, dict):
            kind = data.get('kind', ModelKind.ISING)
            if ModelKind.from_value(kind) is ModelKind.FERMI and data.get('filling') is None:
                data = {**data, 'filling': data.get('n_sites', data.get('N', 12))}
        return data

    @model_validator(mode='after')
    def _check_filling(self) -> 'ModelSpec':
        if self.kind is ModelKind.FERMI:
            if self.filling is not None and not 0 <= self.filling <= 2 * self.n_sites:
                raise ValueError(f'filling must lie in [0, {2 * self.n_sites}], got {self.filling}')
        elif self.filling is not None:
            raise ValueError('filling applies to the fermi model only')
        return self

    # -----------------------------------------------------------------------
    # Variants used by scans
    # -----------------------------------------------------------------------

    def with_field(self, hx: float | None = None, hy: float | None = None) -> 'ModelSpec':
        return self.model_copy(update={'h': (self.h[0] if hx is None else float(hx), self.h[1] if hy is None else float(hy))})

    def with_delta(self, dx: float, dy: float) -> 'ModelSpec':
        return self.model_copy(update={'delta': (float(dx), float(dy))})

    def with_angle(self, angle: CouplingAngle) -> 'ModelSpec':
        return self.with_delta(*theta_to_delta(angle))

    def shifted(self) -> 'ModelSpec':
        '''Spec whose field is h + delta and whose coupling is zero.'''
        return self.model_copy(update={
            'h': (self.h[0] + self.delta[0], self.h[1] + self.delta[1]),
            'delta': (0.0, 0.0),
        })

    @property
    def n_qubits(self) -> int:
        '''Qubits after the spin / Jordan-Wigner encoding.'''
        return self.n_sites if self.kind.is_spin else 2 * self.n_sites

    def label(self) -> str:
        hx, hy = self.h
        dx, dy = self.delta
        return f'{self.kind.value}_N{self.n_sites}_hx{hx:g}_hy{hy:g}_dx{dx:.6g}_dy{dy:.6g}'
