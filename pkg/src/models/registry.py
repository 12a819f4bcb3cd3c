'''Model registry: dispatch from a ModelSpec to its builders.'''

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, ClassVar

from .spec import ModelKind, ModelSpec
from .spins import build_heisenberg_env, build_ising_env, build_spin_coupling
from .fermions import build_fermi_coupling, build_fermi_env, fermi_reference
from ..operators import OperatorSum, StateVector


@dataclass(frozen=True)
class ModelBuilder:
    '''Environment, coupling and polarized-reference constructors for one model kind.'''

    env: Callable[[ModelSpec], OperatorSum]
    coupling: Callable[[ModelSpec], OperatorSum]
    reference: Callable[[ModelSpec], StateVector]


def _spin_reference(spec: ModelSpec) -> StateVector:
    return StateVector.basis_state(2 ** spec.n_sites, 0)


class ModelRegistry:
    '''Registry for model builders.

    Usage:
        ModelRegistry.register(ModelKind.ISING, ModelBuilder(...))
        H = ModelRegistry.get(spec.kind).env(spec)
    '''

    _registry: ClassVar[dict[ModelKind, ModelBuilder]] = {}

    @classmethod
    def register(cls, kind: ModelKind | str, builder: ModelBuilder) -> None:
        cls._registry[ModelKind.from_value(kind)] = builder

    @classmethod
    def get(cls, kind: ModelKind | str) -> ModelBuilder:
        '''Raises KeyError naming the registered kinds.'''
        key = ModelKind.from_value(kind)
        if key not in cls._registry:
            available = ', '.join(k.value for k in cls._registry)
            raise KeyError(f"Model '{key.value}' not found. Available: {available}")
        return cls._registry[key]

    @classmethod
    def list_models(cls) -> list[str]:
        return [k.value for k in cls._registry]


def build_env(spec: ModelSpec) -> OperatorSum:
    return ModelRegistry.get(spec.kind).env(spec)


def build_coupling(spec: ModelSpec) -> OperatorSum:
    '''V with H_env(h) + V = H_env(h + delta).'''
    return ModelRegistry.get(spec.kind).coupling(spec)


def polarized_reference(spec: ModelSpec) -> StateVector:
    return ModelRegistry.get(spec.kind).reference(spec)


# ---------------------------------------------------------------------------
# Default registrations
# ---------------------------------------------------------------------------
ModelRegistry.register(ModelKind.ISING, ModelBuilder(build_ising_env, build_spin_coupling, _spin_reference))
ModelRegistry.register(ModelKind.HEISENBERG, ModelBuilder(build_heisenberg_env, build_spin_coupling, _spin_reference))
ModelRegistry.register(ModelKind.FERMI, ModelBuilder(build_fermi_env, build_fermi_coupling, fermi_reference))
