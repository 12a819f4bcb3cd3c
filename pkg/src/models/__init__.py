'''Environment models: specs and Hamiltonian builders.'''

from .spec import ModelKind, ModelSpec, CouplingAngle, theta_to_delta
from .spins import periodic_bonds, build_ising_env, build_heisenberg_env, build_spin_coupling
from .fermions import (
    annihilation,
    creation,
    number,
    number_sector,
    total_number,
    build_fermi_env,
    build_fermi_coupling,
    fermi_reference,
)
from .registry import ModelBuilder, ModelRegistry, build_env, build_coupling, polarized_reference

__all__ = [
    'ModelKind',
    'ModelSpec',
    'CouplingAngle',
    'theta_to_delta',
    'periodic_bonds',
    'build_ising_env',
    'build_heisenberg_env',
    'build_spin_coupling',
    'annihilation',
    'creation',
    'number',
    'number_sector',
    'total_number',
    'build_fermi_env',
    'build_fermi_coupling',
    'fermi_reference',
    'ModelBuilder',
    'ModelRegistry',
    'build_env',
    'build_coupling',
    'polarized_reference',
]
