'''Numerical tolerances and size caps, loaded from numerics.json.'''

from __future__ import annotations

import json
from pathlib import Path
from typing import ClassVar

from pydantic import BaseModel, ConfigDict, Field


_DEFAULT_CONFIG_FILE = Path(__file__).resolve().parent / 'numerics.json'


class NumericsConfig(BaseModel):
    '''Caps and tolerances shared by the linear-algebra layers.

    Loaded once per file and cached; pass an explicit instance to override
    values for a single call site.
    '''

    model_config = ConfigDict(frozen=True)

    dense_cap: int = Field(default=2 ** 14, ge=1, description='Largest dimension for dense matrices.')
    dense_eig_cap: int = Field(default=2048, ge=2, description='Largest dimension for full dense eigendecomposition in ground-state search.')
    krylov_dim: int = Field(default=30, ge=2, description='Arnoldi subspace dimension.')
    krylov_tol: float = Field(default=1e-12, gt=0.0, description='Default propagation tolerance.')
    krylov_max_reject: int = Field(default=40, ge=1, description='Consecutive rejected sub-steps before giving up.')
    degeneracy_tol: float = Field(default=1e-9, gt=0.0, description='Eigenvalues closer than this (relative to the operator scale) are tied.')
    defect_gap_tol: float = Field(default=1e-6, gt=0.0, description='Eigenvalue gap below which a pair is flagged near-defective.')
    eig_residual_tol: float = Field(default=1e-9, gt=0.0, description='Relative residual bound for every returned eigenpair.')
    ground_residual_tol: float = Field(default=1e-8, gt=0.0, description='Relative residual bound for the selected ground state.')
    sparse_eig_count: int = Field(default=6, ge=1, description='Eigenpairs requested from ARPACK on the sparse path.')
    postselect_floor: float = Field(default=1e-30, gt=0.0, description='Branch probability treated as an impossible postselection.')
    shot_block: int = Field(default=65536, ge=1, description='Trajectories sampled per concurrent block; results do not depend on it.')
    recommended_spin_sites: int = Field(default=16, ge=2, description='Spin sizes above this trigger a size warning.')
    recommended_fermi_sites: int = Field(default=8, ge=2, description='Fermion sizes above this trigger a size warning.')

    _cache: ClassVar[dict[Path, 'NumericsConfig']] = {}

    @classmethod
    def load(cls, path: str | Path | None = None) -> 'NumericsConfig':
        '''Load numerics from ``src/config/numerics.json`` (or an override).'''
        config_path = (Path(path) if path else _DEFAULT_CONFIG_FILE).resolve()
        if config_path in cls._cache:
            return cls._cache[config_path]

        if not config_path.is_file():
            raise FileNotFoundError(f'Numerics config not found: {config_path}')

        with config_path.open('r', encoding='utf-8') as f:
            instance = cls(**json.load(f))
        cls._cache[config_path] = instance
        return instance
