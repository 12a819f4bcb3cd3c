'''General (non-Hermitian) eigendecomposition with residual checks.'''

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .operator_sum import StateVector
from ..config.numerics import NumericsConfig
from ..errors import DenseCapExceededError, DimensionMismatchError, EigenSolverError, NonFiniteError
from ..utils import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class SpectralResult:
    '''Eigenvalues with unit-norm right eigenvectors (as matrix columns).

    ``condition_flags[i]`` marks pairs whose eigenvalue lies within the
    defect gap of another eigenvalue: near an exceptional point those
    eigenvectors are ill-conditioned.
    '''

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    condition_flags: np.ndarray
    scale: float

    def __len__(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def right_eigenvectors(self) -> list[StateVector]:
        return [StateVector(self.eigenvectors[:, i]) for i in range(len(self))]

    def vector(self, index: int) -> StateVector:
        return StateVector(self.eigenvectors[:, index])

    @property
    def any_near_defective(self) -> bool:
        return bool(np.any(self.condition_flags))


def near_defective_flags(eigenvalues: np.ndarray, gap_tol: float) -> np.ndarray:
    '''True where another eigenvalue lies closer than ``gap_tol``.'''
    n = eigenvalues.shape[0]
    flags = np.zeros(n, dtype=bool)
    # chunked pairwise distances keep memory at O(chunk * n)
    chunk = 512
    for start in range(0, n, chunk):
        block = eigenvalues[start:start + chunk]
        dist = np.abs(block[:, None] - eigenvalues[None, :])
        idx = np.arange(start, start + block.shape[0])
        dist[np.arange(block.shape[0]), idx] = np.inf
        flags[start:start + block.shape[0]] = dist.min(axis=1) < gap_tol
    return flags


def eig_general(matrix: np.ndarray, numerics: NumericsConfig | None = None) -> SpectralResult:
    '''All eigenpairs of a general complex matrix.

    Raises:
        EigenSolverError: LAPACK failure, or a pair whose residual exceeds
            ``eig_residual_tol * ||M||``.
    '''
    numerics = numerics or NumericsConfig.load()
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f'eig_general needs a square matrix, got shape {m.shape}')
    if m.shape[0] > numerics.dense_cap:
        raise DenseCapExceededError(m.shape[0], numerics.dense_cap)
    if not np.all(np.isfinite(m)):
        raise NonFiniteError('eig_general input contains non-finite entries')

    try:
        eigenvalues, vectors = scipy.linalg.eig(m, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f'Eigendecomposition failed: {exc}') from exc

    vectors = vectors / np.linalg.norm(vectors, axis=0, keepdims=True)
    residuals = np.linalg.norm(m @ vectors - vectors * eigenvalues[None, :], axis=0)
    scale = max(float(np.linalg.norm(m, 2)) if m.shape[0] <= 512 else float(np.linalg.norm(m, 'fro')), 1.0)
    worst = float(residuals.max()) if residuals.size else 0.0
    if worst > numerics.eig_residual_tol * scale:
        raise EigenSolverError(
            f'Eigenpair residual {worst:.3e} exceeds {numerics.eig_residual_tol:.1e} * ||M|| ({scale:.3e})'
        )

    flags = near_defective_flags(eigenvalues, numerics.defect_gap_tol * scale)
    if flags.any():
        logger.debug(f'{int(flags.sum())} of {flags.size} eigenpairs flagged near-defective')
    return SpectralResult(eigenvalues, vectors, residuals, flags, scale)
