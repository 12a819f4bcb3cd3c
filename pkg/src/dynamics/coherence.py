'''Qubit coherence from the two environment branches.

With the qubit in (|0> + |1>)/sqrt2 and a coupling diagonal in the qubit
basis, the joint state stays sum_a |a> |phi_a(t)>, where
|phi_0> = exp(-i H_env t)|G> and |phi_d> = exp(-i (H_env + V) t)|G>. The
l1-coherence of the reduced qubit state is then

    C(t) = |<phi_0|phi_d>| / ((||phi_0||^2 + ||phi_d||^2) / 2).
'''

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal, Sequence

import numpy as np

from ..config.numerics import NumericsConfig
from ..errors import DimensionMismatchError
from ..models import ModelSpec, build_coupling, build_env, polarized_reference
from ..operators import OperatorSum, StateVector, as_amplitudes, expm_dense, expm_multiply
from ..spectral import ground_state
from ..utils import get_logger, write_csv

logger = get_logger(__name__)

Method = Literal['krylov', 'dense']

TRACE_COLUMNS = ('t', 'C', 'overlap', 'norm0_sq', 'normd_sq')


@dataclass(frozen=True, eq=False)
class QubitDensity:
    '''Validated 2x2 reduced density matrix.'''

    matrix: np.ndarray
    atol: float = 1e-10

    def __post_init__(self) -> None:
        rho = np.array(self.matrix, dtype=np.complex128)
        if rho.shape != (2, 2):
            raise DimensionMismatchError(f'Qubit density must be 2x2, got {rho.shape}')
        if abs(np.trace(rho) - 1.0) > self.atol:
            raise ValueError(f'Density trace {np.trace(rho):.12g} != 1')
        if np.max(np.abs(rho - rho.conj().T)) > self.atol:
            raise ValueError('Density matrix is not Hermitian')
        if np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)) < -self.atol:
            raise ValueError('Density matrix has a negative eigenvalue')
        rho.setflags(write=False)
        object.__setattr__(self, 'matrix', rho)

    @classmethod
    def from_branches(cls, phi0: np.ndarray, phid: np.ndarray) -> 'QubitDensity':
        '''rho_ab = <phi_b|phi_a> / (||phi_0||^2 + ||phi_d||^2) for equal-weight branches.'''
        total = float(np.vdot(phi0, phi0).real + np.vdot(phid, phid).real)
        off = complex(np.vdot(phid, phi0)) / total
        rho = np.array([
            [np.vdot(phi0, phi0).real / total, off],
            [off.conjugate(), np.vdot(phid, phid).real / total],
        ])
        return cls(rho)


def l1_coherence(rho: QubitDensity | np.ndarray) -> float:
    '''|rho_01| + |rho_10|.'''
    matrix = rho.matrix if isinstance(rho, QubitDensity) else QubitDensity(rho).matrix
    return float(abs(matrix[0, 1]) + abs(matrix[1, 0]))


@dataclass(frozen=True, eq=False)
class CoherenceTrace:
    '''C(t) with branch overlaps and norms.

    ``coherence`` is capped to [0, 1]; ``raw_coherence`` keeps the uncapped
    value.
    '''

    times: np.ndarray
    coherence: np.ndarray
    overlap: np.ndarray
    norm0_sq: np.ndarray
    normd_sq: np.ndarray
    raw_coherence: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_branches(
        cls,
        times: Sequence[float],
        overlap: Sequence[float],
        norm0_sq: Sequence[float],
        normd_sq: Sequence[float],
        metadata: dict[str, Any] | None = None,
    ) -> 'CoherenceTrace':
        overlap = np.asarray(overlap, dtype=float)
        norm0_sq = np.asarray(norm0_sq, dtype=float)
        normd_sq = np.asarray(normd_sq, dtype=float)
        with np.errstate(invalid='ignore', divide='ignore'):
            raw = overlap / ((norm0_sq + normd_sq) / 2.0)
        return cls(
            times=np.asarray(times, dtype=float),
            coherence=np.clip(raw, 0.0, 1.0),
            overlap=overlap,
            norm0_sq=norm0_sq,
            normd_sq=normd_sq,
            raw_coherence=raw,
            metadata=dict(metadata or {}),
        )

    def __len__(self) -> int:
        return int(self.times.shape[0])

    @property
    def final(self) -> float:
        return float(self.coherence[-1])

    def to_rows(self) -> list[tuple[float, ...]]:
        return [
            (float(t), float(c), float(o), float(n0), float(nd))
            for t, c, o, n0, nd in zip(self.times, self.coherence, self.overlap, self.norm0_sq, self.normd_sq)
        ]

    def to_csv(self, path: str | Path) -> Path:
        return write_csv(path, TRACE_COLUMNS, self.to_rows())


def _check_times(times: Sequence[float]) -> np.ndarray:
    grid = np.asarray(times, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError('times must be a non-empty 1-D grid')
    if grid[0] != 0.0:
        raise ValueError(f'times must start at 0, got {grid[0]}')
    if np.any(np.diff(grid) < 0):
        raise ValueError('times must be non-decreasing')
    return grid


class _Propagator:
    '''Advances a state by dt under one Hamiltonian, caching dense step matrices.'''

    def __init__(self, H: OperatorSum, method: Method, tol: float | None, numerics: NumericsConfig) -> None:
        self.H = H
        self.method = method
        self.tol = tol
        self._dense = H.to_dense(numerics.dense_cap) if method == 'dense' else None
        self._steps: dict[float, np.ndarray] = {}

    def advance(self, psi: np.ndarray, dt: float) -> np.ndarray:
        if dt == 0.0:
            return psi
        if self._dense is None:
            return np.array(expm_multiply(self.H, psi, dt, tol=self.tol).amplitudes)
        # linspace steps differ in the last bits; share one propagator per step size
        key = round(dt, 13)
        step = self._steps.get(key)
        if step is None:
            step = expm_dense(-1j * dt * self._dense)
            self._steps[key] = step
        return step @ psi


def coherence_trace(
    H_env: OperatorSum,
    V: OperatorSum,
    G: StateVector | np.ndarray,
    times: Sequence[float],
    method: Method = 'krylov',
    tol: float | None = None,
    numerics: NumericsConfig | None = None,
) -> CoherenceTrace:
    '''Two-branch coherence trace, propagated incrementally between grid points.

    Raises:
        ValueError: bad grid, unnormalized G, or unknown method.
        DimensionMismatchError: H_env, V and G on different spaces.
        KrylovConvergenceError / DenseCapExceededError: propagation failure.
    '''
    numerics = numerics or NumericsConfig.load()
    if method not in ('krylov', 'dense'):
        raise ValueError(f"Unknown propagation method '{method}'. Available: krylov, dense")
    grid = _check_times(times)
    g = np.array(as_amplitudes(G), dtype=np.complex128)
    if g.shape[0] != H_env.dim:
        raise DimensionMismatchError(f'State dim {g.shape[0]} does not match operator dim {H_env.dim}')
    if abs(np.linalg.norm(g) - 1.0) > 1e-8:
        raise ValueError(f'Initial environment state must be unit-normalized, norm={np.linalg.norm(g):.12g}')

    branch0 = _Propagator(H_env, method, tol, numerics)
    identical = V.is_empty
    branchd = branch0 if identical else _Propagator(H_env + V, method, tol, numerics)

    phi0, phid = g.copy(), g.copy()
    overlap, n0, nd = [], [], []
    previous = 0.0
    for t in grid:
        dt = float(t - previous)
        phi0 = branch0.advance(phi0, dt)
        phid = phi0 if identical else branchd.advance(phid, dt)
        previous = float(t)
        overlap.append(abs(np.vdot(phi0, phid)))
        n0.append(float(np.vdot(phi0, phi0).real))
        nd.append(float(np.vdot(phid, phid).real))

    trace = CoherenceTrace.from_branches(grid, overlap, n0, nd, {'method': method})
    logger.debug(f'Coherence trace over {grid.size} points ({method}): C(t_max)={trace.final:.6f}')
    return trace


def coupling_kernel_norm(V: OperatorSum, G: StateVector | np.ndarray) -> float:
    '''||V|G>||; zero when the coupling cannot move the environment out of |G>.'''
    if V.is_empty:
        return 0.0
    return V.apply(G).norm


def spec_coherence_trace(
    spec: ModelSpec,
    times: Sequence[float],
    method: Method = 'krylov',
    tol: float | None = None,
    numerics: NumericsConfig | None = None,
) -> CoherenceTrace:
    '''Build H_env, V and |G> for ``spec`` and run coherence_trace.'''
    env = build_env(spec)
    ground = ground_state(env, polarized_reference(spec), numerics)
    trace = coherence_trace(env, build_coupling(spec), ground.vector, times, method, tol, numerics)
    trace.metadata.update({
        'spec': spec.label(),
        'ground_energy_re': ground.energy.real,
        'ground_energy_im': ground.energy.imag,
        'degenerate': ground.degenerate,
        'near_defective': ground.near_defective,
    })
    return trace
