'''Ground states of non-Hermitian Hamiltonians.

The ground state is the eigenpair with minimal real part. Ties are broken by
overlap with the fully polarized reference, then by minimal |Im E|.

At an exceptional point the bottom of the spectrum is a defective Jordan
block: LAPACK returns a cloud of eigenvalues of width ~eps^(1/k) around the
true one and eigenvectors accurate only to that order. When the polarized
reference is itself an exact eigenvector at the bottom of the spectrum (the
situation at h_x = h_y for the spin chains) it is returned as is; otherwise
a near-defective selected pair is polished by shifted inverse iteration.
'''

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..config.numerics import NumericsConfig
from ..errors import BrokenPhaseError, DegenerateAmplitudeError, EigenSolverError
from ..operators import OperatorSum, StateVector, as_amplitudes, eig_general
from ..operators.spectrum import near_defective_flags
from ..utils import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class GroundState:
    energy: complex
    vector: StateVector
    degenerate: bool
    polarized_overlap: float
    near_defective: bool = False
    residual: float = 0.0
    method: str = 'dense'


def _fix_phase(v: np.ndarray) -> np.ndarray:
    '''Rotate so the largest-magnitude component is real and positive.'''
    k = int(np.argmax(np.abs(v)))
    if v[k] == 0:
        return v
    return v * (abs(v[k]) / v[k])


def _clusters(indices: np.ndarray, eigenvalues: np.ndarray, tol: float) -> list[np.ndarray]:
    '''Group indices whose eigenvalues lie within ``tol`` of each other (single linkage).'''
    remaining = list(indices)
    groups: list[np.ndarray] = []
    while remaining:
        group = [remaining.pop(0)]
        grew = True
        while grew:
            grew = False
            for idx in list(remaining):
                if min(abs(eigenvalues[idx] - eigenvalues[g]) for g in group) <= tol:
                    group.append(idx)
                    remaining.remove(idx)
                    grew = True
        groups.append(np.array(sorted(group)))
    return groups


def _inverse_iteration(
    H: OperatorSum,
    matrix: np.ndarray | None,
    shift: complex,
    v: np.ndarray,
    scale: float,
    max_iter: int = 30,
) -> np.ndarray:
    '''Polish v toward the eigenvector nearest ``shift``.'''
    dim = v.shape[0]
    # a tiny offset keeps the shifted matrix nonsingular when shift is exact
    mu = shift + 1e-12 * scale * (1 + 1j)
    if matrix is not None:
        lu = scipy.linalg.lu_factor(matrix - mu * np.eye(dim), check_finite=False)
        solve = lambda b: scipy.linalg.lu_solve(lu, b, check_finite=False)  # noqa: E731
    else:
        shifted = (H.to_sparse() - mu * sp.identity(dim, dtype=np.complex128, format='csr')).tocsc()
        factor = spla.splu(shifted)
        solve = factor.solve
    x = v / np.linalg.norm(v)
    for _ in range(max_iter):
        y = solve(x)
        norm = np.linalg.norm(y)
        if not np.isfinite(norm) or norm == 0.0:
            break
        y = y / norm
        y = y * (np.vdot(y, x) / abs(np.vdot(y, x))).conjugate() if np.vdot(y, x) != 0 else y
        if np.linalg.norm(y - x) < 1e-14:
            x = y
            break
        x = y
    return x


def _partial_spectrum(H: OperatorSum, ref: np.ndarray, numerics: NumericsConfig) -> tuple[np.ndarray, np.ndarray]:
    k = min(numerics.sparse_eig_count, H.dim - 2)
    ncv = min(H.dim, max(2 * k + 1, 40))
    try:
        w, V = spla.eigs(H.to_sparse(), k=k, which='SR', ncv=ncv, v0=ref + 1e-3)
    except (spla.ArpackNoConvergence, spla.ArpackError) as exc:
        raise EigenSolverError(f'ARPACK failed to converge: {exc}') from exc
    V = V / np.linalg.norm(V, axis=0, keepdims=True)
    return w, V


def ground_state(
    H: OperatorSum,
    reference: StateVector | np.ndarray | None = None,
    numerics: NumericsConfig | None = None,
) -> GroundState:
    '''Select the ground state of a (possibly non-Hermitian) Hamiltonian.

    Args:
        H: Environment Hamiltonian.
        reference: Polarized tie-break state; defaults to basis state 0, the
            all-|0> state for spins and the spin-up-filled state of a
            fermion sector.
        numerics: Tolerance overrides.

    Raises:
        EigenSolverError: solver failure or residual above
            ``ground_residual_tol * ||H||``.
    '''
    numerics = numerics or NumericsConfig.load()
    dim = H.dim
    ref = np.zeros(dim, dtype=np.complex128)
    if reference is None:
        ref[0] = 1.0
    else:
        ref = np.array(as_amplitudes(reference), dtype=np.complex128)
        ref = ref / np.linalg.norm(ref)
    scale = max(H.norm_bound(), 1.0)
    tie_tol = numerics.degeneracy_tol * scale

    matrix: np.ndarray | None = None
    if dim <= numerics.dense_eig_cap:
        matrix = H.to_sparse().toarray()
        spectrum = eig_general(matrix, numerics)
        w, V = spectrum.eigenvalues, spectrum.eigenvectors
        flags = spectrum.condition_flags
        method = 'dense'
    else:
        w, V = _partial_spectrum(H, ref, numerics)
        flags = near_defective_flags(w, numerics.defect_gap_tol * scale)
        method = 'sparse'

    i0 = int(np.argmin(w.real))
    overlaps = np.abs(V.conj().T @ ref)

    # exact polarized eigenvector at the bottom of the spectrum
    h_ref = H.matvec(ref)
    e_ref = complex(np.vdot(ref, h_ref))
    r_ref = float(np.linalg.norm(h_ref - e_ref * ref))
    if r_ref <= numerics.eig_residual_tol * scale:
        near = overlaps >= 0.5
        spread = float(np.max(np.abs(w[near] - e_ref))) if near.any() else 0.0
        if e_ref.real <= w[i0].real + spread + tie_tol:
            degenerate = int(np.sum((np.abs(w - e_ref) <= tie_tol) & ~near)) >= 1
            defective = bool(near.sum() >= 2 and spread > tie_tol)
            if defective:
                logger.debug(f'Polarized reference selected inside a defective cluster (spread {spread:.2e})')
            return GroundState(
                energy=e_ref,
                vector=StateVector(_fix_phase(ref.copy())),
                degenerate=degenerate,
                polarized_overlap=1.0,
                near_defective=defective,
                residual=r_ref,
                method='reference',
            )

    ties = np.nonzero(w.real - w[i0].real <= tie_tol)[0]
    best: tuple[float, float] | None = None
    chosen_cluster = np.array([i0])
    for cluster in _clusters(ties, w, tie_tol):
        Q = scipy.linalg.orth(V[:, cluster])
        weight = float(np.linalg.norm(Q.conj().T @ ref))
        key = (round(weight, 12), -float(np.min(np.abs(w[cluster].imag))))
        if best is None or key > best:
            best = key
            chosen_cluster = cluster
            chosen_q = Q

    degenerate = chosen_cluster.shape[0] >= 2
    coeffs = chosen_q.conj().T @ ref
    if degenerate and np.linalg.norm(coeffs) > 1e-8:
        v = chosen_q @ (coeffs / np.linalg.norm(coeffs))
    else:
        pick = chosen_cluster[int(np.argmin(np.abs(w[chosen_cluster].imag)))]
        v = V[:, pick]
    near_defective = bool(np.any(flags[chosen_cluster]))

    if near_defective and not degenerate:
        around = np.abs(w - w[chosen_cluster[0]]) < numerics.defect_gap_tol * scale
        shift = complex(np.mean(w[around]))
        v = _inverse_iteration(H, matrix, shift, v, scale)
        logger.warning(f'Near-defective ground state (gap < {numerics.defect_gap_tol:.0e}); refined by inverse iteration')

    v = _fix_phase(v / np.linalg.norm(v))
    hv = H.matvec(v)
    energy = complex(np.vdot(v, hv))
    residual = float(np.linalg.norm(hv - energy * v))
    if residual > numerics.ground_residual_tol * scale:
        raise EigenSolverError(
            f'Ground-state residual {residual:.3e} exceeds {numerics.ground_residual_tol:.0e} * ||H|| ({scale:.3e})'
        )
    return GroundState(
        energy=energy,
        vector=StateVector(v),
        degenerate=degenerate,
        polarized_overlap=float(abs(np.vdot(ref, v))),
        near_defective=near_defective,
        residual=residual,
        method=method,
    )


def ground_state_ising2_closed_form(J: float, hx: float, hy: float) -> StateVector:
    '''Two-site Ising ground state in the Z basis |00>, |01>, |10>, |11>.

    [(hx+hy)/b, -a/2b, -a/2b, (hx-hy)/b] with a = J - sqrt(4hx^2 - 4hy^2 + J^2)
    and b = sqrt(4hx^2 + J a).

    Raises:
        BrokenPhaseError: 4hx^2 - 4hy^2 + J^2 < 0, where a is complex.
        DegenerateAmplitudeError: b^2 <= 0.
    '''
    disc = 4 * hx ** 2 - 4 * hy ** 2 + J ** 2
    if disc < 0:
        raise BrokenPhaseError(J, hx, hy, disc)
    alpha = J - math.sqrt(disc)
    beta_sq = 4 * hx ** 2 + J * alpha
    if beta_sq <= 0:
        raise DegenerateAmplitudeError('b^2', beta_sq)
    beta = math.sqrt(beta_sq)
    amps = np.array([(hx + hy) / beta, -alpha / (2 * beta), -alpha / (2 * beta), (hx - hy) / beta])
    return StateVector(amps / np.linalg.norm(amps))
