'''Matrix exponentials: dense Pade scaling-and-squaring and Krylov propagation.

`expm_multiply` computes exp(-i t H) v for general (non-Hermitian) H with a
full-orthogonalization Arnoldi basis and Expokit-style step control: the
local error is estimated from the augmented Hessenberg exponential, a
rejected sub-step is halved, an accepted one proposes the next step size.
'''

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from .operator_sum import OperatorSum, StateVector, as_amplitudes
from ..config.numerics import NumericsConfig
from ..errors import DimensionMismatchError, KrylovConvergenceError, NonFiniteError
from ..utils import get_logger

logger = get_logger(__name__)


def expm_dense(matrix: np.ndarray) -> np.ndarray:
    '''exp(M) for a general complex square matrix.'''
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f'expm_dense needs a square matrix, got shape {m.shape}')
    if not np.all(np.isfinite(m)):
        raise NonFiniteError('expm_dense input contains non-finite entries')
    return scipy.linalg.expm(m)


def _round_step(step: float) -> float:
    '''Round up to two significant digits, as Expokit does.'''
    if step <= 0.0:
        return step
    scale = 10.0 ** (math.floor(math.log10(step)) - 1)
    return math.ceil(step / scale) * scale


def _arnoldi(
    op: OperatorSum,
    w: np.ndarray,
    beta: float,
    m: int,
    breakdown_tol: float,
) -> tuple[np.ndarray, np.ndarray, int, bool]:
    '''Orthonormal Krylov basis V (n x (m+1)) and Hessenberg H ((m+2) x (m+2)).

    Returns (V, H, m_eff, happy) with happy set on invariant-subspace breakdown.
    '''
    n = w.shape[0]
    V = np.zeros((n, m + 1), dtype=np.complex128)
    H = np.zeros((m + 2, m + 2), dtype=np.complex128)
    V[:, 0] = w / beta
    for j in range(m):
        p = op.matvec(V[:, j])
        # classical Gram-Schmidt with one reorthogonalization pass
        for _ in range(2):
            coeffs = V[:, : j + 1].conj().T @ p
            p = p - V[:, : j + 1] @ coeffs
            H[: j + 1, j] += coeffs
        h_next = float(np.linalg.norm(p))
        if h_next <= breakdown_tol:
            return V, H, j + 1, True
        H[j + 1, j] = h_next
        V[:, j + 1] = p / h_next
    return V, H, m, False


def expm_multiply(
    op: OperatorSum,
    v: StateVector | np.ndarray,
    t: float,
    tol: float | None = None,
    krylov_dim: int | None = None,
) -> StateVector:
    '''exp(-i t H) v for a matrix-free OperatorSum H.

    Args:
        op: Generator H (need not be Hermitian).
        v: Initial state; it is not modified.
        t: Real time (negative values propagate backwards).
        tol: Accuracy target for the whole interval; defaults to numerics.json.
        krylov_dim: Arnoldi dimension; defaults to numerics.json.

    Raises:
        KrylovConvergenceError: when step control cannot meet ``tol``; carries
            the achieved local error estimate.
    '''
    numerics = NumericsConfig.load()
    tol = numerics.krylov_tol if tol is None else tol
    if tol <= 0.0:
        raise ValueError(f'tol must be positive, got {tol}')
    w = np.array(as_amplitudes(v), dtype=np.complex128)
    if w.shape[0] != op.dim:
        raise DimensionMismatchError(f'Operator dim {op.dim} does not match state dim {w.shape[0]}')

    beta = float(np.linalg.norm(w))
    if t == 0.0 or beta == 0.0 or op.is_empty:
        return StateVector(w)

    n = op.dim
    m = min(krylov_dim or numerics.krylov_dim, n)
    t_total = abs(float(t))
    # exp(-i t H) v = exp(s A) v with A = -i H, s = sign(t) * tau
    sign = 1.0 if t > 0 else -1.0
    anorm = max(op.norm_bound(), 1e-300)
    breakdown_tol = 1e-12 * anorm
    gamma, delta = 0.9, 1.2

    # error budget per unit time, so the whole interval stays within tol
    tol_rate = tol / t_total

    fact = ((m + 1) / math.e) ** (m + 1) * math.sqrt(2 * math.pi * (m + 1))
    tau = (1.0 / anorm) * ((fact * tol) / (4.0 * beta * anorm)) ** (1.0 / m)
    tau = min(_round_step(tau), t_total)

    t_now = 0.0
    n_steps = 0
    while t_total - t_now > 1e-14 * t_total:
        tau = min(tau, t_total - t_now)
        V, Hk, m_eff, happy = _arnoldi(op, w, beta, m, breakdown_tol)
        # Hessenberg of the generator A = -i H, augmented for the error estimate
        A = -1j * Hk
        if happy:
            tau = t_total - t_now
            mx = m_eff
        else:
            A[m_eff + 1, m_eff] = 1.0
            mx = m_eff + 2
            avnorm = float(np.linalg.norm(op.matvec(V[:, m_eff])))

        rejects = 0
        while True:
            F = scipy.linalg.expm(sign * tau * A[:mx, :mx])
            if happy:
                err_loc = breakdown_tol
                keep = m_eff
                break
            phi1 = abs(beta * F[m_eff, 0])
            phi2 = abs(beta * F[m_eff + 1, 0] * avnorm)
            if phi1 > 10.0 * phi2:
                err_loc = phi2
                xm = 1.0 / m_eff
            elif phi1 > phi2:
                err_loc = phi1 * phi2 / (phi1 - phi2)
                xm = 1.0 / m_eff
            else:
                err_loc = phi1
                xm = 1.0 / max(m_eff - 1, 1)
            keep = m_eff + 1
            if err_loc <= delta * tol_rate * tau:
                break
            rejects += 1
            if rejects > numerics.krylov_max_reject or tau < 1e-14 * t_total:
                raise KrylovConvergenceError(
                    'Krylov step control failed to reach tolerance', err_loc, sign * t_now
                )
            tau *= 0.5
            logger.debug(f'Krylov sub-step rejected (err {err_loc:.3e}), halving to {tau:.3e}')

        w = V[:, :keep] @ (beta * F[:keep, 0])
        beta = float(np.linalg.norm(w))
        t_now += tau
        n_steps += 1
        if not np.isfinite(beta):
            raise KrylovConvergenceError('Propagated state became non-finite', float('inf'), sign * t_now)
        if beta == 0.0:
            break
        if not happy:
            proposal = gamma * tau * (tau * tol_rate / max(err_loc, 1e-300)) ** xm
            tau = _round_step(min(proposal, 10.0 * tau))

    logger.debug(f'expm_multiply: t={t:.6g} in {n_steps} sub-steps (dim {n}, m {m})')
    return StateVector(w)
