'''Brute-force coherence from the full qubit + environment evolution.

The qubit is an extra site above the environment (highest bit), and the
coupling acts on the |1> branch only: H_tot = H_env (x) I + V (x) |1><1|.
'''

from __future__ import annotations

from typing import Sequence

import numpy as np

from .coherence import CoherenceTrace, Method, QubitDensity, _check_times, l1_coherence
from ..config.numerics import NumericsConfig
from ..errors import DenseCapExceededError
from ..models import ModelSpec, build_coupling, build_env, polarized_reference
from ..operators import OperatorSum, expm_dense, expm_multiply
from ..spectral import ground_state
from ..utils import get_logger

logger = get_logger(__name__)


def joint_hamiltonian(H_env: OperatorSum, V: OperatorSum) -> OperatorSum:
    '''H_env on the environment sites plus V conditioned on the qubit site being |1>.'''
    n = H_env.n_sites
    env = H_env.padded(n + 1)
    conditioned = []
    # |1><1| = (I - Z) / 2 on the qubit site
    for coeff, string in V.terms:
        conditioned.append((coeff / 2, string + 'I'))
        conditioned.append((-coeff / 2, string + 'Z'))
    return (env + OperatorSum(n + 1, tuple(conditioned), env.basis)).simplify()


def joint_evolution_coherence(
    spec: ModelSpec,
    times: Sequence[float],
    method: Method = 'krylov',
    tol: float | None = None,
    numerics: NumericsConfig | None = None,
) -> CoherenceTrace:
    '''Evolve (|0> + |1>)/sqrt2 (x) |G>, trace out the environment and return C(t).

    Raises:
        DenseCapExceededError: when the joint dimension exceeds ``dense_cap``.
    '''
    numerics = numerics or NumericsConfig.load()
    grid = _check_times(times)
    env = build_env(spec)
    coupling = build_coupling(spec)
    total_dim = 2 * env.dim
    if total_dim > numerics.dense_cap:
        raise DenseCapExceededError(total_dim, numerics.dense_cap)

    g = np.array(ground_state(env, polarized_reference(spec), numerics).vector.amplitudes)
    H_tot = joint_hamiltonian(env, coupling)
    psi = np.concatenate([g, g]) / np.sqrt(2.0)
    d = env.dim

    step_cache: dict[float, np.ndarray] = {}
    dense = H_tot.to_dense(numerics.dense_cap) if method == 'dense' else None

    coherence, overlap, n0, nd = [], [], [], []
    previous = 0.0
    for t in grid:
        dt = float(t - previous)
        if dt != 0.0:
            if dense is None:
                psi = np.array(expm_multiply(H_tot, psi, dt, tol=tol).amplitudes)
            else:
                key = round(dt, 13)
                if key not in step_cache:
                    step_cache[key] = expm_dense(-1j * dt * dense)
                psi = step_cache[key] @ psi
        previous = float(t)
        # both branches carry the 1/sqrt2 qubit amplitude
        phi0, phid = np.sqrt(2.0) * psi[:d], np.sqrt(2.0) * psi[d:]
        rho = QubitDensity.from_branches(phi0, phid)
        coherence.append(l1_coherence(rho))
        overlap.append(abs(np.vdot(phi0, phid)))
        n0.append(float(np.vdot(phi0, phi0).real))
        nd.append(float(np.vdot(phid, phid).real))

    raw = np.asarray(coherence)
    trace = CoherenceTrace(
        times=grid,
        coherence=np.clip(raw, 0.0, 1.0),
        overlap=np.asarray(overlap),
        norm0_sq=np.asarray(n0),
        normd_sq=np.asarray(nd),
        raw_coherence=raw,
        metadata={'method': f'joint-{method}', 'spec': spec.label()},
    )
    logger.debug(f'Joint evolution for {spec.label()}: C(t_max)={trace.final:.6f}')
    return trace
