'''Circuit execution: exact postselected amplitudes and shot sampling.

Register qubit q is bit q of the basis index, so in a C-ordered reshape to
(2,) * n the axis of qubit q is n - 1 - q.
'''

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .circuit import Circuit
from .gates import Gate, GateKind
from ..config.numerics import NumericsConfig
from ..errors import DimensionMismatchError, PostselectionError
from ..operators import StateVector, as_amplitudes
from ..utils import get_logger

logger = get_logger(__name__)


class TrajectoryStats(BaseModel):
    '''Outcome of sampling postselected trajectories.'''

    model_config = ConfigDict(frozen=True)

    shots: int = Field(ge=1, description='Trajectories requested')
    accepted: int = Field(ge=0, description='Trajectories whose postselections all succeeded')
    counts: dict[str, int] = Field(default_factory=dict, description='Final outcome counts, qubit n-1 leftmost')
    seed: int = Field(description='Base seed')
    acceptance_probability: float = Field(default=1.0, description='Exact per-trajectory acceptance probability')

    @model_validator(mode='after')
    def _check_counts(self) -> 'TrajectoryStats':
        if self.accepted > self.shots:
            raise ValueError(f'accepted ({self.accepted}) exceeds shots ({self.shots})')
        if sum(self.counts.values()) != self.accepted:
            raise ValueError('outcome counts must sum to the accepted trajectories')
        return self

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.shots

    def frequency(self, outcome: str) -> float:
        '''Fraction of all shots that were accepted and ended in ``outcome``.'''
        return self.counts.get(outcome, 0) / self.shots

    def binomial_sigma(self, p: float) -> float:
        return math.sqrt(max(p * (1 - p), 0.0) / self.shots)


def _apply_gate(psi: np.ndarray, gate: Gate, n_qubits: int) -> np.ndarray:
    '''psi has shape (2,) * n_qubits.'''
    axes = [n_qubits - 1 - q for q in gate.targets]
    k = len(axes)
    local = gate.matrix().reshape((2,) * (2 * k))
    out = np.tensordot(local, psi, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def _prepare_input(circuit: Circuit, state: StateVector | np.ndarray) -> np.ndarray:
    amps = np.array(as_amplitudes(state), dtype=np.complex128)
    full = 2 ** circuit.n_qubits
    if amps.shape[0] == full:
        return amps
    if circuit.ancilla is not None and amps.shape[0] == 2 ** circuit.system_qubits:
        # ancilla starts in |0>: it is the top bit, so system amplitudes fill the lower half
        return np.concatenate([amps, np.zeros(full - amps.shape[0], dtype=np.complex128)])
    raise DimensionMismatchError(f'Input of dim {amps.shape[0]} does not fit a {circuit.n_qubits}-qubit circuit')


def _simulate(circuit: Circuit, amps: np.ndarray, floor: float) -> tuple[np.ndarray, list[float], bool]:
    '''(final amplitudes, conditional probability per postselection, survived).'''
    n = circuit.n_qubits
    psi = amps.reshape((2,) * n)
    probabilities: list[float] = []
    for gate in circuit.gates:
        if gate.kind is GateKind.MEASURE:
            before = float(np.vdot(psi, psi).real)
            axis = n - 1 - gate.targets[0]
            index = [slice(None)] * n
            index[axis] = 1
            psi = psi.copy()
            psi[tuple(index)] = 0.0
            after = float(np.vdot(psi, psi).real)
            probabilities.append(after / before if before > 0.0 else 0.0)
            if after < floor:
                return psi.reshape(-1), probabilities, False
        else:
            psi = _apply_gate(psi, gate, n)
    return psi.reshape(-1), probabilities, True


def run_exact(
    circuit: Circuit,
    state: StateVector | np.ndarray,
    numerics: NumericsConfig | None = None,
) -> tuple[StateVector, float]:
    '''Apply the circuit, projecting the ancilla on |0> without renormalizing.

    ``state`` may cover the full register or only the system qubits (the
    ancilla then starts in |0>). Returns the full-register postselected
    amplitudes and the cumulative postselection probability
    ||out||^2 / ||in||^2.

    Raises:
        PostselectionError: when a branch probability drops below ``postselect_floor``.
    '''
    numerics = numerics or NumericsConfig.load()
    amps = _prepare_input(circuit, state)
    norm_in = float(np.vdot(amps, amps).real)
    out, probabilities, survived = _simulate(circuit, amps, numerics.postselect_floor * norm_in)
    if not survived:
        raise PostselectionError(
            f'Postselection {len(probabilities)} left a branch of probability below {numerics.postselect_floor:.0e}'
        )
    return StateVector(out), float(np.vdot(out, out).real) / norm_in


def system_amplitudes(state: StateVector | np.ndarray, circuit: Circuit) -> np.ndarray:
    '''Amplitudes with the ancilla in |0>, over the system qubits.'''
    amps = np.asarray(as_amplitudes(state))
    if circuit.ancilla is None:
        return amps
    if circuit.ancilla != circuit.n_qubits - 1:
        raise ValueError('system_amplitudes expects the ancilla on the highest qubit')
    return amps[: 2 ** circuit.system_qubits]


def unitary_matrix(circuit: Circuit) -> np.ndarray:
    '''Dense matrix of a measurement-free circuit.'''
    if circuit.n_measurements:
        raise ValueError('Circuit contains postselections; it has no unitary matrix')
    dim = 2 ** circuit.n_qubits
    columns = [_simulate(circuit, np.eye(dim, dtype=np.complex128)[:, j], 0.0)[0] for j in range(dim)]
    return np.stack(columns, axis=1)


def trajectory_width(n_postselections: int) -> int:
    '''Uniforms read per trajectory: one per postselection plus the final readout, padded to a Philox block of 4.'''
    return 4 * ((n_postselections + 4) // 4)


def trajectory_uniforms(seed: int, start: int, count: int, width: int) -> np.ndarray:
    '''Rows of uniforms for trajectories ``start`` .. ``start + count - 1``.

    Trajectory i owns the window [i * width, (i + 1) * width) of the Philox
    stream keyed by ``seed``, so its draws do not depend on how trajectories
    are split into blocks or spread over workers.
    '''
    if width % 4:
        raise ValueError(f'width must be a multiple of 4, got {width}')
    bit_generator = np.random.Philox(key=seed).advance(start * (width // 4))
    return np.random.Generator(bit_generator).random((count, width))


def _sample_block(
    seed: int,
    start: int,
    size: int,
    probabilities: np.ndarray,
    cumulative: np.ndarray,
) -> tuple[int, np.ndarray]:
    n_post = probabilities.shape[0]
    uniforms = trajectory_uniforms(seed, start, size, trajectory_width(n_post))
    kept = np.all(uniforms[:, :n_post] < probabilities, axis=1)
    outcomes = np.searchsorted(cumulative, uniforms[kept, n_post], side='right')
    outcomes = np.minimum(outcomes, cumulative.shape[0] - 1)
    return int(np.count_nonzero(kept)), np.bincount(outcomes, minlength=cumulative.shape[0])


def run_shots(
    circuit: Circuit,
    state: StateVector | np.ndarray,
    shots: int,
    seed: int = 0,
    workers: int = 1,
    numerics: NumericsConfig | None = None,
) -> TrajectoryStats:
    '''Sample trajectories; any |1> ancilla outcome discards the trajectory.

    A surviving trajectory's state is fixed by the circuit, so each
    postselection succeeds with a conditional probability that is computed
    once. Trajectory i reads its own window of the stream keyed by ``seed``
    (see ``trajectory_uniforms``); blocks of ``shot_block`` trajectories are
    sampled concurrently and the result depends on neither ``shot_block``
    nor ``workers``.
    '''
    if shots < 1:
        raise ValueError(f'shots must be >= 1, got {shots}')
    numerics = numerics or NumericsConfig.load()
    amps = _prepare_input(circuit, state)
    amps = amps / np.linalg.norm(amps)
    out, probabilities, survived = _simulate(circuit, amps, numerics.postselect_floor)
    probs = np.asarray(probabilities if survived else probabilities[:-1] + [0.0], dtype=float)
    final = np.abs(out) ** 2
    total = float(final.sum())
    final = final / total if survived and total > 0.0 else np.full(final.shape[0], 1.0 / final.shape[0])

    cumulative = np.cumsum(final)
    block = numerics.shot_block
    starts = range(0, shots, block)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(lambda s: _sample_block(seed, s, min(block, shots - s), probs, cumulative), starts))

    accepted = sum(r[0] for r in results)
    counts = np.sum([r[1] for r in results], axis=0)
    n = circuit.n_qubits
    outcome_counts = {format(i, f'0{n}b'): int(c) for i, c in enumerate(counts) if c}
    stats = TrajectoryStats(
        shots=shots,
        accepted=accepted,
        counts=outcome_counts,
        seed=seed,
        acceptance_probability=float(np.prod(probs)) if probs.size else 1.0,
    )
    logger.debug(f'{shots} trajectories, {accepted} accepted (p={stats.acceptance_probability:.4g})')
    return stats
