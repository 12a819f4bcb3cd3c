'''Coherence of the two-site Ising environment from the postselection circuit.

Only the delta branch is simulated. For a real ground-state energy
<phi_0(t)| = exp(i E0 t) <G|, so |<phi_0|phi_d>| = |<G|phi_d>|, read off as
the |00> amplitude after U_G^-1. Amplitudes are rescaled by the product of
the compensation factors of all steps so far, accumulated as a logarithm so
that schedules of thousands of steps stay finite.
'''

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .circuit import Circuit
from .executor import TrajectoryStats, run_exact, run_shots, system_amplitudes
from .synthesis import synthesize_ug
from .trotter import CircuitProtocol, adaptive_schedule, branch_fields, trotter_step
from ..config.numerics import NumericsConfig
from ..dynamics import CoherenceTrace
from ..models import ModelSpec
from ..operators import StateVector
from ..spectral import ground_state_ising2_closed_form
from ..utils import get_logger

logger = get_logger(__name__)


def coherence_from_circuit(
    spec: ModelSpec,
    t_max: float = 2.0,
    schedule: Sequence[float] | None = None,
    protocol: CircuitProtocol | None = None,
    workers: int = 1,
    numerics: NumericsConfig | None = None,
) -> CoherenceTrace:
    '''C(t) on the time points of ``schedule`` (adaptive when omitted).

    With ``protocol.shots`` > 0 each time point runs the full circuit
    U_G, steps, U_G^-1 as independent trajectories seeded ``seed + n``;
    points where no trajectory survives report NaN and are listed in
    ``metadata['zero_acceptance']``.
    '''
    protocol = protocol or CircuitProtocol()
    numerics = numerics or NumericsConfig.load()
    a_x, a_y = branch_fields(spec)
    if abs(a_y) > abs(a_x):
        logger.warning(
            f'Broken-phase branch field |a_y|={abs(a_y):g} > |a_x|={abs(a_x):g}: '
            'the overlap identity assumes a real ground energy and the estimate is unreliable'
        )

    steps = list(schedule) if schedule is not None else adaptive_schedule(spec, t_max=t_max, protocol=protocol)
    xi = ground_state_ising2_closed_form(spec.J, *spec.h)
    prepare = synthesize_ug(xi).with_ancilla()
    unprepare = synthesize_ug(xi).inverse().with_ancilla()
    times = np.concatenate([[0.0], np.cumsum(steps)])

    step_circuits = [
        trotter_step(spec.J, a_x, a_y, dt, protocol.order, protocol.ancilla_mode) for dt in steps
    ]
    metadata: dict = {
        'mode': 'shots' if protocol.shots else 'exact',
        'order': protocol.order,
        'ancilla_mode': protocol.ancilla_mode,
        'schedule': [float(dt) for dt in steps],
        'broken_phase': bool(abs(a_y) > abs(a_x)),
    }
    if protocol.shots:
        return _shot_trace(prepare, unprepare, step_circuits, times, protocol, workers, numerics, metadata)

    ground = np.zeros(2 ** prepare.n_qubits, dtype=np.complex128)
    ground[0] = 1.0
    state, _ = run_exact(prepare, ground, numerics)
    # the register is renormalized after every step; log_scale carries the
    # branch norm times the compensation so far
    log_scale = 0.0
    overlap, normd_sq = [], []
    for n in range(len(times)):
        if n:
            step = step_circuits[n - 1]
            state, probability = run_exact(step, state, numerics)
            state = StateVector(np.asarray(state.amplitudes) / math.sqrt(probability))
            log_scale += step.log_compensation + 0.5 * math.log(probability)
        unprepared, _ = run_exact(unprepare, state, numerics)
        kept = float(np.sum(np.abs(system_amplitudes(state, prepare)) ** 2))
        overlap.append(math.exp(log_scale) * abs(unprepared.amplitudes[0]))
        normd_sq.append(math.exp(2.0 * log_scale) * kept)

    trace = CoherenceTrace.from_branches(times, overlap, np.ones(len(times)), normd_sq, metadata)
    logger.debug(f'Circuit coherence ({len(steps)} steps): C(t_max)={trace.final:.6f}')
    return trace


def _shot_trace(
    prepare: Circuit,
    unprepare: Circuit,
    step_circuits: list[Circuit],
    times: np.ndarray,
    protocol: CircuitProtocol,
    workers: int,
    numerics: NumericsConfig,
    metadata: dict,
) -> CoherenceTrace:
    origin = np.zeros(2 ** prepare.n_qubits, dtype=np.complex128)
    origin[0] = 1.0
    zero_key = '0' * prepare.n_qubits
    body = prepare
    overlap, normd_sq, stats_log, empty = [], [], [], []
    for n in range(len(times)):
        if n:
            body = body.extend(step_circuits[n - 1])
        circuit = body.extend(unprepare)
        stats: TrajectoryStats = run_shots(circuit, origin, protocol.shots, protocol.seed + n, workers, numerics)
        stats_log.append(stats.model_dump())
        if stats.accepted == 0:
            empty.append(n)
            overlap.append(math.nan)
            normd_sq.append(math.nan)
            continue
        log_compensation = circuit.log_compensation
        hits = stats.frequency(zero_key)
        overlap.append(math.exp(log_compensation + 0.5 * math.log(hits)) if hits else 0.0)
        normd_sq.append(math.exp(2.0 * log_compensation + math.log(stats.acceptance_rate)))
    if empty:
        logger.warning(f'No trajectory survived at {len(empty)} of {len(times)} time points')
    metadata = {**metadata, 'shots': protocol.shots, 'seed': protocol.seed, 'zero_acceptance': empty, 'shot_stats': stats_log}
    return CoherenceTrace.from_branches(times, overlap, np.ones(len(times)), normd_sq, metadata)
