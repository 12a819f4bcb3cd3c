'''Gate-level emulation of the ancilla-postselection protocol.'''

from .gates import GateKind, Gate, R_MATRIX, ry, rx, rzz, cz, cnot, r_gate, r_inverse, measure_postselect
from .circuit import Circuit
from .synthesis import PreparationAngles, preparation_angles, synthesize_ug
from .executor import TrajectoryStats, run_exact, run_shots, system_amplitudes, trajectory_uniforms, unitary_matrix
from .trotter import (
    CircuitProtocol,
    ancilla_angle,
    adaptive_schedule,
    branch_fields,
    nonunitary_step,
    trotter_step,
    trotter_unitary_step,
)
from .protocol import coherence_from_circuit

__all__ = [
    'GateKind',
    'Gate',
    'R_MATRIX',
    'ry',
    'rx',
    'rzz',
    'cz',
    'cnot',
    'r_gate',
    'r_inverse',
    'measure_postselect',
    'Circuit',
    'PreparationAngles',
    'preparation_angles',
    'synthesize_ug',
    'TrajectoryStats',
    'run_exact',
    'run_shots',
    'system_amplitudes',
    'trajectory_uniforms',
    'unitary_matrix',
    'CircuitProtocol',
    'ancilla_angle',
    'adaptive_schedule',
    'branch_fields',
    'nonunitary_step',
    'trotter_step',
    'trotter_unitary_step',
    'coherence_from_circuit',
]
