'''decohere: qubit decoherence in non-Hermitian environments.'''

from .operators import OperatorSum, StateVector, expm_multiply, eig_general
from .models import ModelKind, ModelSpec, CouplingAngle, build_env, build_coupling
from .spectral import GroundState, ground_state, susceptibility, susceptibility_map
from .dynamics import CoherenceTrace, coherence_trace, spec_coherence_trace, joint_evolution_coherence
from .circuit import Circuit, CircuitProtocol, coherence_from_circuit, synthesize_ug
from .orchestrator import ExperimentConfig, PresetRegistry, ScanOrchestrator, run_preset, run_scan

__all__ = [
    'OperatorSum',
    'StateVector',
    'expm_multiply',
    'eig_general',
    'ModelKind',
    'ModelSpec',
    'CouplingAngle',
    'build_env',
    'build_coupling',
    'GroundState',
    'ground_state',
    'susceptibility',
    'susceptibility_map',
    'CoherenceTrace',
    'coherence_trace',
    'spec_coherence_trace',
    'joint_evolution_coherence',
    'Circuit',
    'CircuitProtocol',
    'coherence_from_circuit',
    'synthesize_ug',
    'ExperimentConfig',
    'PresetRegistry',
    'ScanOrchestrator',
    'run_preset',
    'run_scan',
]
