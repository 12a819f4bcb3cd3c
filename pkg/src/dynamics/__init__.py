'''Coherence dynamics: two-branch traces and the joint-evolution cross-check.'''

from .coherence import (
    TRACE_COLUMNS,
    CoherenceTrace,
    QubitDensity,
    coherence_trace,
    coupling_kernel_norm,
    l1_coherence,
    spec_coherence_trace,
)
from .joint import joint_evolution_coherence, joint_hamiltonian

__all__ = [
    'TRACE_COLUMNS',
    'CoherenceTrace',
    'QubitDensity',
    'coherence_trace',
    'coupling_kernel_norm',
    'l1_coherence',
    'spec_coherence_trace',
    'joint_evolution_coherence',
    'joint_hamiltonian',
]
