'''Operator core: Pauli-string operators, states, exponentials and spectra.'''

from .pauli import SiteOp, multiply_strings, single_site
from .operator_sum import OperatorSum, StateVector, apply, as_amplitudes, to_dense, to_sparse
from .expm import expm_dense, expm_multiply
from .spectrum import SpectralResult, eig_general

__all__ = [
    'SiteOp',
    'multiply_strings',
    'single_site',
    'OperatorSum',
    'StateVector',
    'apply',
    'as_amplitudes',
    'to_dense',
    'to_sparse',
    'expm_dense',
    'expm_multiply',
    'SpectralResult',
    'eig_general',
]
