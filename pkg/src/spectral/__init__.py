'''Ground states, susceptibility and spectrum diagnostics.'''

from .ground_state import GroundState, ground_state, ground_state_ising2_closed_form
from .susceptibility import SusceptibilityResult, SusceptibilityMap, susceptibility, susceptibility_map, spectrum_reality

__all__ = [
    'GroundState',
    'ground_state',
    'ground_state_ising2_closed_form',
    'SusceptibilityResult',
    'SusceptibilityMap',
    'susceptibility',
    'susceptibility_map',
    'spectrum_reality',
]
