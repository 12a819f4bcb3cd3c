'''Non-Hermitian Fermi-Hubbard ring in the Jordan-Wigner encoding.

Mode ordering: spin-up modes 0..N-1 (site j is mode j), then spin-down modes
N..2N-1 (site j is mode N+j). A mode is occupied when its bit is 1, so
n_m = (1 - Z_m)/2 and a_m = Z_{<m} (X_m + i Y_m)/2.
'''

from __future__ import annotations

import numpy as np

from .spec import ModelKind, ModelSpec
from .spins import periodic_bonds
from ..errors import ModelSpecError
from ..operators import OperatorSum, StateVector, single_site


def annihilation(mode: int, n_modes: int) -> OperatorSum:
    string = {m: 'Z' for m in range(mode)}
    x = single_site(n_modes, {**string, mode: 'X'})
    y = single_site(n_modes, {**string, mode: 'Y'})
    return OperatorSum(n_modes, ((0.5, x), (0.5j, y)))


def creation(mode: int, n_modes: int) -> OperatorSum:
    return annihilation(mode, n_modes).dagger()


def number(mode: int, n_modes: int) -> OperatorSum:
    return OperatorSum(n_modes, ((0.5, 'I' * n_modes), (-0.5, single_site(n_modes, {mode: 'Z'}))))


def number_sector(n_modes: int, filling: int) -> np.ndarray:
    '''Sorted basis indices with exactly ``filling`` occupied modes.'''
    states = np.arange(2 ** n_modes, dtype=np.int64)
    return states[np.bitwise_count(states) == filling]


def total_number(n_modes: int, basis: np.ndarray | None = None) -> OperatorSum:
    total = OperatorSum.zero(n_modes)
    for m in range(n_modes):
        total = total + number(m, n_modes)
    return total.simplify().restrict(basis)


def _hop(p: int, q: int, n_modes: int) -> OperatorSum:
    '''a+_p a_q + a+_q a_p.'''
    forward = creation(p, n_modes) @ annihilation(q, n_modes)
    return (forward + forward.dagger()).simplify()


def _spin_flip(n_sites: int) -> OperatorSum:
    '''sum_j (c+_{j,dn} c_{j,up} + h.c.).'''
    n_modes = 2 * n_sites
    total = OperatorSum.zero(n_modes)
    for j in range(n_sites):
        total = total + _hop(n_sites + j, j, n_modes)
    return total.simplify()


def _imbalance(n_sites: int) -> OperatorSum:
    '''sum_j (n_{j,up} - n_{j,dn}).'''
    n_modes = 2 * n_sites
    total = OperatorSum.zero(n_modes)
    for j in range(n_sites):
        total = total + number(j, n_modes) - number(n_sites + j, n_modes)
    return total.simplify()


def _require_fermi(spec: ModelSpec) -> int:
    if spec.kind is not ModelKind.FERMI:
        raise ModelSpecError(f'Expected a fermi spec, got {spec.kind.value}')
    filling = spec.n_sites if spec.filling is None else spec.filling
    if not 0 <= filling <= 2 * spec.n_sites:
        raise ModelSpecError(f'filling {filling} out of range [0, {2 * spec.n_sites}]')
    return filling


def fermi_basis(spec: ModelSpec) -> np.ndarray:
    return number_sector(2 * spec.n_sites, _require_fermi(spec))


def build_fermi_env(spec: ModelSpec) -> OperatorSum:
    '''-J hopping (both spins, periodic) + U n_up n_dn + h_x spin flip - i h_y (n_up - n_dn).'''
    basis = fermi_basis(spec)
    n = spec.n_sites
    n_modes = 2 * n
    hx, hy = spec.h

    total = OperatorSum.zero(n_modes)
    for i, j in periodic_bonds(n):
        total = total + (-spec.J) * _hop(i, j, n_modes)
        total = total + (-spec.J) * _hop(n + i, n + j, n_modes)
    if spec.U != 0.0:
        for j in range(n):
            total = total + spec.U * (number(j, n_modes) @ number(n + j, n_modes))
    total = total + hx * _spin_flip(n) + (-1j * hy) * _imbalance(n)
    return total.simplify().restrict(basis)


def build_fermi_coupling(spec: ModelSpec) -> OperatorSum:
    '''V = sum_j [delta_x (c+_dn c_up + h.c.) - i delta_y (n_up - n_dn)].'''
    basis = fermi_basis(spec)
    dx, dy = spec.delta
    n = spec.n_sites
    v = dx * _spin_flip(n) + (-1j * dy) * _imbalance(n)
    return v.simplify().restrict(basis)


def fermi_reference(spec: ModelSpec) -> StateVector:
    '''Fully spin-polarized filling: the lowest ``filling`` modes occupied (up modes first).'''
    basis = fermi_basis(spec)
    filling = _require_fermi(spec)
    index = (1 << filling) - 1
    position = int(np.searchsorted(basis, index))
    return StateVector.basis_state(basis.shape[0], position)
