'''Non-Hermitian Ising and Heisenberg chains with periodic bonds.'''

from __future__ import annotations

from .spec import ModelKind, ModelSpec
from ..errors import ModelSpecError
from ..operators import OperatorSum, single_site


def periodic_bonds(n_sites: int) -> list[tuple[int, int]]:
    '''Bonds (j, j+1 mod N); for N=2 the two coincide and one bond is kept.'''
    bonds: list[tuple[int, int]] = []
    seen: set[frozenset[int]] = set()
    for j in range(n_sites):
        pair = (j, (j + 1) % n_sites)
        key = frozenset(pair)
        if key not in seen:
            seen.add(key)
            bonds.append(pair)
    return bonds


def _require(spec: ModelSpec, kind: ModelKind) -> None:
    if spec.kind is not kind:
        raise ModelSpecError(f'Expected a {kind.value} spec, got {spec.kind.value}')


def field_terms(n_sites: int, fx: float, fy: float) -> list[tuple[complex, str]]:
    '''-sum_j (fx X_j + i fy Y_j).'''
    terms: list[tuple[complex, str]] = []
    for j in range(n_sites):
        terms.append((-fx, single_site(n_sites, {j: 'X'})))
        terms.append((-1j * fy, single_site(n_sites, {j: 'Y'})))
    return terms


def build_ising_env(spec: ModelSpec) -> OperatorSum:
    '''-sum_j [J Z_j Z_{j+1} + h_x X_j + i h_y Y_j].'''
    _require(spec, ModelKind.ISING)
    n = spec.n_sites
    terms = [(-spec.J, single_site(n, {i: 'Z', j: 'Z'})) for i, j in periodic_bonds(n)]
    terms += field_terms(n, *spec.h)
    return OperatorSum.from_terms(n, terms)


def build_heisenberg_env(spec: ModelSpec) -> OperatorSum:
    '''-J sum_j (XX + YY + ZZ) - sum_j (h_x X_j + i h_y Y_j).'''
    _require(spec, ModelKind.HEISENBERG)
    n = spec.n_sites
    terms = []
    for i, j in periodic_bonds(n):
        for letter in 'XYZ':
            terms.append((-spec.J, single_site(n, {i: letter, j: letter})))
    terms += field_terms(n, *spec.h)
    return OperatorSum.from_terms(n, terms)


def build_spin_coupling(spec: ModelSpec) -> OperatorSum:
    '''V = -sum_j (delta_x X_j + i delta_y Y_j), so H_env + V shifts h by delta.'''
    if not spec.kind.is_spin:
        raise ModelSpecError(f'Spin coupling requested for {spec.kind.value} spec')
    return OperatorSum.from_terms(spec.n_sites, field_terms(spec.n_sites, *spec.delta))
