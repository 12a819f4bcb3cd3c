'''Single-site operators and the Pauli-string product table.

A Pauli string on N sites is a str of length N over 'IXYZ'; character j acts
on site j, which is bit j of a basis index. |0> is the Z = +1 state.
'''

from __future__ import annotations

from enum import Enum

import numpy as np


class SiteOp(str, Enum):
    '''One-site Pauli operator.'''

    I = 'I'
    X = 'X'
    Y = 'Y'
    Z = 'Z'

    @classmethod
    def from_value(cls, value: 'SiteOp | str') -> 'SiteOp':
        if isinstance(value, SiteOp):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f'Unknown site operator: {value!r}. Available: I, X, Y, Z') from None

    def matrix(self) -> np.ndarray:
        '''2x2 matrix in the (|0>, |1>) basis.'''
        return _MATRICES[self].copy()


_MATRICES: dict[SiteOp, np.ndarray] = {
    SiteOp.I: np.array([[1, 0], [0, 1]], dtype=np.complex128),
    SiteOp.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    SiteOp.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    SiteOp.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# a * b = phase * c
_PRODUCT: dict[tuple[str, str], tuple[complex, str]] = {
    ('I', 'I'): (1, 'I'), ('I', 'X'): (1, 'X'), ('I', 'Y'): (1, 'Y'), ('I', 'Z'): (1, 'Z'),
    ('X', 'I'): (1, 'X'), ('X', 'X'): (1, 'I'), ('X', 'Y'): (1j, 'Z'), ('X', 'Z'): (-1j, 'Y'),
    ('Y', 'I'): (1, 'Y'), ('Y', 'X'): (-1j, 'Z'), ('Y', 'Y'): (1, 'I'), ('Y', 'Z'): (1j, 'X'),
    ('Z', 'I'): (1, 'Z'), ('Z', 'X'): (1j, 'Y'), ('Z', 'Y'): (-1j, 'X'), ('Z', 'Z'): (1, 'I'),
}

PAULI_LETTERS = frozenset('IXYZ')


def multiply_strings(a: str, b: str) -> tuple[complex, str]:
    '''Product of two Pauli strings of equal length as (phase, string).'''
    if len(a) != len(b):
        raise ValueError(f'Pauli strings differ in length: {len(a)} vs {len(b)}')
    phase: complex = 1
    letters = []
    for left, right in zip(a, b):
        p, c = _PRODUCT[(left, right)]
        phase *= p
        letters.append(c)
    return phase, ''.join(letters)


def string_masks(string: str) -> tuple[int, int, int]:
    '''Bit masks (flip, sign, y_count) describing a string's action on basis states.

    P|b> = i^{y_count} (-1)^{popcount(b & sign)} |b ^ flip>, with flip covering
    X and Y sites and sign covering Y and Z sites.
    '''
    flip = 0
    sign = 0
    y_count = 0
    for site, letter in enumerate(string):
        if letter in 'XY':
            flip |= 1 << site
        if letter in 'YZ':
            sign |= 1 << site
        if letter == 'Y':
            y_count += 1
    return flip, sign, y_count


def single_site(n_sites: int, ops: dict[int, str]) -> str:
    '''Pauli string with the given site operators and identity elsewhere.'''
    letters = ['I'] * n_sites
    for site, letter in ops.items():
        if not 0 <= site < n_sites:
            raise ValueError(f'Site {site} out of range for {n_sites} sites')
        letters[site] = SiteOp.from_value(letter).value
    return ''.join(letters)
