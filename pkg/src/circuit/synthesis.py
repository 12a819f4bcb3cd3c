'''Two-qubit real state preparation U_G|00> = xi with RY, CZ, RY.

Amplitudes are indexed xi[2 * q_first + q_second]; the first qubit is
register qubit 1 and the second is qubit 0. Preparation applies RY(-t2) on
the first qubit and RY(-t3) on the second, then CZ, then RY(-t1) on the
second. The sign of k is a free choice; both branches prepare xi.
'''

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .gates import cz, ry
from ..errors import DegenerateAmplitudeError
from ..operators import StateVector, as_amplitudes

FIRST, SECOND = 1, 0
_EPS = 1e-12


@dataclass(frozen=True)
class PreparationAngles:
    theta1: float
    theta2: float
    theta3: float
    k: float


def _real_unit(xi: StateVector | np.ndarray) -> np.ndarray:
    amps = np.asarray(as_amplitudes(xi))
    if amps.shape != (4,):
        raise ValueError(f'Expected 4 amplitudes, got shape {amps.shape}')
    if np.max(np.abs(amps.imag)) > _EPS:
        raise ValueError('U_G synthesis supports real amplitudes only')
    real = amps.real.astype(float)
    if abs(np.linalg.norm(real) - 1.0) > 1e-10:
        raise ValueError(f'Amplitudes must be unit-normalized, norm={np.linalg.norm(real):.12g}')
    return real


def preparation_angles(xi: StateVector | np.ndarray) -> PreparationAngles:
    '''Rotation angles of U_G for real unit amplitudes ``xi``.

    Raises:
        DegenerateAmplitudeError: naming the vanishing denominator.
    '''
    x0, x1, x2, x3 = _real_unit(xi)
    s_first = x0 ** 2 + x1 ** 2
    s_second = x2 ** 2 + x3 ** 2

    if s_second <= _EPS ** 2:
        # first qubit stays |0>: CZ acts trivially
        if abs(x0) <= _EPS:
            raise DegenerateAmplitudeError('xi_0', x0)
        return PreparationAngles(theta1=0.0, theta2=0.0, theta3=2 * math.atan(-x1 / x0), k=0.0)

    if s_first <= _EPS ** 2:
        raise DegenerateAmplitudeError('xi_0^2 + xi_1^2', s_first)

    cross = x0 * x2 + x1 * x3
    sign = -1.0 if cross > 0 else 1.0
    k = sign * math.sqrt(s_second / s_first)

    denom1 = x3 - k * x1
    if abs(denom1) <= _EPS:
        raise DegenerateAmplitudeError('xi_3 - k xi_1', denom1)
    theta1 = 2 * math.atan((x2 - k * x0) / denom1)
    theta2 = -2 * math.atan(k)

    gamma0 = x0 * x3 - x1 * x2
    if abs(gamma0) <= _EPS:
        raise DegenerateAmplitudeError('gamma_0', gamma0)
    theta3 = 2 * math.atan(-(cross - k * s_first) / gamma0)
    return PreparationAngles(theta1=theta1, theta2=theta2, theta3=theta3, k=k)


def synthesize_ug(xi: StateVector | np.ndarray) -> Circuit:
    '''Two-qubit circuit with U_G|00> = xi up to a global sign.'''
    angles = preparation_angles(xi)
    return Circuit(
        n_qubits=2,
        gates=[
            ry(FIRST, -angles.theta2),
            ry(SECOND, -angles.theta3),
            cz(FIRST, SECOND),
            ry(SECOND, -angles.theta1),
        ],
        label='U_G',
    )
