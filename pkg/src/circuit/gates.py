'''Gate set of the postselection protocol.

Rotation conventions: RY(t) = exp(-i t Y / 2), RX(t) = exp(-i t X / 2),
RZZ(t) = exp(-i t Z Z / 2). Two-qubit matrices use the local index
2 * bit(targets[0]) + bit(targets[1]); CNOT targets are (control, target).
'''

from __future__ import annotations

import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class GateKind(str, Enum):
    RY = 'RY'
    RX = 'RX'
    RZZ = 'RZZ'
    CZ = 'CZ'
    CNOT = 'CNOT'
    R = 'R'
    R_INVERSE = 'R_inverse'
    MEASURE = 'MeasurePostselect0'

    @property
    def arity(self) -> int:
        return 2 if self in (GateKind.RZZ, GateKind.CZ, GateKind.CNOT) else 1

    @property
    def has_angle(self) -> bool:
        return self in (GateKind.RY, GateKind.RX, GateKind.RZZ)


# maps Y eigenstates onto the Z basis: R|+y> = |0>, R|-y> = |1>
R_MATRIX = (
    np.exp(1j * np.pi / 4) * np.eye(2)
    + np.exp(-1j * np.pi / 4) * np.array([[1, 1 - 1j], [1 + 1j, -1]])
) / 2

_FIXED: dict[GateKind, np.ndarray] = {
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(np.complex128),
    GateKind.CNOT: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128),
    GateKind.R: R_MATRIX,
    GateKind.R_INVERSE: R_MATRIX.conj().T,
}


class Gate(BaseModel):
    '''One gate (or postselected measurement) on the listed qubits.'''

    model_config = ConfigDict(frozen=True)

    kind: GateKind = Field(description='Gate kind')
    targets: tuple[int, ...] = Field(description='Qubit indices; (control, target) for CNOT')
    angle: float = Field(default=0.0, description='Rotation angle for RY, RX and RZZ')

    @model_validator(mode='after')
    def _check_targets(self) -> 'Gate':
        if len(self.targets) != self.kind.arity:
            raise ValueError(f'{self.kind.value} acts on {self.kind.arity} qubit(s), got targets {self.targets}')
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f'{self.kind.value} targets must be distinct, got {self.targets}')
        if any(t < 0 for t in self.targets):
            raise ValueError(f'Negative qubit index in {self.targets}')
        if not math.isfinite(self.angle):
            raise ValueError('Gate angle must be finite')
        return self

    @property
    def is_unitary(self) -> bool:
        return self.kind is not GateKind.MEASURE

    def matrix(self) -> np.ndarray:
        '''Local dense matrix (2x2 or 4x4).'''
        c, s = math.cos(self.angle / 2), math.sin(self.angle / 2)
        match self.kind:
            case GateKind.RY:
                return np.array([[c, -s], [s, c]], dtype=np.complex128)
            case GateKind.RX:
                return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
            case GateKind.RZZ:
                lo, hi = np.exp(-0.5j * self.angle), np.exp(0.5j * self.angle)
                return np.diag([lo, hi, hi, lo])
            case GateKind.MEASURE:
                raise ValueError('A postselected measurement has no unitary matrix')
            case _:
                return _FIXED[self.kind].copy()

    def inverse(self) -> 'Gate':
        if self.kind is GateKind.MEASURE:
            raise ValueError('A postselected measurement cannot be inverted')
        if self.kind.has_angle:
            return Gate(kind=self.kind, targets=self.targets, angle=-self.angle)
        if self.kind is GateKind.R:
            return Gate(kind=GateKind.R_INVERSE, targets=self.targets)
        if self.kind is GateKind.R_INVERSE:
            return Gate(kind=GateKind.R, targets=self.targets)
        return self

    def to_line(self) -> str:
        '''kind, angle, targets on one line.'''
        angle = f'{self.angle:.17g}' if self.kind.has_angle else '-'
        return f'{self.kind.value} {angle} {",".join(str(t) for t in self.targets)}'


def ry(target: int, angle: float) -> Gate:
    return Gate(kind=GateKind.RY, targets=(target,), angle=angle)


def rx(target: int, angle: float) -> Gate:
    return Gate(kind=GateKind.RX, targets=(target,), angle=angle)


def rzz(a: int, b: int, angle: float) -> Gate:
    return Gate(kind=GateKind.RZZ, targets=(a, b), angle=angle)


def cz(a: int, b: int) -> Gate:
    return Gate(kind=GateKind.CZ, targets=(a, b))


def cnot(control: int, target: int) -> Gate:
    return Gate(kind=GateKind.CNOT, targets=(control, target))


def r_gate(target: int) -> Gate:
    return Gate(kind=GateKind.R, targets=(target,))


def r_inverse(target: int) -> Gate:
    return Gate(kind=GateKind.R_INVERSE, targets=(target,))


def measure_postselect(target: int) -> Gate:
    return Gate(kind=GateKind.MEASURE, targets=(target,))
