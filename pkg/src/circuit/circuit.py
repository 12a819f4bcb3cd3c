'''Circuit: ordered gates on system qubits plus one reusable ancilla.'''

from __future__ import annotations

import math
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, model_validator

from .gates import Gate, GateKind


class Circuit(BaseModel):
    '''Gate list with amplitude compensation factors.

    The ancilla, when present, is the highest qubit. Each postselection
    step contributes one factor to ``compensation``; their product rescales
    postselected amplitudes to the target non-unitary evolution.
    '''

    model_config = ConfigDict(validate_assignment=True)

    n_qubits: int = Field(ge=1, description='System qubits plus ancilla')
    ancilla: int | None = Field(default=None, description='Index of the postselected ancilla qubit')
    gates: list[Gate] = Field(default_factory=list, description='Gates in application order')
    compensation: list[PositiveFloat] = Field(default_factory=list, description='Per-step amplitude compensation factors')
    label: str = Field(default='', description='Free-form description')

    @model_validator(mode='after')
    def _check_gates(self) -> 'Circuit':
        if self.ancilla is not None and not 0 <= self.ancilla < self.n_qubits:
            raise ValueError(f'Ancilla {self.ancilla} outside register of {self.n_qubits} qubits')
        for gate in self.gates:
            if max(gate.targets) >= self.n_qubits:
                raise ValueError(f'{gate.to_line()} addresses a qubit outside the {self.n_qubits}-qubit register')
            if gate.kind is GateKind.MEASURE and gate.targets[0] != self.ancilla:
                raise ValueError(f'Postselection on qubit {gate.targets[0]}, but the ancilla is {self.ancilla}')
        return self

    @property
    def n_measurements(self) -> int:
        return sum(1 for g in self.gates if g.kind is GateKind.MEASURE)

    @property
    def total_compensation(self) -> float:
        return math.prod(self.compensation)

    @property
    def log_compensation(self) -> float:
        '''log of total_compensation; stays finite for schedules of any length.'''
        return math.fsum(math.log(c) for c in self.compensation)

    @property
    def system_qubits(self) -> int:
        return self.n_qubits - (0 if self.ancilla is None else 1)

    def on_register(self, n_qubits: int, ancilla: int | None) -> 'Circuit':
        '''Same gates on a register of ``n_qubits`` with the given ancilla.

        Only circuits without their own ancilla can be moved, and only onto a
        register at least as large.
        '''
        if self.n_qubits == n_qubits and self.ancilla == ancilla:
            return self
        if self.ancilla is not None or n_qubits < self.n_qubits:
            raise ValueError(f'Cannot move ({self.n_qubits}, {self.ancilla}) onto register ({n_qubits}, {ancilla})')
        return Circuit(
            n_qubits=n_qubits,
            ancilla=ancilla,
            gates=list(self.gates),
            compensation=list(self.compensation),
            label=self.label,
        )

    def with_ancilla(self) -> 'Circuit':
        '''Same gates on a register extended by one ancilla qubit on top.'''
        if self.ancilla is not None:
            return self
        return self.on_register(self.n_qubits + 1, self.n_qubits)

    def extend(self, other: 'Circuit') -> 'Circuit':
        '''Concatenate ``other`` after this circuit on the larger of the two registers.'''
        host = max((self, other), key=lambda c: (c.n_qubits, c.ancilla is not None))
        left = self.on_register(host.n_qubits, host.ancilla)
        right = other.on_register(host.n_qubits, host.ancilla)
        label = ' + '.join(part for part in (self.label, other.label) if part)
        return Circuit(
            n_qubits=host.n_qubits,
            ancilla=host.ancilla,
            gates=left.gates + right.gates,
            compensation=left.compensation + right.compensation,
            label=label,
        )

    def inverse(self) -> 'Circuit':
        '''Reverse order with each gate inverted; unitary circuits only.'''
        return Circuit(
            n_qubits=self.n_qubits,
            ancilla=self.ancilla,
            gates=[g.inverse() for g in reversed(self.gates)],
            label=f'inverse({self.label})' if self.label else 'inverse',
        )

    def to_text(self) -> str:
        header = [f'# qubits {self.n_qubits} ancilla {self.ancilla if self.ancilla is not None else "-"}']
        if self.label:
            header.append(f'# {self.label}')
        if self.compensation:
            header.append(f'# compensation {self.total_compensation:.17g}')
        return '\n'.join(header + [g.to_line() for g in self.gates]) + '\n'

    def write_text(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_text(), encoding='utf-8')
        return path

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    @classmethod
    def from_json(cls, json_str: str) -> 'Circuit':
        return cls.model_validate_json(json_str)
