'''Trotterized steps of the two-site non-Hermitian Ising chain.

H(h, delta) = -J Z1 Z2 - a_x (X1 + X2) - i a_y (Y1 + Y2), with
a = h + delta, splits into a unitary part U(dt) = exp(i dt J ZZ) exp(i dt a_x sum X)
and a non-unitary part exp(-a_y dt sum Y). Each non-unitary site factor is
realized by an ancilla prepared with RY(pi/2 + 2 phi), an R-basis change,
CNOT onto the ancilla and postselection on |0>. The postselected action is

    (cos phi / sqrt2) [(1 - tan phi) P_+y + (1 + tan phi) P_-y].

With phi = a_y dt (small-angle mode) this is (cos phi / sqrt2)(I - tan phi Y),
exp(-a_y dt Y) to second order. With phi = arctan(tanh(a_y dt)) (exact mode)
it equals (cos phi / (sqrt2 cosh(a_y dt))) exp(-a_y dt Y).
'''

from __future__ import annotations

import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .circuit import Circuit
from .executor import run_exact, system_amplitudes
from .gates import Gate, cnot, measure_postselect, r_gate, r_inverse, rx, ry, rzz
from ..errors import ModelSpecError, ScheduleUnderflowError, StepValidityError
from ..models import ModelKind, ModelSpec, build_env
from ..models.spins import periodic_bonds
from ..operators import expm_dense
from ..spectral import ground_state
from ..utils import get_logger

logger = get_logger(__name__)

AncillaMode = Literal['exact', 'small_angle']


class CircuitProtocol(BaseModel):
    '''Settings of the circuit emulation.'''

    model_config = ConfigDict(frozen=True)

    order: Literal[1, 2] = Field(default=2, description='1: U(dt) N(dt); 2: U(dt/2) N(dt) U(dt/2)')
    ancilla_mode: AncillaMode = Field(default='exact', description='Ancilla angle: exact | small_angle')
    tol: float = Field(default=1e-2, gt=0.0, description='Adaptive-step tolerance')
    dt0: float | None = Field(default=None, gt=0.0, description='Initial and largest step; default t_max / 10')
    min_dt: float = Field(default=1e-6, gt=0.0, description='Step floor of the adaptive schedule')
    error_budget: Literal['step', 'global'] = Field(
        default='step',
        description='step: raw deviation of each step below tol; global: step deviation scaled by t_max/dt below tol',
    )
    shots: int = Field(default=0, ge=0, description='Trajectories per time point in shot mode; 0 for exact amplitudes')
    seed: int = Field(default=0, ge=0, description='Philox key of shot sampling; time point n uses seed + n')


def trotter_unitary_step(J: float, a_x: float, dt: float, n_sites: int = 2, reverse: bool = False) -> Circuit:
    '''RZZ(-2 J dt) on each bond, then RX(-2 a_x dt) on each site.

    ``reverse`` emits the X rotations first, for the mirrored half of a
    symmetric step.
    '''
    bonds = [rzz(i, j, -2.0 * J * dt) for i, j in periodic_bonds(n_sites)]
    fields = [rx(j, -2.0 * a_x * dt) for j in range(n_sites)]
    gates = fields + bonds if reverse else bonds + fields
    return Circuit(n_qubits=n_sites + 1, ancilla=n_sites, gates=gates, label=f'U({dt:g})')


def ancilla_angle(a_y: float, dt: float, mode: AncillaMode = 'exact') -> tuple[float, float]:
    '''(phi, compensation) for one postselected site factor.

    Raises:
        StepValidityError: small-angle mode with |a_y dt| >= pi/4.
    '''
    x = a_y * dt
    if mode == 'small_angle':
        if abs(x) >= math.pi / 4:
            raise StepValidityError(f'|a_y dt| = {abs(x):.4f} must stay below pi/4 in small-angle mode')
        return x, math.sqrt(2.0) / math.cos(x)
    if mode == 'exact':
        phi = math.atan(math.tanh(x))
        return phi, math.sqrt(2.0) * math.cosh(x) / math.cos(phi)
    raise ValueError(f"Unknown ancilla mode '{mode}'. Available: exact, small_angle")


def nonunitary_step(
    a_y: float,
    dt: float,
    site: int,
    n_sites: int = 2,
    mode: AncillaMode = 'exact',
) -> Circuit:
    '''Postselected realization of exp(-a_y dt Y_site), one compensation factor.'''
    phi, compensation = ancilla_angle(a_y, dt, mode)
    anc = n_sites
    gates: list[Gate] = [
        ry(anc, math.pi / 2 + 2.0 * phi),
        r_gate(site),
        cnot(site, anc),
        measure_postselect(anc),
        r_inverse(site),
    ]
    return Circuit(n_qubits=n_sites + 1, ancilla=anc, gates=gates, compensation=[compensation], label=f'N_{site}({dt:g})')


def _nonunitary_layer(a_y: float, dt: float, n_sites: int, mode: AncillaMode) -> Circuit:
    layer = Circuit(n_qubits=n_sites + 1, ancilla=n_sites)
    for site in range(n_sites):
        layer = layer.extend(nonunitary_step(a_y, dt, site, n_sites, mode))
    return layer


def trotter_step(
    J: float,
    a_x: float,
    a_y: float,
    dt: float,
    order: Literal[1, 2] = 2,
    ancilla_mode: AncillaMode = 'exact',
    n_sites: int = 2,
) -> Circuit:
    '''One Trotter step of exp(-i dt H) for field a = h + delta.'''
    layer = _nonunitary_layer(a_y, dt, n_sites, ancilla_mode)
    if order == 1:
        step = trotter_unitary_step(J, a_x, dt, n_sites).extend(layer)
    elif order == 2:
        step = (
            trotter_unitary_step(J, a_x, dt / 2, n_sites)
            .extend(layer)
            .extend(trotter_unitary_step(J, a_x, dt / 2, n_sites, reverse=True))
        )
    else:
        raise ValueError(f'Trotter order must be 1 or 2, got {order}')
    return step.model_copy(update={'label': f'step({dt:g})'})


def branch_fields(spec: ModelSpec) -> tuple[float, float]:
    '''(a_x, a_y) = h + delta for a two-site Ising spec.'''
    if spec.kind is not ModelKind.ISING or spec.n_sites != 2:
        raise ModelSpecError(f'Circuit emulation supports the two-site Ising chain, got {spec.kind.value} N={spec.n_sites}')
    return spec.h[0] + spec.delta[0], spec.h[1] + spec.delta[1]


def adaptive_schedule(
    spec: ModelSpec,
    tol: float | None = None,
    t_max: float = 2.0,
    protocol: CircuitProtocol | None = None,
) -> list[float]:
    '''Greedy step sizes covering [0, t_max].

    Starting from dt0 = t_max / 10, a step is halved until the distance
    between its Trotterized and exact action on the current (exact) state
    falls below tol, and the next step doubles (up to dt0) when it fell
    below tol / 4. Under ``error_budget="global"`` the distance is first
    scaled by t_max / dt, the number of such steps needed to reach t_max.

    Raises:
        ScheduleUnderflowError: when dt drops below ``protocol.min_dt``.
    '''
    protocol = protocol or CircuitProtocol()
    tol = protocol.tol if tol is None else tol
    if tol <= 0.0:
        raise ValueError(f'tol must be positive, got {tol}')
    if t_max <= 0.0:
        raise ValueError(f't_max must be positive, got {t_max}')
    a_x, a_y = branch_fields(spec)
    H = build_env(spec.shifted()).to_dense()
    psi = np.array(ground_state(build_env(spec)).vector.amplitudes)

    dt0 = protocol.dt0 or t_max / 10
    dt = dt0
    t = 0.0
    schedule: list[float] = []
    while t_max - t > 1e-12 * t_max:
        step = min(dt, t_max - t)
        unit = psi / np.linalg.norm(psi)
        propagator = expm_dense(-1j * step * H)
        exact = propagator @ unit
        circuit = trotter_step(spec.J, a_x, a_y, step, protocol.order, protocol.ancilla_mode)
        out, _ = run_exact(circuit, unit)
        trotter = system_amplitudes(out, circuit) * circuit.total_compensation
        deviation = float(np.linalg.norm(trotter - exact))
        measured = deviation * (t_max / step) if protocol.error_budget == 'global' else deviation
        if measured >= tol:
            dt = step / 2
            if dt < protocol.min_dt:
                raise ScheduleUnderflowError(t, dt, deviation)
            continue
        schedule.append(step)
        psi = propagator @ psi
        t += step
        if measured < tol / 4:
            dt = min(2 * step, dt0)
    logger.debug(f'Adaptive schedule: {len(schedule)} steps, dt in [{min(schedule):.3g}, {max(schedule):.3g}]')
    return schedule
