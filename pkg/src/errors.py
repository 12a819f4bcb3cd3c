'''Exception hierarchy for decohere.'''

from __future__ import annotations


class DecohereError(Exception):
    '''Base class for every error raised by this package.'''


class DimensionMismatchError(DecohereError, ValueError):
    '''Operator and state (or two operators) live on different bases.'''


class DenseCapExceededError(DecohereError):
    '''A dense matrix was requested above the configured dimension cap.'''

    def __init__(self, dim: int, cap: int) -> None:
        super().__init__(f'Dense dimension {dim} exceeds cap {cap}; use a matrix-free path')
        self.dim = dim
        self.cap = cap


class NonFiniteError(DecohereError, ValueError):
    '''Input contains NaN or infinite entries.'''


class KrylovConvergenceError(DecohereError):
    '''Arnoldi propagation could not reach the requested tolerance.'''

    def __init__(self, message: str, residual: float, t_reached: float) -> None:
        super().__init__(f'{message} (residual estimate {residual:.3e}, reached t={t_reached:.6g})')
        self.residual = residual
        self.t_reached = t_reached


class EigenSolverError(DecohereError):
    '''Eigendecomposition failed or returned pairs violating the residual bound.'''


class ModelSpecError(DecohereError, ValueError):
    '''A model specification is inconsistent with the requested builder.'''


class DegenerateAmplitudeError(DecohereError, ValueError):
    '''State synthesis hit a vanishing denominator.'''

    def __init__(self, denominator: str, value: float) -> None:
        super().__init__(f'Degenerate amplitude pattern: {denominator} = {value:.3e}')
        self.denominator = denominator
        self.value = value


class StepValidityError(DecohereError, ValueError):
    '''A non-unitary step angle lies outside the range the ancilla protocol supports.'''


class PostselectionError(DecohereError):
    '''Projection onto the ancilla |0> branch left a numerically zero state.'''


class ScheduleUnderflowError(DecohereError):
    '''Adaptive step control shrank the step below its floor.'''

    def __init__(self, t: float, dt: float, deviation: float) -> None:
        super().__init__(f'Step underflow at t={t:.6g}: dt={dt:.3e}, deviation {deviation:.3e}')
        self.t = t
        self.dt = dt
        self.deviation = deviation


class BrokenPhaseError(DecohereError, ValueError):
    '''Closed-form ground state requested where the two-site spectrum is complex.'''

    def __init__(self, J: float, hx: float, hy: float, discriminant: float) -> None:
        super().__init__(
            f'Two-site ground state is complex at J={J:g}, hx={hx:g}, hy={hy:g}: '
            f'4hx^2 - 4hy^2 + J^2 = {discriminant:.3e} (broken phase)'
        )
        self.J = J
        self.hx = hx
        self.hy = hy
        self.discriminant = discriminant
