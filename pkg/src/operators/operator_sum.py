'''OperatorSum and StateVector: the Hamiltonian and state representations.

Operators are complex-weighted sums of Pauli strings. They act matrix-free on
basis indices through bit manipulation; `basis` optionally restricts the
space to a sorted list of basis indices (a conserved sector).
'''

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .pauli import PAULI_LETTERS, SiteOp, multiply_strings, string_masks
from ..config.numerics import NumericsConfig
from ..errors import DenseCapExceededError, DimensionMismatchError, NonFiniteError


Term = tuple[complex, str]


# ---------------------------------------------------------------------------
# StateVector
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StateVector:
    '''Immutable complex amplitude vector. Its norm is not required to be 1.'''

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1:
            raise DimensionMismatchError(f'State amplitudes must be 1-D, got shape {amps.shape}')
        if not np.all(np.isfinite(amps)):
            raise NonFiniteError('State amplitudes contain non-finite entries')
        amps.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amps)

    @classmethod
    def basis_state(cls, dim: int, index: int) -> 'StateVector':
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> 'StateVector':
        norm = self.norm
        if norm == 0.0:
            raise ValueError('Cannot normalize the zero vector')
        return StateVector(self.amplitudes / norm)

    def inner(self, other: 'StateVector | np.ndarray') -> complex:
        '''<self|other> with the standard conjugated inner product.'''
        other_amps = as_amplitudes(other)
        if other_amps.shape != self.amplitudes.shape:
            raise DimensionMismatchError(f'Inner product of dims {self.dim} and {other_amps.shape[0]}')
        return complex(np.vdot(self.amplitudes, other_amps))

    def __len__(self) -> int:
        return self.dim


def as_amplitudes(v: StateVector | np.ndarray | Sequence[complex]) -> np.ndarray:
    '''Read-only view of the amplitudes of a StateVector or array-like.'''
    if isinstance(v, StateVector):
        return v.amplitudes
    return np.asarray(v, dtype=np.complex128)


# ---------------------------------------------------------------------------
# OperatorSum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _MaskAction:
    '''All terms sharing one flip mask, compiled against the basis.

    out[rows] += weights * x[cols]; cols None means every basis state and
    rows None means the diagonal.
    '''

    flip: int
    weights: np.ndarray
    rows: np.ndarray | None
    cols: np.ndarray | None


@dataclass(frozen=True, eq=False)
class OperatorSum:
    '''Sum of coefficient-weighted Pauli strings on ``n_sites`` sites.'''

    n_sites: int
    terms: tuple[Term, ...] = ()
    basis: np.ndarray | None = field(default=None, repr=False)

    # numpy scalars must defer to __rmul__ instead of broadcasting
    __array_ufunc__ = None

    def __post_init__(self) -> None:
        if self.n_sites < 1:
            raise ValueError(f'n_sites must be positive, got {self.n_sites}')
        normalized: list[Term] = []
        for coeff, string in self.terms:
            string = str(string)
            if len(string) != self.n_sites:
                raise DimensionMismatchError(
                    f'Term {string!r} has {len(string)} sites, operator has {self.n_sites}'
                )
            if not set(string) <= PAULI_LETTERS:
                raise ValueError(f'Term {string!r} contains letters outside IXYZ')
            c = complex(coeff)
            if not np.isfinite(c):
                raise NonFiniteError(f'Non-finite coefficient on {string!r}')
            normalized.append((c, string))
        object.__setattr__(self, 'terms', tuple(normalized))

        if self.basis is not None:
            basis = np.unique(np.asarray(self.basis, dtype=np.int64))
            if basis.size == 0:
                raise ValueError('Basis restriction must not be empty')
            if basis[0] < 0 or basis[-1] >= 2 ** self.n_sites:
                raise ValueError(f'Basis indices out of range for {self.n_sites} sites')
            basis.setflags(write=False)
            object.__setattr__(self, 'basis', basis)

    @classmethod
    def from_terms(
        cls,
        n_sites: int,
        terms: Iterable[Term],
        basis: np.ndarray | None = None,
    ) -> 'OperatorSum':
        '''Build an operator, dropping terms whose coefficient is exactly zero.'''
        return cls(n_sites, tuple((c, s) for c, s in terms if complex(c) != 0), basis)

    @classmethod
    def identity(cls, n_sites: int, basis: np.ndarray | None = None) -> 'OperatorSum':
        return cls(n_sites, ((1.0, 'I' * n_sites),), basis)

    @classmethod
    def zero(cls, n_sites: int, basis: np.ndarray | None = None) -> 'OperatorSum':
        return cls(n_sites, (), basis)

    # -----------------------------------------------------------------------
    # Shape
    # -----------------------------------------------------------------------

    @property
    def dim(self) -> int:
        return 2 ** self.n_sites if self.basis is None else int(self.basis.shape[0])

    @property
    def is_empty(self) -> bool:
        return len(self.terms) == 0

    def __len__(self) -> int:
        return len(self.terms)

    def same_space(self, other: 'OperatorSum') -> bool:
        if self.n_sites != other.n_sites:
            return False
        if self.basis is None or other.basis is None:
            return self.basis is None and other.basis is None
        return bool(np.array_equal(self.basis, other.basis))

    def _require_same_space(self, other: 'OperatorSum') -> None:
        if not self.same_space(other):
            raise DimensionMismatchError(
                f'Operators live on different spaces (sites {self.n_sites} vs {other.n_sites}, '
                f'dims {self.dim} vs {other.dim})'
            )

    # -----------------------------------------------------------------------
    # Algebra
    # -----------------------------------------------------------------------

    def __add__(self, other: 'OperatorSum') -> 'OperatorSum':
        if not isinstance(other, OperatorSum):
            return NotImplemented
        self._require_same_space(other)
        return OperatorSum(self.n_sites, self.terms + other.terms, self.basis)

    def __sub__(self, other: 'OperatorSum') -> 'OperatorSum':
        if not isinstance(other, OperatorSum):
            return NotImplemented
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> 'OperatorSum':
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return OperatorSum(self.n_sites, tuple((c * scalar, s) for c, s in self.terms), self.basis)

    __rmul__ = __mul__

    def __neg__(self) -> 'OperatorSum':
        return self * -1.0

    def __matmul__(self, other: 'OperatorSum') -> 'OperatorSum':
        '''Operator product. On a restricted basis this is exact only when
        ``other`` keeps the sector invariant.'''
        if not isinstance(other, OperatorSum):
            return NotImplemented
        self._require_same_space(other)
        products = []
        for c1, s1 in self.terms:
            for c2, s2 in other.terms:
                phase, string = multiply_strings(s1, s2)
                products.append((c1 * c2 * phase, string))
        return OperatorSum(self.n_sites, tuple(products), self.basis).simplify()

    def simplify(self, atol: float = 0.0) -> 'OperatorSum':
        '''Merge equal strings (first-appearance order) and drop |c| <= atol.'''
        merged: dict[str, complex] = {}
        for coeff, string in self.terms:
            merged[string] = merged.get(string, 0j) + coeff
        kept = tuple((c, s) for s, c in merged.items() if abs(c) > atol)
        return OperatorSum(self.n_sites, kept, self.basis)

    def dagger(self) -> 'OperatorSum':
        return OperatorSum(self.n_sites, tuple((c.conjugate(), s) for c, s in self.terms), self.basis)

    def restrict(self, basis: np.ndarray | None) -> 'OperatorSum':
        return OperatorSum(self.n_sites, self.terms, basis)

    def padded(self, n_total: int) -> 'OperatorSum':
        '''Same operator on ``n_total`` sites, acting as identity on the added high sites.'''
        extra = n_total - self.n_sites
        if extra < 0:
            raise ValueError(f'Cannot pad {self.n_sites} sites down to {n_total}')
        basis = None
        if self.basis is not None:
            offsets = np.arange(2 ** extra, dtype=np.int64) << self.n_sites
            basis = (offsets[:, None] + self.basis[None, :]).ravel()
        return OperatorSum(n_total, tuple((c, s + 'I' * extra) for c, s in self.terms), basis)

    def norm_bound(self) -> float:
        '''Upper bound on the spectral norm: every Pauli string has norm 1.'''
        return float(sum(abs(c) for c, _ in self.terms))

    # -----------------------------------------------------------------------
    # Matrix-free action
    # -----------------------------------------------------------------------

    @cached_property
    def _states(self) -> np.ndarray:
        if self.basis is None:
            return np.arange(2 ** self.n_sites, dtype=np.int64)
        return self.basis

    @cached_property
    def _actions(self) -> tuple[_MaskAction, ...]:
        states = self._states
        grouped: dict[int, list[tuple[complex, int]]] = {}
        for coeff, string in self.terms:
            flip, sign, y_count = string_masks(string)
            grouped.setdefault(flip, []).append((coeff * (1j ** y_count), sign))

        actions = []
        for flip, entries in grouped.items():
            weights = np.zeros(states.shape[0], dtype=np.complex128)
            for coeff, sign in entries:
                if sign == 0:
                    weights += coeff
                else:
                    parity = np.bitwise_count(states & sign) & 1
                    weights += coeff * (1 - 2 * parity.astype(np.int8))
            if flip == 0:
                actions.append(_MaskAction(flip, weights, None, None))
                continue
            targets = states ^ flip
            if self.basis is None:
                actions.append(_MaskAction(flip, weights, targets, None))
                continue
            pos = np.minimum(np.searchsorted(self.basis, targets), self.basis.shape[0] - 1)
            cols = np.nonzero(self.basis[pos] == targets)[0]
            actions.append(_MaskAction(flip, weights[cols], pos[cols], cols))
        return tuple(actions)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        '''Apply to a (dim,) vector or the columns of a (dim, k) block.'''
        if x.shape[0] != self.dim:
            raise DimensionMismatchError(f'Operator dim {self.dim} does not match vector dim {x.shape[0]}')
        out = np.zeros(x.shape, dtype=np.complex128)
        column = (slice(None),) + (None,) * (x.ndim - 1)
        for act in self._actions:
            if act.cols is None:
                contrib = act.weights[column] * x
            else:
                contrib = act.weights[column] * x[act.cols]
            if act.rows is None:
                out += contrib
            else:
                # targets are distinct, so fancy-index accumulation is safe
                out[act.rows] += contrib
        return out

    def apply(self, v: StateVector | np.ndarray) -> StateVector:
        return StateVector(self.matvec(as_amplitudes(v)))

    # -----------------------------------------------------------------------
    # Matrix forms
    # -----------------------------------------------------------------------

    def to_sparse(self) -> sp.csr_matrix:
        '''CSR matrix from the compiled bit-level action (no dimension cap).'''
        dim = self.dim
        rows, cols, data = [], [], []
        every = np.arange(dim, dtype=np.int64)
        for act in self._actions:
            c = every if act.cols is None else act.cols
            r = c if act.rows is None else act.rows
            rows.append(r)
            cols.append(c)
            data.append(act.weights)
        if not data:
            return sp.csr_matrix((dim, dim), dtype=np.complex128)
        matrix = sp.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim),
        )
        return matrix.tocsr()

    def to_dense(self, cap: int | None = None) -> np.ndarray:
        '''Dense matrix by explicit Kronecker-product assembly of each term.'''
        cap = NumericsConfig.load().dense_cap if cap is None else cap
        if self.dim > cap:
            raise DenseCapExceededError(self.dim, cap)
        full = 2 ** self.n_sites
        total = sp.csr_matrix((full, full), dtype=np.complex128)
        for coeff, string in self.terms:
            # site N-1 is the most significant bit, so it is the leftmost factor
            factors = [sp.csr_matrix(SiteOp(letter).matrix()) for letter in reversed(string)]
            total = total + coeff * reduce(lambda a, b: sp.kron(a, b, format='csr'), factors)
        if self.basis is not None:
            total = total[self.basis][:, self.basis]
        return np.asarray(total.toarray(), dtype=np.complex128)


# ---------------------------------------------------------------------------
# Functional forms
# ---------------------------------------------------------------------------

def apply(op: OperatorSum, v: StateVector | np.ndarray) -> StateVector:
    '''op|v> without mutating v.'''
    amps = as_amplitudes(v)
    if amps.shape[0] != op.dim:
        raise DimensionMismatchError(f'Operator dim {op.dim} does not match state dim {amps.shape[0]}')
    return op.apply(amps)


def to_dense(op: OperatorSum, cap: int | None = None) -> np.ndarray:
    return op.to_dense(cap)


def to_sparse(op: OperatorSum) -> sp.csr_matrix:
    return op.to_sparse()
