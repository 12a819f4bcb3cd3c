import math

import numpy as np
import pytest
import scipy.linalg

from src.config.numerics import NumericsConfig
from src.errors import DenseCapExceededError, DimensionMismatchError, NonFiniteError
from src.models import ModelSpec, build_ising_env
from src.operators import (
    OperatorSum,
    StateVector,
    eig_general,
    expm_dense,
    expm_multiply,
    multiply_strings,
    single_site,
)


X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def random_operator(n_sites, n_terms, seed):
    rng = np.random.default_rng(seed)
    terms = []
    for _ in range(n_terms):
        string = "".join(rng.choice(list("IXYZ"), size=n_sites))
        terms.append((complex(rng.normal(), rng.normal()), string))
    return OperatorSum.from_terms(n_sites, terms)


def random_state(dim, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=dim) + 1j * rng.normal(size=dim)


class TestPauliStrings:
    def test_product_table(self):
        assert multiply_strings("X", "Y") == (1j, "Z")
        assert multiply_strings("Y", "X") == (-1j, "Z")
        assert multiply_strings("ZZ", "ZZ") == (1, "II")

    def test_single_site(self):
        assert single_site(3, {0: "X", 2: "z"}) == "XIZ"

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            multiply_strings("XX", "X")

    def test_site_out_of_range(self):
        with pytest.raises(ValueError):
            single_site(2, {2: "X"})


class TestOperatorSum:
    def test_apply_matches_dense(self):
        op = random_operator(3, 8, seed=1)
        v = random_state(8, seed=2)
        assert np.max(np.abs(op.apply(v).amplitudes - op.to_dense() @ v)) < 1e-13

    def test_sparse_matches_dense(self):
        op = random_operator(4, 10, seed=3)
        assert np.max(np.abs(op.to_sparse().toarray() - op.to_dense())) < 1e-14

    def test_two_site_ising_hand_assembled(self):
        J, hx, hy = 0.5, 1.0, 0.9
        H = build_ising_env(ModelSpec(kind="ising", N=2, J=J, h=(hx, hy)))
        # site 0 is the low bit, so it is the right Kronecker factor
        expected = (
            -J * np.kron(Z, Z)
            - hx * (np.kron(I2, X) + np.kron(X, I2))
            - 1j * hy * (np.kron(I2, Y) + np.kron(Y, I2))
        )
        assert np.max(np.abs(H.to_dense() - expected)) < 1e-14
        assert len(H) == 5

    def test_matmul_and_dagger(self):
        a = random_operator(2, 4, seed=4)
        b = random_operator(2, 4, seed=5)
        assert np.max(np.abs((a @ b).to_dense() - a.to_dense() @ b.to_dense())) < 1e-12
        assert np.max(np.abs(a.dagger().to_dense() - a.to_dense().conj().T)) < 1e-14

    def test_simplify_merges_equal_strings(self):
        op = OperatorSum(2, ((1.0, "XI"), (2.0, "XI"), (1.0, "ZZ"), (-1.0, "ZZ")))
        merged = op.simplify()
        assert merged.terms == ((3.0 + 0j, "XI"),)

    def test_padded_acts_as_identity_on_new_site(self):
        op = random_operator(2, 5, seed=6)
        assert np.max(np.abs(op.padded(3).to_dense() - np.kron(I2, op.to_dense()))) < 1e-14

    def test_restricted_basis_is_submatrix(self):
        op = OperatorSum(3, ((1.0, "XXI"), (1.0, "YYI"), (0.5, "ZIZ")))
        basis = np.array([1, 2, 4])
        full = op.to_dense()
        restricted = op.restrict(basis)
        assert restricted.dim == 3
        assert np.max(np.abs(restricted.to_dense() - full[np.ix_(basis, basis)])) < 1e-14
        v = random_state(3, seed=7)
        assert np.max(np.abs(restricted.apply(v).amplitudes - full[np.ix_(basis, basis)] @ v)) < 1e-13

    def test_dimension_mismatch(self):
        op = random_operator(2, 3, seed=8)
        with pytest.raises(DimensionMismatchError):
            op.apply(np.ones(8))
        with pytest.raises(DimensionMismatchError):
            OperatorSum(2, ((1.0, "XXX"),))

    def test_invalid_terms(self):
        with pytest.raises(ValueError):
            OperatorSum(2, ((1.0, "XA"),))
        with pytest.raises(NonFiniteError):
            OperatorSum(2, ((math.nan, "XX"),))

    def test_dense_cap(self):
        op = random_operator(4, 3, seed=9)
        with pytest.raises(DenseCapExceededError):
            op.to_dense(cap=8)

    def test_state_vector(self):
        v = StateVector.basis_state(4, 2)
        assert v.norm == 1.0
        assert v.inner(np.array([0, 0, 1j, 0])) == 1j
        with pytest.raises(ValueError):
            StateVector(np.zeros(3)).normalized()
        with pytest.raises(NonFiniteError):
            StateVector(np.array([1.0, math.inf]))


class TestExponentials:
    def test_expm_dense_matches_taylor(self):
        rng = np.random.default_rng(10)
        m = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))) * 0.3
        taylor = np.eye(4, dtype=complex)
        term = np.eye(4, dtype=complex)
        for k in range(1, 60):
            term = term @ m / k
            taylor = taylor + term
        assert np.max(np.abs(expm_dense(m) - taylor)) < 1e-12

    def test_krylov_matches_dense(self):
        H = build_ising_env(ModelSpec(kind="ising", N=8, J=0.5, h=(1.0, 0.5)))
        v = random_state(H.dim, seed=11)
        v = v / np.linalg.norm(v)
        exact = expm_dense(-1j * 3.0 * H.to_dense()) @ v
        approx = expm_multiply(H, v, 3.0).amplitudes
        assert np.linalg.norm(approx - exact) / np.linalg.norm(exact) < 1e-8

    def test_krylov_backwards_and_zero_time(self):
        H = random_operator(3, 6, seed=12)
        v = random_state(8, seed=13)
        assert np.max(np.abs(expm_multiply(H, v, 0.0).amplitudes - v)) < 1e-14
        forward = expm_multiply(H, v, 0.4)
        back = expm_multiply(H, forward, -0.4)
        assert np.linalg.norm(back.amplitudes - v) / np.linalg.norm(v) < 1e-9

    def test_krylov_rejects_bad_tolerance(self):
        H = random_operator(2, 3, seed=14)
        with pytest.raises(ValueError):
            expm_multiply(H, np.ones(4), 1.0, tol=0.0)


class TestSpectrum:
    def test_single_site_complex_field(self):
        op = OperatorSum(1, ((-1.0, "X"), (-0.5j, "Y")))
        values = np.sort(eig_general(op.to_dense()).eigenvalues.real)
        expected = math.sqrt(1 - 0.25)
        assert abs(values[0] + expected) < 1e-12
        assert abs(values[1] - expected) < 1e-12

    def test_matches_scipy(self):
        m = random_operator(3, 6, seed=15).to_dense()
        result = eig_general(m)
        reference = np.sort_complex(scipy.linalg.eigvals(m))
        assert np.max(np.abs(np.sort_complex(result.eigenvalues) - reference)) < 1e-10
        assert np.max(result.residuals) < 1e-10

    def test_jordan_block_flagged(self):
        result = eig_general(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert result.any_near_defective
        assert result.condition_flags.all()

    def test_dense_cap(self):
        with pytest.raises(DenseCapExceededError):
            eig_general(np.zeros((5, 5)), NumericsConfig(dense_cap=4))
