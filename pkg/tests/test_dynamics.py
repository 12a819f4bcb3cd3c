import numpy as np
import pytest

from src.config.numerics import NumericsConfig
from src.dynamics import (
    TRACE_COLUMNS,
    CoherenceTrace,
    QubitDensity,
    coherence_trace,
    coupling_kernel_norm,
    joint_evolution_coherence,
    l1_coherence,
    spec_coherence_trace,
)
from src.errors import DenseCapExceededError, DimensionMismatchError
from src.models import ModelSpec, build_coupling, build_env, polarized_reference
from src.operators import StateVector, expm_dense
from src.utils import read_csv


TIMES = np.linspace(0.0, 3.0, 31)


def ising(n, h=(1.0, 0.5), delta=(0.05, 0.05), J=0.5):
    return ModelSpec(kind="ising", N=n, J=J, h=h, delta=delta)


def single_site_branches(hx, hy, delta, times):
    '''Ground state of -(hx X + i hy Y) and its evolution without and with the coupling.'''
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    h0 = -(hx * x + 1j * hy * y)
    hd = -((hx + delta[0]) * x + 1j * (hy + delta[1]) * y)
    w, v = np.linalg.eig(h0)
    g = v[:, int(np.argmin(w.real))]
    g = g / np.linalg.norm(g)
    phi0 = np.array([expm_dense(-1j * t * h0) @ g for t in times])
    phid = np.array([expm_dense(-1j * t * hd) @ g for t in times])
    return phi0, phid


class TestCoherenceTrace:
    def test_no_coupling_keeps_full_coherence(self):
        trace = spec_coherence_trace(ising(4, delta=(0.0, 0.0)), TIMES)
        assert np.max(np.abs(trace.coherence - 1.0)) < 1e-12

    def test_starts_coherent(self):
        trace = spec_coherence_trace(ising(4, delta=(0.2, 0.1)), TIMES)
        assert abs(trace.coherence[0] - 1.0) < 1e-12
        assert np.all((trace.coherence >= 0.0) & (trace.coherence <= 1.0))

    def test_real_coupling_decoheres(self):
        trace = spec_coherence_trace(ising(6, h=(1.0, 0.0), delta=(0.1, 0.0)), TIMES)
        assert trace.final < 1.0 - 1e-4

    def test_krylov_matches_dense(self):
        spec = ising(6)
        krylov = spec_coherence_trace(spec, TIMES, method="krylov")
        dense = spec_coherence_trace(spec, TIMES, method="dense")
        assert np.max(np.abs(krylov.coherence - dense.coherence)) < 1e-8

    @pytest.mark.parametrize("n", [4, 6, 8, 10])
    @pytest.mark.parametrize("kind", ["ising", "heisenberg"])
    def test_exceptional_point_with_aligned_coupling_stays_coherent(self, kind, n):
        spec = ModelSpec(kind=kind, N=n, J=0.5, h=(1.0, 1.0), delta=(0.05, 0.05))
        trace = spec_coherence_trace(spec, TIMES)
        assert np.max(np.abs(trace.raw_coherence - 1.0)) < 1e-10
        ground = polarized_reference(spec)
        assert coupling_kernel_norm(build_coupling(spec), ground) < 1e-15

    @pytest.mark.parametrize(
        "hy, delta",
        [(0.0, (0.05, -0.03)), (0.5, (0.1, 0.0)), (0.9, (0.07, 0.07)), (0.99, (0.02, 0.005))],
    )
    def test_heisenberg_chain_is_a_product_of_single_sites(self, hy, delta):
        # the field and coupling are collective spin operators, so both branches
        # stay in the fully symmetric multiplet and factorize over sites
        n = 8
        spec = ModelSpec(kind="heisenberg", N=n, J=0.5, h=(1.0, hy), delta=delta)
        trace = spec_coherence_trace(spec, TIMES)
        phi0, phid = single_site_branches(1.0, hy, delta, TIMES)
        overlap = np.abs(np.einsum("ti,ti->t", phi0.conj(), phid)) ** n
        norm0 = np.sum(np.abs(phi0) ** 2, axis=1) ** n
        normd = np.sum(np.abs(phid) ** 2, axis=1) ** n
        expected = 2 * overlap / (norm0 + normd)
        assert np.max(np.abs(trace.raw_coherence - expected)) < 1e-8

    def test_metadata(self):
        trace = spec_coherence_trace(ising(4), TIMES)
        assert trace.metadata["method"] == "krylov"
        assert trace.metadata["spec"] == ising(4).label()
        assert trace.metadata["ground_energy_im"] == pytest.approx(0.0, abs=1e-8)
        assert not trace.metadata["degenerate"]

    def test_fermi_trace(self):
        spec = ModelSpec(kind="fermi", N=2, J=0.1, U=0.4, h=(1.0, 0.5), delta=(0.05, 0.0))
        trace = spec_coherence_trace(spec, TIMES)
        assert len(trace) == TIMES.size
        assert abs(trace.coherence[0] - 1.0) < 1e-12

    def test_csv(self, tmp_path):
        trace = spec_coherence_trace(ising(4), TIMES[:5])
        header, rows = read_csv(trace.to_csv(tmp_path / "trace.csv"))
        assert tuple(header) == TRACE_COLUMNS
        assert len(rows) == 5
        assert float(rows[0][1]) == pytest.approx(1.0)


class TestCoherenceTraceValidation:
    def setup_method(self):
        self.spec = ising(3)
        self.env = build_env(self.spec)
        self.coupling = build_coupling(self.spec)
        self.ground = StateVector.basis_state(self.env.dim, 0)

    @pytest.mark.parametrize("times", [[], [0.5, 1.0], [0.0, 1.0, 0.5]])
    def test_bad_grid(self, times):
        with pytest.raises(ValueError):
            coherence_trace(self.env, self.coupling, self.ground, times)

    def test_unnormalized_state(self):
        with pytest.raises(ValueError, match="unit-normalized"):
            coherence_trace(self.env, self.coupling, 2 * self.ground.amplitudes, [0.0, 1.0])

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="Available"):
            coherence_trace(self.env, self.coupling, self.ground, [0.0, 1.0], method="euler")

    def test_wrong_dimension(self):
        with pytest.raises(DimensionMismatchError):
            coherence_trace(self.env, self.coupling, np.array([1.0, 0.0]), [0.0, 1.0])

    def test_repeated_times(self):
        trace = coherence_trace(self.env, self.coupling, self.ground, [0.0, 0.5, 0.5, 1.0])
        assert trace.coherence[1] == trace.coherence[2]


class TestQubitDensity:
    def test_plus_state(self):
        rho = QubitDensity(np.full((2, 2), 0.5))
        assert l1_coherence(rho) == pytest.approx(1.0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            QubitDensity(np.eye(2))
        with pytest.raises(ValueError):
            QubitDensity(np.array([[0.5, 1.0], [1.0, 0.5]]))
        with pytest.raises(DimensionMismatchError):
            QubitDensity(np.eye(3) / 3)

    def test_from_branches(self):
        phi = np.array([1.0, 0.0])
        rho = QubitDensity.from_branches(phi, np.array([0.0, 1.0]))
        assert l1_coherence(rho) == 0.0
        assert np.trace(rho.matrix).real == pytest.approx(1.0)

    def test_trace_from_branches_caps(self):
        trace = CoherenceTrace.from_branches([0.0], [1.2], [1.0], [1.0])
        assert trace.coherence[0] == 1.0
        assert trace.raw_coherence[0] == pytest.approx(1.2)


def random_specs(count, seed):
    '''Specs in the real-spectrum region: |h_y| < h_x, small couplings, at most 8 spins or 6 fermion sites.'''
    rng = np.random.default_rng(seed)
    specs = []
    for index in range(count):
        kind = ("ising", "heisenberg", "fermi")[index % 3]
        n = int(rng.choice([2, 4, 6])) if kind == "fermi" else int(rng.integers(2, 9))
        specs.append(ModelSpec(
            kind=kind,
            N=n,
            J=float(rng.uniform(0.1, 0.5)),
            U=0.4 if kind == "fermi" else 0.0,
            h=(float(rng.uniform(0.9, 1.2)), float(rng.uniform(-0.5, 0.5))),
            delta=(float(rng.uniform(-0.1, 0.1)), float(rng.uniform(-0.1, 0.1))),
        ))
    return specs


RANDOM_SPECS = random_specs(20, seed=2024)


class TestJointEvolution:
    @pytest.mark.parametrize(
        "spec",
        [
            ising(4),
            ModelSpec(kind="heisenberg", N=4, J=0.5, h=(1.0, 0.3), delta=(0.1, 0.0)),
            ModelSpec(kind="fermi", N=2, J=0.1, U=0.4, h=(1.0, 0.5), delta=(0.05, 0.05)),
        ],
    )
    def test_matches_two_branch_trace(self, spec):
        joint = joint_evolution_coherence(spec, TIMES)
        branches = spec_coherence_trace(spec, TIMES)
        assert np.max(np.abs(joint.coherence - branches.coherence)) < 1e-8

    @pytest.mark.slow
    @pytest.mark.parametrize("spec", RANDOM_SPECS, ids=[s.label() for s in RANDOM_SPECS])
    def test_random_specs(self, spec):
        joint = joint_evolution_coherence(spec, TIMES)
        branches = spec_coherence_trace(spec, TIMES)
        assert np.max(np.abs(joint.coherence - branches.coherence)) < 1e-8

    def test_dense_joint(self):
        spec = ising(3)
        joint = joint_evolution_coherence(spec, TIMES, method="dense")
        branches = spec_coherence_trace(spec, TIMES, method="dense")
        assert np.max(np.abs(joint.coherence - branches.coherence)) < 1e-10
        assert joint.metadata["method"] == "joint-dense"

    def test_dense_cap(self):
        with pytest.raises(DenseCapExceededError):
            joint_evolution_coherence(ising(4), TIMES, numerics=NumericsConfig(dense_cap=16))

    @pytest.mark.slow
    def test_ten_site_chain(self):
        spec = ising(10, h=(1.0, 0.9), delta=(0.07, 0.07))
        joint = joint_evolution_coherence(spec, TIMES)
        branches = spec_coherence_trace(spec, TIMES)
        assert np.max(np.abs(joint.coherence - branches.coherence)) < 1e-8
