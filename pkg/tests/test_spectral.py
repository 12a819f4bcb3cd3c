import math

import numpy as np
import pytest

from src.config.numerics import NumericsConfig
from src.errors import BrokenPhaseError, DecohereError, DegenerateAmplitudeError
from src.models import ModelSpec, build_env, periodic_bonds, polarized_reference
from src.operators import OperatorSum
from src.spectral import (
    ground_state,
    ground_state_ising2_closed_form,
    spectrum_reality,
    susceptibility,
    susceptibility_map,
)
from src.utils import read_csv


def ising(n, J=0.5, h=(1.0, 0.0), delta=(0.0, 0.0)):
    return ModelSpec(kind="ising", N=n, J=J, h=h, delta=delta)


class TestGroundState:
    def test_hermitian_matches_lowest_eigenvalue(self):
        H = build_env(ising(4, h=(0.8, 0.0)))
        gs = ground_state(H)
        assert abs(gs.energy - np.linalg.eigvalsh(H.to_dense())[0]) < 1e-10
        assert gs.method == "dense"
        assert not gs.degenerate

    def test_polarized_state_at_exceptional_point(self):
        spec = ising(6, h=(1.0, 1.0))
        gs = ground_state(build_env(spec), polarized_reference(spec))
        assert gs.method == "reference"
        assert gs.polarized_overlap == 1.0
        assert abs(gs.energy - (-spec.J * len(periodic_bonds(6)))) < 1e-12
        assert gs.vector.amplitudes[0] == 1.0

    def test_degenerate_without_field(self):
        gs = ground_state(build_env(ising(4, h=(0.0, 0.0))))
        assert gs.degenerate
        assert abs(gs.energy + 2.0) < 1e-12

    def test_closed_form_values(self):
        amps = ground_state_ising2_closed_form(0.5, 1.0, 0.0).amplitudes
        assert np.max(np.abs(amps - [0.5574, 0.4352, 0.4352, 0.5574])) < 1e-4
        amps = ground_state_ising2_closed_form(0.5, 1.0, 0.5).amplitudes
        assert np.max(np.abs(amps - [0.81971, 0.35597, 0.35597, 0.27324])) < 1e-5

    def test_closed_form_broken_phase(self):
        with pytest.raises(BrokenPhaseError) as excinfo:
            ground_state_ising2_closed_form(0.1, 1.0, 1.5)
        assert isinstance(excinfo.value, DecohereError)
        assert excinfo.value.hy == 1.5
        assert excinfo.value.discriminant < 0.0

    def test_closed_form_zero_field(self):
        with pytest.raises(DegenerateAmplitudeError):
            ground_state_ising2_closed_form(0.5, 0.0, 0.0)

    @pytest.mark.parametrize("J", np.linspace(0.1, 1.0, 5))
    @pytest.mark.parametrize("hy", np.linspace(0.0, 0.9, 5))
    def test_two_site_solver_agrees_with_closed_form(self, J, hy):
        gs = ground_state(build_env(ising(2, J=J, h=(1.0, hy))))
        expected = ground_state_ising2_closed_form(J, 1.0, hy)
        assert abs(gs.vector.inner(expected)) > 1 - 1e-10

    def test_two_site_energy(self):
        gs = ground_state(build_env(ising(2, J=0.5, h=(1.0, 0.5))))
        assert abs(gs.energy - (-math.sqrt(3.25))) < 1e-10

    def test_sparse_path_matches_dense(self):
        H = build_env(ising(4, h=(1.0, 0.5)))
        dense = ground_state(H)
        sparse = ground_state(H, numerics=NumericsConfig(dense_eig_cap=8))
        assert sparse.method == "sparse"
        assert abs(sparse.energy - dense.energy) < 1e-8
        assert abs(sparse.vector.inner(dense.vector)) > 1 - 1e-8


class TestSusceptibility:
    def test_zero_coupling_gives_zero(self):
        result = susceptibility(ising(4, h=(1.0, 0.5)))
        assert result.chi < 1e-12
        assert result.overlap == pytest.approx(1.0)

    def test_vanishes_at_exceptional_point_with_aligned_coupling(self):
        result = susceptibility(ising(4), h=(1.0, 1.0), delta=(0.01, 0.01))
        assert result.chi < 1e-12

    def test_positive_for_real_coupling(self):
        result = susceptibility(ising(4), h=(1.0, 0.5), delta=(0.1, 0.0))
        assert result.chi > 1e-6
        assert not result.degenerate

    @pytest.mark.parametrize("hy", [0.3, 0.6])
    def test_mirror_symmetry(self, hy):
        # a global spin flip maps h_y to -h_y
        spec = ising(4)
        plus = susceptibility(spec, h=(1.0, hy), delta=(0.05, 0.05))
        minus = susceptibility(spec, h=(1.0, -hy), delta=(0.05, -0.05))
        assert abs(plus.chi - minus.chi) < 1e-8

    def test_fermi_susceptibility(self):
        spec = ModelSpec(kind="fermi", N=2, J=0.1, U=0.4)
        result = susceptibility(spec, h=(1.0, 0.5), delta=(0.05, 0.0))
        assert math.isfinite(result.chi)
        assert result.chi >= 0.0


class TestSusceptibilityMap:
    def setup_method(self):
        self.spec = ising(4, delta=(0.05, 0.0))
        self.hx = [0.5, 1.0]
        self.hy = [0.0, 0.25, 0.5]

    def test_shape_and_csv(self, tmp_path):
        chi_map = susceptibility_map(self.spec, self.hx, self.hy)
        assert chi_map.chi.shape == (2, 3)
        header, rows = read_csv(chi_map.to_csv(tmp_path / "map.csv"))
        assert header == ["hx", "hy", "chi", "degenerate"]
        assert len(rows) == 6
        assert rows[0][:2] == ["0.5", "0.0"]
        assert rows[0][3] == "false"

    def test_workers_do_not_change_values(self):
        serial = susceptibility_map(self.spec, self.hx, self.hy, workers=1)
        parallel = susceptibility_map(self.spec, self.hx, self.hy, workers=3)
        assert np.array_equal(serial.chi, parallel.chi)

    def test_argmin(self):
        chi_map = susceptibility_map(ising(4, delta=(0.05, 0.05)), [1.0], [0.0, 0.5, 1.0])
        assert chi_map.argmin_hy(1.0) == 1.0

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            susceptibility_map(self.spec, [], self.hy)


class TestSpectrumReality:
    def test_real_below_exceptional_point(self):
        assert spectrum_reality(build_env(ising(4, h=(1.0, 0.5)))) <= 1e-8

    def test_complex_above_exceptional_point(self):
        assert spectrum_reality(build_env(ising(4, h=(1.0, 1.5)))) > 0.01

    def test_single_site(self):
        op = OperatorSum(1, ((-1.0, "X"), (-0.5j, "Y")))
        assert spectrum_reality(op) < 1e-12
