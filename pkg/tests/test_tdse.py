import numpy as np
import pytest

from conftest import l2_distance
from qlens import (BoundaryContaminationError, ComplexField2D, GaussianPotential,
                   GridSpec, HamiltonianOperator, PacketParams, apply_hamiltonian,
                   free_spreading, mean_position, plan_chebyshev,
                   propagate_chebyshev, propagate_splitstep, read_snapshot,
                   sigma2, synthesize_packet, write_snapshot)


@pytest.fixture
def small_grid():
    return GridSpec(-4.0, 4.0, -4.0, 4.0, 128, 128)


@pytest.fixture
def small_packet(small_grid):
    params = PacketParams.from_sigma0(0.4, 8.0, -1.0)
    return params, synthesize_packet(params, small_grid)


def _free(v0=0.0):
    return GaussianPotential.axis_aligned(v0=v0, l1=0.3, l2=0.8)


class TestApplyHamiltonian:
    def test_plane_wave_is_eigenstate(self, small_grid):
        # commensurate wave vector: exactly representable on the grid
        k = np.array([2.0 * np.pi / 8.0 * 12, 2.0 * np.pi / 8.0 * 5])
        x1, x2 = small_grid.mesh()
        field = ComplexField2D(small_grid, np.exp(1j * (k[0] * x1 + k[1] * x2)))
        out = apply_hamiltonian(_free(0.0), field)
        expected = 0.5 * (k @ k) * field.values
        assert np.max(np.abs(out.values - expected)) <= 1e-12 * 0.5 * (k @ k)

    def test_constant_field_is_annihilated(self, small_grid):
        field = ComplexField2D(small_grid, np.ones((128, 128), dtype=complex))
        out = apply_hamiltonian(_free(0.0), field)
        assert np.max(np.abs(out.values)) <= 1e-12

    def test_reference_packet_energy(self):
        # <H> = carrier energy + zero-point spread of both axes: 1800 + 50
        params = PacketParams.from_sigma0(0.1, 60.0, -0.8)
        grid = GridSpec(-2.0, 2.8, -1.6, 1.6, 512, 256)
        psi0 = synthesize_packet(params, grid)
        op = HamiltonianOperator(GaussianPotential.axis_aligned(0.0, 0.1, 1.0), grid)
        mean_h = op.mean_energy(psi0)
        expected = params.e0 + 0.5 * (0.5 / 0.1**2 + 0.5 / 0.1**2)
        assert expected == 1850.0
        assert abs(mean_h - expected) <= 1e-3 * expected


class TestPlan:
    def test_short_step_has_few_terms(self, small_grid):
        plan = plan_chebyshev(_free(5.0), small_grid, dt=1e-7)
        assert plan.n_terms <= 15

    def test_term_count_tracks_bessel_argument(self, small_grid):
        # choose dt so the rescaled argument is ~50; tail onset is O(x^(1/3))
        op = HamiltonianOperator(_free(5.0), small_grid)
        lo, hi = op.energy_bounds()
        dt = 50.0 / (0.5 * (hi - lo) * 1.05)
        plan = plan_chebyshev(_free(5.0), small_grid, dt=dt)
        assert 50 < plan.n_terms <= 120

    def test_doubling_dt_roughly_doubles_terms(self, small_grid):
        pot = _free(5.0)
        op = HamiltonianOperator(pot, small_grid)
        lo, hi = op.energy_bounds()
        dt = 200.0 / (0.5 * (hi - lo) * 1.05)
        n1 = plan_chebyshev(pot, small_grid, dt=dt).n_terms
        n2 = plan_chebyshev(pot, small_grid, dt=2 * dt).n_terms
        assert 1.6 <= n2 / n1 <= 2.4

    def test_bounds_inflated_and_ordered(self, small_grid):
        pot = _free(5.0)
        plan = plan_chebyshev(pot, small_grid, dt=1e-3)
        lo, hi = HamiltonianOperator(pot, small_grid).energy_bounds()
        assert plan.e_min < lo or plan.e_min == lo - 0.025 * (hi - lo)
        assert plan.e_max > hi
        assert plan.delta_e >= 0.5 * (hi - lo)

    def test_tolerance_validation(self, small_grid):
        with pytest.raises(ValueError):
            plan_chebyshev(_free(5.0), small_grid, dt=1e-3, tol=1e-5)
        with pytest.raises(ValueError):
            plan_chebyshev(_free(5.0), small_grid, dt=1e-3, tol=0.0)


class TestChebyshevPropagation:
    def test_free_spreading_and_norm(self, small_packet):
        params, psi0 = small_packet
        snaps = propagate_chebyshev(_free(0.0), psi0, 0.08, snapshot_interval=0.02)
        for snap in snaps:
            assert abs(snap.field.norm() - 1.0) <= 1e-10
            target = free_spreading(0.4, snap.t)
            assert abs(sigma2(snap.field) - target) <= 2e-3 * target

    def test_free_ehrenfest_drift(self, small_packet):
        params, psi0 = small_packet
        snaps = propagate_chebyshev(_free(0.0), psi0, 0.08, snapshot_interval=0.04)
        for snap in snaps:
            q1, q2 = mean_position(snap.field)
            assert abs(q1 - (params.q_launch + params.v * snap.t)) <= 1e-6
            assert abs(q2) <= 1e-10

    def test_step_size_independence(self, small_packet):
        params, psi0 = small_packet
        pot = _free(6.0)
        one = propagate_chebyshev(pot, psi0, 0.08)[-1].field
        many = propagate_chebyshev(pot, psi0, 0.08, dt=0.01,
                                   snapshot_interval=0.08)[-1].field
        assert l2_distance(one, many) <= 1e-8

    def test_norm_and_energy_with_island(self, small_packet):
        params, psi0 = small_packet
        pot = _free(6.0)
        op = HamiltonianOperator(pot, psi0.grid)
        snaps = propagate_chebyshev(pot, psi0, 0.08, snapshot_interval=0.02)
        e0 = op.mean_energy(snaps[0].field)
        for snap in snaps:
            assert abs(snap.field.norm() - 1.0) <= 1e-10
            assert abs(op.mean_energy(snap.field) - e0) <= 1e-8 * abs(e0)

    def test_reflection_symmetry(self, small_packet):
        # the setup is symmetric under q2 -> -q2; the density must stay so
        params, psi0 = small_packet
        snaps = propagate_chebyshev(_free(6.0), psi0, 0.08)
        w = np.abs(snaps[-1].field.values)
        assert np.max(np.abs(w[1:, :] - w[:0:-1, :])) <= 1e-9

    def test_boundary_guard_trips(self):
        # aim the packet at the boundary with a long horizon
        grid = GridSpec(-4.0, 4.0, -4.0, 4.0, 128, 128)
        params = PacketParams.from_sigma0(0.4, 8.0, -1.0)
        psi0 = synthesize_packet(params, grid)
        with pytest.raises(BoundaryContaminationError):
            propagate_chebyshev(_free(0.0), psi0, 0.8, snapshot_interval=0.1)

    def test_snapshot_interval_must_divide(self, small_packet):
        _, psi0 = small_packet
        with pytest.raises(ValueError):
            propagate_chebyshev(_free(0.0), psi0, 0.05, snapshot_interval=0.02)


class TestSplitStep:
    def test_free_case_matches_chebyshev_exactly(self, small_packet):
        # with V = 0 the splitting is exact; both engines apply the same
        # spectral kinetic phase
        _, psi0 = small_packet
        a = propagate_chebyshev(_free(0.0), psi0, 0.08)[-1].field
        b = propagate_splitstep(_free(0.0), psi0, 0.08, dt=0.01)[-1].field
        assert l2_distance(a, b) <= 1e-12

    def test_second_order_convergence(self, small_packet):
        _, psi0 = small_packet
        pot = _free(6.0)
        ref = propagate_chebyshev(pot, psi0, 0.08)[-1].field
        errs = []
        for n in (8, 16, 32):
            ss = propagate_splitstep(pot, psi0, 0.08, dt=0.08 / n)[-1].field
            errs.append(l2_distance(ss, ref))
        assert 3.4 <= errs[0] / errs[1] <= 4.6
        assert 3.4 <= errs[1] / errs[2] <= 4.6

    def test_cross_engine_agreement_small(self, small_packet):
        _, psi0 = small_packet
        pot = _free(6.0)
        a = propagate_chebyshev(pot, psi0, 0.08)[-1].field
        b = propagate_splitstep(pot, psi0, 0.08, dt=0.08 / 4096)[-1].field
        assert l2_distance(a, b) <= 1e-8


class TestGridConvergence:
    def test_transverse_moment_grid_independent(self):
        # doubling both point counts changes sigma2 by well under 0.05%
        params = PacketParams.from_sigma0(0.1, 60.0, -0.8)
        pot = GaussianPotential.axis_aligned(40.0, 0.1, 1.0)
        vals = []
        for (n1, n2) in ((512, 128), (1024, 256)):
            grid = GridSpec(-2.0, 2.8, -1.6, 1.6, n1, n2)
            psi0 = synthesize_packet(params, grid)
            final = propagate_chebyshev(pot, psi0, 0.0267)[-1].field
            vals.append(sigma2(final))
        assert abs(vals[1] - vals[0]) <= 5e-4 * vals[1]


class TestSnapshotIO:
    def test_round_trip(self, small_packet, tmp_path):
        _, psi0 = small_packet
        path = tmp_path / "snap.bin"
        write_snapshot(path, psi0, t=0.125)
        back = read_snapshot(path)
        assert back.grid == psi0.grid
        assert np.array_equal(back.values, psi0.values)
        sidecar = path.with_suffix(".bin.json")
        assert sidecar.exists()
