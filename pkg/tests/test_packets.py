import numpy as np
import pytest

from qlens import (GridSpec, NonNormalizableStateError, PacketParams,
                   GridConfigError, mean_momentum, mean_position, rho_from_sigma,
                   sigma2, sigma_from_rho, synthesize_packet)


class TestSigmaRho:
    def test_standard_launch_width(self):
        rho = rho_from_sigma(0.1, v=60.0)
        assert np.isclose(rho, -0.6j, rtol=1e-15)
        assert np.isclose(sigma_from_rho(rho, v=60.0), 0.1, rtol=1e-14)

    def test_round_trip(self):
        for sigma0 in (0.01, 0.1, 1.0):
            for v in (6.0, 60.0):
                rho = rho_from_sigma(sigma0, v)
                assert np.isclose(sigma_from_rho(rho, v), sigma0, rtol=1e-14)

    def test_free_spread_shift(self):
        # rho -> rho + v t reproduces sqrt(sigma0^2 + (t/sigma0)^2)
        rho = rho_from_sigma(0.1, v=60.0) + 60.0 * 0.02
        assert np.isclose(sigma_from_rho(rho, v=60.0), np.sqrt(0.01 + 0.04),
                          rtol=1e-14)

    def test_real_shift_growth_monotone(self):
        rho0 = rho_from_sigma(0.2, v=10.0)
        widths = [sigma_from_rho(rho0 + r, v=10.0) for r in (0.0, 0.5, 1.0, 2.0)]
        assert all(b > a for a, b in zip(widths, widths[1:]))
        widths_neg = [sigma_from_rho(rho0 - r, v=10.0) for r in (0.0, 0.5, 1.0)]
        assert all(b > a for a, b in zip(widths_neg, widths_neg[1:]))

    def test_non_normalizable_rejected(self):
        with pytest.raises(NonNormalizableStateError):
            sigma_from_rho(1j * 0.5, v=10.0)
        with pytest.raises(NonNormalizableStateError):
            sigma_from_rho(2.0 + 0j, v=10.0)


class TestPacketParams:
    def test_kinetic_energy(self, ref_params):
        assert ref_params.e0 == 1800.0

    def test_launch_must_be_upstream(self):
        with pytest.raises(ValueError):
            PacketParams.from_sigma0(0.1, 60.0, q_launch=0.5)

    def test_config_round_trip(self, ref_params):
        again = PacketParams.from_config(ref_params.to_config())
        assert again.rho1 == ref_params.rho1
        assert again.rho2 == ref_params.rho2
        assert again.v == ref_params.v


@pytest.fixture(scope="module")
def ref_field():
    params = PacketParams.from_sigma0(0.1, 60.0, -0.8)
    grid = GridSpec(-2.0, 2.8, -1.6, 1.6, 512, 256)
    return params, synthesize_packet(params, grid)


class TestSynthesize:
    def test_unit_norm(self, ref_field):
        _, field = ref_field
        assert abs(field.norm() - 1.0) <= 1e-10

    def test_density_peak_at_launch(self, ref_field):
        params, field = ref_field
        w = np.abs(field.values) ** 2
        i2, i1 = np.unravel_index(np.argmax(w), w.shape)
        assert abs(field.grid.axis1()[i1] - params.q_launch) <= field.grid.d1
        assert abs(field.grid.axis2()[i2]) <= field.grid.d2

    def test_mean_position(self, ref_field):
        params, field = ref_field
        q1, q2 = mean_position(field)
        assert abs(q1 - params.q_launch) <= 1e-10
        assert abs(q2) <= 1e-10

    def test_mean_momentum_is_carrier(self, ref_field):
        params, field = ref_field
        p1, p2 = mean_momentum(field)
        assert abs(p1 - params.m * params.v) <= 1e-6
        assert abs(p2) <= 1e-10

    def test_grid_dispersion_matches_rho(self, ref_field):
        params, field = ref_field
        assert abs(sigma2(field) - params.sigma2) <= 1e-3 * params.sigma2

    def test_coverage_guard(self):
        params = PacketParams.from_sigma0(0.1, 60.0, -0.8)
        tight = GridSpec(-1.0, 1.0, -1.6, 1.6, 512, 256)   # launch 0.2 from edge
        with pytest.raises(GridConfigError):
            synthesize_packet(params, tight)

    def test_carrier_resolution_guard(self):
        params = PacketParams.from_sigma0(0.1, 60.0, -0.8)
        coarse = GridSpec(-2.0, 2.8, -1.6, 1.6, 64, 256)   # k1 cutoff ~ 42 < 120
        with pytest.raises(GridConfigError):
            synthesize_packet(params, coarse)

    def test_rotated_frame_carrier(self):
        # packet launched along a tilted island axis keeps its momentum there
        e1 = np.array([np.cos(0.3), np.sin(0.3)])
        params = PacketParams.from_sigma0(0.25, 8.0, -1.0)
        grid = GridSpec(-4.0, 4.0, -4.0, 4.0, 256, 256)
        field = synthesize_packet(params, grid, e1=e1)
        p1, p2 = mean_momentum(field)
        assert np.allclose([p1, p2], 8.0 * e1, atol=1e-6)
