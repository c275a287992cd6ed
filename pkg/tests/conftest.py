"""Shared fixtures and independent numerical oracles for the test suite.

The oracles deliberately avoid the closed forms they check: the potential
line integral is re-done with adaptive 1D quadrature, kernels are rebuilt
from scratch and integrated numerically, and the free packet evolution is
written out analytically from the Gaussian integral.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from qlens import GaussianPotential, GridSpec, PacketParams


# reference setup: narrow island, fast narrow packet, atomic units
REF_L1 = 0.1
REF_L2 = 1.0
REF_V = 60.0
REF_SIGMA0 = 0.1
REF_Q = -0.8


@pytest.fixture
def island():
    def make(v0):
        return GaussianPotential.axis_aligned(v0=v0, l1=REF_L1, l2=REF_L2)
    return make


@pytest.fixture
def ref_params():
    return PacketParams.from_sigma0(REF_SIGMA0, REF_V, REF_Q)


@pytest.fixture
def small_free_setup():
    """Slow, wide packet on a small grid: cheap to propagate spectrally."""
    grid = GridSpec(-4.0, 4.0, -4.0, 4.0, 128, 128)
    params = PacketParams.from_sigma0(0.4, 8.0, -1.0)
    return grid, params


def random_spd_potential(rng, v0=1.0, eig_lo=0.1, eig_hi=100.0):
    angle = rng.uniform(0.0, np.pi)
    e1 = np.array([np.cos(angle), np.sin(angle)])
    return GaussianPotential(v0=v0, e1=e1, a1=rng.uniform(eig_lo, eig_hi),
                             a2=rng.uniform(eig_lo, eig_hi))


def line_integral_quad(pot, q, qp, t):
    """Adaptive 1D quadrature of V along the straight path (the oracle).

    A peak-location hint keeps the adaptive subdivision honest when the
    island is a narrow feature on the path.
    """
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    d = q - qp
    dad = float(d @ pot.matrix @ d)
    points = None
    if dad > 0:
        points = [float(np.clip(-(qp @ pot.matrix @ d) / dad, 0.0, 1.0))]

    def integrand(s):
        r = qp + s * d
        return float(np.exp(-r @ pot.matrix @ r))

    val, _ = quad(integrand, 0.0, 1.0, epsabs=0, epsrel=1e-13, limit=200,
                  points=points)
    return t * pot.v0 * val


def free_kernel_1d(z, zp, tau, m=1.0, hbar=1.0):
    """Free kernel written out independently; accepts complex arguments."""
    return np.sqrt(m / (2j * np.pi * hbar * tau)) * np.exp(
        1j * m * (z - zp) ** 2 / (2.0 * hbar * tau))


def kick_quadrature(z, zp, tau, kick_coeff, m=1.0, hbar=1.0):
    """Adaptive quadrature of K0(z,.,tau/2) exp(i c .^2) K0(.,z',tau/2).

    The integrand has constant modulus on the real line, so the contour is
    rotated by pi/4 about the stationary point of the total quadratic
    phase; on that contour the integrand decays as a Gaussian and plain
    adaptive quadrature converges.  Only the quadratic-phase coefficients
    are read off; the value is still obtained numerically.
    """
    a = m / (hbar * tau)                  # phase curvature of each half step
    alpha = 2.0 * a + kick_coeff
    zeta_star = a * (z + zp) / alpha
    direction = np.exp(1j * np.pi / 4.0)
    width = 1.0 / np.sqrt(alpha)

    def integrand(u):
        zeta = zeta_star + direction * u
        return (free_kernel_1d(z, zeta, tau / 2.0, m, hbar)
                * np.exp(1j * kick_coeff * zeta**2)
                * free_kernel_1d(zeta, zp, tau / 2.0, m, hbar)) * direction

    val, _ = quad(integrand, -12.0 * width, 12.0 * width, epsabs=1e-14,
                  epsrel=1e-12, limit=400, complex_func=True)
    return val


def free_evolution_value(params, t, q1, q2):
    """Closed-form free 2D evolution of the launch packet at a point.

    Each factor evolves by rho -> rho + v t with amplitude (1 + v t/rho)^(-1/2);
    the longitudinal factor also carries exp(i E0 t / hbar) and the moving
    carrier.  Verified against direct propagator quadrature.
    """
    m, v, hbar = params.m, params.v, params.hbar
    z1 = q1 - params.q_launch - v * t
    z2 = q2

    def factor(z, rho, carrier):
        sigma0 = 1.0 / np.sqrt((m * v / hbar) * (1.0 / rho).imag)
        rho_t = rho + v * t
        pref = (1.0 / (np.pi * sigma0**2)) ** 0.25 / np.sqrt(1.0 + v * t / rho)
        phase = (m * v / hbar) * (z**2 / (2.0 * rho_t) + (z if carrier else 0.0))
        return pref * np.exp(1j * phase)

    return (np.exp(1j * params.e0 * t / hbar)
            * factor(z1, params.rho1, True) * factor(z2, params.rho2, False))


def l2_distance(field_a, field_b):
    assert field_a.grid == field_b.grid
    return float(np.sqrt(np.sum(np.abs(field_a.values - field_b.values) ** 2)
                         * field_a.grid.cell))
