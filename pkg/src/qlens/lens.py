"""Thin-lens description of the transverse packet dynamics.

The island acts on the transverse radius of curvature like a thin optical
lens: free flight shifts rho by v*t, and crossing the island applies

    1/rho_plus = 1/rho_minus + 1/f,     f = (1/sqrt(pi)) (E0/V0) l2^2/l1.

Because f is real, the kick changes only the wavefront curvature Re(1/rho);
the dispersion sigma (set by Im(1/rho)) is continuous through the crossing
and starts to deviate from free spreading only downstream of it.

The transverse far-field kernel behind this picture multiplies the free
kernel by an amplitude factor and a quadratic phase (lens_kernel); its
kick representation factorizes it into free flight, an instantaneous
quadratic phase kick, and free flight again.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleError, ValidityDomainError
from .packets import PacketParams, sigma_from_rho
from .potential import GaussianPotential

SQRT_PI = np.sqrt(np.pi)


def free_kernel(z, zp, tau: float, m: float = 1.0, hbar: float = 1.0) -> np.ndarray | complex:
    """1D free-particle kernel sqrt(m/(2 pi i hbar tau)) exp(i m (z-z')^2/(2 hbar tau))."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    z = np.asarray(z, dtype=float)
    zp = np.asarray(zp, dtype=float)
    pref = np.sqrt(m / (2j * np.pi * hbar * tau))
    out = pref * np.exp(1j * m * (z - zp) ** 2 / (2.0 * hbar * tau))
    return out if out.ndim else complex(out)


def validity_ratio(pot: GaussianPotential, tau: float, source_distance: float,
                   m: float = 1.0) -> float:
    """Dimensionless ratio tau^2 |V0| l1 / (m l2^2 L); must stay well below 1."""
    return tau**2 * abs(pot.v0) * pot.l1 / (m * pot.l2**2 * source_distance)


def _amplitude_squared(pot: GaussianPotential, tau: float, source_distance: float,
                       m: float) -> float:
    return 1.0 - (SQRT_PI / 4.0) * (pot.l1 / source_distance) * pot.v0 * tau**2 / (m * pot.l2**2)


def lens_kernel(z, zp, tau: float, pot: GaussianPotential, source_distance: float,
                m: float = 1.0, hbar: float = 1.0) -> np.ndarray | complex:
    """Transverse far-field kernel: free kernel times lens amplitude and phase.

    source_distance is the half separation L between source and receiver,
    both far from the island compared to l1.  Raises ValidityDomainError
    when the amplitude factor 1 - (sqrt(pi)/4)(l1/L) V0 tau^2/(m l2^2)
    is non-positive (the perturbative expansion has broken down).
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    amp2 = _amplitude_squared(pot, tau, source_distance, m)
    if amp2 <= 0:
        raise ValidityDomainError(
            "lens kernel amplitude factor is non-positive",
            validity_ratio(pot, tau, source_distance, m))
    z = np.asarray(z, dtype=float)
    zp = np.asarray(zp, dtype=float)
    phase = (SQRT_PI / 8.0) * (pot.l1 / source_distance) * (pot.v0 * tau / hbar) \
        * (z + zp) ** 2 / pot.l2**2
    out = free_kernel(z, zp, tau, m, hbar) * np.sqrt(amp2) * np.exp(1j * phase)
    return out if np.ndim(out) else complex(out)


def kick_phase_coefficient(pot: GaussianPotential, tau: float, source_distance: float,
                           m: float = 1.0, hbar: float = 1.0, exact: bool = True) -> float:
    """Coefficient c of the instantaneous kick exp(i c zeta^2).

    The kick representation splits lens_kernel(tau) into free flight over
    tau/2, the kick, and free flight over tau/2.  With exact=True the
    coefficient carries the 1/(1 - (sqrt(pi)/4)(l1/L) V0 tau^2/(m l2^2))
    correction that makes the representation an identity; exact=False drops
    it, which is accurate to O(ratio^2) inside the validity domain.
    """
    c = (SQRT_PI / 2.0) * (pot.l1 / source_distance) * (pot.v0 * tau / hbar) / pot.l2**2
    if exact:
        amp2 = _amplitude_squared(pot, tau, source_distance, m)
        if amp2 <= 0:
            raise ValidityDomainError(
                "kick coefficient undefined: amplitude factor non-positive",
                validity_ratio(pot, tau, source_distance, m))
        c /= amp2
    return c


def focal_length(pot: GaussianPotential, e0: float) -> float | None:
    """f = (1/sqrt(pi)) (E0/V0) l2^2/l1; None means an infinite focal length (V0 = 0)."""
    if pot.v0 == 0:
        return None
    return (1.0 / SQRT_PI) * (e0 / pot.v0) * pot.l2**2 / pot.l1


def apply_lens(rho_minus: complex, f: float | None) -> complex:
    """Thin-lens map 1/rho_plus = 1/rho_minus + 1/f; f=None is the identity."""
    if rho_minus == 0:
        raise ValueError("rho_minus must be nonzero")
    if f is None:
        return rho_minus
    inv = 1.0 / rho_minus + 1.0 / f
    if inv == 0:
        raise PoleError(f"thin-lens pole: rho_minus = {rho_minus} coincides with -f")
    return 1.0 / inv


def crossing_time(params: PacketParams) -> float:
    """Time |Q|/v for the packet center to reach the island."""
    return abs(params.q_launch) / params.v


def evolve_rho(params: PacketParams, pot: GaussianPotential, t: float) -> complex:
    """Piecewise transverse radius: free shift before the crossing, lens at it.

    rho'_2(t) = rho2 + v t                         for t <  |Q|/v
              = rho_plus + v (t - |Q|/v)           for t >= |Q|/v

    with rho_minus = rho2 + |Q| and rho_plus from the thin-lens map.  The
    map shifts only Re(1/rho), so sigma(rho'_2) is continuous at the
    crossing even though rho'_2 itself jumps by the curvature kick.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    t_cross = crossing_time(params)
    f = focal_length(pot, params.e0)
    if t < t_cross or f is None:
        # f = None (V0 = 0) collapses both branches to the free shift exactly
        return params.rho2 + params.v * t
    rho_plus = apply_lens(params.rho2 + abs(params.q_launch), f)
    return rho_plus + params.v * (t - t_cross)


def predict_sigma2(params: PacketParams, pot: GaussianPotential, t: float) -> float:
    """Transverse dispersion sigma(rho'_2(t)) predicted by the lens model."""
    return sigma_from_rho(evolve_rho(params, pot, t), params.v, params.m, params.hbar)


@dataclass(frozen=True)
class LensState:
    """Transverse state at time t: effective radius, phases, lens geometry."""

    rho2_eff: complex
    phi1: float
    phi2: float
    f: float | None
    t_cross: float
    half_separation: float

    @property
    def defocusing(self) -> bool:
        return self.f is not None and self.f > 0


def lens_state(params: PacketParams, pot: GaussianPotential, t: float) -> LensState:
    """Full bookkeeping of the lens evolution, including the pure phases.

    phi1 = E0 t/hbar - (1/2) arg(1 + v t / rho1) accompanies the
    longitudinal factor.  phi2 is the transverse analogue: the free-flight
    phase before the crossing, plus the lens contribution
    -(1/2)[arg(rho'_2/rho_plus) + arg(rho_minus/rho2)] after it.  Neither
    phase affects any |psi|^2-derived observable.
    """
    rho_eff = evolve_rho(params, pot, t)
    phi1 = params.e0 * t / params.hbar - 0.5 * np.angle(1.0 + params.v * t / params.rho1)
    t_cross = crossing_time(params)
    f = focal_length(pot, params.e0)
    if t < t_cross or f is None:
        phi2 = -0.5 * np.angle((params.rho2 + params.v * t) / params.rho2)
    else:
        rho_minus = params.rho2 + abs(params.q_launch)
        rho_plus = apply_lens(rho_minus, f)
        phi2 = -0.5 * (np.angle(rho_eff / rho_plus) + np.angle(rho_minus / params.rho2))
    return LensState(rho2_eff=rho_eff, phi1=float(phi1), phi2=float(phi2), f=f,
                     t_cross=t_cross, half_separation=abs(params.q_launch))


@dataclass(frozen=True)
class ValidityReport:
    """Dimensionless smallness ratios guarding the far-field lens picture."""

    time_ratio: float        # t^2 |V0| l1 / (m l2^2 L)
    sigma_over_l2: float     # transverse packet extent vs island width
    l1_over_l: float         # island thickness vs half separation
    sigma_over_l: float      # packet extent vs half separation
    threshold: float = 0.2

    @property
    def time_ok(self) -> bool:
        return self.time_ratio < self.threshold

    @property
    def sigma_l2_ok(self) -> bool:
        return self.sigma_over_l2 < self.threshold

    @property
    def geometry_ok(self) -> bool:
        return self.l1_over_l < self.threshold and self.sigma_over_l < self.threshold

    @property
    def passed(self) -> bool:
        return self.time_ok and self.sigma_l2_ok and self.geometry_ok

    def ratios(self) -> dict:
        return {"time_ratio": self.time_ratio, "sigma_over_l2": self.sigma_over_l2,
                "l1_over_l": self.l1_over_l, "sigma_over_l": self.sigma_over_l}


def check_validity(params: PacketParams, pot: GaussianPotential, half_separation: float,
                   t: float) -> ValidityReport:
    """Advisory report; each ratio passes below the 0.2 threshold."""
    sigma_t = sigma_from_rho(params.rho2 + params.v * t, params.v, params.m, params.hbar)
    return ValidityReport(
        time_ratio=validity_ratio(pot, t, half_separation, params.m),
        sigma_over_l2=sigma_t / pot.l2,
        l1_over_l=pot.l1 / half_separation,
        sigma_over_l=sigma_t / half_separation,
    )
