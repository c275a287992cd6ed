"""Gaussian wave packets parametrized by complex radii of curvature.

A 1D factor is psi(z; rho) = (1/(pi sigma^2))^(1/4) exp[i (m v / hbar)
(z^2/(2 rho) + z)], with the linear (carrier) term present only along the
propagation axis.  The complex radius rho encodes wavefront curvature in
its real part and the dispersion through

    1/sigma^2 = (m v / hbar) Im(1/rho),

which must be positive for a normalizable state.  Free flight is the shift
rho -> rho + v t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridConfigError, NonNormalizableStateError
from .grid import ComplexField2D, GridSpec


def sigma_from_rho(rho: complex, v: float, m: float = 1.0, hbar: float = 1.0) -> float:
    """Position dispersion sigma = [(m v / hbar) Im(1/rho)]^(-1/2)."""
    im = (1.0 / rho).imag
    if im <= 0:
        raise NonNormalizableStateError(
            f"Im(1/rho) = {im:.6g} <= 0 gives a non-normalizable state")
    return 1.0 / np.sqrt((m * v / hbar) * im)


def rho_from_sigma(sigma: float, v: float, m: float = 1.0, hbar: float = 1.0) -> complex:
    """Minimum-uncertainty radius -i (m v / hbar) sigma^2 for a given width."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return -1j * (m * v / hbar) * sigma**2


@dataclass(frozen=True)
class PacketParams:
    """Launch parameters of the product packet psi1(q1 - Q) psi2(q2).

    The packet starts centered at (Q, 0) with Q < 0 and moves along e1 with
    speed v.  Atomic units (m = hbar = 1) are the intended default.
    """

    rho1: complex
    rho2: complex
    v: float
    q_launch: float
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.v <= 0:
            raise ValueError(f"speed must be positive, got {self.v}")
        if self.q_launch >= 0:
            raise ValueError(f"launch coordinate must be negative, got {self.q_launch}")
        for name, rho in (("rho1", self.rho1), ("rho2", self.rho2)):
            if (1.0 / rho).imag <= 0:
                raise NonNormalizableStateError(f"{name} = {rho} has Im(1/rho) <= 0")

    @property
    def e0(self) -> float:
        """Kinetic energy m v^2 / 2 of the corresponding classical particle."""
        return 0.5 * self.m * self.v**2

    @property
    def sigma1(self) -> float:
        return sigma_from_rho(self.rho1, self.v, self.m, self.hbar)

    @property
    def sigma2(self) -> float:
        return sigma_from_rho(self.rho2, self.v, self.m, self.hbar)

    @classmethod
    def from_sigma0(cls, sigma0: float, v: float, q_launch: float,
                    m: float = 1.0, hbar: float = 1.0) -> "PacketParams":
        rho = rho_from_sigma(sigma0, v, m, hbar)
        return cls(rho1=rho, rho2=rho, v=v, q_launch=q_launch, m=m, hbar=hbar)

    def to_config(self) -> dict:
        # complex radii are always rebuilt from sigma0; only sigma0 is stored
        return {"sigma0": self.sigma2, "v": self.v, "q_launch": self.q_launch}

    @classmethod
    def from_config(cls, cfg: dict) -> "PacketParams":
        return cls.from_sigma0(float(cfg["sigma0"]), float(cfg["v"]), float(cfg["q_launch"]))


def packet_factor(z, rho: complex, v: float, m: float = 1.0, hbar: float = 1.0,
                  carrier: bool = False) -> np.ndarray:
    """One 1D Gaussian factor; carrier=True adds the plane-wave term exp(i m v z / hbar)."""
    z = np.asarray(z, dtype=float)
    sigma = sigma_from_rho(rho, v, m, hbar)
    phase = (m * v / hbar) * (z**2 / (2.0 * rho) + (z if carrier else 0.0))
    return (1.0 / (np.pi * sigma**2)) ** 0.25 * np.exp(1j * phase)


def synthesize_packet(params: PacketParams, grid: GridSpec, e1=(1.0, 0.0)) -> ComplexField2D:
    """Sample the product packet on a grid and normalize it there.

    The factor along e1 carries the plane wave exp(i m v z1 / hbar); the
    transverse factor has no drift.  The grid must cover +-5 sigma0 around
    the launch point, resolve the carrier in momentum space, and hold the
    entire packet (boundary tail mass <= 1e-12), else GridConfigError.
    """
    e1 = np.asarray(e1, dtype=float)
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.array([-e1[1], e1[0]])
    center = params.q_launch * e1

    sig = max(params.sigma1, params.sigma2)
    lo1, hi1 = center[0] - 5 * sig, center[0] + 5 * sig
    lo2, hi2 = center[1] - 5 * sig, center[1] + 5 * sig
    if lo1 < grid.x1_min or hi1 > grid.x1_max or lo2 < grid.x2_min or hi2 > grid.x2_max:
        raise GridConfigError("grid does not cover +-5 sigma around the launch point")

    k_carrier = params.m * params.v / params.hbar
    bandwidth = 6.0 / min(params.sigma1, params.sigma2)
    for k_max, comp in ((grid.k1_max, abs(e1[0])), (grid.k2_max, abs(e1[1]))):
        if k_max < k_carrier * comp + bandwidth:
            raise GridConfigError(
                f"momentum cutoff {k_max:.1f} below carrier+bandwidth "
                f"{k_carrier * comp + bandwidth:.1f}")

    x1, x2 = grid.mesh()
    z1 = (x1 - center[0]) * e1[0] + (x2 - center[1]) * e1[1]
    z2 = (x1 - center[0]) * e2[0] + (x2 - center[1]) * e2[1]
    values = (packet_factor(z1, params.rho1, params.v, params.m, params.hbar, carrier=True)
              * packet_factor(z2, params.rho2, params.v, params.m, params.hbar))
    field = ComplexField2D(grid, values).normalized()

    tail = field.edge_tail_mass(bands=1)
    if tail > 1e-12:
        raise GridConfigError(f"packet tail mass {tail:.3e} > 1e-12 at the grid boundary")
    return field
