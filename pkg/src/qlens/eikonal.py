"""Semiclassical propagator on straight paths and direct oscillatory quadrature.

The propagator amplitude is sqrt(D)/(2 pi i hbar) exp(i S / hbar), with S
the straight-path action (free action minus the closed-form line integral
of the potential), and D the absolute determinant of the mixed
endpoint Hessian of S.  No conjugate points occur here, so the phase index
is identically zero.
"""

from __future__ import annotations

import numpy as np

from .errors import DifferentiationError, OscillationResolutionError, ValidityDomainError
from .grid import ComplexField2D
from .lens import SQRT_PI, validity_ratio
from .potential import GaussianPotential, straight_line_integral


def eikonal_action(pot: GaussianPotential, q, qp, t: float, m: float = 1.0) -> np.ndarray | float:
    """Action along the straight path: m|q-q'|^2/(2t) minus the potential integral."""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    d = q - qp
    free = m * np.einsum("...i,...i->...", d, d) / (2.0 * t)
    return free - straight_line_integral(pot, q, qp, t)


def stability_factor(pot: GaussianPotential, q, qp, t: float, m: float = 1.0) -> np.ndarray | float:
    """|det| of the mixed endpoint Hessian of the straight-path action.

    Central finite differences with step h = 1e-4 max(l1, |q-q'|),
    Richardson-refined once.  Free case: exactly (m/t)^2 up to FD noise.
    """
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    shape = np.broadcast_shapes(q.shape, qp.shape)[:-1]
    qb = np.broadcast_to(q, shape + (2,))
    qpb = np.broadcast_to(qp, shape + (2,))
    sep = np.linalg.norm(qb - qpb, axis=-1)
    h = 1e-4 * np.maximum(pot.l1, sep)

    def mixed(step):
        mat = np.empty(shape + (2, 2))
        for i in range(2):
            for j in range(2):
                hi = np.zeros(shape + (2,))
                hj = np.zeros(shape + (2,))
                hi[..., i] = step
                hj[..., j] = step
                mat[..., i, j] = (
                    eikonal_action(pot, qb + hi, qpb + hj, t, m)
                    - eikonal_action(pot, qb + hi, qpb - hj, t, m)
                    - eikonal_action(pot, qb - hi, qpb + hj, t, m)
                    + eikonal_action(pot, qb - hi, qpb - hj, t, m)
                ) / (4.0 * step**2)
        return mat

    refined = (4.0 * mixed(h / 2) - mixed(h)) / 3.0
    if not np.all(np.isfinite(refined)):
        raise DifferentiationError("non-finite values in the stability-factor stencil")
    det = np.abs(np.linalg.det(refined))
    return det if det.ndim else float(det)


def far_field_action(pot: GaussianPotential, half_separation: float, xi, xip, t: float,
                     m: float = 1.0) -> np.ndarray | float:
    """Far-field decomposition of the action for q = L e1 + xi, q' = -L e1 + xi'.

    Constant term -(sqrt(pi)/2)(l1/L) V0 t, longitudinal quadratic
    (m/2t)(2L + xi1 - xi1')^2, and the transverse part carrying the lens:
    (m/2t)(xi2 - xi2')^2 + (sqrt(pi)/8) l1 V0 t (xi2 + xi2')^2 / (L l2^2).

    xi components are in the island frame (e1, e2).
    """
    xi = np.asarray(xi, dtype=float)
    xip = np.asarray(xip, dtype=float)
    l = half_separation
    const = -(SQRT_PI / 2.0) * (pot.l1 / l) * pot.v0 * t
    s1 = m / (2.0 * t) * (2.0 * l + xi[..., 0] - xip[..., 0]) ** 2
    s2 = (m / (2.0 * t) * (xi[..., 1] - xip[..., 1]) ** 2
          + (SQRT_PI / 8.0) * pot.l1 * pot.v0 * t / (l * pot.l2**2)
          * (xi[..., 1] + xip[..., 1]) ** 2)
    return const + s1 + s2


def far_field_stability(pot: GaussianPotential, half_separation: float, t: float,
                        m: float = 1.0) -> tuple:
    """Closed-form factorization (D1, D2) of the far-field stability factor.

    D1 = m/t, D2 = m/t - sqrt(pi) l1 V0 t / (4 L l2^2).  A non-positive D2
    means the perturbative expansion in V0 has collapsed; that is flagged
    rather than silently returned.
    """
    d1 = m / t
    d2 = m / t - SQRT_PI * pot.l1 * pot.v0 * t / (4.0 * half_separation * pot.l2**2)
    if d2 <= 0:
        raise ValidityDomainError(
            "far-field transverse stability factor is non-positive",
            validity_ratio(pot, t, half_separation, m))
    return d1, d2


def propagate_by_quadrature(pot: GaussianPotential, psi0: ComplexField2D, t: float,
                            output_points, m: float = 1.0, hbar: float = 1.0,
                            support_cut: float = 1e-13, chunk: int = 8) -> np.ndarray:
    """Evolve psi0 by direct quadrature of the semiclassical propagator.

    Sums sqrt(D)/(2 pi i hbar) exp(i S/hbar) psi0(q') d1 d2 over the source
    grid for each requested output point (trapezoidal rule; the packet is
    compactly supported so edge weights are immaterial).  Cost is
    O(N_source) per output point.

    Raises OscillationResolutionError if the kernel phase advances by more
    than pi/4 per source cell at the characteristic velocity of the run
    (packet centroid to the farthest output point over t): the spacing rule
    d <= lambda/8 with lambda = 2 pi hbar / (m v_char).
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    output_points = np.atleast_2d(np.asarray(output_points, dtype=float))
    g = psi0.grid
    x1, x2 = g.mesh()
    amp = psi0.values.ravel()
    keep = np.abs(amp) > support_cut * np.abs(amp).max()
    src = np.stack([x1.ravel()[keep], x2.ravel()[keep]], axis=-1)
    weights = amp[keep] * g.cell

    mass = np.abs(amp[keep]) ** 2
    centroid = (src * mass[:, None]).sum(axis=0) / mass.sum()
    v_char = float(np.max(np.linalg.norm(output_points - centroid, axis=-1))) / t
    phase_step = m * v_char / hbar * max(g.d1, g.d2)
    if phase_step > np.pi / 4:
        raise OscillationResolutionError(
            f"kernel phase step {phase_step:.3f} rad per source cell exceeds pi/4; "
            "refine the source grid or shorten the propagation")

    out = np.empty(len(output_points), dtype=np.complex128)
    for start in range(0, len(output_points), chunk):
        pts = output_points[start:start + chunk][:, None, :]   # (c, 1, 2)
        action = eikonal_action(pot, pts, src[None, :, :], t, m)
        if pot.v0 == 0.0:
            # mixed Hessian of the free action is -(m/t) I exactly
            stab = (m / t) ** 2
        else:
            stab = stability_factor(pot, pts, src[None, :, :], t, m)
        kern = np.sqrt(stab) / (2.0 * np.pi * 1j * hbar) * np.exp(1j * action / hbar)
        out[start:start + chunk] = kern @ weights
    return out
