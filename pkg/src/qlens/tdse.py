"""Grid reference dynamics: polynomial-expansion and split-step propagators.

The kinetic operator is applied spectrally (FFT, multiply by
hbar^2 k^2 / 2m, inverse FFT) and the potential pointwise.  The main engine
expands the evolution operator for one step in Chebyshev polynomials of the
rescaled Hamiltonian with Bessel-function coefficients; the expansion is
spectrally accurate, so results are independent of the step size and the
step can be as long as the interval between requested snapshots.  A Strang
split-step integrator provides an independent second-order oracle.

No absorbing boundaries: runs are short enough that the packet never
reaches the edge, and a tail-mass guard aborts the run if it does.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
from scipy.special import jv

from .errors import BoundaryContaminationError, ChebyshevPlanningError
from .grid import ComplexField2D, GridSpec
from .potential import GaussianPotential, eval_potential

_FFT_WORKERS = 2
_EDGE_GUARD = 1e-8


class HamiltonianOperator:
    """H = T + V on a fixed grid, with precomputed multiplier arrays."""

    def __init__(self, pot: GaussianPotential, grid: GridSpec,
                 m: float = 1.0, hbar: float = 1.0):
        self.grid = grid
        self.m = m
        self.hbar = hbar
        k1, k2 = grid.kmesh()
        self.kinetic = (hbar**2 / (2.0 * m)) * (k1**2 + k2**2)
        x1, x2 = grid.mesh()
        self.v = np.asarray(eval_potential(pot, np.stack([x1, x2], axis=-1)))
        self.v0 = pot.v0

    def apply(self, values: np.ndarray) -> np.ndarray:
        out = sfft.ifft2(self.kinetic * sfft.fft2(values, workers=_FFT_WORKERS),
                         workers=_FFT_WORKERS)
        out += self.v * values
        return out

    def energy_bounds(self) -> tuple:
        """Analytic spectral bounds: kinetic grid cutoff plus potential extremes."""
        t_max = (self.hbar**2 * np.pi**2 / (2.0 * self.m)) \
            * (1.0 / self.grid.d1**2 + 1.0 / self.grid.d2**2)
        return min(0.0, self.v0), t_max + max(self.v0, 0.0)

    def mean_energy(self, field: ComplexField2D) -> float:
        h_psi = self.apply(field.values)
        num = np.real(np.vdot(field.values, h_psi)) * self.grid.cell
        den = np.real(np.vdot(field.values, field.values)) * self.grid.cell
        return float(num / den)


def apply_hamiltonian(pot: GaussianPotential, field: ComplexField2D,
                      m: float = 1.0, hbar: float = 1.0) -> ComplexField2D:
    """H psi with spectral kinetic part and pointwise potential."""
    op = HamiltonianOperator(pot, field.grid, m, hbar)
    return ComplexField2D(field.grid, op.apply(field.values))


@dataclass(frozen=True)
class ChebyshevPlan:
    """Expansion of exp(-i H dt / hbar) on the rescaled spectrum [-1, 1].

    coefficients[k] = (2 - delta_k0) (-i)^k J_k(delta_e * dt / hbar); the
    common phase from the spectrum center is kept separately.
    """

    e_min: float
    e_max: float
    delta_e: float
    n_terms: int
    coefficients: np.ndarray
    center_phase: complex
    dt: float

    @property
    def e_center(self) -> float:
        return 0.5 * (self.e_min + self.e_max)


def plan_chebyshev(pot: GaussianPotential, grid: GridSpec, dt: float, tol: float = 1e-12,
                   m: float = 1.0, hbar: float = 1.0) -> ChebyshevPlan:
    """Build the coefficient table for one step of length dt.

    Spectral bounds come from the grid cutoff (inflated by 5% on each side
    of the center) rather than an iterative eigenvalue estimate; for this
    Hamiltonian they are provably bounding.  The series is truncated at the
    first term with |J_k| < tol past the Bessel turning point, plus 10
    guard terms.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not (0.0 < tol <= 1e-6):
        raise ValueError(f"tol must be in (0, 1e-6], got {tol}")
    op = HamiltonianOperator(pot, grid, m, hbar)
    lo, hi = op.energy_bounds()
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo) * 1.05
    x = half * dt / hbar

    k_hi = int(x + 20.0 * max(x, 1.0) ** (1.0 / 3.0) + 80)
    ks = np.arange(k_hi)
    bessel = jv(ks, x)
    past_turn = np.nonzero((np.abs(bessel) < tol) & (ks > x))[0]
    if past_turn.size == 0:
        raise ChebyshevPlanningError(
            f"no Bessel coefficient below tol={tol:.1e} within {k_hi} terms")
    n_terms = int(past_turn[0]) + 10

    coeff = 2.0 * (-1j) ** ks[:n_terms] * bessel[:n_terms]
    coeff[0] = bessel[0]
    return ChebyshevPlan(e_min=center - half, e_max=center + half, delta_e=half,
                         n_terms=n_terms, coefficients=coeff,
                         center_phase=complex(np.exp(-1j * center * dt / hbar)), dt=dt)


def _chebyshev_step(values: np.ndarray, op: HamiltonianOperator,
                    plan: ChebyshevPlan) -> np.ndarray:
    """One expansion step via the T_{k+1} = 2 Hs T_k - T_{k-1} recurrence."""
    scale = 1.0 / plan.delta_e
    shift = plan.e_center
    ts = op.kinetic * scale
    vs = (op.v - shift) * scale

    def h_scaled(arr):
        out = sfft.ifft2(ts * sfft.fft2(arr, workers=_FFT_WORKERS), workers=_FFT_WORKERS)
        out += vs * arr
        return out

    phi_prev = values
    phi = h_scaled(values)
    acc = plan.coefficients[0] * phi_prev + plan.coefficients[1] * phi
    for k in range(2, plan.n_terms):
        phi_next = h_scaled(phi)
        phi_next *= 2.0
        phi_next -= phi_prev
        acc += plan.coefficients[k] * phi_next
        phi_prev, phi = phi, phi_next
    acc *= plan.center_phase
    return acc


@dataclass(frozen=True)
class Snapshot:
    t: float
    field: ComplexField2D


def _snapshot_times(t_final: float, snapshot_interval: float | None) -> np.ndarray:
    if snapshot_interval is None:
        return np.array([t_final])
    n = int(round(t_final / snapshot_interval))
    if abs(n * snapshot_interval - t_final) > 1e-12 * max(1.0, t_final):
        raise ValueError("snapshot_interval must divide t_final")
    return snapshot_interval * np.arange(1, n + 1)


def _guard_boundary(field: ComplexField2D, t: float):
    tail = field.edge_tail_mass(bands=2)
    if tail > _EDGE_GUARD:
        raise BoundaryContaminationError(
            f"edge tail mass {tail:.3e} > {_EDGE_GUARD:.0e} at t = {t:.6g}; "
            "the packet reached the grid boundary")


def propagate_chebyshev(pot: GaussianPotential, psi0: ComplexField2D, t_final: float,
                        dt: float | None = None, tol: float = 1e-12,
                        snapshot_interval: float | None = None,
                        m: float = 1.0, hbar: float = 1.0) -> list[Snapshot]:
    """Propagate psi0 to t_final, returning snapshots (t=0 included).

    dt defaults to one full step per snapshot interval (or a single step to
    t_final when no snapshots are requested); the expansion is step-size
    independent, so longer steps are simply cheaper.  dt must divide the
    snapshot interval.  Norm is conserved to the truncation tolerance and
    a boundary-contamination guard runs at every snapshot.
    """
    if t_final <= 0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    times = _snapshot_times(t_final, snapshot_interval)
    seg = times[0] if len(times) else t_final
    if dt is None:
        dt = seg
    n_sub = int(round(seg / dt))
    if n_sub < 1 or abs(n_sub * dt - seg) > 1e-12:
        raise ValueError("dt must divide the snapshot interval")

    op = HamiltonianOperator(pot, psi0.grid, m, hbar)
    plan = plan_chebyshev(pot, psi0.grid, dt, tol, m, hbar)
    _guard_boundary(psi0, 0.0)
    snaps = [Snapshot(0.0, psi0.copy())]
    values = psi0.values.copy()
    for t in times:
        for _ in range(n_sub):
            values = _chebyshev_step(values, op, plan)
        field = ComplexField2D(psi0.grid, values.copy())
        _guard_boundary(field, t)
        snaps.append(Snapshot(float(t), field))
    return snaps


def propagate_splitstep(pot: GaussianPotential, psi0: ComplexField2D, t_final: float,
                        dt: float, snapshot_interval: float | None = None,
                        m: float = 1.0, hbar: float = 1.0) -> list[Snapshot]:
    """Strang-split reference propagation with the same snapshot contract.

    Second-order accurate in dt; used as an independent cross-check of the
    expansion engine.  dt must divide the snapshot interval.  The potential
    half-steps of adjacent steps are merged inside each snapshot segment.
    """
    if t_final <= 0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    times = _snapshot_times(t_final, snapshot_interval)
    seg = times[0] if len(times) else t_final
    n_sub = int(round(seg / dt))
    if n_sub < 1 or abs(n_sub * dt - seg) > 1e-12:
        raise ValueError("dt must divide the snapshot interval")

    op = HamiltonianOperator(pot, psi0.grid, m, hbar)
    exp_v_half = np.exp(-0.5j * dt * op.v / hbar)
    exp_v_full = exp_v_half * exp_v_half
    exp_t = np.exp(-1j * dt * op.kinetic / hbar)

    _guard_boundary(psi0, 0.0)
    snaps = [Snapshot(0.0, psi0.copy())]
    values = psi0.values.copy()
    for t in times:
        values = values * exp_v_half
        for step in range(n_sub):
            values = sfft.ifft2(exp_t * sfft.fft2(values, workers=_FFT_WORKERS),
                                workers=_FFT_WORKERS)
            values *= exp_v_full if step < n_sub - 1 else exp_v_half
        field = ComplexField2D(psi0.grid, values.copy())
        _guard_boundary(field, t)
        snaps.append(Snapshot(float(t), field))
    return snaps


# -- snapshot export ---------------------------------------------------------
#
# Binary layout: little-endian float64 sequence
#   [n1, n2, x1_min, x1_max, x2_min, x2_max, Re psi_00, Im psi_00, ...]
# with values row-major, q1 fast.  A JSON sidecar carries the same metadata.

def write_snapshot(path, field: ComplexField2D, t: float | None = None):
    import json
    from pathlib import Path

    path = Path(path)
    g = field.grid
    header = np.array([g.n1, g.n2, g.x1_min, g.x1_max, g.x2_min, g.x2_max],
                      dtype="<f8")
    flat = field.values.astype(np.complex128).ravel()
    pairs = np.empty(2 * flat.size, dtype="<f8")
    pairs[0::2] = flat.real
    pairs[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(pairs.tobytes())
    sidecar = {"n1": g.n1, "n2": g.n2,
               "extents": [g.x1_min, g.x1_max, g.x2_min, g.x2_max],
               "layout": "row-major, q1 fast axis; little-endian float64 re/im pairs",
               "t": t}
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, indent=2))


def read_snapshot(path) -> ComplexField2D:
    raw = np.fromfile(path, dtype="<f8")
    n1, n2 = int(raw[0]), int(raw[1])
    grid = GridSpec(x1_min=raw[2], x1_max=raw[3], x2_min=raw[4], x2_max=raw[5],
                    n1=n1, n2=n2)
    pairs = raw[6:]
    values = (pairs[0::2] + 1j * pairs[1::2]).reshape(n2, n1)
    return ComplexField2D(grid, values)
