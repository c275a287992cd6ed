"""Gaussian potential island and its closed-form geometric quantities.

The island is V(q) = V0 * exp(-q . A q) with A a symmetric positive-definite
2x2 matrix whose eigenvectors e1, e2 (orthonormal) and eigenvalues a1, a2
set the principal axes and inverse squared lengths l_i = 1/sqrt(a_i).

Everything a straight classical path needs from the island is available in
closed form: the quadratic gap A(q, q') = sqrt((q-q') . A (q-q')), the time
integral of V along the straight path from q' to q, and the determinant
identity that collapses the Gaussian prefactor of that integral.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

_UNIT_TOL = 1e-12


def _rot90(e1: np.ndarray) -> np.ndarray:
    """Counter-clockwise quarter turn; the derived second principal axis."""
    return np.array([-e1[1], e1[0]])


def build_matrix_a(e1, a1: float, a2: float) -> np.ndarray:
    """Assemble the symmetric 2x2 matrix with eigenpairs (a1, e1), (a2, e2).

    e2 is always the +90 degree rotation of e1, so orthonormality of the
    eigenbasis is automatic once |e1| = 1.
    """
    e1 = np.asarray(e1, dtype=float)
    if e1.shape != (2,):
        raise ValueError(f"e1 must be a 2-vector, got shape {e1.shape}")
    if a1 <= 0 or a2 <= 0:
        raise ValueError(f"inverse squared lengths must be positive, got a1={a1}, a2={a2}")
    if abs(np.linalg.norm(e1) - 1.0) > _UNIT_TOL:
        raise ValueError(f"e1 must be a unit vector, |e1| = {np.linalg.norm(e1)!r}")
    e2 = _rot90(e1)
    return a1 * np.outer(e1, e1) + a2 * np.outer(e2, e2)


@dataclass(frozen=True)
class GaussianPotential:
    """Gaussian island V(q) = v0 * exp(-q . A q) centered at the origin.

    v0 : peak energy (atomic units; may be negative for an attractive well)
    e1 : unit vector of the first principal axis (e2 derived by +90 rotation)
    a1, a2 : inverse squared lengths along e1, e2
    """

    v0: float
    e1: np.ndarray
    a1: float
    a2: float
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        e1 = np.asarray(self.e1, dtype=float)
        a = build_matrix_a(e1, self.a1, self.a2)  # validates e1, a1, a2
        e1 = e1 / np.linalg.norm(e1)
        e1.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "matrix", a)

    @property
    def e2(self) -> np.ndarray:
        return _rot90(self.e1)

    @property
    def l1(self) -> float:
        return 1.0 / np.sqrt(self.a1)

    @property
    def l2(self) -> float:
        return 1.0 / np.sqrt(self.a2)

    @property
    def det_a(self) -> float:
        return self.a1 * self.a2

    @classmethod
    def axis_aligned(cls, v0: float, l1: float, l2: float) -> "GaussianPotential":
        """Island with principal axes along the coordinate axes."""
        return cls(v0=v0, e1=np.array([1.0, 0.0]), a1=1.0 / l1**2, a2=1.0 / l2**2)

    def to_config(self) -> dict:
        return {"v0": self.v0, "e1": [float(self.e1[0]), float(self.e1[1])],
                "a1": self.a1, "a2": self.a2}

    @classmethod
    def from_config(cls, cfg: dict) -> "GaussianPotential":
        return cls(v0=float(cfg["v0"]), e1=np.asarray(cfg["e1"], dtype=float),
                   a1=float(cfg["a1"]), a2=float(cfg["a2"]))


def eval_potential(pot: GaussianPotential, q) -> np.ndarray | float:
    """V(q) for a point or an array of points with shape (..., 2)."""
    q = np.asarray(q, dtype=float)
    expo = np.einsum("...i,...i->...", q, q @ pot.matrix)
    return pot.v0 * np.exp(-expo)


def eval_gradient(pot: GaussianPotential, q) -> np.ndarray:
    """grad V(q) = -2 V(q) A q, shape (..., 2)."""
    q = np.asarray(q, dtype=float)
    aq = q @ pot.matrix
    expo = np.einsum("...i,...i->...", q, aq)
    return -2.0 * pot.v0 * np.exp(-expo)[..., None] * aq


def quadratic_gap(pot: GaussianPotential, q, qp) -> np.ndarray | float:
    """sqrt((q-q') . A (q-q')); zero iff q = q'."""
    d = np.asarray(q, dtype=float) - np.asarray(qp, dtype=float)
    return np.sqrt(np.einsum("...i,...i->...", d, d @ pot.matrix))


def vector_identity_sides(a_matrix: np.ndarray, q, qp) -> tuple:
    """Both sides of (q.Aq)(q'.Aq') - (q.Aq')^2 = |q x q'|^2 det A.

    Diagnostic only; the production line integral uses the right-hand side.
    """
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    aq = q @ a_matrix
    aqp = qp @ a_matrix
    lhs = (np.einsum("...i,...i->...", q, aq) * np.einsum("...i,...i->...", qp, aqp)
           - np.einsum("...i,...i->...", q, aqp) ** 2)
    cross = q[..., 0] * qp[..., 1] - q[..., 1] * qp[..., 0]
    rhs = cross**2 * np.linalg.det(a_matrix)
    return lhs, rhs


def straight_line_integral(pot: GaussianPotential, q, qp, t: float) -> np.ndarray | float:
    """Time integral of V along the straight path from q' (time 0) to q (time t).

    Closed form: prefactor sqrt(pi) V0 t / (2 gap), a Gaussian factor
    exp(-|q x q'|^2 det A / gap^2), and the bracket
    erf(q.A(q-q')/gap) - erf(q'.A(q-q')/gap), with gap = quadratic_gap.

    Below gap < 1e-8 (l1 + l2) the 0/0 form is replaced by its limit t V(q);
    prefactor and bracket vanish linearly together so the limit is smooth.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    q = np.asarray(q, dtype=float)
    qp = np.asarray(qp, dtype=float)
    d = q - qp
    ad = d @ pot.matrix
    gap = np.sqrt(np.einsum("...i,...i->...", d, ad))
    small = gap < 1e-8 * (pot.l1 + pot.l2)
    gap_safe = np.where(small, 1.0, gap)

    cross = q[..., 0] * qp[..., 1] - q[..., 1] * qp[..., 0]
    gauss = np.exp(-(cross**2) * pot.det_a / gap_safe**2)
    b1 = np.einsum("...i,...i->...", q, ad) / gap_safe
    b2 = np.einsum("...i,...i->...", qp, ad) / gap_safe
    # erf(b1) - erf(b2) via erfc so the bracket keeps full accuracy when the
    # path misses the island and both arguments sit deep in the same tail;
    # the branch choice preserves exact symmetry under q <-> q' (b1 >= b2).
    bracket = np.where(b1 + b2 >= 0, erfc(b2) - erfc(b1), erfc(-b1) - erfc(-b2))
    closed = np.sqrt(np.pi) * pot.v0 * t / (2.0 * gap_safe) * gauss * bracket

    degenerate = t * eval_potential(pot, q)
    out = np.where(small, degenerate, closed)
    return out if out.ndim else float(out)
