"""Uniform periodic grids and complex fields sampled on them.

Fields are stored row-major with q1 as the fast axis: values[i2, i1]
corresponds to (axis1[i1], axis2[i2]).  Grid points follow the FFT
convention x_i = x_min + i*d (the right endpoint is excluded).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridConfigError


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    x1_min: float
    x1_max: float
    x2_min: float
    x2_max: float
    n1: int
    n2: int

    def __post_init__(self):
        if self.x1_max <= self.x1_min or self.x2_max <= self.x2_min:
            raise GridConfigError("grid extents must have positive width")
        for n in (self.n1, self.n2):
            if not _is_pow2(n) or n < 64:
                raise GridConfigError(f"point counts must be powers of two >= 64, got {n}")

    @property
    def d1(self) -> float:
        return (self.x1_max - self.x1_min) / self.n1

    @property
    def d2(self) -> float:
        return (self.x2_max - self.x2_min) / self.n2

    @property
    def cell(self) -> float:
        return self.d1 * self.d2

    def axis1(self) -> np.ndarray:
        return self.x1_min + self.d1 * np.arange(self.n1)

    def axis2(self) -> np.ndarray:
        return self.x2_min + self.d2 * np.arange(self.n2)

    def mesh(self) -> tuple:
        """(X1, X2) arrays of shape (n2, n1)."""
        return np.meshgrid(self.axis1(), self.axis2())

    def k1(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n1, self.d1)

    def k2(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n2, self.d2)

    def kmesh(self) -> tuple:
        """(K1, K2) arrays of shape (n2, n1)."""
        return np.meshgrid(self.k1(), self.k2())

    @property
    def k1_max(self) -> float:
        return np.pi / self.d1

    @property
    def k2_max(self) -> float:
        return np.pi / self.d2

    def to_config(self) -> dict:
        return {"extents": [self.x1_min, self.x1_max, self.x2_min, self.x2_max],
                "n1": self.n1, "n2": self.n2}

    @classmethod
    def from_config(cls, cfg: dict) -> "GridSpec":
        e = cfg["extents"]
        return cls(x1_min=float(e[0]), x1_max=float(e[1]), x2_min=float(e[2]),
                   x2_max=float(e[3]), n1=int(cfg["n1"]), n2=int(cfg["n2"]))


@dataclass
class ComplexField2D:
    """Complex amplitude sampled on a GridSpec; values shape (n2, n1)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        expected = (self.grid.n2, self.grid.n1)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != grid shape {expected}")
        if self.values.dtype != np.complex128:
            self.values = self.values.astype(np.complex128)

    def norm(self) -> float:
        """Discrete L2 norm sqrt(sum |psi|^2 d1 d2)."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell))

    def normalized(self) -> "ComplexField2D":
        return ComplexField2D(self.grid, self.values / self.norm())

    def copy(self) -> "ComplexField2D":
        return ComplexField2D(self.grid, self.values.copy())

    def edge_tail_mass(self, bands: int = 2) -> float:
        """Fraction of |psi|^2 mass in the outermost grid rows and columns."""
        w = np.abs(self.values) ** 2
        total = w.sum()
        if total <= 0:
            return 0.0
        edge = w[:bands, :].sum() + w[-bands:, :].sum()
        inner = w[bands:-bands, :]
        edge += inner[:, :bands].sum() + inner[:, -bands:].sum()
        return float(edge / total)
