"""Least-squares power-law fits on log-log data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class DecayFit:
    """``log y = intercept + slope * log x`` fitted by ordinary least squares."""

    slope: float
    intercept: float
    residual_se: float
    rho_range: tuple[float, float]
    n_points: int
    sup_mode: bool = False

    def predict(self, x):
        return math.exp(self.intercept) * np.asarray(x, dtype=float) ** self.slope

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "residual_se": self.residual_se,
            "rho_range": list(self.rho_range),
            "n_points": self.n_points,
            "sup_mode": self.sup_mode,
        }


def geometric_grid(lo: float, hi: float, n: int) -> np.ndarray:
    if not (0 < lo < hi) or n < 2:
        raise DomainError("geometric grid needs 0 < lo < hi and n >= 2")
    return np.geomspace(lo, hi, n)


def fit_power_law(x, y, *, sup_mode: bool = False, min_points: int = 8,
                  min_decades: float = 1.5) -> DecayFit:
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("x and y must be 1-d arrays of equal length")
    if x.size < min_points:
        raise DomainError(f"need at least {min_points} points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("power-law fit needs positive data")
    lx, ly = np.log(x), np.log(y)
    if (lx.max() - lx.min()) / math.log(10.0) < min_decades - 1e-12:
        raise DomainError(f"fit range spans fewer than {min_decades} decades")
    design = np.column_stack([np.ones_like(lx), lx])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ coef
    dof = max(x.size - 2, 1)
    se = math.sqrt(float(resid @ resid) / dof)
    return DecayFit(float(coef[1]), float(coef[0]), se,
                    (float(x.min()), float(x.max())), int(x.size), sup_mode)
