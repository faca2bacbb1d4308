"""Decay scans of the order-zero function over radius and angle grids.

Each scan point is evaluated by the quarter-period form, which also yields the
modulus ``|H|`` of the half-sum ``H = c (I_{f,+} + I_{g,+})`` whose real part is
``J_0``.  ``|H| >= |J_0|`` and, unlike ``|J_0|``, it has no oscillation zeros,
so decay slopes are fitted to ``sup |H|``.  Boundedness ratios are reported
for ``|J_0|`` itself; their trend is fitted on the envelope.  Every point is cross-checked against the direct integral first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import pmap
from .errors import ConsistencyError, ConvergenceError, DomainError
from .fitting import DecayFit, fit_power_law
from .gbessel import j0_direct, oscillatory_parts, oscillatory_prefactor
from .pnorm import PExponent, cartesian_to_polar, eta_from_polar
from .quadrature import QuadratureSpec

HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi
CSV_COLUMNS = ("p", "rho", "phi", "value", "representation", "error_estimate")
NEAR_AXIS_OFFSETS = (1e-3, 1e-2, 1e-1)


@dataclass(frozen=True)
class ScanGrid:
    rho_values: tuple[float, ...]
    phi_values: tuple[float, ...]
    per_point_tolerance: float = 1e-8

    def __post_init__(self):
        rho = tuple(float(r) for r in self.rho_values)
        phi = tuple(float(f) % TWO_PI for f in self.phi_values)
        if not phi:
            raise DomainError("phi_values must be nonempty")
        if any(r <= 0 for r in rho) or any(b <= a for a, b in zip(rho, rho[1:])):
            raise DomainError("rho_values must be positive and strictly increasing")
        object.__setattr__(self, "rho_values", rho)
        object.__setattr__(self, "phi_values", phi)


@dataclass(frozen=True)
class ScanPoint:
    p: str
    rho: float
    phi: float
    value: float
    envelope: float
    error_estimate: float
    representation: str = "oscillatory"

    def csv_row(self) -> list:
        return [self.p, self.rho, self.phi, self.value, self.representation, self.error_estimate]


@dataclass
class DecayScan:
    fit: DecayFit
    raw_fit: DecayFit | None
    sup_values: list[float]
    sup_envelope: list[float]
    expected_slope: float
    boundedness_ratio: float
    ratio_trend: float
    envelope_ratio: float
    raw_ratio_trend: float
    points: list[ScanPoint] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "fit": self.fit.as_dict(),
            "raw_fit": None if self.raw_fit is None else self.raw_fit.as_dict(),
            "sup_values": self.sup_values,
            "sup_envelope": self.sup_envelope,
            "expected_slope": self.expected_slope,
            "boundedness_ratio": self.boundedness_ratio,
            "ratio_trend": self.ratio_trend,
            "envelope_ratio": self.envelope_ratio,
            "raw_ratio_trend": self.raw_ratio_trend,
        }


def rho_grid(lo: float = 20.0, hi: float = 2000.0, n: int = 16) -> tuple[float, ...]:
    return tuple(np.geomspace(lo, hi, n).tolist())


def uniform_phi_grid(p, per_quadrant: int = 64, offsets=NEAR_AXIS_OFFSETS) -> tuple[float, ...]:
    """``per_quadrant`` equispaced angles per quadrant plus near-axis directions.

    A near-axis direction with offset ``d`` points along ``(d, 1)`` or
    ``(1, d)`` (and sign flips) in the plane.
    """
    pe = PExponent.of(p)
    phis = {round(k * HALF_PI / per_quadrant, 15) % TWO_PI for k in range(4 * per_quadrant)}
    for d in offsets:
        for v in ((d, 1.0), (1.0, d)):
            for s1 in (1.0, -1.0):
                for s2 in (1.0, -1.0):
                    phis.add(cartesian_to_polar((s1 * v[0], s2 * v[1]), pe).phi)
    return tuple(sorted(phis))


def _axis_distance(phi: float) -> float:
    r = phi % HALF_PI
    return min(r, HALF_PI - r)


def _evaluate(pe: PExponent, rho: float, phi: float, spec: QuadratureSpec, tol: float):
    eta = eta_from_polar(pe, rho, phi)
    # |J_0| and |H| are even in each coordinate
    canon = (abs(eta[0]), abs(eta[1]))
    parts = oscillatory_parts(pe, canon, spec)
    c = 2.0 * oscillatory_prefactor(pe)
    h = c * (parts["f+"].value + parts["g+"].value)
    err = c * (parts["f+"].error_estimate + parts["g+"].error_estimate)
    if not all(r.converged for r in parts.values()):
        raise ConvergenceError(f"oscillatory quadrature failed at rho={rho}, phi={phi}")
    direct = j0_direct(pe, canon, spec)
    if abs(direct - h.real) > tol:
        raise ConsistencyError(f"representations disagree at rho={rho}, phi={phi}: "
                               f"{direct!r} vs {h.real!r}")
    return ScanPoint(pe.label, rho, phi, float(h.real), float(abs(h)), float(err))


def _scan(pe: PExponent, grid: ScanGrid, spec: QuadratureSpec) -> list[list[ScanPoint]]:
    cache: dict = {}
    keys = []
    for rho in grid.rho_values:
        row = []
        for phi in grid.phi_values:
            eta = eta_from_polar(pe, rho, phi)
            key = (rho, abs(eta[0]), abs(eta[1]))
            row.append(key)
            cache.setdefault(key, phi)
        keys.append(row)
    todo = list(cache.items())

    def work(item):
        (rho, _, _), phi = item
        return _evaluate(pe, rho, phi, spec, grid.per_point_tolerance)

    try:
        done = dict(zip([k for k, _ in todo], pmap(work, todo)))
    except ConvergenceError as exc:
        exc.partial = [k for k, _ in todo]
        raise
    out = []
    for row, rho in zip(keys, grid.rho_values):
        pts = []
        for key, phi in zip(row, grid.phi_values):
            base = done[key]
            pts.append(ScanPoint(base.p, rho, phi, base.value, base.envelope, base.error_estimate))
        out.append(pts)
    return out


def _summarize(rows: list[list[ScanPoint]], grid: ScanGrid, expected_q: float, sup_mode: bool) -> DecayScan:
    rho = np.asarray(grid.rho_values)
    sup_raw = np.array([max(abs(pt.value) for pt in row) for row in rows])
    sup_env = np.array([max(pt.envelope for pt in row) for row in rows])
    fit = fit_power_law(rho, sup_env, sup_mode=sup_mode)
    raw_fit = fit_power_law(rho, sup_raw, sup_mode=sup_mode) if np.all(sup_raw > 0) else None
    ratio = sup_raw * rho**expected_q
    env_ratio = sup_env * rho**expected_q
    # trend of the upper envelope; the raw ratio is dominated by it
    trend = fit_power_law(rho, env_ratio).slope
    raw_trend = fit_power_law(rho, ratio).slope if np.all(ratio > 0) else float("nan")
    return DecayScan(fit, raw_fit, sup_raw.tolist(), sup_env.tolist(), -expected_q,
                     float(ratio.max()), float(trend), float(env_ratio.max()), float(raw_trend),
                     [pt for row in rows for pt in row])


def decay_scan_compact(p, phi_set, grid: ScanGrid | None = None, *, margin: float = 0.05,
                       spec: QuadratureSpec | None = None) -> DecayScan:
    """Decay of ``sup_phi |J_0|`` over an angle set kept away from the axes."""
    pe = PExponent.of(p)
    if not (0.0 < pe.p < 1.0 or pe.p == 2.0):
        raise DomainError("compact-set scans need 0 < p < 1 or p = 2")
    if margin < 0.05:
        raise DomainError("margin must be at least 0.05")
    phi_set = tuple(phi_set)
    if any(_axis_distance(f) < margin for f in phi_set):
        raise DomainError(f"every angle must stay {margin} away from the axes")
    grid = ScanGrid(grid.rho_values if grid else rho_grid(), phi_set,
                    grid.per_point_tolerance if grid else 1e-8)
    rows = _scan(pe, grid, spec or QuadratureSpec())
    return _summarize(rows, grid, 0.5, sup_mode=len(phi_set) > 1)


def uniform_exponent(p) -> float:
    pe = PExponent.of(p)
    if pe.p == 2.0:
        return 0.5
    if pe.two_over_p_is_integer and pe.n >= 3:
        return pe.p / 2.0
    raise DomainError("uniform scans need p = 2 or 2/p an integer of at least 3")


def decay_scan_uniform(p, grid: ScanGrid | None = None, *,
                       spec: QuadratureSpec | None = None) -> DecayScan:
    """Decay of ``sup_phi |J_0|`` over all directions, axes included."""
    pe = PExponent.of(p)
    q = uniform_exponent(pe)
    if grid is None:
        grid = ScanGrid(rho_grid(), uniform_phi_grid(pe))
    axis_hits = [min(abs(f - a) for f in grid.phi_values) < 1e-12 for a in (0.0, HALF_PI, math.pi, 1.5 * math.pi)]
    if not all(axis_hits):
        raise DomainError("uniform grid must contain all four axis directions")
    near = []
    for f in grid.phi_values:
        v = eta_from_polar(pe, 1.0, f)
        lo, hi = sorted((abs(v[0]), abs(v[1])))
        if lo > 0:
            near.append(lo / hi)
    if not near or min(near) > 1e-3 * (1 + 1e-9):
        raise DomainError("uniform grid must include near-axis directions down to offset 1e-3")
    rows = _scan(pe, grid, spec or QuadratureSpec())
    return _summarize(rows, grid, q, sup_mode=True)


def on_axis_slice(p, rho_values=None, *, spec: QuadratureSpec | None = None) -> DecayFit:
    """Fit of ``|J_0|`` along the positive second axis (exploratory tightness probe)."""
    pe = PExponent.of(p)
    grid = ScanGrid(rho_values or rho_grid(), (HALF_PI,))
    rows = _scan(pe, grid, spec or QuadratureSpec())
    vals = np.array([abs(row[0].value) for row in rows])
    return fit_power_law(grid.rho_values, vals)


@dataclass(frozen=True)
class HankelReport:
    max_scaled_deviation: float
    rho_values: list[float]
    scaled_deviation: list[float]
    trend_slope: float

    def as_dict(self) -> dict:
        return {
            "max_scaled_deviation": self.max_scaled_deviation,
            "rho_values": self.rho_values,
            "scaled_deviation": self.scaled_deviation,
            "trend_slope": self.trend_slope,
        }


def hankel_deviation(rho: float, spec: QuadratureSpec | None = None) -> float:
    """``|J_0^[2]((rho, 0)) - sqrt(2/(pi rho)) cos(rho - pi/4)| * rho``."""
    if rho < 10:
        raise DomainError("Hankel comparison needs rho >= 10")
    j = j0_direct("2", (rho, 0.0), spec)
    return abs(j - math.sqrt(2.0 / (math.pi * rho)) * math.cos(rho - 0.25 * math.pi)) * rho


def hankel_envelope_check(rho_grid_values, *, window_samples: int = 24,
                          spec: QuadratureSpec | None = None) -> HankelReport:
    """Scaled Hankel remainder over the grid.

    Each grid value reports the sup of the scaled deviation over the window
    ``[rho, rho + 2 pi]`` so that the trend is not masked by zeros of the
    remainder; the window sup also bounds the pointwise value.
    """
    rhos = sorted(float(r) for r in rho_grid_values)
    if not rhos or rhos[0] < 10:
        raise DomainError("Hankel comparison needs rho >= 10")

    def work(r):
        pts = r + np.linspace(0.0, TWO_PI, window_samples, endpoint=False)
        return max(hankel_deviation(float(t), spec) for t in pts)

    dev = pmap(work, rhos)
    trend = float("nan")
    if len(rhos) >= 2:
        trend = float(np.polyfit(np.log(rhos), np.log(dev), 1)[0])
    return HankelReport(float(max(dev)), rhos, [float(d) for d in dev], trend)
