"""Adaptive one-dimensional quadrature.

The engine is a globally adaptive Gauss-Kronrod (7/15) scheme that works on
batches of panels at once, so integrands must accept and return numpy arrays.
On top of it sit two wrappers: algebraic endpoint singularities are removed by
a power substitution, and oscillatory integrands are pre-split into panels of
bounded phase change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ResourceError

EPS = np.finfo(float).eps
MAX_LAMBDA = 1e6

# Gauss-Kronrod 15-point nodes on [-1, 1] (abscissae of the 7-point Gauss rule
# are the odd-indexed entries).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_W = np.zeros(15)
GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    oscillation_panel_phase: float = math.pi / 2

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.oscillation_panel_phase > 0):
            raise DomainError("quadrature tolerances and panel phase must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")

    def tighter(self, factor: float) -> "QuadratureSpec":
        return replace(self, abs_tol=self.abs_tol / factor, rel_tol=self.rel_tol / factor)

    def target(self, value) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass
class QuadValue:
    value: complex | float
    error_estimate: float
    evaluations: int
    converged: bool

    def scaled(self, c) -> "QuadValue":
        return QuadValue(self.value * c, self.error_estimate * abs(c), self.evaluations, self.converged)


def _gk15(f, lo: np.ndarray, hi: np.ndarray):
    """Kronrod estimate and QUADPACK-style error per panel."""
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel())).reshape(x.shape)
    resk = fx @ KRONROD_W
    resg = fx @ GAUSS_W
    mean = 0.5 * resk
    resabs = np.abs(fx) @ KRONROD_W
    resasc = np.abs(fx - mean[:, None]) @ KRONROD_W
    ahalf = np.abs(half)
    err = np.abs(resk - resg) * ahalf
    resasc = resasc * ahalf
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    err = np.maximum(err, 50.0 * EPS * resabs * ahalf)
    if not np.all(np.isfinite(resk)):
        raise DomainError("integrand returned non-finite values")
    return resk * half, err


def _adaptive(parts: Sequence[tuple[Callable, np.ndarray]], spec: QuadratureSpec) -> QuadValue:
    """Globally adaptive GK15 over several (integrand, panel edges) parts."""
    los, his, owner = [], [], []
    for j, (_, edges) in enumerate(parts):
        edges = np.asarray(edges, dtype=float)
        los.append(edges[:-1])
        his.append(edges[1:])
        owner.append(np.full(len(edges) - 1, j))
    lo = np.concatenate(los)
    hi = np.concatenate(his)
    own = np.concatenate(owner)
    vals = np.zeros(lo.shape, dtype=complex)
    errs = np.zeros(lo.shape)
    frozen = np.zeros(lo.shape, dtype=bool)
    fresh = np.ones(lo.shape, dtype=bool)
    evaluations = 0
    subdivisions = 0
    is_complex = False

    while True:
        for j, (func, _) in enumerate(parts):
            sel = fresh & (own == j)
            if not sel.any():
                continue
            v, e = _gk15(func, lo[sel], hi[sel])
            is_complex = is_complex or np.iscomplexobj(v)
            vals[sel] = v
            errs[sel] = e
            evaluations += 15 * int(sel.sum())
        total = vals.sum()
        err_total = float(errs.sum())
        tol = spec.target(total)
        if err_total <= tol:
            converged = True
            break
        # Bisect the largest-error panels until the rest would fit in half the budget.
        width = np.abs(hi - lo)
        scale = np.maximum(np.abs(lo), np.abs(hi))
        frozen |= width <= 64.0 * EPS * np.maximum(scale, 1e-300)
        cand = np.flatnonzero(~frozen)
        if cand.size == 0 or subdivisions >= spec.max_subdivisions:
            converged = False
            break
        order = cand[np.argsort(errs[cand])[::-1]]
        excess = err_total - 0.5 * tol
        csum = np.cumsum(errs[order])
        n_pick = int(np.searchsorted(csum, excess) + 1)
        n_pick = min(n_pick, order.size, spec.max_subdivisions - subdivisions)
        pick = order[:n_pick]
        subdivisions += n_pick
        mid = 0.5 * (lo[pick] + hi[pick])
        keep = np.ones(lo.shape, dtype=bool)
        keep[pick] = False
        lo = np.concatenate([lo[keep], lo[pick], mid])
        hi = np.concatenate([hi[keep], mid, hi[pick]])
        own = np.concatenate([own[keep], own[pick], own[pick]])
        vals = np.concatenate([vals[keep], np.zeros(2 * n_pick, dtype=complex)])
        errs = np.concatenate([errs[keep], np.zeros(2 * n_pick)])
        frozen = np.concatenate([frozen[keep], np.zeros(2 * n_pick, dtype=bool)])
        fresh = np.concatenate([np.zeros(int(keep.sum()), dtype=bool), np.ones(2 * n_pick, dtype=bool)])

    total = vals.sum()
    value = complex(total) if is_complex else float(total.real)
    return QuadValue(value, float(errs.sum()), evaluations, converged)


def _check_interval(a, b):
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise DomainError(f"need finite a < b, got [{a}, {b}]")


def integrate_adaptive(f, a: float, b: float, spec: QuadratureSpec | None = None, *,
                       min_panels: int = 1, breakpoints=None) -> QuadValue:
    """Integrate a vectorized ``f`` over ``[a, b]``.

    Non-convergence is reported through ``converged=False`` with the best value.
    """
    spec = spec or QuadratureSpec()
    _check_interval(a, b)
    edges = np.linspace(a, b, max(1, int(min_panels)) + 1)
    if breakpoints is not None:
        extra = np.asarray([t for t in breakpoints if a < t < b], dtype=float)
        edges = np.unique(np.concatenate([edges, extra]))
    return _adaptive([(f, edges)], spec)


def _left_power_piece(f, a, length, alpha, n_panels, weighted, far_exponent=0.0, total=None):
    """Substitute ``t = a + u**k`` (``k = 1/(alpha+1)``) on ``[a, a+length]``.

    With ``weighted`` the factor ``(t-a)**alpha`` is applied analytically and
    ``(total - (t-a))**far_exponent`` is multiplied in; otherwise ``f`` is the
    full integrand.
    """
    k = 1.0 / (alpha + 1.0)
    umax = length ** (alpha + 1.0)
    if weighted:
        def g(u):
            d = u**k
            out = k * f(a + d)
            if far_exponent:
                out = out * (total - d) ** far_exponent
            return out
    else:
        def g(u):
            return k * u ** (k - 1.0) * f(a + u**k)
    return g, np.linspace(0.0, umax, n_panels + 1)


def _right_power_piece(f, b, length, beta, n_panels, weighted, far_exponent=0.0, total=None):
    k = 1.0 / (beta + 1.0)
    vmax = length ** (beta + 1.0)
    if weighted:
        def g(v):
            d = v**k
            out = k * f(b - d)
            if far_exponent:
                out = out * (total - d) ** far_exponent
            return out
    else:
        def g(v):
            return k * v ** (k - 1.0) * f(b - v**k)
    return g, np.linspace(0.0, vmax, n_panels + 1)


def _check_exponents(left, right):
    for e in (left, right):
        if not e > -1.0:
            raise DomainError(f"endpoint exponent {e} <= -1 makes the integral diverge")


def integrate_endpoint_singular(f, a: float, b: float, left_exponent: float, right_exponent: float,
                                spec: QuadratureSpec | None = None, *, min_panels: int = 1) -> QuadValue:
    """Integrate ``f(t) = g(t) (t-a)**left_exponent (b-t)**right_exponent``.

    ``f`` is the complete integrand.  Each half of the interval is mapped by
    ``t - a = u**(1/(alpha+1))`` (resp. the mirror image), which turns the
    algebraic endpoint factor into a bounded one.
    """
    spec = spec or QuadratureSpec()
    _check_interval(a, b)
    _check_exponents(left_exponent, right_exponent)
    half = 0.5 * (b - a)
    n = max(1, int(min_panels))
    parts = [
        _left_power_piece(f, a, half, left_exponent, n, weighted=False),
        _right_power_piece(f, b, half, right_exponent, n, weighted=False),
    ]
    return _adaptive(parts, spec)


def integrate_weighted(g, a: float, b: float, left_exponent: float, right_exponent: float,
                       spec: QuadratureSpec | None = None, *, min_panels: int = 1) -> QuadValue:
    """Integrate ``g(t) (t-a)**left_exponent (b-t)**right_exponent`` with the weight applied exactly.

    Same substitution as :func:`integrate_endpoint_singular`, but the algebraic
    factors never get evaluated near their singularities.
    """
    spec = spec or QuadratureSpec()
    _check_interval(a, b)
    _check_exponents(left_exponent, right_exponent)
    length = b - a
    half = 0.5 * length
    n = max(1, int(min_panels))
    parts = [
        _left_power_piece(g, a, half, left_exponent, n, True, right_exponent, length),
        _right_power_piece(g, b, half, right_exponent, n, True, left_exponent, length),
    ]
    return _adaptive(parts, spec)


def phase_partition(phase, lam: float, a: float, b: float, panel_phase: float) -> np.ndarray:
    """Edges splitting ``[a, b]`` into panels where ``lam * phase`` varies by at most ``panel_phase``."""
    target = 0.75 * panel_phase
    m = 256
    while True:
        x = np.linspace(a, b, m + 1)
        d = lam * np.abs(np.diff(phase(x)))
        if d.max(initial=0.0) <= panel_phase / 4 or m >= 2**22:
            break
        m *= 4
    cum = np.concatenate([[0.0], np.cumsum(d)])
    level = np.floor(cum / target)
    idx = np.flatnonzero(np.diff(level) > 0) + 1
    inner = x[idx[idx < m]]
    return np.unique(np.concatenate([[a], inner, [b]]))


def integrate_oscillatory(phase, amplitude, lam: float, a: float, b: float,
                          spec: QuadratureSpec | None = None, *,
                          left_exponent: float = 0.0, right_exponent: float = 0.0) -> QuadValue:
    """Integrate ``exp(1j*lam*phase(t)) * amplitude(t)`` over ``[a, b]``.

    The interval is cut so that every panel sees a phase change of at most
    ``spec.oscillation_panel_phase``; panels touching an endpoint with a
    nonzero exponent get the power substitution.  Returns a complex value.
    """
    spec = spec or QuadratureSpec()
    _check_interval(a, b)
    _check_exponents(left_exponent, right_exponent)
    lam = float(lam)
    if lam < 0:
        raise DomainError("lambda must be nonnegative")
    if lam > MAX_LAMBDA:
        raise ResourceError(f"lambda = {lam:g} exceeds the supported maximum {MAX_LAMBDA:g}")

    def integrand(t):
        return np.exp(1j * lam * phase(t)) * amplitude(t)

    if lam == 0.0:
        edges = np.array([a, b])
    else:
        edges = phase_partition(phase, lam, a, b, spec.oscillation_panel_phase)
    if len(edges) == 2 and (left_exponent or right_exponent):
        mid = 0.5 * (a + b)
        edges = np.array([a, mid, b])
    parts = []
    inner_lo, inner_hi = 0, len(edges) - 1
    if left_exponent:
        parts.append(_left_power_piece(integrand, a, edges[1] - a, left_exponent, 1, weighted=False))
        inner_lo = 1
    if right_exponent:
        parts.append(_right_power_piece(integrand, b, b - edges[-2], right_exponent, 1, weighted=False))
        inner_hi = len(edges) - 2
    if inner_hi > inner_lo:
        parts.append((integrand, edges[inner_lo:inner_hi + 1]))
    result = _adaptive(parts, spec)
    result.value = complex(result.value)
    return result
