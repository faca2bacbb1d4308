"""Generalized Bessel functions ``J_omega^[p]`` of the p-circle problem.

Order zero is available in three forms that must agree:

* ``j0_direct``       the defining Beta-type integral over ``t`` in [0, 1];
* ``j0_oscillatory``  four oscillatory integrals over a quarter period;
* ``j0_odd``          one integral over a full period (odd ``2/p`` only).

Positive orders come from the radial integral of order zero (``j_omega``),
from the power series (``j_omega_series``) and from a kernel form that swaps
the two integrations (``j_omega_kernel``), which is the fast path used for
lattice sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import roots_jacobi, roots_legendre

from .errors import ConsistencyError, ConvergenceError, DomainError, TruncationError
from .pnorm import PExponent, Vec2, gamma_fn, p_norm
from .quadrature import (
    QuadratureSpec,
    QuadValue,
    integrate_adaptive,
    integrate_endpoint_singular,
    integrate_oscillatory,
    integrate_weighted,
    phase_partition,
)

HALF_PI = 0.5 * math.pi
IMAG_RESIDUE_TOL = 1e-8
BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class BesselOrder:
    omega: float

    def __post_init__(self):
        if not (self.omega >= 0 and math.isfinite(self.omega)):
            raise DomainError(f"order must be a finite nonnegative number, got {self.omega!r}")


@dataclass(frozen=True)
class SeriesSpec:
    max_k: int = 200
    term_tol: float = 1e-14

    def __post_init__(self):
        if self.max_k < 1 or not self.term_tol > 0:
            raise DomainError("max_k and term_tol must be positive")


def _omega(omega) -> float:
    return omega.omega if isinstance(omega, BesselOrder) else BesselOrder(float(omega)).omega


def _eta(eta) -> tuple[float, float]:
    e1, e2 = float(eta[0]), float(eta[1])
    if not (math.isfinite(e1) and math.isfinite(e2)):
        raise DomainError("eta must be finite")
    return e1, e2


def _finish(res: QuadValue, what: str) -> QuadValue:
    if not res.converged:
        raise ConvergenceError(f"{what}: quadrature did not converge "
                               f"(estimate {res.error_estimate:.3g})", partial=res)
    return res


def _check_bound(pe: PExponent, res: QuadValue, what: str):
    bound = pe.bound_j0
    if abs(res.value) > bound * (1 + BOUND_SLACK) + res.error_estimate:
        raise ConsistencyError(f"{what}: |J_0| = {abs(res.value):.17g} exceeds the bound {bound:.17g}")


def _out(res: QuadValue, full_output: bool):
    return res if full_output else res.value


# ---------------------------------------------------------------------------
# order zero


def j0_direct(p, eta, spec: QuadratureSpec | None = None, *, full_output: bool = False):
    """Order-zero function from its defining integral over ``t`` in [0, 1]."""
    pe = PExponent.of(p)
    spec = spec or QuadratureSpec()
    e1, e2 = _eta(eta)
    inv_p = 1.0 / pe.p

    def g(t):
        return np.cos(e1 * t**inv_p) * np.cos(e2 * np.clip(1.0 - t, 0.0, None) ** inv_p)

    alpha = inv_p - 1.0
    panels = 1 + int((abs(e1) + abs(e2)) / 3.0)
    res = integrate_weighted(g, 0.0, 1.0, alpha, alpha, spec, min_panels=panels)
    res = _finish(res, "j0_direct").scaled(pe.bessel_scale)
    res.value = float(np.real(res.value))
    _check_bound(pe, res, "j0_direct")
    return _out(res, full_output)


def psi(pe: PExponent):
    """Amplitude ``(cos t sin t)**(2/p - 1)`` on the quarter period."""
    e = pe.two_over_p - 1.0

    def amp(t):
        return (np.clip(np.cos(t), 0.0, None) * np.clip(np.sin(t), 0.0, None)) ** e
    return amp


def _quarter_phases(pe: PExponent, e1: float, e2: float):
    n = pe.two_over_p

    def f(t):
        return e1 * np.clip(np.cos(t), 0.0, None) ** n + e2 * np.clip(np.sin(t), 0.0, None) ** n

    def g(t):
        return e1 * np.clip(np.sin(t), 0.0, None) ** n - e2 * np.clip(np.cos(t), 0.0, None) ** n
    return f, g


def _require_oscillatory_p(pe: PExponent):
    if not pe.p < 4.0:
        raise DomainError(f"oscillatory representations need p < 4, got p = {pe.p}")


def oscillatory_parts(p, eta, spec: QuadratureSpec | None = None) -> dict[str, QuadValue]:
    """The four quarter-period integrals ``I_{f,+}, I_{f,-}, I_{g,+}, I_{g,-}`` (unscaled)."""
    pe = PExponent.of(p)
    _require_oscillatory_p(pe)
    spec = spec or QuadratureSpec()
    e1, e2 = _eta(eta)
    lam = p_norm((e1, e2), pe)
    f, g = _quarter_phases(pe, e1, e2)
    scale = lam if lam > 0 else 1.0
    amp = psi(pe)
    sing = min(0.0, pe.two_over_p - 1.0)
    out = {}
    for name, h in (("f", f), ("g", g)):
        for sign, key in ((1.0, "+"), (-1.0, "-")):
            def phase(t, h=h, sign=sign):
                return sign * h(t) / scale
            out[name + key] = integrate_oscillatory(phase, amp, lam, 0.0, HALF_PI, spec,
                                                    left_exponent=sing, right_exponent=sing)
    return out


def oscillatory_prefactor(pe: PExponent) -> float:
    return 2.0 / (pe.p * pe.gamma_1p) ** 2


def j0_oscillatory(p, eta, spec: QuadratureSpec | None = None, *, full_output: bool = False):
    """Order-zero function as the sum of four quarter-period oscillatory integrals."""
    pe = PExponent.of(p)
    spec = spec or QuadratureSpec()
    parts = oscillatory_parts(pe, eta, spec.tighter(4.0))
    total = sum(r.value for r in parts.values())
    err = sum(r.error_estimate for r in parts.values())
    res = QuadValue(total, err, sum(r.evaluations for r in parts.values()),
                    all(r.converged for r in parts.values()))
    res = _finish(res, "j0_oscillatory").scaled(oscillatory_prefactor(pe))
    if abs(res.value.imag) > IMAG_RESIDUE_TOL:
        raise ConsistencyError(f"j0_oscillatory: imaginary residue {res.value.imag:.3g}")
    res.value = float(res.value.real)
    _check_bound(pe, res, "j0_oscillatory")
    return _out(res, full_output)


def j0_odd(p, eta, spec: QuadratureSpec | None = None, *, full_output: bool = False):
    """Order-zero function as one full-period integral; needs ``2/p`` odd."""
    pe = PExponent.of(p)
    if not pe.two_over_p_is_odd_integer:
        raise DomainError(f"j0_odd needs 2/p to be an odd integer, got 2/p = {pe.two_over_p}")
    spec = spec or QuadratureSpec()
    n = pe.n
    e1, e2 = _eta(eta)
    lam = p_norm((e1, e2), pe)
    scale = lam if lam > 0 else 1.0

    def phase(t):
        return (e1 * np.sin(t) ** n + e2 * np.cos(t) ** n) / scale

    def amp(t):
        return (np.cos(t) * np.sin(t)) ** (n - 1)

    res = integrate_oscillatory(phase, amp, lam, 0.0, 2.0 * math.pi, spec)
    res = _finish(res, "j0_odd").scaled(oscillatory_prefactor(pe))
    if abs(res.value.imag) > IMAG_RESIDUE_TOL:
        raise ConsistencyError(f"j0_odd: imaginary residue {res.value.imag:.3g}")
    res.value = float(res.value.real)
    _check_bound(pe, res, "j0_odd")
    return _out(res, full_output)


REPRESENTATIONS = {
    "direct": j0_direct,
    "oscillatory": j0_oscillatory,
    "odd": j0_odd,
}


def j0(p, eta, rep: str = "direct", spec: QuadratureSpec | None = None, *, full_output: bool = False):
    try:
        fn = REPRESENTATIONS[rep]
    except KeyError:
        raise DomainError(f"unknown representation {rep!r}; choose from {sorted(REPRESENTATIONS)}") from None
    return fn(p, eta, spec, full_output=full_output)


# ---------------------------------------------------------------------------
# positive order


def j_ratio_at_origin(p, omega) -> float:
    """Limit of ``J_omega^[p](x) / |x|_p**omega`` as ``x -> 0``."""
    pe = PExponent.of(p)
    w = _omega(omega)
    return pe.two_over_p**2 / (pe.p**w * gamma_fn(w + pe.two_over_p))


def _omega_prefactor(pe: PExponent, w: float, norm: float) -> float:
    return norm**w / (pe.p ** (w - 1.0) * gamma_fn(w))


def j_omega(p, omega, eta, spec: QuadratureSpec | None = None, *, full_output: bool = False):
    """Positive-order function by nested quadrature over the radial variable.

    The inner order-zero values come from :func:`j0_direct` at a tolerance
    100 times tighter than the outer one.
    """
    pe = PExponent.of(p)
    w = _omega(omega)
    if not w > 0:
        raise DomainError("j_omega needs omega > 0; use j0_* for order zero")
    spec = spec or QuadratureSpec()
    inner = spec.tighter(100.0)
    e1, e2 = _eta(eta)
    norm = p_norm((e1, e2), pe)
    if norm == 0.0:
        res = QuadValue(0.0, 0.0, 0, True)
        return _out(res, full_output)
    inner_err = [0.0]

    def f(tau):
        out = np.empty_like(tau)
        for i, t in enumerate(tau):
            r = j0_direct(pe, (t * e1, t * e2), inner, full_output=True)
            inner_err[0] = max(inner_err[0], r.error_estimate)
            out[i] = r.value
        return out * tau * np.clip(1.0 - tau**pe.p, 0.0, None) ** (w - 1.0)

    panels = 1 + int(max(abs(e1), abs(e2)) / 2.0)
    if w < 1.0:
        res = integrate_endpoint_singular(f, 0.0, 1.0, 0.0, w - 1.0, spec, min_panels=panels)
    else:
        res = integrate_adaptive(f, 0.0, 1.0, spec, min_panels=panels)
    res = _finish(res, "j_omega")
    res.error_estimate += inner_err[0]
    res = res.scaled(_omega_prefactor(pe, w, norm))
    res.value = float(np.real(res.value))
    return _out(res, full_output)


def j_omega_series(p, omega, x, spec: SeriesSpec | None = None):
    """Power series in ``x``, summed block by block in total degree ``k``.

    Raises :class:`TruncationError` (carrying the last partial sum) when the
    blocks have not died out by ``max_k`` or when cancellation between blocks
    has destroyed the precision of the sum.
    """
    pe = PExponent.of(p)
    w = _omega(omega)
    spec = spec or SeriesSpec()
    x1, x2 = _eta(x)
    inv_p = 1.0 / pe.p
    lx1 = math.log(abs(x1)) if x1 else None
    lx2 = math.log(abs(x2)) if x2 else None
    total = 0.0
    biggest = 0.0
    quiet = 0
    for k in range(spec.max_k + 1):
        m1 = np.arange(k + 1)
        m2 = k - m1
        keep = np.ones(k + 1, dtype=bool)
        if lx1 is None:
            keep &= m1 == 0
        if lx2 is None:
            keep &= m2 == 0
        m1, m2 = m1[keep], m2[keep]
        if m1.size == 0:
            block = 0.0
        else:
            logs = (np.array([math.lgamma((2 * a + 1) * inv_p) + math.lgamma((2 * b + 1) * inv_p)
                              - math.lgamma(2 * a + 1) - math.lgamma(2 * b + 1)
                              for a, b in zip(m1, m2)])
                    - math.lgamma(2 * (k + 1) * inv_p + w))
            if lx1 is not None:
                logs = logs + 2 * m1 * lx1
            if lx2 is not None:
                logs = logs + 2 * m2 * lx2
            block = (-1) ** k * float(np.exp(logs).sum())
        total += block
        biggest = max(biggest, abs(block))
        if k > 0 and abs(block) <= spec.term_tol * max(abs(total), 1e-300):
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
    else:
        raise TruncationError(f"series blocks still above term_tol at k = {spec.max_k}", partial=total)
    if biggest * 1e-16 > 1e-9 * abs(total):
        raise TruncationError(f"cancellation: largest block {biggest:.3g} vs sum {total:.3g}", partial=total)
    norm = p_norm((x1, x2), pe)
    return 4.0 / (pe.p ** (w + 2.0) * pe.gamma_1p**2) * total * norm**w


# ---------------------------------------------------------------------------
# kernel form for fast positive-order evaluation


def _kernel_nodes(pe: PExponent, w: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``tau`` and weights for ``int_0^1 h(tau) tau (1 - tau**p)**(w-1) dtau``."""
    if pe.two_over_p_is_integer:
        # v = tau**p: the weight v**(2/p-1) (1-v)**(w-1) is exact for Jacobi and
        # cos(a v**(1/p)) is a power series in v**(2/p), hence smooth
        x, wt = roots_jacobi(n, w - 1.0, pe.two_over_p - 1.0)
        v = 0.5 * (1.0 + x)
        wt = wt * 2.0 ** (-(w - 1.0) - (pe.two_over_p - 1.0) - 1.0) / pe.p
        return v ** (1.0 / pe.p), wt
    # [1/2, 1]: Jacobi weight for (1 - tau)**(w-1), smooth remainder
    x, wt = roots_jacobi(n, w - 1.0, 0.0)
    one_minus = 0.25 * (1.0 - x)
    tau_r = 1.0 - one_minus
    ratio = -np.expm1(pe.p * np.log(tau_r)) / one_minus
    wt_r = wt * 0.25**w * tau_r * ratio ** (w - 1.0)
    # [0, 1/2]: tau = u**4 / 2 smooths the tau**p terms at the origin
    u, wu = roots_legendre(n)
    u = 0.5 * (1.0 + u)
    tau_l = 0.5 * u**4
    wt_l = 0.5 * wu * 2.0 * u**3 * tau_l * (-np.expm1(pe.p * np.log(tau_l))) ** (w - 1.0)
    return np.concatenate([tau_l, tau_r]), np.concatenate([wt_l, wt_r])


def radial_kernel_exact(p, omega, a, n: int | None = None) -> np.ndarray:
    """``K(a) = int_0^1 cos(a tau) tau (1 - tau**p)**(omega-1) dtau`` by Gaussian rules."""
    pe = PExponent.of(p)
    w = _omega(omega)
    a = np.atleast_1d(np.abs(np.asarray(a, dtype=float)))
    amax = float(a.max(initial=0.0))
    if n is None:
        n = 40 + int(math.ceil(0.8 * amax / min(pe.p, 1.0)))
    tau, wt = _kernel_nodes(pe, w, n)
    out = np.empty_like(a)
    step = max(1, 2_000_000 // tau.size)
    for i in range(0, a.size, step):
        out[i:i + step] = np.cos(np.outer(a[i:i + step], tau)) @ wt
    return out


@dataclass(frozen=True)
class _KernelTable:
    spline: CubicSpline
    amax: float
    error: float


KERNEL_STEP = 0.01


@lru_cache(maxsize=32)
def _kernel_table(p: float, omega: float, amax: float) -> _KernelTable:
    grid = np.arange(0.0, amax + 2 * KERNEL_STEP, KERNEL_STEP)
    vals = radial_kernel_exact(p, omega, grid)
    spline = CubicSpline(grid, vals, bc_type=((1, 0.0), "not-a-knot"))
    mids = grid[:-1][:: max(1, grid.size // 400)] + 0.5 * KERNEL_STEP
    # reference with twice the nodes, so under-resolution shows up too
    n_ref = 2 * (40 + int(math.ceil(0.8 * float(grid[-1]) / min(p, 1.0))))
    check = radial_kernel_exact(p, omega, mids, n=n_ref)
    error = float(np.max(np.abs(spline(mids) - check)))
    return _KernelTable(spline, float(grid[-1]), max(4.0 * error, 1e-15))


def _table_for(pe: PExponent, w: float, amax: float) -> _KernelTable:
    size = 16.0
    while size < amax:
        size *= 2.0
    return _kernel_table(pe.p, w, size)


def j_omega_kernel(p, omega, eta, spec: QuadratureSpec | None = None, *, full_output: bool = False):
    """Positive-order function with the radial integral done first.

    Writing the order-zero function through its quarter-period form and
    exchanging integrals gives

        J = C * int_0^{pi/2} psi(t) [K(f(t)) + K(g(t))] dt,

    where ``K`` is the radial kernel of :func:`radial_kernel_exact`, tabulated
    once per ``(p, omega)`` and interpolated by a cubic spline.
    """
    pe = PExponent.of(p)
    _require_oscillatory_p(pe)
    w = _omega(omega)
    if not w > 0:
        raise DomainError("j_omega_kernel needs omega > 0")
    spec = spec or QuadratureSpec()
    e1, e2 = _eta(eta)
    norm = p_norm((e1, e2), pe)
    if norm == 0.0:
        return _out(QuadValue(0.0, 0.0, 0, True), full_output)
    amax = abs(e1) + abs(e2)
    table = _table_for(pe, w, amax)
    f, g = _quarter_phases(pe, e1, e2)
    amp = psi(pe)

    def integrand(t):
        return amp(t) * (table.spline(np.abs(f(t))) + table.spline(np.abs(g(t))))

    edges = np.union1d(phase_partition(f, 1.0, 0.0, HALF_PI, spec.oscillation_panel_phase),
                       phase_partition(g, 1.0, 0.0, HALF_PI, spec.oscillation_panel_phase))
    sing = min(0.0, pe.two_over_p - 1.0)
    if sing:
        res = integrate_endpoint_singular(integrand, 0.0, HALF_PI, sing, sing, spec,
                                          min_panels=len(edges))
    else:
        res = integrate_adaptive(integrand, 0.0, HALF_PI, spec, breakpoints=edges)
    res = _finish(res, "j_omega_kernel")
    # |psi| integrates to B(1/p, 1/p) / 2 on the quarter period.
    psi_mass = 0.5 * pe.gamma_1p**2 / pe.gamma_2p
    res.error_estimate += 2.0 * table.error * psi_mass
    c = _omega_prefactor(pe, w, norm) * 2.0 * oscillatory_prefactor(pe)
    res = res.scaled(c)
    res.value = float(np.real(res.value))
    return _out(res, full_output)


def j_omega_fast(p, omega, eta, spec: QuadratureSpec | None = None, *, full_output: bool = False):
    """Fastest valid positive-order representation for the given ``p``."""
    pe = PExponent.of(p)
    if pe.p < 4.0:
        return j_omega_kernel(pe, omega, eta, spec, full_output=full_output)
    return j_omega(pe, omega, eta, spec, full_output=full_output)


def as_vec(eta) -> Vec2:
    return Vec2(float(eta[0]), float(eta[1]))
