"""Lattice points in the p-circle and the series identity for their weighted sums.

For ``beta > -1``, ``s > 0`` and ``x`` in the plane,

    D(s:x)   = sum_{|m|_p^p < s} (s - |m|_p^p)^beta cos(2 pi x.m) / Gamma(beta+1)
    Dc(s:x)  = int_{|xi|_p^p < s} (s - |xi|_p^p)^beta cos(2 pi x.xi) dxi / Gamma(beta+1)

and Poisson summation gives ``D(s:x) - Dc(s:x) = sum_{n != 0} Dc(s:x-n)`` with

    Dc(s:y) = p^(beta+1) Gamma(1/p)^2 s^(beta+2/p) J_{beta+1}(eta) / |eta|_p^(beta+1),
    eta = 2 pi s^(1/p) y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import pmap
from .errors import ConvergenceError, DomainError, ResourceError
from .gbessel import j_omega_fast, j_ratio_at_origin
from .pnorm import PExponent, gamma_fn, p_norm
from .quadrature import QuadratureSpec, QuadValue, integrate_endpoint_singular, integrate_weighted

MAX_POINTS = 50_000_000
TAIL_INFLATION = 2.0
HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class LatticeCount:
    count: int
    s: float
    strict: bool = True


def _row_extent(p: float, s: float, rest: float, strict: bool) -> int:
    """Largest ``c >= 0`` with ``rest + c**p < s`` (or ``<=``), or -1 if none."""
    def inside(c):
        v = rest + float(c) ** p
        return v < s if strict else v <= s

    if not inside(0):
        return -1
    c = int(max(s - rest, 0.0) ** (1.0 / p))
    while c > 0 and not inside(c):
        c -= 1
    while inside(c + 1):
        c += 1
    return c


def _check_size(p: float, s: float):
    approx = 4.0 * s ** (2.0 / p)
    if approx > MAX_POINTS:
        raise ResourceError(f"about {approx:.3g} lattice points; limit is {MAX_POINTS}")


def count_lattice(p, s: float, *, strict: bool = True) -> LatticeCount:
    """Number of ``m`` in Z^2 with ``|m1|^p + |m2|^p < s`` (``<=`` if not strict)."""
    pe = PExponent.of(p)
    s = float(s)
    if not s > 0:
        raise DomainError("s must be positive")
    _check_size(pe.p, s)
    total = 0
    m1 = 0
    while True:
        rest = float(m1) ** pe.p
        c = _row_extent(pe.p, s, rest, strict)
        if c < 0:
            break
        total += (2 * c + 1) * (1 if m1 == 0 else 2)
        m1 += 1
    return LatticeCount(total, s, strict)


def lattice_points(p, s: float, *, strict: bool = True) -> np.ndarray:
    """All lattice points of the (strict) p-ball ``|m|_p^p < s`` as an ``(n, 2)`` int array."""
    pe = PExponent.of(p)
    s = float(s)
    if not s > 0:
        raise DomainError("s must be positive")
    _check_size(pe.p, s)
    rows = []
    m1 = 0
    while True:
        c = _row_extent(pe.p, s, float(m1) ** pe.p, strict)
        if c < 0:
            break
        m2 = np.arange(-c, c + 1)
        for sign in ((1,) if m1 == 0 else (1, -1)):
            rows.append(np.column_stack([np.full(m2.size, sign * m1), m2]))
        m1 += 1
    return np.concatenate(rows)


def area_main_term(p, r: float) -> float:
    """Area ``(2/p) Gamma(1/p)^2 / Gamma(2/p) r^2`` of the p-ball of radius ``r``."""
    pe = PExponent.of(p)
    if not r > 0:
        raise DomainError("r must be positive")
    return pe.two_over_p * pe.gamma_1p**2 / pe.gamma_2p * r * r


def p_error(p, r: float, *, closed: bool = False) -> float:
    """Lattice count at ``s = r^p`` minus the area main term.

    The strict count is the default; ``closed=True`` also counts points on the
    curve, for comparison with tables that use the closed ball.
    """
    pe = PExponent.of(p)
    if not r > 0:
        raise DomainError("r must be positive")
    return count_lattice(pe, r**pe.p, strict=not closed).count - area_main_term(pe, r)


def _weights(pe: PExponent, beta: float, s: float):
    if not beta > -1:
        raise DomainError("beta must exceed -1")
    m = lattice_points(pe, s)
    norm_p = np.abs(m[:, 0]).astype(float) ** pe.p + np.abs(m[:, 1]).astype(float) ** pe.p
    gap = s - norm_p
    if beta < 0 and count_lattice(pe, s, strict=False).count != m.shape[0]:
        raise DomainError("beta < 0 is undefined when lattice points lie on the curve")
    w = np.ones_like(gap) if beta == 0 else gap**beta
    return m, w / gamma_fn(beta + 1.0)


def d_beta(p, beta: float, s: float, x, *, form: str = "cos") -> float:
    """Weighted lattice sum ``D``.

    ``form="cos"`` sums the cosine directly; ``form="exp"`` sums complex
    exponentials and returns the real part (the imaginary part cancels over the
    symmetric index set).
    """
    pe = PExponent.of(p)
    m, w = _weights(pe, float(beta), float(s))
    arg = 2.0 * math.pi * (m[:, 0] * float(x[0]) + m[:, 1] * float(x[1]))
    if form == "cos":
        return float(np.sum(w * np.cos(arg)))
    if form == "exp":
        return complex(np.sum(w * np.exp(1j * arg))).real
    raise DomainError(f"unknown form {form!r}")


def d_beta_imag(p, beta: float, s: float, x) -> float:
    pe = PExponent.of(p)
    m, w = _weights(pe, float(beta), float(s))
    arg = 2.0 * math.pi * (m[:, 0] * float(x[0]) + m[:, 1] * float(x[1]))
    return float(np.sum(w * np.sin(arg)))


# ---------------------------------------------------------------------------
# the continuous counterpart


def _script_d_iterated(pe: PExponent, beta: float, s: float, x, spec: QuadratureSpec) -> QuadValue:
    # first quadrant only (cosine is even in each coordinate), then
    # xi1 = R t^(1/p) and, per slice, xi2 = w v^(1/p) with w = R (1-t)^(1/p)
    p = pe.p
    big_r = s ** (1.0 / p)
    a1 = 2.0 * math.pi * float(x[0])
    a2 = 2.0 * math.pi * float(x[1])
    inner_spec = spec.tighter(100.0)
    inv_p = 1.0 / p
    inner_err = [0.0]

    def inner(t: float) -> float:
        w = big_r * (1.0 - t) ** inv_p
        if a2 == 0.0:
            # int_0^1 v^(1/p-1) (1-v)^beta dv
            return math.exp(math.lgamma(inv_p) + math.lgamma(beta + 1.0) - math.lgamma(inv_p + beta + 1.0))
        res = integrate_weighted(lambda v: np.cos(a2 * w * v**inv_p), 0.0, 1.0, inv_p - 1.0, beta,
                                 inner_spec, min_panels=1 + int(abs(a2) * w / 3.0))
        if not res.converged:
            raise ConvergenceError("inner slice integral did not converge", partial=res)
        inner_err[0] = max(inner_err[0], res.error_estimate)
        return float(np.real(res.value))

    def outer(t):
        return np.cos(a1 * big_r * t**inv_p) * np.array([inner(float(u)) for u in t])

    res = integrate_weighted(outer, 0.0, 1.0, inv_p - 1.0, beta + inv_p, spec,
                             min_panels=1 + int(abs(a1) * big_r / 3.0))
    if not res.converged:
        raise ConvergenceError("script_d_beta outer integral did not converge", partial=res)
    c = 4.0 / gamma_fn(beta + 1.0) * (big_r / p) * s ** (beta + inv_p) / p
    out = QuadValue(float(np.real(res.value)), res.error_estimate + inner_err[0], res.evaluations, True)
    return out.scaled(c)


def _script_d_polar(pe: PExponent, beta: float, s: float, x, spec: QuadratureSpec) -> QuadValue:
    # xi = rho (cos^(2/p) th, sin^(2/p) th), Jacobian (2/p) rho psi(th), first quadrant x 4
    big_r = s ** (1.0 / pe.p)
    a1 = 2.0 * math.pi * float(x[0])
    a2 = 2.0 * math.pi * float(x[1])
    n = pe.two_over_p
    e = n - 1.0
    inner_spec = spec.tighter(100.0)
    inner_err = [0.0]

    def angular(rho: float) -> float:
        def g(th):
            c = np.clip(np.cos(th), 0.0, None)
            sn = np.clip(np.sin(th), 0.0, None)
            # psi = (cos sin)^(2/p-1); the weight carries th^e and (pi/2-th)^e
            ratio_l = np.where(th > 0, sn / np.where(th > 0, th, 1.0), 1.0)
            ratio_r = np.where(th < HALF_PI, c / np.where(th < HALF_PI, HALF_PI - th, 1.0), 1.0)
            return (np.cos(a1 * rho * c**n) * np.cos(a2 * rho * sn**n)
                    * (ratio_l * ratio_r) ** e)
        res = integrate_weighted(g, 0.0, HALF_PI, e, e, inner_spec,
                                 min_panels=1 + int((abs(a1) + abs(a2)) * rho / 3.0))
        if not res.converged:
            raise ConvergenceError("angular integral did not converge", partial=res)
        inner_err[0] = max(inner_err[0], res.error_estimate)
        return float(np.real(res.value))

    def radial(rho):
        return np.array([(s - r**pe.p) ** beta * r * angular(float(r)) for r in rho]) if beta >= 0 else \
            np.array([max(s - r**pe.p, 0.0) ** beta * r * angular(float(r)) for r in rho])

    res = integrate_endpoint_singular(radial, 0.0, big_r, 0.0, beta, spec,
                                      min_panels=1 + int((abs(a1) + abs(a2)) * big_r / 3.0))
    if not res.converged:
        raise ConvergenceError("script_d_beta radial integral did not converge", partial=res)
    out = QuadValue(float(np.real(res.value)), res.error_estimate + inner_err[0], res.evaluations, True)
    return out.scaled(4.0 * n / gamma_fn(beta + 1.0))


def script_d_beta(p, beta: float, s: float, x, spec: QuadratureSpec | None = None, *,
                  method: str = "iterated", full_output: bool = False):
    """Continuous counterpart ``Dc(s:x)`` by iterated or generalized-polar quadrature."""
    pe = PExponent.of(p)
    beta, s = float(beta), float(s)
    if not beta > -1:
        raise DomainError("beta must exceed -1")
    if not s > 0:
        raise DomainError("s must be positive")
    spec = spec or QuadratureSpec()
    if method == "iterated":
        res = _script_d_iterated(pe, beta, s, x, spec)
    elif method == "polar":
        res = _script_d_polar(pe, beta, s, x, spec)
    else:
        raise DomainError(f"unknown method {method!r}")
    return res if full_output else res.value


def _term_constant(pe: PExponent, beta: float, s: float) -> float:
    return pe.p ** (beta + 1.0) * pe.gamma_1p**2 * s ** (beta + pe.two_over_p)


def script_d_bessel_form(p, beta: float, s: float, y, spec: QuadratureSpec | None = None) -> float:
    """``Dc(s:y)`` through the order ``beta+1`` Bessel function (diagnostic)."""
    pe = PExponent.of(p)
    k = 2.0 * math.pi * s ** (1.0 / pe.p)
    eta = (k * float(y[0]), k * float(y[1]))
    norm = p_norm(eta, pe)
    c = _term_constant(pe, beta, s)
    if norm == 0.0:
        return c * j_ratio_at_origin(pe, beta + 1.0)
    return c * j_omega_fast(pe, beta + 1.0, eta, spec) / norm ** (beta + 1.0)


# ---------------------------------------------------------------------------
# the series side


def decay_exponent(pe: PExponent) -> float:
    """Decay exponent ``q`` used for tail envelopes: 1/2 at p = 2, p/2 otherwise."""
    return 0.5 if pe.p == 2.0 else pe.p / 2.0


def _shell(k: int) -> list[tuple[int, int]]:
    if k == 0:
        return [(0, 0)]
    pts = [(i, j) for i in range(-k, k + 1) for j in (-k, k)]
    pts += [(i, j) for i in (-k, k) for j in range(-k + 1, k)]
    return pts


@dataclass(frozen=True)
class SeriesResult:
    partial_sum: float
    tail_bound: float
    quad_error: float
    envelope_constant: float
    q_hat: float
    inflation: float
    terms: int


def _term(pe, beta, s, x, n, spec) -> tuple[float, float, float]:
    """Return (term, quadrature error, |J| |eta|_p^q)."""
    k = 2.0 * math.pi * s ** (1.0 / pe.p)
    eta = (k * (float(x[0]) - n[0]), k * (float(x[1]) - n[1]))
    norm = p_norm(eta, pe)
    try:
        res = j_omega_fast(pe, beta + 1.0, eta, spec, full_output=True)
    except ConvergenceError as exc:
        raise ConvergenceError(f"series term n={n} failed: {exc}", partial=n) from exc
    c = _term_constant(pe, beta, s) / norm ** (beta + 1.0)
    return c * res.value, c * res.error_estimate, abs(res.value) * norm ** decay_exponent(pe)


def series_rhs(p, beta: float, s: float, x, cutoff: int, spec: QuadratureSpec | None = None,
               *, full_output: bool = False):
    """Partial sum over ``0 < |n|_inf <= cutoff`` and a bound on the omitted terms.

    The bound models ``|J_{beta+1}(eta)| <= C |eta|_p^(-q)`` with ``C`` the
    largest value seen on the first omitted shell, inflated by 2.  Shells up
    to ``4 cutoff + 20`` are summed exactly under that model and the rest by
    an integral comparison using ``|v|_p >= |v|_inf``.
    """
    pe = PExponent.of(p)
    beta, s = float(beta), float(s)
    cutoff = int(cutoff)
    if cutoff < 0:
        raise DomainError("cutoff must be nonnegative")
    if not all(-0.5 < float(c) <= 0.5 for c in x):
        raise DomainError("x must lie in (-1/2, 1/2]^2")
    spec = spec or QuadratureSpec()
    q = decay_exponent(pe)
    gamma = q + beta + 1.0
    if not gamma > 2.0:
        raise DomainError(f"terms do not decay fast enough: need beta > {1.0 - q}")
    ns = [n for k in range(1, cutoff + 1) for n in _shell(k)]
    probe = _shell(cutoff + 1)
    results = pmap(lambda n: _term(pe, beta, s, x, n, spec), ns + probe)
    body, tail_probe = results[: len(ns)], results[len(ns):]
    partial = math.fsum(r[0] for r in body)
    qerr = math.fsum(r[1] for r in body)
    env = TAIL_INFLATION * max(r[2] for r in tail_probe)
    k = 2.0 * math.pi * s ** (1.0 / pe.p)
    cst = _term_constant(pe, beta, s)
    big_m = 4 * cutoff + 20
    far = [(float(x[0]) - i, float(x[1]) - j) for kk in range(cutoff + 1, big_m + 1) for i, j in _shell(kk)]
    far = np.asarray(far)
    norms = p_norm((far[:, 0], far[:, 1]), pe) * k
    near_sum = float(np.sum(norms ** (-gamma)))
    beyond = 16.0 * k ** (-gamma) * (big_m - 0.5) ** (2.0 - gamma) / (gamma - 2.0)
    tail = cst * env * (near_sum + beyond)
    res = SeriesResult(partial, tail, qerr, env, q, TAIL_INFLATION, len(ns))
    return res if full_output else (partial, tail)


@dataclass
class IdentityReport:
    lhs: float
    rhs_partial: float
    cutoff: int
    tail_bound: float
    abs_gap: float
    passed: bool
    quad_error: float = 0.0
    tail_inflation: float = TAIL_INFLATION
    envelope_constant: float = 0.0
    q_hat: float = 0.0
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs_partial": self.rhs_partial,
            "cutoff": self.cutoff,
            "tail_bound": self.tail_bound,
            "abs_gap": self.abs_gap,
            "pass": self.passed,
            "quad_error": self.quad_error,
            "tail_inflation": self.tail_inflation,
            "envelope_constant": self.envelope_constant,
            "q_hat": self.q_hat,
            **self.details,
        }


def verify_identity(p, beta: float, s: float, x, cutoff: int,
                    spec: QuadratureSpec | None = None) -> IdentityReport:
    """Compare ``D - Dc`` with the truncated series plus its tail bound."""
    pe = PExponent.of(p)
    spec = spec or QuadratureSpec()
    d = d_beta(pe, beta, s, x)
    dc = script_d_beta(pe, beta, s, x, spec, full_output=True)
    lhs = d - dc.value
    ser = series_rhs(pe, beta, s, x, cutoff, spec, full_output=True)
    gap = abs(lhs - ser.partial_sum)
    qerr = dc.error_estimate + ser.quad_error
    ok = gap <= ser.tail_bound + 10.0 * qerr
    return IdentityReport(lhs, ser.partial_sum, int(cutoff), ser.tail_bound, gap, bool(ok), qerr,
                          ser.inflation, ser.envelope_constant, ser.q_hat,
                          {"d_beta": d, "script_d_beta": dc.value, "terms": ser.terms})
