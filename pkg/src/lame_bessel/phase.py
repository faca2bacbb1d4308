"""Phase functions of the quarter-period integrals and their stationary points.

Every phase handled here has the shape

    h(t) = A cos(t)**N + B sin(t)**N,      N = 2/p,  t in [0, pi/2],

with ``(A, B)`` fixed by the family:

=========  ========================  ========================
kind       A                         B
=========  ========================  ========================
F_axis     delta                     1
G_axis     -1                        delta
F_compact  sgn(cos phi)|cos phi|**N  sgn(sin phi)|sin phi|**N
G_compact  -sgn(sin phi)|sin phi|**N sgn(cos phi)|cos phi|**N
=========  ========================  ========================

Its derivative factors as ``h' = -(N/2) sin(2t) w_1(t)`` with
``w_k = A cos**(N-2k) - B sin**(N-2k)``, and the ``w_k`` obey

    w_k'' = -m**2 w_k + m (m-1) w_{k+1},      m = N - 2k,

so every higher derivative is a finite combination of
``{cos 2t, sin 2t} x {w_k, w_k'}`` whose coefficients are generated by
repeated symbolic differentiation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import ConsistencyError, DomainError
from .fitting import DecayFit, fit_power_law
from .pnorm import PExponent

HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi
STATIONARY_TOL = 1e-10
N1_ZERO_TOL = 1e-10


class PhaseKind(str, enum.Enum):
    F_COMPACT = "F_compact"
    G_COMPACT = "G_compact"
    F_AXIS = "F_axis"
    G_AXIS = "G_axis"

    @property
    def compact(self) -> bool:
        return self in (PhaseKind.F_COMPACT, PhaseKind.G_COMPACT)


@dataclass(frozen=True)
class PhaseFamily:
    kind: PhaseKind
    p: PExponent
    parameter: float

    def __post_init__(self):
        object.__setattr__(self, "kind", PhaseKind(self.kind))
        object.__setattr__(self, "p", PExponent.of(self.p))
        t = float(self.parameter)
        if self.kind.compact:
            if not 0.0 <= t < TWO_PI:
                raise DomainError(f"compact phase needs phi in [0, 2pi), got {t}")
        elif not t >= 0.0:
            raise DomainError(f"axis phase needs delta >= 0, got {t}")
        object.__setattr__(self, "parameter", t)

    @property
    def coefficients(self) -> tuple[float, float]:
        """``(A, B)`` in ``h = A cos**N + B sin**N``."""
        n = self.p.two_over_p
        t = self.parameter
        if self.kind is PhaseKind.F_AXIS:
            return t, 1.0
        if self.kind is PhaseKind.G_AXIS:
            return -1.0, t
        c, s = _signed_power(math.cos(t), n), _signed_power(math.sin(t), n)
        if self.kind is PhaseKind.F_COMPACT:
            return c, s
        return -s, c


def _signed_power(x: float, n: float) -> float:
    if abs(x) < 1e-300:
        return 0.0
    return math.copysign(abs(x) ** n, x)


def _check_theta(theta: float):
    if not -1e-15 <= theta <= HALF_PI + 1e-15:
        raise DomainError(f"theta must lie in [0, pi/2], got {theta}")


def _cs(theta: float) -> tuple[float, float]:
    return max(math.cos(theta), 0.0), max(math.sin(theta), 0.0)


def _pow(x: float, e: float) -> float:
    # 0**0 = 1; negative powers of 0 only occur behind zero coefficients
    if e == 0:
        return 1.0
    return x**e


def phase_value(fam: PhaseFamily, theta: float) -> float:
    _check_theta(theta)
    a, b = fam.coefficients
    n = fam.p.two_over_p
    c, s = _cs(theta)
    return a * _pow(c, n) + b * _pow(s, n)


@dataclass(frozen=True)
class UFunction:
    """``u_k(t) = delta cos**(N-2k) t - sin**(N-2k) t``."""

    k: int
    p: PExponent
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "p", PExponent.of(self.p))
        if self.k < 1 or self.delta < 0:
            raise DomainError("UFunction needs k >= 1 and delta >= 0")

    @property
    def exponent(self) -> float:
        return self.p.two_over_p - 2 * self.k

    def __call__(self, theta: float) -> float:
        c, s = _cs(theta)
        m = self.exponent
        return self.delta * _pow(c, m) - _pow(s, m)


def v_delta(p, delta: float, theta: float) -> float:
    """``cos**(N-2) t + delta sin**(N-2) t``; minus the ``w_1`` of the G family."""
    m = PExponent.of(p).two_over_p - 2.0
    c, s = _cs(theta)
    return _pow(c, m) + delta * _pow(s, m)


# ---------------------------------------------------------------------------
# derivatives


def _w(a: float, b: float, m: float, c: float, s: float) -> float:
    return a * _pow(c, m) - b * _pow(s, m)


def _w_prime(a: float, b: float, m: float, c: float, s: float) -> float:
    if m == 0:
        return 0.0
    return -m * (a * _pow(c, m - 1) * s + b * _pow(s, m - 1) * c)


def derivative_terms(two_over_p: Fraction, n: int) -> dict[tuple[str, int, int], Fraction]:
    """Symbolic ``n``-th derivative as ``{(trig, k, d): coefficient}``.

    ``trig`` is ``"c"`` or ``"s"`` for ``cos 2t`` / ``sin 2t``; ``d`` is 0 or 1
    for ``w_k`` or ``w_k'``.  Terms with zero coefficient are dropped, so no
    ``w_k`` with a negative exponent is ever produced when ``N`` is an
    integer and ``n <= N``.
    """
    if n < 1:
        raise DomainError("derivative order must be positive")
    terms: dict[tuple[str, int, int], Fraction] = {("s", 1, 0): -two_over_p / 2}
    for _ in range(n - 1):
        nxt: dict[tuple[str, int, int], Fraction] = {}

        def add(key, value):
            if value:
                nxt[key] = nxt.get(key, Fraction(0)) + value

        for (trig, k, d), coef in terms.items():
            # derivative of the trig factor
            if trig == "s":
                add(("c", k, d), 2 * coef)
            else:
                add(("s", k, d), -2 * coef)
            # derivative of the w factor
            if d == 0:
                add((trig, k, 1), coef)
            else:
                m = two_over_p - 2 * k
                add((trig, k, 0), -m * m * coef)
                add((trig, k + 1, 0), m * (m - 1) * coef)
        terms = {key: v for key, v in nxt.items() if v}
    return terms


def _exact_supported(pe: PExponent, n: int) -> bool:
    return pe.two_over_p_is_integer and n <= pe.n


def _exact_derivative(fam: PhaseFamily, theta: float, n: int) -> float:
    pe = fam.p
    a, b = fam.coefficients
    c, s = _cs(theta)
    if n == 1:
        nn = pe.two_over_p
        return nn * (-a * _pow(c, nn - 1) * s + b * _pow(s, nn - 1) * c)
    two_over_p = Fraction(pe.n)
    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    total = 0.0
    for (trig, k, d), coef in derivative_terms(two_over_p, n).items():
        m = float(two_over_p - 2 * k)
        w = _w(a, b, m, c, s) if d == 0 else _w_prime(a, b, m, c, s)
        total += float(coef) * (c2 if trig == "c" else s2) * w
    return total


@dataclass(frozen=True)
class DerivativeValue:
    value: float
    mode: str
    error_estimate: float = 0.0


def _fd_derivative(fam: PhaseFamily, theta: float, n: int) -> DerivativeValue:
    a, b = fam.coefficients
    nn = fam.p.two_over_p
    direction = 1 if theta <= 0 else (-1 if theta >= HALF_PI else 0)

    def value(dps: int) -> float:
        with mpmath.workdps(dps):
            big_n = mpmath.mpf(nn)

            def h(t):
                return a * mpmath.cos(t) ** big_n + b * mpmath.sin(t) ** big_n
            return float(mpmath.re(mpmath.diff(h, mpmath.mpf(theta), n, direction=direction)))

    v1, v2 = value(30), value(45)
    return DerivativeValue(v2, "finite-difference", abs(v2 - v1) + 1e-15 * abs(v2))


def phase_derivative(fam: PhaseFamily, theta: float, n: int, *, full_output: bool = False):
    """``n``-th derivative of the phase at ``theta``.

    Exact mode (symbolic recursion) applies when ``2/p`` is an integer and
    ``n <= 2/p``, and for ``n = 1`` in general; otherwise high-precision finite
    differences are used.  ``full_output=True`` returns a
    :class:`DerivativeValue` carrying the mode and an error estimate.
    """
    _check_theta(theta)
    n = int(n)
    if n < 1:
        raise DomainError("derivative order must be positive")
    if n == 1 or _exact_supported(fam.p, n):
        res = DerivativeValue(_exact_derivative(fam, theta, n), "exact")
    else:
        res = _fd_derivative(fam, theta, n)
    return res if full_output else res.value


# ---------------------------------------------------------------------------
# stationary points


def _require_sub_one(pe: PExponent):
    if not 0.0 < pe.p < 1.0:
        raise DomainError(f"this closed form needs 0 < p < 1, got p = {pe.p}")


def stationary_phi0(p, phi: float) -> float:
    """Angle ``phi_0`` with ``tan phi_0 = tan(phi)**(1/(1-p))``.

    The interior stationary point of the compact F phase is ``pi/2 - phi_0``.
    """
    pe = PExponent.of(p)
    _require_sub_one(pe)
    if not 0.0 < phi < HALF_PI:
        raise DomainError("phi must lie strictly inside (0, pi/2)")
    e = 1.0 / (1.0 - pe.p)
    return math.atan2(math.sin(phi) ** e, math.cos(phi) ** e)


def stationary_theta_delta(p, delta: float) -> float:
    """Angle ``theta_delta``; the interior stationary point of ``F_axis`` is ``pi/2 - theta_delta``."""
    pe = PExponent.of(p)
    if not delta > 0:
        raise DomainError("delta must be positive")
    if pe.p == 2.0:
        return math.atan(delta)
    _require_sub_one(pe)
    # tan theta_delta = delta**(-p/(2(1-p))); atan2 keeps tiny delta finite
    e = pe.p / (2.0 * (1.0 - pe.p))
    return math.atan2(1.0, delta**e)


@dataclass(frozen=True)
class StationaryPointSet:
    points: list[float] = field(default_factory=list)
    endpoint_flags: list[bool] = field(default_factory=list)
    delta_dependent: list[bool] = field(default_factory=list)

    def __len__(self):
        return len(self.points)


def _supported(fam: PhaseFamily) -> bool:
    pe = fam.p
    if pe.p == 1.0:
        return False
    if fam.kind.compact:
        return pe.p == 2.0 or 0.0 < pe.p < 1.0
    return pe.p == 2.0 or pe.two_over_p_is_integer


def _refine(fam: PhaseFamily, guess: float) -> float:
    def d1(t):
        return _exact_derivative(fam, t, 1)

    if d1(guess) == 0.0:
        return guess
    # the bracket stays strictly inside (0, pi/2), where h' also vanishes for N > 1
    edge = min(guess, HALF_PI - guess)
    width = 1e-6 * edge
    lo, hi = guess - width, guess + width
    flo, fhi = d1(lo), d1(hi)
    while flo * fhi > 0 and 4 * width < edge:
        width *= 4
        lo, hi = guess - width, guess + width
        flo, fhi = d1(lo), d1(hi)
    if flo * fhi > 0:
        return guess
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = d1(mid)
        if fm == 0.0 or hi - lo <= 1e-14 * max(1.0, abs(mid)):
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _interior_guess(fam: PhaseFamily) -> float | None:
    a, b = fam.coefficients
    if a == 0 or b == 0 or (a > 0) != (b > 0):
        return None
    pe = fam.p
    t = fam.parameter
    if fam.kind is PhaseKind.F_AXIS:
        return HALF_PI - stationary_theta_delta(pe, t)
    if fam.kind is PhaseKind.F_COMPACT and pe.p < 1.0 and 0.0 < t < HALF_PI:
        return HALF_PI - stationary_phi0(pe, t)
    # A cos**(N-2) = B sin**(N-2)
    return math.atan((a / b) ** (1.0 / (pe.two_over_p - 2.0)))


def stationary_points(fam: PhaseFamily) -> StationaryPointSet:
    """Stationary points of the phase on ``[0, pi/2]``, each verified."""
    if not _supported(fam):
        raise DomainError(f"stationary points are not covered for {fam.kind.value} with p = {fam.p.p}")
    a, b = fam.coefficients
    pe = fam.p
    found: list[tuple[float, bool, bool]] = []
    if pe.two_over_p > 1.0:
        found += [(0.0, True, False), (HALF_PI, True, False)]
    else:
        # N = 1: h' = -A sin t + B cos t
        if b == 0:
            found.append((0.0, True, False))
        if a == 0:
            found.append((HALF_PI, True, False))
    guess = _interior_guess(fam)
    if guess is not None and 0.0 < guess < HALF_PI:
        found.append((_refine(fam, guess), False, True))
    found.sort()
    for t, *_ in found:
        d = _exact_derivative(fam, t, 1)
        if abs(d) > STATIONARY_TOL:
            raise ConsistencyError(f"stationary point {t!r} has |h'| = {abs(d):.3g}")
    return StationaryPointSet([t for t, _, _ in found], [e for _, e, _ in found],
                              [dd for _, _, dd in found])


# ---------------------------------------------------------------------------
# derivative growth at the moving stationary point


@dataclass(frozen=True)
class Prop25Report:
    p: str
    n: int
    predicted_exponent: float
    deltas: list[float]
    values: list[float]
    fit: DecayFit | None
    band: tuple[float, float]
    passed: bool
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "predicted_exponent": self.predicted_exponent,
            "slope": None if self.fit is None else self.fit.slope,
            "fit": None if self.fit is None else self.fit.as_dict(),
            "band": list(self.band),
            "deltas": self.deltas,
            "values": self.values,
            "pass": self.passed,
            "tolerance": self.tolerance,
        }


def predicted_exponent(p, n: int) -> float:
    pe = PExponent.of(p)
    big = pe.two_over_p
    return (big - n) / (big * (1.0 - pe.p))


def verify_prop25(p, n: int, delta_grid, *, slope_tol: float = 0.05) -> Prop25Report:
    """Scaling of ``F_axis^(n)`` at its moving stationary point as ``delta -> 0``.

    ``n = 1`` must vanish; ``1 < n < 2/p`` must follow the predicted power of
    delta; ``n = 2/p`` must stay in a band bounded away from 0 and infinity.
    """
    pe = PExponent.of(p)
    if not pe.two_over_p_is_integer or pe.n < 3:
        raise DomainError("needs 2/p to be an integer of at least 3")
    n = int(n)
    if not 1 <= n <= pe.n:
        raise DomainError(f"n must lie in [1, {pe.n}]")
    deltas = np.sort(np.asarray(list(delta_grid), dtype=float))
    if deltas.size < 12:
        raise DomainError("delta grid needs at least 12 points")
    if deltas[0] <= 0 or deltas[-1] > 0.1:
        raise DomainError("delta grid must lie in (0, 0.1]")
    if math.log10(deltas[-1] / deltas[0]) < 2.0 - 1e-12:
        raise DomainError("delta grid must span at least two decades")
    vals = []
    for d in deltas:
        fam = PhaseFamily(PhaseKind.F_AXIS, pe, float(d))
        theta = HALF_PI - stationary_theta_delta(pe, float(d))
        theta = _refine(fam, theta)
        vals.append(phase_derivative(fam, theta, n))
    vals = np.asarray(vals)
    mags = np.abs(vals)
    band = (float(mags.min()), float(mags.max()))
    pred = predicted_exponent(pe, n)
    if n == 1:
        return Prop25Report(pe.label, n, pred, deltas.tolist(), vals.tolist(), None, band,
                            bool(band[1] <= N1_ZERO_TOL), N1_ZERO_TOL)
    fit = fit_power_law(deltas, mags, min_points=12, min_decades=2.0)
    ok = abs(fit.slope - pred) <= slope_tol
    if n == pe.n:
        ok = ok and band[0] > 0 and math.isfinite(band[1])
    return Prop25Report(pe.label, n, pred, deltas.tolist(), vals.tolist(), fit, band, bool(ok), slope_tol)
