"""p-norm geometry of the plane and the Gamma utilities used everywhere else.

The plane is parametrized by the p-norm radius and an angle ``phi`` through

    x1 = sgn(cos phi) * rho * |cos phi|**(2/p)
    x2 = sgn(sin phi) * rho * |sin phi|**(2/p)

so that the p-circle of radius ``rho`` is traced once as ``phi`` runs over
``[0, 2*pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi
INTEGRALITY_TOL = 1e-12


class Vec2(NamedTuple):
    x1: float
    x2: float


class PPolar(NamedTuple):
    rho: float
    phi: float


def gamma_fn(z: float) -> float:
    """Gamma function for real ``z > 0``."""
    z = float(z)
    if not z > 0.0 or not math.isfinite(z):
        raise DomainError(f"gamma_fn needs a positive finite argument, got {z!r}")
    return math.gamma(z)


def parse_p(text) -> Fraction | float:
    """Parse ``"2/3"``, ``"0.5"`` or a number; rationals stay exact."""
    if isinstance(text, (Fraction, int)):
        return Fraction(text)
    if isinstance(text, float):
        return text
    s = str(text).strip()
    try:
        value = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse exponent {text!r}") from exc
    return value


@dataclass(frozen=True)
class PExponent:
    """The exponent ``p > 0`` with its derived constants.

    Pass a rational (``Fraction`` or a string such as ``"2/5"``) when the
    integrality of ``2/p`` matters; floats are classified with an absolute
    tolerance of ``1e-12``.
    """

    p: float
    rational: Fraction | None = field(default=None, compare=False)
    two_over_p: float = field(init=False)
    gamma_1p: float = field(init=False, repr=False)
    gamma_2p: float = field(init=False, repr=False)
    two_over_p_is_integer: bool = field(init=False)
    two_over_p_is_odd_integer: bool = field(init=False)

    def __post_init__(self):
        p = float(self.p)
        if not (p > 0.0 and math.isfinite(p)):
            raise DomainError(f"p must be positive and finite, got {self.p!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "two_over_p", 2.0 / p)
        object.__setattr__(self, "gamma_1p", gamma_fn(1.0 / p))
        object.__setattr__(self, "gamma_2p", gamma_fn(2.0 / p))
        if self.rational is not None:
            q = Fraction(2) / self.rational
            is_int = q.denominator == 1
            n = q.numerator
        else:
            n = round(2.0 / p)
            is_int = abs(2.0 / p - n) < INTEGRALITY_TOL
        object.__setattr__(self, "two_over_p_is_integer", bool(is_int))
        object.__setattr__(self, "two_over_p_is_odd_integer", bool(is_int and n % 2 == 1))

    @classmethod
    def of(cls, value) -> "PExponent":
        """Build from a float, ``Fraction`` or rational string."""
        if isinstance(value, PExponent):
            return value
        parsed = parse_p(value)
        if isinstance(parsed, Fraction):
            if parsed <= 0:
                raise DomainError(f"p must be positive, got {value!r}")
            return cls(float(parsed), rational=parsed)
        return cls(parsed)

    @property
    def n(self) -> int:
        """``2/p`` as an int; only meaningful when it is an integer."""
        if not self.two_over_p_is_integer:
            raise DomainError(f"2/p = {self.two_over_p!r} is not an integer")
        return int(round(self.two_over_p))

    @property
    def label(self) -> str:
        if self.rational is not None:
            return str(self.rational)
        return repr(self.p)

    @property
    def bessel_scale(self) -> float:
        """``(2/p)**2 / Gamma(1/p)**2``, the prefactor of the order-zero integral."""
        return self.two_over_p**2 / self.gamma_1p**2

    @property
    def bound_j0(self) -> float:
        """Global bound ``(2/p)**2 / Gamma(2/p)`` on ``|J_0^[p]|``, attained at the origin."""
        return self.two_over_p**2 / self.gamma_2p


def p_norm(v, p) -> float:
    """``(|x1|**p + |x2|**p)**(1/p)``; works elementwise on arrays."""
    pe = PExponent.of(p).p
    a = np.abs(np.asarray(v[0], dtype=float))
    b = np.abs(np.asarray(v[1], dtype=float))
    m = np.maximum(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = m * ((a / m) ** pe + (b / m) ** pe) ** (1.0 / pe)
    r = np.where(m == 0.0, 0.0, r)
    return float(r) if r.ndim == 0 else r


def polar_to_cartesian(pol: PPolar, p) -> Vec2:
    pe = PExponent.of(p)
    rho, phi = pol
    if rho < 0:
        raise DomainError("rho must be nonnegative")
    c, s = math.cos(phi), math.sin(phi)
    e = pe.two_over_p
    return Vec2(math.copysign(rho * abs(c) ** e, c) if c else 0.0,
                math.copysign(rho * abs(s) ** e, s) if s else 0.0)


def cartesian_to_polar(v: Vec2, p) -> PPolar:
    pe = PExponent.of(p)
    x1, x2 = float(v[0]), float(v[1])
    if x1 == 0.0 and x2 == 0.0:
        raise DomainError("the origin has no angle")
    rho = p_norm((x1, x2), pe)
    half = pe.p / 2.0
    c = math.copysign(abs(x1 / rho) ** half, x1) if x1 else 0.0
    s = math.copysign(abs(x2 / rho) ** half, x2) if x2 else 0.0
    phi = math.atan2(s, c) % TWO_PI
    return PPolar(rho, phi)


def eta_from_polar(p, rho: float, phi: float) -> Vec2:
    return polar_to_cartesian(PPolar(rho, phi), p)
