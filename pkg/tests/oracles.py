"""Independent reference computations used by the tests.

Nothing here imports the package under test.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np


def bessel_j_series(nu: float, r: float, dps: int | None = None) -> float:
    """Classical ``J_nu(r)`` from its power series at high precision."""
    # terms peak near e^r, so the working precision grows with r
    dps = dps or 40 + int(0.45 * r)
    with mpmath.workdps(dps):
        x = mpmath.mpf(r) / 2
        total = mpmath.mpf(0)
        k = 0
        term = x**nu / mpmath.gamma(nu + 1)
        while True:
            total += term
            k += 1
            term *= -x * x / (k * (k + nu))
            if abs(term) < mpmath.mpf(10) ** (-dps + 5) and k > r:
                break
        return float(total)


def fd_weights(n: int, order: int = 4):
    """Central-difference weights for the ``n``-th derivative, accuracy ``order``."""
    half = (2 * ((n + 1) // 2) - 1 + order) // 2
    offsets = list(range(-half, half + 1))
    with mpmath.workdps(80):
        mat = mpmath.matrix([[mpmath.mpf(o) ** i for o in offsets] for i in range(len(offsets))])
        rhs = mpmath.matrix([mpmath.factorial(n) if i == n else 0 for i in range(len(offsets))])
        w = mpmath.lu_solve(mat, rhs)
        return offsets, [w[i] for i in range(len(offsets))]


def fd_phase_derivative(a: float, b: float, two_over_p: float, theta: float, n: int,
                        step: float = 1e-5, dps: int = 80) -> float:
    """``n``-th derivative of ``a cos^N + b sin^N`` by an order-4 central stencil."""
    offsets, w = fd_weights(n)
    with mpmath.workdps(dps):
        big_n = mpmath.mpf(two_over_p)
        h = mpmath.mpf(step)
        t0 = mpmath.mpf(theta)
        total = mpmath.mpf(0)
        for o, wi in zip(offsets, w):
            t = t0 + o * h
            total += wi * (a * mpmath.cos(t) ** big_n + b * mpmath.sin(t) ** big_n)
        return float(total / h**n)


def brute_count(p: float, s: float) -> int:
    """Double loop over a box, same float predicate ``|m1|**p + |m2|**p < s``."""
    m_max = int(s ** (1.0 / p)) + 2
    # python float pow, not np.power, so rounding matches libm
    col = np.array([abs(float(j)) ** p for j in range(-m_max, m_max + 1)])
    total = 0
    for a in range(-m_max, m_max + 1):
        total += int(np.count_nonzero(abs(float(a)) ** p + col < s))
    return total


def brute_points(p: float, s: float):
    m_max = int(s ** (1.0 / p)) + 2
    return [(i, j) for i in range(-m_max, m_max + 1) for j in range(-m_max, m_max + 1)
            if abs(i) ** p + abs(j) ** p < s]


def pball_area(p: float, r: float) -> float:
    """Area of ``|x1|^p + |x2|^p < r^p`` from the Beta integral."""
    return 4.0 * r * r * math.gamma(1 + 1 / p) ** 2 / math.gamma(1 + 2 / p)
