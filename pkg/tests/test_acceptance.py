"""Acceptance checks, one per criterion.

Each check records a ``[PASS]``/``[FAIL]`` line that the terminal summary
prints at the end of the run.  Run this file directly to get only those lines.
"""

from __future__ import annotations

import math
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lame_bessel import (PhaseFamily, area_main_term, count_lattice, d_beta, j0_direct, j0_odd,  # noqa: E402
                         j0_oscillatory, phase_derivative, script_d_beta, stationary_points,
                         verify_identity, verify_prop25)
from lame_bessel.asymptotics import (ScanGrid, decay_scan_compact, decay_scan_uniform,  # noqa: E402
                                     on_axis_slice, rho_grid, uniform_phi_grid)
from lame_bessel.phase import stationary_theta_delta  # noqa: E402
from lame_bessel.pnorm import eta_from_polar  # noqa: E402
from oracles import bessel_j_series, brute_count, fd_phase_derivative  # noqa: E402

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:
    ACCEPTANCE_LINES = []

HP = math.pi / 2


def record(number: int, passed: bool, detail: str, seconds: float):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail} ({seconds:.1f} s)"
    ACCEPTANCE_LINES.append(line)
    return line


# ---------------------------------------------------------------------------
# individual checks; each returns (passed, detail)


def check_1():
    worst = 0.0
    zero_val = None
    for r in (0.5, 1.0, 2.404825557695773, 5.0, 10.0, 50.0):
        ref = bessel_j_series(0, r)
        for f in (j0_direct, j0_oscillatory):
            v = f("2", (r, 0.0))
            worst = max(worst, abs(v - ref))
            if r == 2.404825557695773:
                zero_val = max(abs(v), zero_val or 0.0)
    ok = worst <= 1e-8 and zero_val <= 1e-7
    return ok, f"max |J - oracle| = {worst:.2e} (tol 1e-8), |J at first zero| = {zero_val:.2e} (tol 1e-7)"


def check_2():
    rhos = (0.0, 1.0, 5.0, 20.0, 100.0)
    phis = (0.0, math.pi / 8, math.pi / 4, HP - 0.1, HP)
    worst = 0.0
    worst_odd = 0.0
    for p in ("2", "2/3", "2/5", "1/2", "0.8"):
        for rho in rhos:
            for phi in phis:
                eta = eta_from_polar(p, rho, phi)
                a = j0_direct(p, eta)
                worst = max(worst, abs(a - j0_oscillatory(p, eta)))
                if p in ("2/3", "2/5"):
                    worst_odd = max(worst_odd, abs(a - j0_odd(p, eta)))
    ok = worst <= 1e-8 and worst_odd <= 1e-8
    return ok, f"max |direct - oscillatory| = {worst:.2e}, max |direct - odd| = {worst_odd:.2e} (tol 1e-8)"


def compact_phi_set(margin: float = 0.05, per_quadrant: int = 8):
    # 1e-9 inset so the shifted copies survive rounding in the margin check
    base = np.linspace(margin + 1e-9, HP - margin - 1e-9, per_quadrant)
    return [float(b + k * HP) for k in range(4) for b in base]


def check_3():
    slopes = {}
    for p in ("2", "1/2", "2/3"):
        scan = decay_scan_compact(p, compact_phi_set(), ScanGrid(rho_grid(20, 2000, 16), (0.0,)))
        slopes[p] = scan.fit.slope
    ok = all(abs(s + 0.5) <= 0.07 for s in slopes.values())
    txt = ", ".join(f"p={p}: {s:.3f}" for p, s in slopes.items())
    return ok, f"compact-set slopes {txt} (target -0.5 +- 0.07)"


def check_4():
    parts = []
    ok = True
    for p in ("2/3", "2/5", "2"):
        scan = decay_scan_uniform(p, ScanGrid(rho_grid(20, 2000, 16), uniform_phi_grid(p)))
        good = math.isfinite(scan.boundedness_ratio) and scan.ratio_trend <= 0.05
        ok = ok and good
        parts.append(f"p={p}: ratio max {scan.boundedness_ratio:.3g}, trend {scan.ratio_trend:.3f}")
    axis = on_axis_slice("2/3", rho_grid(20, 2000, 16))
    axis_ok = abs(axis.slope + 1 / 3) <= 0.05
    ok = ok and axis_ok
    parts.append(f"on-axis p=2/3 slope {axis.slope:.3f} (target -0.333 +- 0.05)")
    return ok, "; ".join(parts) + " (trend tol 0.05)"


def check_5():
    grid = np.geomspace(1e-4, 1e-2, 16)
    parts = []
    ok = True
    for p, ns in (("2/5", (1, 2, 3, 4, 5)), ("2/3", (2, 3))):
        for n in ns:
            rep = verify_prop25(p, n, grid)
            ok = ok and rep.passed
            if rep.fit is None:
                parts.append(f"p={p} n={n}: max |value| {rep.band[1]:.1e}")
            else:
                parts.append(f"p={p} n={n}: slope {rep.fit.slope:.3f} vs {rep.predicted_exponent:.3f}"
                             f"{'' if rep.passed else ' FAIL'}")
    return ok, "; ".join(parts)


STATIONARY_SETS = [
    (("F_axis", "2", 0.0), [HP]),
    (("F_axis", "2", 0.4), [HP - stationary_theta_delta("2", 0.4)]),
    (("G_axis", "2", 0.0), [0.0]),
    (("G_axis", "2", 0.4), []),
    (("F_axis", "2/3", 0.0), [0.0, HP]),
    (("F_axis", "2/3", 0.3), [0.0, HP - stationary_theta_delta("2/3", 0.3), HP]),
    (("G_axis", "2/3", 0.0), [0.0, HP]),
    (("G_axis", "2/3", 0.3), [0.0, HP]),
    (("F_axis", "2/5", 0.05), [0.0, HP - stationary_theta_delta("2/5", 0.05), HP]),
    (("G_axis", "2/5", 0.05), [0.0, HP]),
    (("F_compact", "1/2", 1.0), [0.0, None, HP]),
    (("G_compact", "1/2", 1.0), [0.0, HP]),
    (("F_compact", "2", 1.0), [1.0]),
    (("G_compact", "2", 1.0), []),
]


def random_family(rng: random.Random) -> PhaseFamily:
    kind = rng.choice(["F_axis", "G_axis", "F_compact", "G_compact"])
    if kind.endswith("axis"):
        p = rng.choice(["2", "2/3", "1/2", "2/5", "1/3", "2/7"])
        return PhaseFamily(kind, p, rng.choice([0.0, rng.uniform(1e-4, 1.0)]))
    p = rng.choice(["2", rng.uniform(0.2, 0.95)])
    return PhaseFamily(kind, p, rng.uniform(0.0, 2 * math.pi))


def check_6():
    rng = random.Random(20261019)
    worst = 0.0
    total = 0
    for _ in range(200):
        fam = random_family(rng)
        for t in stationary_points(fam).points:
            worst = max(worst, abs(phase_derivative(fam, t, 1)))
            total += 1
    table_ok = True
    for (kind, p, t), want in STATIONARY_SETS:
        got = stationary_points(PhaseFamily(kind, p, t)).points
        same = len(got) == len(want) and all(w is None or abs(g - w) < 1e-12 for g, w in zip(got, want))
        table_ok = table_ok and same
    ok = worst <= 1e-10 and table_ok
    return ok, (f"max |h'| = {worst:.1e} over {total} points of 200 families (tol 1e-10); "
                f"{len(STATIONARY_SETS)} reference sets {'match' if table_ok else 'differ'}")


IDENTITY_CONFIGS = [(1.5, (0.0, 0.0)), (2.5, (0.3, -0.2)), (3.7, (0.5, 0.5)),
                    (0.8, (0.1, 0.25)), (5.3, (-0.4, 0.2)), (2.2, (0.25, 0.0))]


def check_7():
    ok = True
    parts = []
    for s, x in IDENTITY_CONFIGS:
        r12 = verify_identity("2", 1.0, s, x, 12)
        r24 = verify_identity("2", 1.0, s, x, 24)
        good = r12.passed and r24.passed and r24.abs_gap < r12.abs_gap
        ok = ok and good
        parts.append(f"s={s} x={x}: gap {r12.abs_gap:.1e}->{r24.abs_gap:.1e}{'' if good else ' FAIL'}")
    r = verify_identity("2/3", 1.8, 1.2, (0.0, 0.0), 12)
    ok = ok and r.passed
    parts.append(f"p=2/3 beta=1.8: gap {r.abs_gap:.3f} <= bound {r.tail_bound:.3f}"
                 f"{'' if r.passed else ' FAIL'}")
    return ok, "; ".join(parts)


def check_8():
    rng = random.Random(8)
    bad_count = bad_d = 0
    worst_area = 0.0
    for _ in range(1000):
        p = rng.uniform(0.5, 4.0)
        # radius capped at 300 so the brute-force box stays small at p < 1
        s = rng.uniform(0.01, min(400.0, 300.0**p))
        c = count_lattice(p, s).count
        bad_count += c != brute_count(p, s)
        bad_d += d_beta(p, 0.0, s, (0.0, 0.0)) != c
        area = area_main_term(p, s ** (1.0 / p))
        worst_area = max(worst_area, abs(script_d_beta(p, 0.0, s, (0.0, 0.0)) - area) / max(1.0, area))
    ok = bad_count == 0 and bad_d == 0 and worst_area <= 1e-8
    return ok, (f"{bad_count} count mismatches, {bad_d} d_beta mismatches in 1000 draws; "
                f"max scaled |script_d - area| = {worst_area:.1e} (tol 1e-8)")


def check_9():
    worst = 0.0
    cases = 0
    for p, big in (("2", 1), ("1", 2), ("2/3", 3), ("1/2", 4), ("2/5", 5), ("1/3", 6), ("2/7", 7)):
        for kind in ("F_axis", "G_axis"):
            for delta in (0.0, 0.05):
                fam = PhaseFamily(kind, p, delta)
                a, b = fam.coefficients
                for theta in (0.2, 0.7, 1.2):
                    for n in range(1, big + 1):
                        got = phase_derivative(fam, theta, n)
                        ref = fd_phase_derivative(a, b, big, theta, n)
                        worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
                        cases += 1
    return worst <= 1e-6, f"max scaled |exact - FD| = {worst:.1e} over {cases} cases (tol 1e-6)"


CHECKS = {1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5,
          6: check_6, 7: check_7, 8: check_8, 9: check_9}


def run(number: int) -> tuple[bool, str]:
    t0 = time.perf_counter()
    ok, detail = CHECKS[number]()
    line = record(number, ok, detail, time.perf_counter() - t0)
    return ok, line


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number):
    ok, line = run(number)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for k in sorted(CHECKS):
        ok, line = run(k)
        failed += not ok
        print(line, flush=True)
    sys.exit(1 if failed else 0)
