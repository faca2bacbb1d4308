import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lame_bessel.errors import DomainError
from lame_bessel.phase import (PhaseFamily, PhaseKind, UFunction, derivative_terms, phase_derivative,
                               phase_value, predicted_exponent, stationary_phi0, stationary_points,
                               stationary_theta_delta, v_delta, verify_prop25)
from oracles import fd_phase_derivative

HP = math.pi / 2


def fam(kind, p, t):
    return PhaseFamily(kind, p, t)


def test_phase_values():
    assert phase_value(fam("F_axis", "2", 0), HP) == 1.0
    assert phase_value(fam("F_compact", "2", math.pi / 3), math.pi / 3) == pytest.approx(1.0)
    assert phase_value(fam("G_axis", "2/3", 0.1), math.pi / 4) == pytest.approx(-0.9 * 2**-1.5)


@pytest.mark.parametrize("phi", [0.3, 2.0, 3.5, 5.0])
def test_compact_matches_eta_phase(phi):
    # f_{p,phi}(t) |eta|_p equals eta1 cos^N t + eta2 sin^N t
    from lame_bessel.pnorm import eta_from_polar
    p = "2/3"
    e1, e2 = eta_from_polar(p, 1.0, phi)
    for t in [0.1, 0.7, 1.3]:
        ref_f = e1 * math.cos(t) ** 3 + e2 * math.sin(t) ** 3
        ref_g = e1 * math.sin(t) ** 3 - e2 * math.cos(t) ** 3
        assert phase_value(fam("F_compact", p, phi), t) == pytest.approx(ref_f, abs=1e-14)
        assert phase_value(fam("G_compact", p, phi), t) == pytest.approx(ref_g, abs=1e-14)


def test_derivative_examples():
    assert phase_derivative(fam("F_axis", "2", 0), HP, 2) == pytest.approx(-1.0)
    assert phase_derivative(fam("F_axis", "2/3", 0), 0.0, 3) == pytest.approx(6.0)
    assert phase_derivative(fam("G_axis", "2/3", 0), HP, 3) == pytest.approx(6.0)


def test_derivative_terms_are_generated():
    terms = derivative_terms(3, 3)
    assert all(c != 0 for c in terms.values())
    assert max(k for _, k, _ in terms) <= 2


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([("2", 1), ("2/3", 3), ("1/2", 4), ("2/5", 5), ("1/3", 6)]),
       st.sampled_from(["F_axis", "G_axis"]), st.floats(0, 0.5),
       st.floats(0.05, 1.5), st.integers(1, 6))
def test_exact_vs_fd(pn, kind, delta, theta, n):
    p, big = pn
    n = min(n, big)
    f = fam(kind, p, delta)
    a, b = f.coefficients
    ref = fd_phase_derivative(a, b, big, theta, n)
    got = phase_derivative(f, theta, n)
    assert got == pytest.approx(ref, abs=1e-6, rel=1e-6)


def test_fd_mode_for_non_integer():
    f = fam("F_axis", "0.7", 0.2)
    res = phase_derivative(f, 0.8, 3, full_output=True)
    assert res.mode == "finite-difference"
    a, b = f.coefficients
    assert res.value == pytest.approx(fd_phase_derivative(a, b, 2 / 0.7, 0.8, 3), rel=1e-8)
    assert res.error_estimate < 1e-8


def test_phi0_examples():
    assert stationary_phi0("1/2", math.pi / 4) == pytest.approx(math.pi / 4)
    assert stationary_phi0("1/2", math.pi / 6) == pytest.approx(math.atan(1 / 3), abs=1e-12)
    f = fam("F_compact", "1/2", math.pi / 6)
    assert abs(phase_derivative(f, HP - stationary_phi0("1/2", math.pi / 6), 1)) < 1e-12
    with pytest.raises(DomainError):
        stationary_phi0("1/2", 0.0)
    with pytest.raises(DomainError):
        stationary_phi0("2", 0.3)


def test_theta_delta_examples():
    assert stationary_theta_delta("2", 1.0) == pytest.approx(math.pi / 4)
    assert stationary_theta_delta("2", 0.5) == pytest.approx(0.4636476090008061)
    t = HP - stationary_theta_delta("2/3", 0.01)
    assert abs(phase_derivative(fam("F_axis", "2/3", 0.01), t, 1)) < 1e-12
    with pytest.raises(DomainError):
        stationary_theta_delta("2/3", 0.0)


def test_table_sets():
    assert stationary_points(fam("F_axis", "2", 0)).points == [HP]
    assert stationary_points(fam("G_axis", "2/3", 0.3)).points == [0.0, HP]
    pts = stationary_points(fam("F_axis", "2/3", 0.3))
    assert len(pts) == 3
    assert pts.points[1] == pytest.approx(HP - stationary_theta_delta("2/3", 0.3), abs=1e-13)
    assert pts.delta_dependent == [False, True, False]
    assert stationary_points(fam("G_axis", "2", 0)).points == [0.0]
    assert stationary_points(fam("G_axis", "2", 0.4)).points == []
    assert stationary_points(fam("F_compact", "2", 1.0)).points == [pytest.approx(1.0)]
    assert stationary_points(fam("G_compact", "2", 1.0)).points == []
    assert len(stationary_points(fam("F_compact", "1/2", 1.0))) == 3
    assert len(stationary_points(fam("G_compact", "1/2", 1.0))) == 2


def test_unsupported_combinations():
    with pytest.raises(DomainError):
        stationary_points(fam("F_axis", "1", 0.2))
    with pytest.raises(DomainError):
        stationary_points(fam("F_compact", "1.5", 0.2))
    with pytest.raises(DomainError):
        PhaseFamily("F_compact", "2", 7.0)


@pytest.mark.parametrize("p,phi", [("1/2", 0.4), ("2/3", 1.1), ("2/5", 0.8)])
def test_second_derivative_signs(p, phi):
    f = fam("F_compact", p, phi)
    mid = HP - stationary_phi0(p, phi)
    assert phase_derivative(f, 0.0, 2) < 0
    assert phase_derivative(f, HP, 2) < 0
    assert phase_derivative(f, mid, 2) > 0


def test_v_delta_positive():
    for p in ["2/3", "2/5", "1/2"]:
        for d in [0.0, 0.05, 1.0]:
            ts = np.linspace(0.001, HP - 0.001, 200)
            assert all(v_delta(p, d, t) > 0 for t in ts)


def test_u_function():
    u = UFunction(1, "2/3", 0.5)
    assert u(0.3) == pytest.approx(0.5 * math.cos(0.3) - math.sin(0.3))


def test_cos2_rates():
    ds = np.geomspace(1e-4, 1e-2, 12)
    for p in ["2/3", "2/5"]:
        sins = [math.sin(2 * (HP - stationary_theta_delta(p, d))) for d in ds]
        coss = [math.cos(2 * (HP - stationary_theta_delta(p, d))) for d in ds]
        slope = np.polyfit(np.log(ds), np.log(sins), 1)[0]
        pv = float(eval(p))
        assert abs(slope - pv / (2 * (1 - pv))) < 0.05
        assert max(abs(c) for c in coss) <= 1


def test_prop25_examples():
    g = np.geomspace(1e-4, 1e-2, 16)
    assert verify_prop25("2/3", 1, g).passed
    r = verify_prop25("2/5", 3, g)
    assert r.passed and abs(r.fit.slope - 2 / 3) < 0.05
    r = verify_prop25("2/3", 3, g)
    assert r.passed and r.band[0] > 5


def test_prop25_preconditions():
    with pytest.raises(DomainError):
        verify_prop25("2/5", 2, np.geomspace(1e-3, 1e-2, 16))
    with pytest.raises(DomainError):
        verify_prop25("2", 1, np.geomspace(1e-4, 1e-2, 16))
    assert predicted_exponent("2/5", 3) == pytest.approx(2 / 3)


def test_interior_point_close_to_endpoint():
    # interior root near 1e-6 while h' also vanishes at theta = 0
    f = fam("F_compact", 0.8751345404175006, 4.536079501687808)
    pts = stationary_points(f).points
    assert len(pts) == 3
    assert pts[1] == pytest.approx(1.0000251830785538e-06, rel=1e-9)
