import math
import random

import pytest

from lame_bessel.errors import DomainError
from lame_bessel.lattice import (area_main_term, count_lattice, d_beta, d_beta_imag, p_error,
                                 script_d_beta, script_d_bessel_form, series_rhs, verify_identity)
from oracles import brute_count, brute_points, pball_area


def test_count_examples():
    assert count_lattice(2, 1).count == 1
    assert count_lattice(2, 100.5).count == 317
    assert count_lattice(1, 2.5).count == brute_count(1, 2.5) == 13


def test_count_random_against_brute():
    rng = random.Random(7)
    for _ in range(100):
        p = rng.uniform(0.5, 4)
        s = rng.uniform(0.01, min(60.0, 60 ** p))
        assert count_lattice(p, s).count == brute_count(p, s)


def test_monotone_jumps_only_at_norm_values():
    p = 2 / 3
    ss = [0.1 * k for k in range(1, 200)]
    counts = [count_lattice(p, s).count for s in ss]
    assert all(b >= a for a, b in zip(counts, counts[1:]))


def test_closed_count():
    assert count_lattice(2, 1, strict=False).count == 5
    assert p_error(2, 1.0, closed=True) == pytest.approx(5 - math.pi)


def test_main_term():
    assert area_main_term(2, 1) == pytest.approx(math.pi)
    assert area_main_term(1, 1) == pytest.approx(2)
    assert area_main_term("2/3", 1) == pytest.approx(3 * math.pi / 8)
    for p in [0.5, 2 / 3, 1.5, 3]:
        assert area_main_term(p, 2.0) == pytest.approx(pball_area(p, 2.0), rel=1e-13)


def test_p_error_examples():
    assert p_error(2, 0.5) == pytest.approx(1 - math.pi / 4)
    assert p_error(2, 10.02) == pytest.approx(317 - math.pi * 10.02**2)
    assert p_error(1, 1.5) == pytest.approx(0.5)


def test_d_beta_examples():
    assert d_beta(2, 1, 1.5, (0, 0)) == pytest.approx(3.5)
    assert d_beta(2, 1, 1.5, (0.5, 0.5)) == pytest.approx(-0.5)


def test_d_beta_forms_agree():
    rng = random.Random(3)
    for _ in range(20):
        s = rng.uniform(0.5, 30)
        x = (rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        p = rng.choice([2, 2 / 3, 0.5, 3])
        a = d_beta(p, 0.7, s, x)
        assert a == pytest.approx(d_beta(p, 0.7, s, x, form="exp"), abs=1e-12)
        assert abs(d_beta_imag(p, 0.7, s, x)) < 1e-9
        ref = sum((s - abs(i) ** p - abs(j) ** p) ** 0.7 * math.cos(2 * math.pi * (x[0] * i + x[1] * j))
                  for i, j in brute_points(p, s)) / math.gamma(1.7)
        assert a == pytest.approx(ref, abs=1e-9)


def test_beta_zero_equals_count():
    for p in [2, 2 / 3, 1.3]:
        for s in [0.5, 3.3, 17.0]:
            assert d_beta(p, 0, s, (0, 0)) == count_lattice(p, s).count


def test_negative_beta_with_boundary_points():
    with pytest.raises(DomainError):
        d_beta(2, -0.5, 1.0, (0, 0))


def test_script_d_examples():
    assert script_d_beta(2, 0, 1.3, (0, 0)) == pytest.approx(math.pi * 1.3, rel=1e-10)
    assert script_d_beta(2, 1, 1.0, (0, 0)) == pytest.approx(math.pi / 2, rel=1e-10)


@pytest.mark.parametrize("p", ["2/3", "1/2", "3"])
def test_script_d_scaling(p):
    vals = [script_d_beta(p, 0, s, (0, 0)) / s ** (2 / float(eval(p))) for s in (0.5, 1, 2, 7)]
    assert max(vals) - min(vals) < 1e-8 * max(vals)


@pytest.mark.parametrize("p,beta,s,x", [("2", 1.0, 2.0, (0.3, -0.2)), ("2/3", 1.8, 1.2, (0.1, 0.4)),
                                        ("1/2", 0.5, 1.0, (0.2, 0.0)), ("2", -0.4, 1.5, (0.25, 0.1))])
def test_script_d_paths_agree(p, beta, s, x):
    a = script_d_beta(p, beta, s, x)
    b = script_d_beta(p, beta, s, x, method="polar")
    c = script_d_bessel_form(p, beta, s, x)
    assert a == pytest.approx(b, abs=1e-8)
    assert a == pytest.approx(c, abs=1e-8)


def test_series_empty_sum():
    partial, tail = series_rhs(2, 1, 1.5, (0, 0), 0)
    assert partial == 0 and tail > 0


def test_series_needs_decay():
    with pytest.raises(DomainError):
        series_rhs(2, 0.3, 1.5, (0, 0), 4)
    with pytest.raises(DomainError):
        series_rhs(2, 1, 1.5, (0.7, 0), 4)


def test_identity_small_cutoffs_cauchy():
    parts = [series_rhs(2, 1, 1.5, (0, 0), c) for c in (6, 12)]
    assert abs(parts[0][0] - parts[1][0]) <= parts[0][1]


def test_identity_report():
    rep = verify_identity(2, 1, 1.5, (0, 0), 8)
    assert rep.passed
    assert rep.abs_gap == pytest.approx(abs(rep.lhs - rep.rhs_partial))
    assert rep.lhs == pytest.approx(3.5 - math.pi / 2 * 1.5**2, abs=1e-9)
