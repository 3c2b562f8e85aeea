import math

import pytest

from lqgtiles import DomainError, params_from_cm, params_from_q


def test_cm_one_gives_q_two_gamma_two():
    p = params_from_cm(1.0)
    assert p.q == pytest.approx(2.0, abs=1e-12)
    assert p.gamma == pytest.approx(2.0, abs=1e-12)


def test_cm_nineteen_gives_q_one_no_gamma():
    p = params_from_cm(19.0)
    assert p.q == pytest.approx(1.0, abs=1e-12)
    assert p.gamma is None


def test_cm_zero_gives_sqrt_eight_thirds_gamma():
    # bisection on 2/g + g/2 = sqrt(25/6) reproduces gamma = sqrt(8/3)
    q = math.sqrt(25.0 / 6.0)
    lo, hi = 1e-9, 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 2.0 / mid + mid / 2.0 > q:
            lo = mid
        else:
            hi = mid
    p = params_from_cm(0.0)
    assert p.q == pytest.approx(q, rel=1e-12)
    assert p.gamma == pytest.approx(0.5 * (lo + hi), abs=1e-9)
    assert p.gamma == pytest.approx(math.sqrt(8.0 / 3.0), rel=1e-10)


def test_invariants_hold_across_range():
    for c in (-5.0, 0.0, 0.5, 1.0, 3.0, 19.0, 24.9):
        p = params_from_cm(c)
        assert abs(25.0 - 6.0 * p.q ** 2 - p.c_m) <= 1e-12 * max(1.0, abs(p.c_m))
        if c <= 1.0:
            assert 0.0 < p.gamma <= 2.0
            assert abs(2.0 / p.gamma + p.gamma / 2.0 - p.q) <= 1e-12 * p.q
        else:
            assert p.gamma is None
            assert 0.0 < p.q < 2.0


def test_cm_at_or_above_25_rejected():
    with pytest.raises(DomainError):
        params_from_cm(25.0)
    with pytest.raises(DomainError):
        params_from_cm(30.0)


def test_params_from_q_round_trip():
    for q in (0.5, 1.0, 1.41, 2.0, 2.5):
        p = params_from_q(q)
        r = params_from_cm(p.c_m)
        assert r.q == pytest.approx(q, rel=1e-12)


def test_supercritical_flag():
    assert params_from_q(1.0).supercritical
    assert not params_from_q(2.0).supercritical
    assert not params_from_q(2.5).supercritical
