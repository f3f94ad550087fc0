"""Tests for the gain bounds: the per-column norm chain, the two aggregate
bounds, and the size cap on achievable gain."""

import numpy as np
import pytest

from multipoles import bounds, measures
from multipoles.bounds import (
    BoundReport,
    bound_report,
    check_bounds,
    max_size_for_gain,
    stack_report_rows,
)


def equicorrelated(k, r):
    a = np.full((k, k), r)
    np.fill_diagonal(a, 1.0)
    return a


def random_correlation(rng, n, k):
    g = rng.normal(size=(n, k, k + 3))
    cov = g @ g.transpose(0, 2, 1)
    d = np.sqrt(np.diagonal(cov, axis1=1, axis2=2))
    return cov / (d[:, :, None] * d[:, None, :])


def test_report_equicorrelated_half():
    rep = bound_report(equicorrelated(3, -0.5))
    assert isinstance(rep, BoundReport)
    for col in rep.columns:
        assert col.delta_lambda == pytest.approx(0.5, abs=1e-9)
        assert col.c_norm2 == pytest.approx(np.sqrt(0.5), abs=1e-12)
        assert col.c_norm1 == pytest.approx(1.0, abs=1e-12)
        assert col.delta_lambda <= col.c_norm2 <= col.c_norm1
    assert rep.gain == pytest.approx(0.5, abs=1e-9)
    assert rep.corollary1_bound == pytest.approx(np.sqrt(0.5), abs=1e-12)
    # tight at the extremal equicorrelated matrix
    assert rep.corollary2_bound == pytest.approx(0.5, abs=1e-12)
    assert rep.size_cap_bound == pytest.approx(0.5, abs=1e-12)


def test_report_rejects_small_matrices():
    with pytest.raises(ValueError):
        bound_report(np.eye(2))


def test_gain_matches_measures():
    rng = np.random.default_rng(40)
    for a in random_correlation(rng, 40, 5):
        rep = bound_report(a)
        assert abs(rep.gain - measures.linear_gain(a, range(5))) < 1e-10
        assert rep.gain == pytest.approx(
            min(c.delta_lambda for c in rep.columns), abs=1e-12
        )


def test_interlacing_deltas_nonnegative():
    rng = np.random.default_rng(41)
    for a in random_correlation(rng, 40, 4):
        for col in bound_report(a).columns:
            assert col.delta_lambda >= -1e-10


def test_check_bounds_identity():
    assert check_bounds(np.eye(4)) == []


def test_check_bounds_equicorrelated_half():
    assert check_bounds(equicorrelated(3, -0.5)) == []


def test_no_violations_on_random_matrices():
    rng = np.random.default_rng(42)
    for k in (3, 4, 5, 6):
        for a in random_correlation(rng, 200, k):
            assert check_bounds(a) == []


def test_corollary2_equality_at_extremal_equicorrelation():
    for k in (3, 4, 5, 6):
        rep = bound_report(equicorrelated(k, -1.0 / (k - 1)))
        assert abs(rep.gain - rep.corollary2_bound) < 1e-9
        assert abs(rep.gain - 1.0 / (k - 1)) < 1e-9


def test_max_size_for_gain():
    assert max_size_for_gain(0.15) == 7
    assert max_size_for_gain(0.2) == 6
    assert max_size_for_gain(0.5) == 3
    assert max_size_for_gain(1.0) == 2
    with pytest.raises(ValueError):
        max_size_for_gain(0.0)
    with pytest.raises(ValueError):
        max_size_for_gain(1.5)


def test_stack_report_rows():
    rng = np.random.default_rng(43)
    mats = random_correlation(rng, 25, 4)
    gain, rho_s, c1, c2, cap, violated = stack_report_rows(mats)
    assert gain.shape == (25,)
    assert not violated.any()
    assert np.all(cap == 1.0 / 3.0)
    for i, a in enumerate(mats):
        rep = bound_report(a)
        assert abs(gain[i] - rep.gain) < 1e-10
        assert abs(c1[i] - rep.corollary1_bound) < 1e-10
        assert abs(c2[i] - rep.corollary2_bound) < 1e-10
        cf = measures.self_canceling_form(a, range(4))
        assert abs(rho_s[i] - cf.rho_s) < 1e-10


def test_violation_formatting():
    v = bounds.BoundViolation(kind="corollary1", column=-1, lhs=0.5, rhs=0.4)
    text = str(v)
    assert "corollary1" in text
