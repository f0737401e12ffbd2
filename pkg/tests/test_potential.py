import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from hddthresh.errors import ConfigurationError, DomainError
from hddthresh.potential import (PotentialCurve, potential_curve, potential_threshold_finite, potential_value,
                                 scaled_potential_threshold, scaled_potential_value)


def _phi(lam, k):
    return mpmath.gammainc(k + 1, 0, lam, regularized=True)


def _closed_scaled(lam, rho, t):
    mpmath.mp.dps = 40
    lam = mpmath.mpf(lam)
    g = lam * _phi(lam, t - 1) - t * _phi(lam, t)
    return float(lam ** 2 / 2 - rho * g)


def _closed_finite(x, p, n, t):
    mpmath.mp.dps = 40
    x = mpmath.mpf(x)
    a, b = t, n - t
    g = x * mpmath.betainc(a, b, 0, x, regularized=True) - mpmath.mpf(a) / (a + b) * mpmath.betainc(
        a + 1, b, 0, x, regularized=True)
    return float(x ** 2 / 2 - p * g)


@given(st.floats(0, 40), st.floats(0, 20), st.integers(2, 7))
def test_scaled_potential_closed_form(lam, rho, t):
    assert scaled_potential_value(lam, rho, t) == pytest.approx(_closed_scaled(lam, rho, t), rel=1e-9, abs=1e-11)


@given(st.floats(0, 1), st.floats(0, 0.1))
def test_finite_potential_closed_form(x, p):
    assert potential_value(x, p, 255, 3) == pytest.approx(_closed_finite(x, p, 255, 3), rel=1e-9, abs=1e-11)


def test_potential_basics():
    assert scaled_potential_value(0.0, 5.0, 3) == 0.0
    assert scaled_potential_value(3.0, 0.0, 3) == pytest.approx(4.5)
    assert potential_value(0.2, 0.0, 63, 2) == pytest.approx(0.02)
    with pytest.raises(ConfigurationError):
        potential_value(1.5, 0.1, 63, 2)
    with pytest.raises(ConfigurationError):
        scaled_potential_value(-1.0, 1.0, 3)


@pytest.mark.parametrize("t", [2, 3, 5])
def test_scaled_threshold_properties(t):
    res = scaled_potential_threshold(t, tol=1e-6)
    rho = res.threshold
    assert res.extra["direct"] == pytest.approx(rho, abs=1e-4)
    assert rho >= 2 * t - 2
    # at the threshold the nontrivial minimum touches zero and is stationary
    s = res.extra["argmin_at_failure"]
    assert s > 0
    assert scaled_potential_value(s, rho, t) == pytest.approx(0.0, abs=1e-4)
    h = 1e-4
    deriv = (scaled_potential_value(s + h, rho, t) - scaled_potential_value(s - h, rho, t)) / (2 * h)
    assert abs(deriv) < 1e-3
    assert scaled_potential_value(s, rho * 1.01, t) < 0


def test_scaled_threshold_values_t3():
    assert scaled_potential_threshold(3).threshold == pytest.approx(5.754, abs=5e-3)


def test_domain_error_when_cap_too_small():
    with pytest.raises(DomainError):
        scaled_potential_threshold(4, cap_factor=1.0)


def test_scaled_threshold_needs_t2():
    with pytest.raises(ConfigurationError):
        scaled_potential_threshold(1)


def test_finite_threshold_approaches_scaled():
    r255 = potential_threshold_finite(255, 3).per_constraint
    r1023 = potential_threshold_finite(1023, 3).per_constraint
    rho = scaled_potential_threshold(3).threshold
    assert abs(r1023 - rho) < abs(r255 - rho)
    assert r255 == pytest.approx(potential_threshold_finite(255, 3).extra["direct"] * 255, abs=1e-3)


def test_min_potential_nonincreasing():
    curve_mins = [potential_curve(rho, 4, points=801).values.min() for rho in np.linspace(6, 9, 7)]
    assert all(b <= a + 1e-12 for a, b in zip(curve_mins, curve_mins[1:]))


def test_curve_csv_and_validation():
    c = potential_curve(5.0, 3, points=11)
    rows = c.to_csv().splitlines()
    assert rows[0] == "state,U,parameter,regime"
    assert rows[1] == "0.0,0.0,5.0,scaled"
    assert c.values[5] == pytest.approx(scaled_potential_value(c.states[5], 5.0, 3), abs=1e-10)
    fin = potential_curve(0.02, 3, n=255, upper=0.1, points=5)
    assert fin.regime == "finite_n" and fin.states[-1] == pytest.approx(0.1)
    with pytest.raises(ConfigurationError):
        PotentialCurve(np.array([0.1, 0.2]), np.zeros(2), 1.0, "scaled")
    with pytest.raises(ConfigurationError):
        PotentialCurve(np.array([0.0, 0.2]), np.zeros(2), 1.0, "weird")
