import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from oracles import bd_generator, linear_rates
from parafock import closed_form
from parafock.errors import ConsistencyError, DegenerateRateError, DomainError, ParameterError


def exact_factorial_moment(p, n0, r, beta, mu, T):
    psi = np.zeros(p + 1)
    psi[n0] = 1
    dist = scipy.linalg.expm(T * bd_generator(*linear_rates(p, beta, mu))) @ psi
    return sum(dist[n] * math.perm(n, r) for n in range(p + 1))


def test_interval_factors_at_ln2():
    f = closed_form.interval_factors(1.0, 1.0, math.log(2))
    assert math.isclose(f.I01, 0.75, abs_tol=1e-14)
    assert math.isclose(f.I10, 0.75, abs_tol=1e-14)
    assert math.isclose(f.I00, 1.25, abs_tol=1e-14)
    assert math.isclose(f.I11, 1.25, abs_tol=1e-14)
    assert f.gamma == 2.0 and f.nu == 0.0


def test_first_moment_example_at_ln2():
    val = closed_form.linear_factorial_moment(1, 0, 1, 1.0, 1.0, math.log(2))
    assert abs(val - 0.375) <= 1e-12
    assert abs(closed_form.linear_mean(1, 1.0, 0.0, 0, math.log(2)) - 0.5) <= 1e-15


def test_long_time_mean():
    assert abs(closed_form.linear_mean(2, 1.0, 1.0, 0, 5.0) - 0.9999546) <= 1e-7
    assert abs(closed_form.linear_factorial_moment(2, 0, 1, 1.0, 1.0, 5.0) - exact_factorial_moment(2, 0, 1, 1.0, 1.0, 5.0)) <= 1e-10


def test_zero_birth_from_empty_stays_empty():
    for r in range(4):
        expected = 1.0 if r == 0 else 0.0
        assert closed_form.linear_factorial_moment(3, 0, r, 0.0, 1.0, 2.5) == expected


def test_pure_death_i10_without_series_limit():
    f = closed_form.interval_factors(0.0, 2.0, 1.0)
    assert math.isclose(f.I10, 1 - math.exp(-2.0), rel_tol=1e-14)
    assert f.I01 == 0.0


def test_degenerate_rates():
    with pytest.raises(DegenerateRateError):
        closed_form.interval_factors(0.0, 0.0, 1.0)
    with pytest.raises(DegenerateRateError):
        closed_form.linear_mean(2, 0.0, 0.0, 1, 1.0)
    assert closed_form.linear_mean(2, 0.0, 0.0, 1, 1.0, allow_degenerate=True) == 1.0


def test_parameter_errors():
    with pytest.raises(ParameterError):
        closed_form.linear_factorial_moment(2, 3, 1, 1.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        closed_form.linear_factorial_moment(2, 1, 1, 1.0, 1.0, 1.0, weight="other")


def test_normalisation_failure_raises(monkeypatch):
    good = closed_form.interval_factors

    def skewed(beta, mu, T):
        f = good(beta, mu, T)
        return closed_form.IntervalFactors(f.I00 * 1.01, f.I01, f.I10, f.I11, beta, mu, T)

    monkeypatch.setattr(closed_form, "interval_factors", skewed)
    with pytest.raises(ConsistencyError):
        closed_form.linear_factorial_moment(3, 1, 1, 1.0, 1.0, 1.0)


def test_power_weight_is_raw_moment():
    p, n0, beta, mu, T = 4, 1, 0.7, 1.3, 0.9
    raw = closed_form.linear_factorial_moment(p, n0, 2, beta, mu, T, weight="power")
    fact = closed_form.linear_factorial_moment(p, n0, 2, beta, mu, T)
    mean = closed_form.linear_factorial_moment(p, n0, 1, beta, mu, T)
    assert abs(raw - (fact + mean)) <= 1e-12
    assert abs(raw - fact) > 0.1


def test_i01_series_examples():
    assert abs(closed_form.laplace_I01_series(10.0, 1.0, 1.0, 1) - 0.01) <= 1e-15
    assert abs(closed_form.laplace_I01(10.0, 1.0, 1.0) - 1 / 99) <= 1e-15
    assert abs(closed_form.laplace_I01_series(10.0, 1.0, 1.0, 60) - 1 / 99) <= 1e-15
    partials = [closed_form.laplace_I01_series(3.0, 1.0, 2.0, k) for k in range(1, 30)]
    assert all(b >= a for a, b in zip(partials, partials[1:]))
    assert closed_form.laplace_I01_series(3.0, 0.0, 2.0, 10) == 0.0


def test_i01_series_domain():
    with pytest.raises(DomainError):
        closed_form.laplace_I01_series(0.5, 1.0, 1.0, 10)


@settings(max_examples=80, deadline=None)
@given(
    st.integers(1, 6), st.integers(0, 6), st.integers(0, 3),
    st.floats(0.01, 3), st.floats(0.01, 3), st.floats(0, 4),
)
def test_hypergeometric_matches_exact_evolution(p, n0, r, beta, mu, T):
    n0 = min(n0, p)
    got = closed_form.linear_factorial_moment(p, n0, r, beta, mu, T)
    assert abs(got - exact_factorial_moment(p, n0, r, beta, mu, T)) <= 1e-8 * max(1.0, abs(got))
