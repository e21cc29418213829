import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats
from scipy.special import ndtri

from swor_ucl.errors import DomainError, InfiniteDivergenceError, SingularInputError
from swor_ucl.special import (
    EntropyPair,
    eps_div,
    eps_div_solve,
    pois_cdf,
    psi,
    psi_inverse,
    psi_times_quantile,
    rel_entropy,
    s_div,
    s_div_solve,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_quantile,
    t_div,
    t_pois,
)


def test_normal_basics():
    assert std_normal_pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
    assert std_normal_quantile(0.5) == 0.0
    assert std_normal_cdf(std_normal_quantile(0.1)) == pytest.approx(0.1, abs=1e-9)


@pytest.mark.parametrize("x", [-30.0, -8.0, -1.3, 0.0, 0.7, 5.0])
def test_cdf_matches_scipy(x):
    assert std_normal_cdf(x) == pytest.approx(stats.norm.cdf(x), rel=1e-13)


def test_quantile_log_grid_roundtrip():
    ps = np.concatenate([np.logspace(-10, -0.31, 200), 1 - np.logspace(-10, -0.31, 200)])
    for p in ps:
        x = std_normal_quantile(float(p))
        assert abs(std_normal_cdf(x) - p) <= 1e-9 * p
        assert x == pytest.approx(ndtri(p), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_quantile_rejects_boundary(p):
    with pytest.raises(DomainError):
        std_normal_quantile(p)


def test_psi_values_and_singularity():
    q = ndtri(0.1)
    assert psi(0.1) == pytest.approx(stats.norm.pdf(q) / (0.1 * q), rel=1e-12)
    assert psi(0.1) < 0
    with pytest.raises(SingularInputError):
        psi(0.5)
    assert psi(1 - 1e-9) < 1e-8
    assert psi(0.5 + 1e-9) > 1e7


def test_psi_decreasing_above_half():
    ds = np.linspace(0.51, 0.99, 49)
    vals = [psi(float(d)) for d in ds]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_psi_times_quantile():
    assert psi_times_quantile(0.5) == pytest.approx(2 / math.sqrt(2 * math.pi), rel=1e-14)
    for d in (0.1, 0.3, 0.7):
        assert psi_times_quantile(d) == pytest.approx(std_normal_quantile(d) * psi(d), rel=1e-12)


@pytest.mark.parametrize("y", [0.01, 0.5, 1.0, 10.0, 1e3])
def test_psi_inverse_roundtrip(y):
    d = psi_inverse(y)
    assert 0.5 < d < 1
    assert psi(d) == pytest.approx(y, rel=1e-9)


def test_eta_increasing():
    xs = np.linspace(0, 6, 601)
    eta = [x * std_normal_cdf(x) / std_normal_pdf(x) for x in xs]
    assert all(b > a for a, b in zip(eta, eta[1:]))


def test_rel_entropy():
    assert rel_entropy(0.3, 0.3) == 0.0
    assert rel_entropy(0.0, 0.4) == pytest.approx(-math.log(0.6), rel=1e-15)
    assert rel_entropy(0.2, 0.5) == pytest.approx(0.2 * math.log(0.4) + 0.8 * math.log(1.6), rel=1e-14)
    with pytest.raises(InfiniteDivergenceError):
        rel_entropy(0.1, 0.0)
    with pytest.raises(InfiniteDivergenceError):
        rel_entropy(0.9, 1.0)
    assert not EntropyPair(0.5, 1.0).finite
    assert EntropyPair(1.0, 1.0).finite


@given(st.floats(0, 1), st.floats(1e-6, 1 - 1e-6))
def test_rel_entropy_matches_scipy(p, q):
    expected = stats.entropy([p, 1 - p], [q, 1 - q])
    assert rel_entropy(p, q) == pytest.approx(expected, rel=1e-9, abs=1e-14)


def test_pois_cdf():
    assert pois_cdf(3, 0.0) == 1.0
    assert pois_cdf(0, 1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert pois_cdf(2, 1.0) == pytest.approx(2.5 * math.exp(-1), rel=1e-14)
    for k in (0, 1, 5, 40):
        for x in (0.1, 3.0, 50.0):
            assert pois_cdf(k, x) == pytest.approx(stats.poisson.cdf(k, x), rel=1e-12)
    xs = np.linspace(0.01, 20, 200)
    vals = [pois_cdf(4, float(x)) for x in xs]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_t_pois():
    assert t_pois(0, math.exp(-1)).value == pytest.approx(1.0, rel=1e-15)
    assert t_pois(0, 0.1).value == pytest.approx(math.log(10), rel=1e-15)
    sol = t_pois(2, 0.1)
    assert abs(sol.residual) <= 1e-12
    # scipy's gamma quantile gives the same point: Pois(k, t) = 1 - Gamma(k+1).cdf(t)
    assert sol.value == pytest.approx(stats.gamma.isf(0.1, 3), rel=1e-10)


def test_t_div():
    assert t_div(0.0, 0.5).value == pytest.approx(1 / math.log(2), rel=1e-15)
    sol = t_div(0.2, 0.5)
    assert sol.value >= 0.4
    assert abs(sol.value * rel_entropy(0.2 / sol.value, 0.5) - 1) <= 1e-12


def test_eps_and_s_div():
    assert eps_div(0.0, 0.3) == pytest.approx(1 - math.exp(-0.3), rel=1e-15)
    e = eps_div(0.1, 0.05)
    assert 0.1 < e < 1
    assert rel_entropy(0.1, e) == pytest.approx(0.05, abs=1e-12)
    assert s_div(0.2, -math.log1p(-0.2)) == 0.0
    with pytest.raises(DomainError):
        s_div(0.2, 0.3)


@settings(max_examples=200)
@given(st.integers(0, 60), st.floats(1e-8, 0.999))
def test_t_pois_roundtrip(k, delta):
    sol = t_pois(k, delta)
    assert sol.iterations <= 200
    assert pois_cdf(k, sol.value) == pytest.approx(delta, rel=1e-10)


@settings(max_examples=200)
@given(st.floats(0, 5), st.floats(0.01, 0.99))
def test_t_div_roundtrip(gamma, x):
    sol = t_div(gamma, x)
    assert sol.value >= gamma / x * (1 - 1e-15)
    assert sol.value * rel_entropy(min(gamma / sol.value, x), x) == pytest.approx(1.0, rel=1e-10)


@settings(max_examples=200)
@given(st.floats(0, 0.95), st.floats(1e-4, 3))
def test_eps_div_roundtrip(s, r):
    sol = eps_div_solve(s, r)
    e = sol.value
    assert s <= e < 1
    assert abs(sol.residual) <= 1e-12
    if e == math.nextafter(1.0, 0.0):
        # the root lies above the last double below 1; D increases in eps
        assert rel_entropy(s, e) <= r
        return
    # rounding eps to a double moves D by up to |dD/deps| * ulp(eps)
    slack = (e - s) / (e * (1 - e)) * 2 * np.spacing(e)
    assert abs(rel_entropy(s, e) - r) <= 1e-10 * r + slack


@settings(max_examples=200)
@given(st.floats(0.01, 0.99), st.floats(0.01, 1.0))
def test_s_div_roundtrip(eps, frac):
    r = frac * -math.log1p(-eps)
    sol = s_div_solve(eps, r)
    assert 0 <= sol.value <= eps
    assert rel_entropy(sol.value, eps) == pytest.approx(r, rel=1e-10)
