import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from dbcs import asymp_width, exact_eta, exact_width, lambert_w_m1, tune_eta
from dbcs.boundaries import bernstein_constant, eta_objective, exact_width_array, asymp_width_array
from dbcs.errors import ContractError

alphas = st.floats(1e-4, 0.999)
svars = st.floats(0.0, 1e8)
steps = st.integers(1, 10**6)


def test_exact_width_examples(oracle):
    for n, s, m, a, ref in oracle["exact_width"]:
        assert math.isclose(exact_width(n, s, m, a), ref, rel_tol=1e-13)


def test_exact_width_domain():
    with pytest.raises(ContractError):
        exact_width(1, 0.0, 1.0, 1.0)
    with pytest.raises(ContractError):
        exact_width(1, 0.0, 0.0, 0.05)
    assert exact_width(0, 0.0, 1.0, 0.05) == math.inf


def test_asymp_width_examples(oracle):
    for n, s, eta, a, k, ref in oracle["asymp_width"]:
        assert math.isclose(asymp_width(n, s, eta, a, k), ref, rel_tol=1e-13)
    assert asymp_width(0, 0.0, 0.77, 0.05) == math.inf
    with pytest.raises(ContractError):
        asymp_width(1, 1.0, 0.77, 0.0)


def test_asymp_width_huge_s_var_is_finite():
    w = asymp_width(10, 1e300, 0.77, 0.05)
    assert math.isfinite(w) and w > 0


def test_bernstein_constant_c2(oracle):
    assert math.isclose(bernstein_constant(2.0), oracle["bernstein_c2"], rel_tol=1e-14)


def test_bernstein_constant_positive_on_log_grid():
    for m in np.logspace(-6, 6, 2001)[1:-1]:
        assert bernstein_constant(float(m)) > 0.0


def test_bernstein_constant_against_mpmath():
    import mpmath as mp

    mp.mp.dps = 40
    for m in (0.01, 1.0, 9.999999, 10.0, 10.000001, 1e3, 1e6, 1e9):
        mm = mp.mpf(m)
        ref = (mm + 1) / mm * mp.log(1 + 1 / mm) - 1 / mm
        assert math.isclose(bernstein_constant(m), float(ref), rel_tol=1e-14)


@given(steps, svars, st.floats(1e-3, 1e3), alphas, st.floats(1e-6, 1e3))
def test_exact_width_monotone(n, s, m, a, ds):
    w = exact_width(n, s, m, a)
    assert exact_width(n, s + ds, m, a) >= w
    assert exact_width(n + 1, s, m, a) < w
    assert exact_width(n, s, m, min(a * 1.01, 0.9999)) <= w


@given(steps, svars, st.floats(0.05, 5.0), alphas, st.floats(1e-3, 1e3))
def test_asymp_width_monotone(n, s, eta, a, ds):
    w = asymp_width(n, s, eta, a)
    assert asymp_width(n, s + ds, eta, a) > w
    assert asymp_width(n + 1, s, eta, a) < w
    a2 = min(a * 1.05, 0.9999)
    assume(a2 > a)
    assert asymp_width(n, s, eta, a2) < w


@given(steps, svars, st.floats(0.05, 5.0), alphas, st.integers(1, 10**4))
def test_asymp_width_unit_scaling(n, s, eta, a, k):
    assert asymp_width(n, s, eta, a, k) == asymp_width(n * k, s, eta, a, 1)
    assert math.isclose(asymp_width(n, s, eta, a, k), asymp_width(n, s, eta, a) / k, rel_tol=2e-16 * 4)


def test_array_widths_match_scalar():
    n = np.arange(1, 200)
    s = np.linspace(0, 5000, n.size)
    wa = asymp_width_array(n, s, 0.77, 0.05, 3)
    we = exact_width_array(n, s, 2.0, 0.05)
    for i in range(n.size):
        assert wa[i] == asymp_width(int(n[i]), float(s[i]), 0.77, 0.05, 3)
        assert we[i] == exact_width(int(n[i]), float(s[i]), 2.0, 0.05)


def test_lambert_examples(oracle):
    assert lambert_w_m1(-1.0 / math.e) == -1.0
    for x, ref in oracle["lambert"]:
        # dW/dx blows up at -1/e: one ulp in x moves w by ~ ulp / sqrt(1 + e x)
        cond = max(1.0, 1e-16 / max(math.sqrt(max(1.0 + math.e * x, 0.0)), 1e-300) / 1e-13)
        assert math.isclose(lambert_w_m1(x), ref, rel_tol=1e-13 * cond)
    assert abs(lambert_w_m1(-0.0067957) - (-6.926874)) < 1e-6


@pytest.mark.parametrize("x", [0.0, 0.1, -0.5, math.nan])
def test_lambert_domain(x):
    with pytest.raises(ContractError):
        lambert_w_m1(x)


@given(st.floats(-1.0 / math.e, -1e-300, exclude_min=True))
def test_lambert_residual(x):
    w = lambert_w_m1(x)
    assert w <= -1.0
    assert abs(w * math.exp(w) - x) <= 1e-12 * abs(x)


def test_tune_eta_examples(oracle):
    assert abs(tune_eta(0.05, 10).eta - 0.77) <= 0.005
    assert math.isclose(tune_eta(0.05, 10).eta, oracle["tune_eta"]["t10"], rel_tol=1e-13)
    assert math.isclose(tune_eta(0.05, 40).eta, oracle["tune_eta"]["t40"], rel_tol=1e-13)
    assert math.isclose(tune_eta(0.05, 40).eta, tune_eta(0.05, 10).eta / 2, rel_tol=1e-15)
    assert math.isclose(exact_eta(0.05, 10).eta, oracle["tune_eta"]["exact_t10"], rel_tol=1e-13)


def test_tune_eta_domain():
    with pytest.raises(ContractError):
        tune_eta(0.05, 0)
    with pytest.raises(ContractError):
        tune_eta(1.5, 10)


def _stationarity(eta, t, alpha):
    x = eta * eta
    h = 1e-6 * x
    return (eta_objective(x + h, t, alpha) - eta_objective(x - h, t, alpha)) / (2 * h)


def _is_local_min(eta, t, alpha):
    w = asymp_width(t, float(t), eta, alpha)
    return w <= asymp_width(t, float(t), eta * 1.1, alpha) and w <= asymp_width(t, float(t), eta * 0.9, alpha)


@pytest.mark.xfail(strict=True, reason="closed-form eta rule is not the stationary point of its objective; see exact_eta")
@pytest.mark.parametrize("alpha,t", [(0.05, 10), (0.1, 50)])
def test_tune_eta_is_stationary(alpha, t):
    assert abs(_stationarity(tune_eta(alpha, t).eta, t, alpha)) < 1e-8


@pytest.mark.xfail(strict=True, reason="closed-form eta rule is not the stationary point of its objective; see exact_eta")
@pytest.mark.parametrize("alpha,t", [(0.05, 10), (0.1, 50)])
def test_tune_eta_is_local_min(alpha, t):
    assert _is_local_min(tune_eta(alpha, t).eta, t, alpha)


@given(st.floats(1e-4, 0.5), st.integers(1, 10**4))
def test_exact_eta_is_stationary(alpha, t):
    eta = exact_eta(alpha, t).eta
    x = eta * eta
    scale = eta_objective(x, t, alpha) / x
    assert abs(_stationarity(eta, t, alpha)) < 1e-8 * max(1.0, scale)


@given(st.floats(1e-4, 0.5), st.integers(1, 10**4))
def test_exact_eta_is_local_min(alpha, t):
    assert _is_local_min(exact_eta(alpha, t).eta, t, alpha)
