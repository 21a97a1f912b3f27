"""Pure-Python numerical kernels.

This module mirrors ``_ckernels.pyx`` function for function and is used when
the compiled extension is unavailable (or ``DBCS_PURE_PYTHON=1``).  Both
implementations follow the same arithmetic so that results agree to the last
few ulps; the double-double accumulator agrees bit for bit.
"""

import math

import numpy as np

from .errors import NumericalError

BACKEND = "python"

_INV_E = math.exp(-1.0)
_E = math.e
_FPMIN = 1e-300
_SERIES_EPS = 1e-17
_MAX_TERMS = 50_000_000


# ---------------------------------------------------------------------------
# double-double accumulation


def dd_add(hi, lo, x):
    """Add ``x`` to the double-double value ``hi + lo``.

    Returns the renormalised ``(hi, lo)`` pair.
    """
    s = hi + x
    bb = s - hi
    err = (hi - (s - bb)) + (x - bb)
    err += lo
    hi2 = s + err
    lo2 = err - (hi2 - s)
    return hi2, lo2


def compensated_cumsum(x):
    """Running double-double sums of ``x``; returns the ``hi`` parts."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty(x.shape[0], dtype=np.float64)
    hi = 0.0
    lo = 0.0
    for i in range(x.shape[0]):
        hi, lo = dd_add(hi, lo, float(x[i]))
        out[i] = hi
    return out


# ---------------------------------------------------------------------------
# Lambert W, lower branch


def lambert_wm1(x):
    """Lower real branch W_{-1} of the Lambert W function on [-1/e, 0)."""
    if not (x >= -_INV_E and x < 0.0):
        raise ValueError(f"lambert_wm1 requires -1/e <= x < 0, got {x!r}")
    q = 1.0 + _E * x
    if q <= 0.0:
        return -1.0
    if x < -0.25:
        p = -math.sqrt(2.0 * q)
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    else:
        l1 = math.log(-x)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    for _ in range(64):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if abs(dw) <= 1e-15 * abs(w):
            break
    return min(w, -1.0)


# ---------------------------------------------------------------------------
# Kummer 1F1(1; b; z)


def _log_series(b, z):
    # z < b + 1: terms decrease after the first step
    total = 1.0
    term = 1.0
    k = 0
    while True:
        term *= z / (b + k)
        total += term
        k += 1
        if term <= _SERIES_EPS * total:
            return math.log(total)
        if k > _MAX_TERMS:
            raise NumericalError("1F1 series did not converge", b=b, z=z, terms=k)


def _log_poisson_mode(k, x):
    # log of x^k e^-x / Gamma(k + 1) for real k >= 30, without cancelling large terms
    d = (x - k) / k
    inv = 1.0 / k
    inv2 = inv * inv
    stirl = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
    return -k * (d - math.log1p(d)) - 0.5 * math.log(2.0 * math.pi * k) - stirl


def _log_gamma_pref(a, x):
    # a log x - x - lgamma(a); the saddle form keeps O(a) terms from cancelling
    if a >= 30.0:
        return _log_poisson_mode(a, x) + math.log(a)
    return -x + a * math.log(x) - math.lgamma(a)


def _log_upper_gamma_reg(a, x):
    # log Q(a, x) by modified Lentz continued fraction; needs x > a + 1
    bq = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / bq
    h = d
    i = 1
    while True:
        an = -i * (i - a)
        bq += 2.0
        d = an * d + bq
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = bq + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
        i += 1
        if i > 100_000:
            raise NumericalError("incomplete gamma continued fraction did not converge", a=a, x=x)
    return _log_gamma_pref(a, x) + math.log(h)


def _log_gamma_identity(b, z):
    # 1F1(1; b; z) = (b-1) z^(1-b) e^z gamma(b-1, z), used for z >= b + 1
    a = b - 1.0
    log_q = _log_upper_gamma_reg(a, z)
    return math.log(a) - _log_gamma_pref(a, z) + math.log1p(-math.exp(log_q))


def _log_poisson(b, x):
    # 1F1(1; b; -x) = E[(b-1) / (b-1+K)], K ~ Poisson(x)
    a = b - 1.0
    if x < 30.0:
        pmf = math.exp(-x)
        total = 0.0
        k = 0
        while True:
            total += pmf * a / (a + k)
            k += 1
            pmf *= x / k
            if k > x and pmf <= _SERIES_EPS * total:
                return math.log(total)
            if k > _MAX_TERMS:
                raise NumericalError("1F1 Poisson sum did not converge", b=b, z=-x, terms=k)
    k0 = math.floor(x)
    pm = math.exp(_log_poisson_mode(k0, x))
    total = pm * a / (a + k0)
    pmu = pm
    k = k0
    while True:
        k += 1
        pmu *= x / k
        total += pmu * a / (a + k)
        if pmu <= _SERIES_EPS * total:
            break
        if k - k0 > _MAX_TERMS:
            raise NumericalError("1F1 Poisson sum did not converge", b=b, z=-x, terms=k)
    pmd = pm
    k = k0
    while k > 0:
        pmd *= k / x
        k -= 1
        total += pmd * a / (a + k)
        if pmd <= _SERIES_EPS * total:
            break
    return math.log(total)


def log_kummer_1f1_1(b, z):
    """Natural log of 1F1(1; b; z) for b > 0.

    Raises ``NumericalError`` if the function value is not positive, which can
    only happen for b <= 1 and z < 0.
    """
    if not b > 0.0:
        raise ValueError(f"1F1(1; b; z) requires b > 0, got b={b!r}")
    if not math.isfinite(z):
        raise ValueError(f"1F1(1; b; z) requires finite z, got z={z!r}")
    if z == 0.0:
        return 0.0
    if b <= 1.0:
        # contiguous relation F(b) = 1 + (z / b) F(b + 1)
        inner = log_kummer_1f1_1(b + 1.0, z)
        if z > 0.0:
            u = math.log(z / b) + inner
            return u + math.log1p(math.exp(-u)) if u > 0.0 else math.log1p(math.exp(u))
        val = 1.0 + (z / b) * math.exp(inner)
        if val <= 0.0:
            raise NumericalError("1F1(1; b; z) is not positive here", b=b, z=z, value=val)
        return math.log(val)
    if z > 0.0:
        if z < b + 1.0:
            return _log_series(b, z)
        return _log_gamma_identity(b, z)
    return _log_poisson(b, -z)


# ---------------------------------------------------------------------------
# truncated-gamma mixture statistic


def mixture_log_const(rho):
    """log of rho^rho e^-rho / (Gamma(rho) - Gamma(rho, rho))."""
    return math.log(rho) - log_kummer_1f1_1(rho + 1.0, rho)


def mixture_log_stat(a_n, b_n, rho):
    """log of the mixture supermartingale value at (A_n, B_n)."""
    return (
        mixture_log_const(rho)
        - math.log(b_n + rho)
        + log_kummer_1f1_1(b_n + rho + 1.0, a_n + b_n + rho)
    )


def mixture_root(b_n, rho, alpha):
    """Smallest A >= 0 at which the statistic reaches 2 / alpha.

    The statistic is increasing in A, so the set where it stays below the
    threshold is [0, A*) and A* is found by geometric bracketing + bisection.
    """
    log_c = mixture_log_const(rho)
    shift = b_n + rho
    target = math.log(2.0 / alpha) - log_c + math.log(shift)
    b = shift + 1.0
    if log_kummer_1f1_1(b, shift) >= target:
        return 0.0
    lo = 0.0
    hi = 1.0
    doublings = 0
    while log_kummer_1f1_1(b, hi + shift) < target:
        lo = hi
        hi *= 2.0
        doublings += 1
        if doublings > 200:
            raise NumericalError("mixture bracket expansion failed", b_n=b_n, rho=rho, alpha=alpha)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if log_kummer_1f1_1(b, mid + shift) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * hi:
            break
    return 0.5 * (lo + hi)


def mixture_half_widths(s_var, counts, m, rho, alpha):
    """Mixture half-widths m * A*(S / m^2) / count for each step."""
    s_var = np.asarray(s_var, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    out = np.empty(s_var.shape[0], dtype=np.float64)
    m2 = m * m
    for i in range(s_var.shape[0]):
        out[i] = m * mixture_root(float(s_var[i]) / m2, rho, alpha) / float(counts[i])
    return out


def mixture_first_miss(sum_tau, s_var, counts, truth, m, rho, alpha):
    """1-based index of the first step whose mixture band misses ``truth``.

    Returns 0 when every step covers.  Coverage at a step is tested directly
    through the statistic at the true value, which avoids a root solve.
    """
    threshold = math.log(2.0 / alpha)
    m2 = m * m
    for i in range(len(sum_tau)):
        a = abs(float(sum_tau[i]) - float(counts[i]) * float(truth[i])) / m
        if mixture_log_stat(a, float(s_var[i]) / m2, rho) >= threshold:
            return i + 1
    return 0
