# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels; see ``_pykernels`` for the reference twin."""

from libc.math cimport exp, log, log1p, sqrt, fabs, floor, lgamma, isfinite

import numpy as np

from .errors import NumericalError

BACKEND = "cython"

cdef double _INV_E = exp(-1.0)
cdef double _E = exp(1.0)
cdef double _PI = 3.141592653589793
cdef double _FPMIN = 1e-300
cdef double _SERIES_EPS = 1e-17
cdef long _MAX_TERMS = 50000000


# ---------------------------------------------------------------------------
# double-double accumulation

cdef inline void _dd_add(double* hi, double* lo, double x) noexcept nogil:
    cdef double s = hi[0] + x
    cdef double bb = s - hi[0]
    cdef double err = (hi[0] - (s - bb)) + (x - bb)
    err += lo[0]
    cdef double hi2 = s + err
    lo[0] = err - (hi2 - s)
    hi[0] = hi2


def dd_add(double hi, double lo, double x):
    _dd_add(&hi, &lo, x)
    return hi, lo


def compensated_cumsum(x):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double hi = 0.0, lo = 0.0
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            _dd_add(&hi, &lo, xv[i])
            ov[i] = hi
    return out


# ---------------------------------------------------------------------------
# Lambert W, lower branch

def lambert_wm1(double x):
    if not (x >= -_INV_E and x < 0.0):
        raise ValueError(f"lambert_wm1 requires -1/e <= x < 0, got {x!r}")
    cdef double q = 1.0 + _E * x
    cdef double p, l1, l2, w, ew, f, wp1, dw
    cdef int it
    if q <= 0.0:
        return -1.0
    if x < -0.25:
        p = -sqrt(2.0 * q)
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    else:
        l1 = log(-x)
        l2 = log(-l1)
        w = l1 - l2 + l2 / l1
    for it in range(64):
        ew = exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if fabs(dw) <= 1e-15 * fabs(w):
            break
    return w if w < -1.0 else -1.0


# ---------------------------------------------------------------------------
# Kummer 1F1(1; b; z)
# status codes: 0 ok, 1 no convergence, 2 non-positive value

cdef int _log_series(double b, double z, double* out) noexcept nogil:
    cdef double total = 1.0, term = 1.0
    cdef long k = 0
    while True:
        term *= z / (b + k)
        total += term
        k += 1
        if term <= _SERIES_EPS * total:
            out[0] = log(total)
            return 0
        if k > _MAX_TERMS:
            return 1


cdef inline double _log_poisson_mode(double k, double x) noexcept nogil:
    cdef double d = (x - k) / k
    cdef double inv = 1.0 / k
    cdef double inv2 = inv * inv
    cdef double stirl = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
    return -k * (d - log1p(d)) - 0.5 * log(2.0 * _PI * k) - stirl


cdef inline double _log_gamma_pref(double a, double x) noexcept nogil:
    if a >= 30.0:
        return _log_poisson_mode(a, x) + log(a)
    return -x + a * log(x) - lgamma(a)


cdef int _log_upper_gamma_reg(double a, double x, double* out) noexcept nogil:
    cdef double bq = x + 1.0 - a
    cdef double c = 1.0 / _FPMIN
    cdef double d = 1.0 / bq
    cdef double h = d
    cdef double an, delta
    cdef long i = 1
    while True:
        an = -i * (i - a)
        bq += 2.0
        d = an * d + bq
        if fabs(d) < _FPMIN:
            d = _FPMIN
        c = bq + an / c
        if fabs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < 1e-16:
            break
        i += 1
        if i > 100000:
            return 1
    out[0] = _log_gamma_pref(a, x) + log(h)
    return 0


cdef int _log_gamma_identity(double b, double z, double* out) noexcept nogil:
    cdef double a = b - 1.0
    cdef double log_q
    if _log_upper_gamma_reg(a, z, &log_q):
        return 1
    out[0] = log(a) - _log_gamma_pref(a, z) + log1p(-exp(log_q))
    return 0


cdef int _log_poisson(double b, double x, double* out) noexcept nogil:
    cdef double a = b - 1.0
    cdef double pmf, total, pm, pmu, pmd, k0
    cdef double k
    if x < 30.0:
        pmf = exp(-x)
        total = 0.0
        k = 0.0
        while True:
            total += pmf * a / (a + k)
            k += 1.0
            pmf *= x / k
            if k > x and pmf <= _SERIES_EPS * total:
                out[0] = log(total)
                return 0
            if k > _MAX_TERMS:
                return 1
    k0 = floor(x)
    pm = exp(_log_poisson_mode(k0, x))
    total = pm * a / (a + k0)
    pmu = pm
    k = k0
    while True:
        k += 1.0
        pmu *= x / k
        total += pmu * a / (a + k)
        if pmu <= _SERIES_EPS * total:
            break
        if k - k0 > _MAX_TERMS:
            return 1
    pmd = pm
    k = k0
    while k > 0.0:
        pmd *= k / x
        k -= 1.0
        total += pmd * a / (a + k)
        if pmd <= _SERIES_EPS * total:
            break
    out[0] = log(total)
    return 0


cdef int _log_kummer(double b, double z, double* out) noexcept nogil:
    cdef double inner, u, val
    cdef int status
    if z == 0.0:
        out[0] = 0.0
        return 0
    if b <= 1.0:
        status = _log_kummer(b + 1.0, z, &inner)
        if status:
            return status
        if z > 0.0:
            u = log(z / b) + inner
            if u > 0.0:
                out[0] = u + log1p(exp(-u))
            else:
                out[0] = log1p(exp(u))
            return 0
        val = 1.0 + (z / b) * exp(inner)
        if val <= 0.0:
            return 2
        out[0] = log(val)
        return 0
    if z > 0.0:
        if z < b + 1.0:
            return _log_series(b, z, out)
        return _log_gamma_identity(b, z, out)
    return _log_poisson(b, -z, out)


cdef double _checked_log_kummer(double b, double z) except? -1.0:
    cdef double out
    cdef int status = _log_kummer(b, z, &out)
    if status == 1:
        raise NumericalError("1F1 evaluation did not converge", b=b, z=z)
    if status == 2:
        raise NumericalError("1F1(1; b; z) is not positive here", b=b, z=z)
    return out


def log_kummer_1f1_1(double b, double z):
    if not b > 0.0:
        raise ValueError(f"1F1(1; b; z) requires b > 0, got b={b!r}")
    if not isfinite(z):
        raise ValueError(f"1F1(1; b; z) requires finite z, got z={z!r}")
    return _checked_log_kummer(b, z)


# ---------------------------------------------------------------------------
# truncated-gamma mixture statistic

cdef double _mixture_log_const(double rho) except? -1.0:
    return log(rho) - _checked_log_kummer(rho + 1.0, rho)


def mixture_log_const(double rho):
    return _mixture_log_const(rho)


cdef double _mixture_log_stat(double a_n, double b_n, double rho, double log_c) except? -1.0:
    return log_c - log(b_n + rho) + _checked_log_kummer(b_n + rho + 1.0, a_n + b_n + rho)


def mixture_log_stat(double a_n, double b_n, double rho):
    return _mixture_log_stat(a_n, b_n, rho, _mixture_log_const(rho))


cdef double _mixture_root(double b_n, double rho, double alpha, double log_c) except? -1.0:
    cdef double shift = b_n + rho
    cdef double target = log(2.0 / alpha) - log_c + log(shift)
    cdef double b = shift + 1.0
    cdef double lo = 0.0, hi = 1.0, mid
    cdef int doublings = 0, it
    if _checked_log_kummer(b, shift) >= target:
        return 0.0
    while _checked_log_kummer(b, hi + shift) < target:
        lo = hi
        hi *= 2.0
        doublings += 1
        if doublings > 200:
            raise NumericalError("mixture bracket expansion failed", b_n=b_n, rho=rho, alpha=alpha)
    for it in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _checked_log_kummer(b, mid + shift) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * hi:
            break
    return 0.5 * (lo + hi)


def mixture_root(double b_n, double rho, double alpha):
    return _mixture_root(b_n, rho, alpha, _mixture_log_const(rho))


def mixture_half_widths(s_var, counts, double m, double rho, double alpha):
    cdef const double[::1] sv = np.ascontiguousarray(s_var, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(counts, dtype=np.float64)
    cdef Py_ssize_t n = sv.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double log_c = _mixture_log_const(rho)
    cdef double m2 = m * m
    for i in range(n):
        ov[i] = m * _mixture_root(sv[i] / m2, rho, alpha, log_c) / cv[i]
    return out


def mixture_first_miss(sum_tau, s_var, counts, truth, double m, double rho, double alpha):
    cdef const double[::1] st = np.ascontiguousarray(sum_tau, dtype=np.float64)
    cdef const double[::1] sv = np.ascontiguousarray(s_var, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(counts, dtype=np.float64)
    cdef const double[::1] tv = np.ascontiguousarray(truth, dtype=np.float64)
    cdef Py_ssize_t n = st.shape[0], i
    cdef double threshold = log(2.0 / alpha)
    cdef double log_c = _mixture_log_const(rho)
    cdef double m2 = m * m
    cdef double a
    for i in range(n):
        a = fabs(st[i] - cv[i] * tv[i]) / m
        if _mixture_log_stat(a, sv[i] / m2, rho, log_c) >= threshold:
            return i + 1
    return 0
