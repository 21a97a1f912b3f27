"""Closed-form confidence-sequence half-widths and the eta tuning rule."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import ContractError

DEFAULT_ETA = 0.77
DEFAULT_T_STAR = 10

_INV_E = math.exp(-1.0)


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ContractError(f"alpha must lie in (0, 1), got {alpha!r}")


def _check_s_var(s_var: float) -> None:
    if not s_var >= 0.0:
        raise ContractError(f"s_var must be nonnegative, got {s_var!r}")


def bernstein_constant(m: float) -> float:
    """c(m) = ((m + 1)/m) log(1 + 1/m) - 1/m, computed without cancellation.

    With u = 1/m this is (1 + u) log1p(u) - u, whose series
    sum_{k>=2} (-1)^k u^k / (k (k - 1)) is used for small u.
    """
    if not (m > 0.0):
        raise ContractError(f"m must be positive, got {m!r}")
    u = 1.0 / m
    if u > 0.1:
        return (1.0 + u) * math.log1p(u) - u
    total = 0.0
    term = u
    for k in range(2, 40):
        term *= -u if k > 2 else u
        total += term / (k * (k - 1))
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def exact_width(n: int, s_var: float, m: float, alpha: float) -> float:
    """Half-width of the non-asymptotic sequence for outcomes bounded by m."""
    _check_alpha(alpha)
    if not (m > 0.0):
        raise ContractError(f"m must be positive, got {m!r}")
    _check_s_var(s_var)
    if n < 0:
        raise ContractError(f"n must be nonnegative, got {n!r}")
    if n == 0:
        return math.inf
    return m * (m + 1.0) / n * math.log(2.0 / alpha) + (s_var / n) * bernstein_constant(m)


def _asymp_radical(s_var, eta, alpha):
    # sqrt(((S eta^2 + 1)/eta^2) log((S eta^2 + 1)/alpha^2)), written so that
    # neither factor overflows for huge S
    a = s_var + 1.0 / (eta * eta)
    b = np.log1p(s_var * eta * eta) - 2.0 * math.log(alpha)
    return np.sqrt(a) * np.sqrt(b)


def asymp_width(n_steps: int, s_var: float, eta: float, alpha: float, n_units: int = 1) -> float:
    """Half-width of the asymptotic sequence after ``n_steps`` steps of ``n_units`` units."""
    _check_alpha(alpha)
    if not (eta > 0.0):
        raise ContractError(f"eta must be positive, got {eta!r}")
    _check_s_var(s_var)
    if n_units < 1:
        raise ContractError(f"n_units must be positive, got {n_units!r}")
    if n_steps < 0:
        raise ContractError(f"n_steps must be nonnegative, got {n_steps!r}")
    if n_steps == 0:
        return math.inf
    return float(_asymp_radical(s_var, eta, alpha)) / (n_steps * n_units)


def exact_width_array(n, s_var, m: float, alpha: float):
    """Vectorised :func:`exact_width` over arrays of counts and variance sums."""
    _check_alpha(alpha)
    n = np.asarray(n, dtype=np.float64)
    s_var = np.asarray(s_var, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return m * (m + 1.0) / n * math.log(2.0 / alpha) + (s_var / n) * bernstein_constant(m)


def asymp_width_array(n_steps, s_var, eta: float, alpha: float, n_units=1):
    """Vectorised :func:`asymp_width`; ``n_units`` may be an array."""
    _check_alpha(alpha)
    n_steps = np.asarray(n_steps, dtype=np.float64)
    s_var = np.asarray(s_var, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return _asymp_radical(s_var, eta, alpha) / (n_steps * np.asarray(n_units, dtype=np.float64))


# ---------------------------------------------------------------------------
# eta tuning


def lambert_w_m1(x: float) -> float:
    """Lower branch W_{-1}(x) for -1/e <= x < 0."""
    x = float(x)
    if not (-_INV_E <= x < 0.0):
        # allow the rounding of -1/e itself
        if abs(x + _INV_E) <= 4.0 * np.finfo(float).eps * _INV_E:
            return -1.0
        raise ContractError(f"lambert_w_m1 needs -1/e <= x < 0, got {x!r}")
    return kernels.lambert_wm1(x)


@dataclass(frozen=True)
class EtaChoice:
    eta: float
    t_star: int
    alpha: float


def _check_t_star(t_star: int) -> None:
    if not (isinstance(t_star, (int, np.integer)) and t_star >= 1):
        raise ContractError(f"t_star must be a positive integer, got {t_star!r}")


def tune_eta(alpha: float = 0.05, t_star: int = DEFAULT_T_STAR) -> EtaChoice:
    """Reference closed-form eta, sqrt((-W_{-1}(-alpha^2 e) - 1) / t_star).

    This is the rule behind the default eta of 0.77.  It is not the exact
    minimiser of :func:`eta_objective`; see :func:`exact_eta` for that.
    """
    _check_alpha(alpha)
    _check_t_star(t_star)
    x = -alpha * alpha * math.e
    w = lambert_w_m1(x)
    return EtaChoice(math.sqrt((-w - 1.0) / t_star), int(t_star), float(alpha))


def exact_eta(alpha: float = 0.05, t_star: int = DEFAULT_T_STAR) -> EtaChoice:
    """Exact minimiser of :func:`eta_objective`, sqrt((-W_{-1}(-alpha^2 / e) - 1) / t_star)."""
    _check_alpha(alpha)
    _check_t_star(t_star)
    w = lambert_w_m1(-alpha * alpha / math.e)
    return EtaChoice(math.sqrt((-w - 1.0) / t_star), int(t_star), float(alpha))


def eta_objective(x: float, t: float, alpha: float) -> float:
    """Squared unit-variance width at step t as a function of x = eta^2."""
    return (t * x + 1.0) / (t * t * x) * math.log((t * x + 1.0) / (alpha * alpha))


__all__ = [
    "DEFAULT_ETA",
    "DEFAULT_T_STAR",
    "bernstein_constant",
    "exact_width",
    "asymp_width",
    "exact_width_array",
    "asymp_width_array",
    "lambert_w_m1",
    "EtaChoice",
    "tune_eta",
    "exact_eta",
    "eta_objective",
]
