"""Truncated-gamma mixture confidence sequence.

The statistic for a candidate effect tau after n folded steps is

    V = C(rho) / (B + rho) * 1F1(1; B + rho + 1; A + B + rho),
    C(rho) = rho / 1F1(1; rho + 1; rho),

with A = sum(tau_hat - tau) / m and B = S / m**2.  V is increasing in A, so
each one-sided bound is the level crossing V = 2 / alpha of a monotone
function and the two-sided band is symmetric about the running mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .core import StreamState
from .errors import ContractError


@dataclass(frozen=True)
class MixtureStats:
    a_n: float
    b_n: float
    rho: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if not self.b_n >= 0.0:
            raise ContractError(f"b_n must be nonnegative, got {self.b_n!r}")
        if not self.m > 0.0:
            raise ContractError(f"m must be positive, got {self.m!r}")
        if not self.rho > 0.0:
            raise ContractError(f"rho must be positive, got {self.rho!r}")

    @classmethod
    def at(cls, state: StreamState, tau: float, m: float, rho: float = 1.0) -> "MixtureStats":
        """Statistics of ``state`` for the candidate effect ``tau`` (lower side)."""
        count = state.n_steps * state.n_units
        total = state.sum_tau * state.n_units
        return cls((total - count * tau) / m, state.s_var / (m * m), rho, m)


def log_kummer_1f1_1(b: float, z: float) -> float:
    """log 1F1(1; b; z) for b > 0."""
    if not b > 0.0:
        raise ContractError(f"1F1(1; b; z) needs b > 0, got b={b!r}")
    return kernels.log_kummer_1f1_1(float(b), float(z))


def kummer_1f1_1(b: float, z: float) -> float:
    """1F1(1; b; z) = sum_k z^k / (b (b+1) ... (b+k-1)); may overflow to inf.

    For b <= 1 and z < 0 the value can be zero or negative, so it is built
    from the contiguous relation F(b) = 1 + (z / b) F(b + 1) instead of logs.
    """
    if b <= 1.0 and z < 0.0 and b > 0.0:
        return 1.0 + (z / b) * kummer_1f1_1(b + 1.0, z)
    lg = log_kummer_1f1_1(b, z)
    return math.exp(lg) if lg < 709.0 else math.inf


def log_mixture_statistic(stats: MixtureStats) -> float:
    return kernels.mixture_log_stat(stats.a_n, stats.b_n, stats.rho)


def mixture_statistic(stats: MixtureStats) -> float:
    lg = log_mixture_statistic(stats)
    return math.exp(lg) if lg < 709.0 else math.inf


def _check(alpha, m, rho):
    if not (0.0 < alpha < 1.0):
        raise ContractError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not m > 0.0:
        raise ContractError(f"m must be positive, got {m!r}")
    if not rho > 0.0:
        raise ContractError(f"rho must be positive, got {rho!r}")


def mixture_half_width(state: StreamState, m: float, rho: float = 1.0, alpha: float = 0.05) -> float:
    """Half-width of the two-sided band, alpha split equally over the sides."""
    _check(alpha, m, rho)
    if state.n_steps < 1:
        return math.inf
    a_star = kernels.mixture_root(state.s_var / (m * m), rho, alpha)
    return m * a_star / (state.n_steps * state.n_units)


def mixture_bound(state: StreamState, m: float, rho: float = 1.0, alpha: float = 0.05, side: str = "lower") -> float:
    """One side of the two-sided mixture band for the running mean."""
    if side not in ("lower", "upper"):
        raise ContractError(f"side must be 'lower' or 'upper', got {side!r}")
    if state.n_steps < 1:
        raise ContractError("mixture_bound needs at least one folded step")
    h = mixture_half_width(state, m, rho, alpha)
    center = state.sum_tau / state.n_steps
    return center - h if side == "lower" else center + h


def mixture_half_widths(s_var, counts, m: float, rho: float = 1.0, alpha: float = 0.05):
    """Half-widths for arrays of variance sums and record counts."""
    _check(alpha, m, rho)
    return kernels.mixture_half_widths(
        np.asarray(s_var, dtype=np.float64), np.asarray(counts, dtype=np.float64), m, rho, alpha
    )


def excludes(sum_tau, s_var, counts, value, m: float, rho: float = 1.0, alpha: float = 0.05) -> int:
    """1-based first step whose band excludes ``value``; 0 if none does.

    ``sum_tau`` is the running total over records (not the running mean) and
    ``value`` may be a scalar or a per-step array.  No root solve is needed.
    """
    _check(alpha, m, rho)
    sum_tau = np.asarray(sum_tau, dtype=np.float64)
    value = np.broadcast_to(np.asarray(value, dtype=np.float64), sum_tau.shape)
    return int(
        kernels.mixture_first_miss(
            sum_tau,
            np.asarray(s_var, dtype=np.float64),
            np.asarray(counts, dtype=np.float64),
            np.ascontiguousarray(value),
            m,
            rho,
            alpha,
        )
    )


__all__ = [
    "MixtureStats",
    "kummer_1f1_1",
    "log_kummer_1f1_1",
    "mixture_statistic",
    "log_mixture_statistic",
    "mixture_bound",
    "mixture_half_width",
    "mixture_half_widths",
    "excludes",
]
