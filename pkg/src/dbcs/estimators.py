"""Per-record inverse-propensity estimates and their variance terms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Observation
from .errors import DataQualityError, PositivityError


@dataclass(frozen=True)
class EstimatePair:
    tau_hat: float
    sigma2_hat: float

    def __post_init__(self):
        if not self.sigma2_hat >= 0.0:
            raise DataQualityError(f"sigma2_hat must be nonnegative, got {self.sigma2_hat!r}")


def _check_p1(p1: float) -> None:
    if not (0.0 < p1 < 1.0):
        raise PositivityError(
            f"assignment probability p1 must lie strictly between 0 and 1, got {p1!r}"
        )


def _ipw(arm: int, value: float, p1: float) -> EstimatePair:
    _check_p1(p1)
    if not math.isfinite(value):
        raise DataQualityError(f"outcome must be finite, got {value!r}")
    if arm == 1:
        tau = value / p1
    else:
        tau = -value / (1.0 - p1)
    # the variance term is the square of the realised weighted outcome
    return EstimatePair(tau, tau * tau)


def ipw_estimate(obs: Observation) -> EstimatePair:
    """IPW estimate of the unit effect from the observed arm only.

    Any prediction carried by ``obs`` is ignored.
    """
    return _ipw(obs.arm, obs.outcome, obs.p1)


def proxy_estimate(obs: Observation) -> EstimatePair:
    """IPW estimate applied to the residual ``outcome - prediction``."""
    if obs.prediction is None:
        raise DataQualityError(f"proxy estimate needs a prediction (unit {obs.unit_id}, t={obs.time})")
    if not math.isfinite(obs.prediction):
        raise DataQualityError(f"prediction must be finite, got {obs.prediction!r}")
    return _ipw(obs.arm, obs.outcome - obs.prediction, obs.p1)


def panel_aggregate(pairs: Sequence[EstimatePair]) -> EstimatePair:
    """Collapse one panel step: mean of the estimates, sum of the variance terms."""
    pairs = list(pairs)
    if not pairs:
        raise DataQualityError("panel_aggregate needs at least one estimate")
    tau = math.fsum(p.tau_hat for p in pairs) / len(pairs)
    s2 = math.fsum(p.sigma2_hat for p in pairs)
    return EstimatePair(tau, s2)


def conditional_moments(y1: float, y0: float, p1: float):
    """Moments of the IPW estimate over the assignment draw alone.

    Returns ``(mean, variance, expected_sigma2)`` where the mean equals
    ``y1 - y0`` and ``expected_sigma2 = y1**2 / p1 + y0**2 / (1 - p1)``.
    """
    _check_p1(p1)
    mean = p1 * (y1 / p1) + (1.0 - p1) * (-y0 / (1.0 - p1))
    expected_sigma2 = y1 * y1 / p1 + y0 * y0 / (1.0 - p1)
    # Var = E[tau^2] - (E tau)^2 = (1 - p1)/p1 y1^2 + p1/(1 - p1) y0^2 + 2 y1 y0
    variance = (1.0 - p1) / p1 * y1 * y1 + p1 / (1.0 - p1) * y0 * y0 + 2.0 * y1 * y0
    return mean, variance, expected_sigma2


# ---------------------------------------------------------------------------
# array forms used by the Monte-Carlo harness


def ipw_arrays(arm, value, p1):
    """Vectorised ``(tau_hat, sigma2_hat)`` for arrays of equal shape."""
    arm = np.asarray(arm)
    value = np.asarray(value, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    if np.any(~((p1 > 0.0) & (p1 < 1.0))):
        raise PositivityError("assignment probabilities must lie strictly between 0 and 1")
    if not np.all(np.isfinite(value)):
        raise DataQualityError("outcomes must be finite")
    tau = np.where(arm == 1, value / p1, -value / (1.0 - p1))
    return tau, tau * tau


def panel_arrays(tau, sigma2):
    """Per-step panel aggregates for ``(T, n)`` arrays."""
    tau = np.asarray(tau, dtype=np.float64)
    sigma2 = np.asarray(sigma2, dtype=np.float64)
    if tau.ndim == 1:
        return tau, sigma2
    return tau.mean(axis=1), sigma2.sum(axis=1)


__all__ = [
    "EstimatePair",
    "ipw_estimate",
    "proxy_estimate",
    "panel_aggregate",
    "conditional_moments",
    "ipw_arrays",
    "panel_arrays",
]
