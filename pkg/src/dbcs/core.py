"""Domain types and the streaming accumulator shared by every design."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

from ._backend import kernels
from .errors import ContractError, DataQualityError, PositivityError

SNAPSHOT_VERSION = "1"


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


@dataclass(frozen=True)
class Observation:
    """One experimental record.

    ``p1`` is the probability that ``arm`` equals 1 given the past, as known to
    the assigner.  ``prediction`` is an optional proxy outcome in the units of
    ``outcome``.
    """

    unit_id: int
    time: int
    arm: int
    outcome: float
    p1: float
    prediction: Optional[float] = None

    def __post_init__(self):
        if not _is_int(self.unit_id) or self.unit_id < 0:
            raise DataQualityError(f"unit_id must be a nonnegative integer, got {self.unit_id!r}")
        if not _is_int(self.time) or self.time < 1:
            raise DataQualityError(f"time must be a positive integer, got {self.time!r}")
        if self.arm not in (0, 1) or isinstance(self.arm, float):
            raise DataQualityError(f"arm must be 0 or 1, got {self.arm!r}")
        if not math.isfinite(self.outcome):
            raise DataQualityError(f"outcome must be finite, got {self.outcome!r}")
        if not (0.0 < self.p1 < 1.0):
            raise PositivityError(
                f"assignment probability p1 must lie strictly between 0 and 1, got {self.p1!r}"
            )
        if self.prediction is not None and not math.isfinite(self.prediction):
            raise DataQualityError(f"prediction must be finite, got {self.prediction!r}")


@dataclass(frozen=True)
class StreamState:
    """Running sufficient statistics of one confidence sequence.

    ``sum_tau`` and ``s_var`` are double-double accumulators; the ``*_lo``
    fields hold the compensation terms and are part of the value.
    """

    n_steps: int = 0
    sum_tau: float = 0.0
    s_var: float = 0.0
    n_units: int = 1
    sum_tau_lo: float = field(default=0.0, repr=False)
    s_var_lo: float = field(default=0.0, repr=False)

    @property
    def mean(self) -> float:
        """Running mean of the folded estimates; NaN before the first step."""
        if self.n_steps == 0:
            return math.nan
        return self.sum_tau / self.n_steps


@dataclass(frozen=True)
class BoundaryConfig:
    """Tuning constants for the boundary families.

    ``m_bound`` is M / p_min and is required by the exact and mixture
    boundaries; ``rho`` is the truncated-gamma mixing parameter.
    """

    alpha: float = 0.05
    eta: float = 0.77
    m_bound: Optional[float] = None
    rho: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ContractError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not (self.eta > 0.0 and math.isfinite(self.eta)):
            raise ContractError(f"eta must be positive and finite, got {self.eta!r}")
        if self.m_bound is not None and not (self.m_bound > 0.0 and math.isfinite(self.m_bound)):
            raise ContractError(f"m_bound must be positive and finite, got {self.m_bound!r}")
        if not (self.rho > 0.0 and math.isfinite(self.rho)):
            raise ContractError(f"rho must be positive and finite, got {self.rho!r}")


@dataclass(frozen=True)
class ConfidenceBand:
    step: int
    center: float
    half_width: float
    lower: float
    upper: float

    def __post_init__(self):
        if not self.half_width >= 0.0:
            raise ContractError(f"half_width must be nonnegative, got {self.half_width!r}")

    @classmethod
    def around(cls, step: int, center: float, half_width: float) -> "ConfidenceBand":
        return cls(step, center, half_width, center - half_width, center + half_width)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def fold(state: StreamState, tau_hat: float, sigma2_hat: float, n_units: Optional[int] = None) -> StreamState:
    """Fold one step's estimate and variance term into ``state``.

    ``n_units`` overrides the unit count (panel designs); by default it is kept.
    """
    tau_hat = float(tau_hat)
    sigma2_hat = float(sigma2_hat)
    if not math.isfinite(tau_hat) or not math.isfinite(sigma2_hat):
        raise DataQualityError(f"non-finite estimate: tau_hat={tau_hat!r}, sigma2_hat={sigma2_hat!r}")
    if sigma2_hat < 0.0:
        raise DataQualityError(f"sigma2_hat must be nonnegative, got {sigma2_hat!r}")
    if n_units is None:
        n_units = state.n_units
    elif not _is_int(n_units) or n_units < 1:
        raise DataQualityError(f"n_units must be a positive integer, got {n_units!r}")
    hi_t, lo_t = kernels.dd_add(state.sum_tau, state.sum_tau_lo, tau_hat)
    hi_s, lo_s = kernels.dd_add(state.s_var, state.s_var_lo, sigma2_hat)
    return StreamState(state.n_steps + 1, hi_t, hi_s, n_units, lo_t, lo_s)


def fold_many(state: StreamState, tau_hats, sigma2_hats) -> StreamState:
    """Fold a batch of steps in order; identical to repeated :func:`fold`."""
    tau_hats = list(tau_hats)
    sigma2_hats = list(sigma2_hats)
    if len(tau_hats) != len(sigma2_hats):
        raise DataQualityError("tau_hats and sigma2_hats differ in length")
    for t, s in zip(tau_hats, sigma2_hats):
        state = fold(state, t, s)
    return state


# ---------------------------------------------------------------------------
# snapshots

_SNAPSHOT_FLOATS = ("sum_tau", "sum_tau_lo", "s_var", "s_var_lo")
_SNAPSHOT_INTS = ("n_steps", "n_units")


def snapshot(state: StreamState) -> dict:
    """Flat record of decimal strings that restores to ``state`` exactly."""
    rec = {"version": SNAPSHOT_VERSION}
    for name in _SNAPSHOT_INTS:
        rec[name] = str(getattr(state, name))
    for name in _SNAPSHOT_FLOATS:
        rec[name] = repr(float(getattr(state, name)))
    return rec


def restore(record: Mapping[str, str]) -> StreamState:
    """Rebuild a state from :func:`snapshot` output, validating its counters."""
    try:
        version = record.get("version", SNAPSHOT_VERSION)
        ints = {name: int(str(record[name])) for name in _SNAPSHOT_INTS}
        floats = {name: float(str(record.get(name, "0.0"))) for name in _SNAPSHOT_FLOATS}
    except (KeyError, TypeError, ValueError) as exc:
        raise DataQualityError(f"malformed snapshot: {exc}") from None
    if str(version) != SNAPSHOT_VERSION:
        raise DataQualityError(f"unsupported snapshot version {version!r}")
    for name, value in floats.items():
        if not math.isfinite(value):
            raise DataQualityError(f"snapshot field {name} is not finite")
    if floats["s_var"] < 0.0:
        raise DataQualityError("snapshot has negative s_var")
    if ints["n_steps"] < 0:
        raise DataQualityError("snapshot has negative n_steps")
    if ints["n_units"] < 1:
        raise DataQualityError("snapshot has n_units < 1")
    if ints["n_steps"] == 0 and any(floats[name] != 0.0 for name in _SNAPSHOT_FLOATS):
        raise DataQualityError("snapshot has nonzero sums with n_steps = 0")
    return StreamState(
        n_steps=ints["n_steps"],
        sum_tau=floats["sum_tau"],
        s_var=floats["s_var"],
        n_units=ints["n_units"],
        sum_tau_lo=floats["sum_tau_lo"],
        s_var_lo=floats["s_var_lo"],
    )


def dumps_snapshot(state: StreamState) -> str:
    return json.dumps(snapshot(state), sort_keys=True)


def loads_snapshot(text: str) -> StreamState:
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataQualityError(f"snapshot is not valid JSON: {exc}") from None
    if not isinstance(record, dict):
        raise DataQualityError("snapshot must be a JSON object")
    return restore(record)


__all__ = [
    "Observation",
    "StreamState",
    "BoundaryConfig",
    "ConfidenceBand",
    "fold",
    "fold_many",
    "snapshot",
    "restore",
    "dumps_snapshot",
    "loads_snapshot",
]
