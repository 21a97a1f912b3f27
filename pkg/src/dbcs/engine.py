"""Streaming confidence-sequence engines and stopping rules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import boundaries, mixture
from ._backend import kernels
from .core import BoundaryConfig, ConfidenceBand, Observation, StreamState, fold, restore, snapshot
from .errors import ContractError, DataQualityError
from .estimators import EstimatePair, ipw_estimate, panel_aggregate, proxy_estimate

DESIGNS = ("fixed", "bandit", "timeseries", "panel")
BOUNDARY_KINDS = ("exact", "asymptotic", "mixture")


@dataclass(frozen=True)
class EngineSpec:
    """Design, boundary family and tuning of one engine.

    ``warmup_steps`` suppresses stop decisions (other than the horizon) for
    the first steps; bands are still emitted.
    """

    design: str = "fixed"
    boundary: str = "asymptotic"
    proxy: bool = False
    config: BoundaryConfig = field(default_factory=BoundaryConfig)
    warmup_steps: int = 0

    def __post_init__(self):
        if self.design not in DESIGNS:
            raise ContractError(f"unknown design {self.design!r}; expected one of {DESIGNS}")
        if self.boundary not in BOUNDARY_KINDS:
            raise ContractError(f"unknown boundary {self.boundary!r}; expected one of {BOUNDARY_KINDS}")
        if self.boundary in ("exact", "mixture") and self.config.m_bound is None:
            raise ContractError(f"the {self.boundary} boundary needs m_bound")
        if not (isinstance(self.warmup_steps, int) and self.warmup_steps >= 0):
            raise ContractError(f"warmup_steps must be a nonnegative integer, got {self.warmup_steps!r}")


STOP_KINDS = ("null_exclusion", "harm_threshold", "futility_below_epsilon", "horizon")
_PRIORITY = {k: i for i, k in enumerate(STOP_KINDS)}


@dataclass(frozen=True)
class StopRule:
    kind: str
    epsilon: Optional[float] = None
    horizon: Optional[int] = None

    def __post_init__(self):
        if self.kind not in STOP_KINDS:
            raise ContractError(f"unknown stop rule {self.kind!r}; expected one of {STOP_KINDS}")
        needs_eps = self.kind in ("harm_threshold", "futility_below_epsilon")
        if needs_eps != (self.epsilon is not None):
            raise ContractError(f"epsilon must be given exactly for harm/futility rules (kind={self.kind})")
        if self.epsilon is not None and not math.isfinite(self.epsilon):
            raise ContractError("epsilon must be finite")
        if (self.kind == "horizon") != (self.horizon is not None):
            raise ContractError("horizon must be given exactly for the horizon rule")
        if self.horizon is not None and not (isinstance(self.horizon, int) and self.horizon >= 1):
            raise ContractError(f"horizon must be a positive integer, got {self.horizon!r}")


class Decision(str, Enum):
    CONTINUE = "continue"
    STOP_REJECT_NULL = "stop_reject_null"
    STOP_FUTILITY = "stop_futility"
    STOP_HORIZON = "stop_horizon"

    @property
    def stops(self) -> bool:
        return self is not Decision.CONTINUE


def _fires(band: ConfidenceBand, rule: StopRule) -> Optional[Decision]:
    if rule.kind == "null_exclusion":
        if not (band.lower <= 0.0 <= band.upper):
            return Decision.STOP_REJECT_NULL
    elif rule.kind == "harm_threshold":
        # harm is a one-sided rejection of the null in the harmful direction
        if band.upper < -rule.epsilon:
            return Decision.STOP_REJECT_NULL
    elif rule.kind == "futility_below_epsilon":
        if band.upper < rule.epsilon:
            return Decision.STOP_FUTILITY
    elif rule.kind == "horizon":
        if band.step >= rule.horizon:
            return Decision.STOP_HORIZON
    return None


def evaluate_stop(
    band: ConfidenceBand,
    rule: Union[StopRule, Sequence[StopRule]],
    warmup_steps: int = 0,
) -> Decision:
    """Decision for ``band`` under one rule or several.

    Several rules are checked in the fixed order null_exclusion, harm,
    futility, horizon and the first that fires wins.  During warmup only the
    horizon rule can fire.
    """
    rules = [rule] if isinstance(rule, StopRule) else list(rule)
    for r in sorted(rules, key=lambda r: _PRIORITY[r.kind]):
        if band.step <= warmup_steps and r.kind != "horizon":
            continue
        d = _fires(band, r)
        if d is not None:
            return d
    return Decision.CONTINUE


def half_width_for(spec: EngineSpec, state: StreamState) -> float:
    cfg = spec.config
    if state.n_steps == 0:
        return math.inf
    if spec.boundary == "asymptotic":
        return boundaries.asymp_width(state.n_steps, state.s_var, cfg.eta, cfg.alpha, state.n_units)
    if spec.boundary == "exact":
        return boundaries.exact_width(state.n_steps * state.n_units, state.s_var, cfg.m_bound, cfg.alpha)
    return mixture.mixture_half_width(state, cfg.m_bound, cfg.rho, cfg.alpha)


class Engine:
    """One logical confidence-sequence stream.

    Call :meth:`step` with all records of one time step; it returns the band
    after folding them.
    """

    def __init__(self, spec: EngineSpec, state: Optional[StreamState] = None, last_time: int = 0):
        self.spec = spec
        self.state = state if state is not None else StreamState()
        self.last_time = int(last_time)

    # -- estimation -------------------------------------------------------

    def _estimate(self, obs: Observation) -> EstimatePair:
        pair = proxy_estimate(obs) if self.spec.proxy else ipw_estimate(obs)
        m = self.spec.config.m_bound
        if self.spec.boundary in ("exact", "mixture") and abs(pair.tau_hat) > m:
            raise ContractError(
                f"|tau_hat| = {abs(pair.tau_hat)!r} exceeds m_bound = {m!r} "
                f"(unit {obs.unit_id}, t={obs.time})"
            )
        return pair

    def step(self, records: Union[Observation, Iterable[Observation]]) -> ConfidenceBand:
        if isinstance(records, Observation):
            records = [records]
        records = list(records)
        if not records:
            raise DataQualityError("a step needs at least one record")
        t = records[0].time
        if any(r.time != t for r in records):
            raise DataQualityError(f"records of one step must share a time index (got {sorted({r.time for r in records})})")
        if t <= self.last_time:
            raise DataQualityError(f"time must strictly increase: got t={t} after t={self.last_time}")
        if self.spec.design == "panel":
            units = [r.unit_id for r in records]
            if len(set(units)) != len(units):
                raise DataQualityError(f"duplicate unit in panel step t={t}")
            pair = panel_aggregate([self._estimate(r) for r in records])
            n_units = len(records)
        else:
            if len(records) != 1:
                raise DataQualityError(f"the {self.spec.design} design takes one record per step, got {len(records)}")
            pair = self._estimate(records[0])
            n_units = 1
        self.state = fold(self.state, pair.tau_hat, pair.sigma2_hat, n_units=n_units)
        self.last_time = t
        return self.band()

    def band(self) -> ConfidenceBand:
        if self.state.n_steps == 0:
            raise ContractError("no band before the first step")
        center = self.state.sum_tau / self.state.n_steps
        return ConfidenceBand.around(self.state.n_steps, center, half_width_for(self.spec, self.state))

    def decide(self, band: ConfidenceBand, rule) -> Decision:
        return evaluate_stop(band, rule, self.spec.warmup_steps)

    def run(self, steps: Iterable[Sequence[Observation]]):
        """Bands for an iterable of per-step record batches."""
        return [self.step(batch) for batch in steps]

    # -- checkpointing ----------------------------------------------------

    def snapshot(self) -> dict:
        rec = snapshot(self.state)
        rec["last_time"] = str(self.last_time)
        return rec

    @classmethod
    def from_snapshot(cls, spec: EngineSpec, record) -> "Engine":
        state = restore(record)
        try:
            last_time = int(str(record.get("last_time", "0")))
        except ValueError:
            raise DataQualityError("malformed last_time in snapshot") from None
        if last_time < state.n_steps:
            raise DataQualityError("snapshot last_time is smaller than its step count")
        return cls(spec, state, last_time)


def group_steps(records: Iterable[Observation]):
    """Group a time-ordered record stream into per-step batches."""
    batch = []
    for r in records:
        if batch and r.time != batch[0].time:
            yield batch
            batch = []
        batch.append(r)
    if batch:
        yield batch


# ---------------------------------------------------------------------------
# batch path for Monte-Carlo work


@dataclass
class BandPath:
    """Per-step running totals and half-widths of one sample path."""

    sum_tau: np.ndarray
    s_var: np.ndarray
    n_units: np.ndarray
    half_width: np.ndarray

    @property
    def steps(self) -> np.ndarray:
        return np.arange(1, self.sum_tau.shape[0] + 1)

    @property
    def center(self) -> np.ndarray:
        return self.sum_tau / self.steps

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.half_width

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.half_width


def band_path(spec: EngineSpec, step_tau, step_sigma2, n_units=1, with_widths: bool = True) -> BandPath:
    """Running bands from per-step aggregated estimates.

    Accumulation uses the same double-double sums as :class:`Engine`, so the
    centers and widths agree with streaming to the last bit for unit designs.
    Mixture half-widths need a root solve per step; ``with_widths=False``
    skips them (coverage and null checks do not need them).
    """
    step_tau = np.asarray(step_tau, dtype=np.float64)
    step_sigma2 = np.asarray(step_sigma2, dtype=np.float64)
    T = step_tau.shape[0]
    n_units = np.broadcast_to(np.asarray(n_units, dtype=np.float64), (T,))
    sum_tau = kernels.compensated_cumsum(step_tau)
    s_var = kernels.compensated_cumsum(step_sigma2)
    steps = np.arange(1, T + 1, dtype=np.float64)
    cfg = spec.config
    if spec.boundary == "asymptotic":
        hw = boundaries.asymp_width_array(steps, s_var, cfg.eta, cfg.alpha, n_units)
    elif spec.boundary == "exact":
        hw = boundaries.exact_width_array(steps * n_units, s_var, cfg.m_bound, cfg.alpha)
    elif with_widths:
        hw = mixture.mixture_half_widths(s_var, steps * n_units, cfg.m_bound, cfg.rho, cfg.alpha)
    else:
        hw = np.full(T, np.nan)
    return BandPath(sum_tau, s_var, np.asarray(n_units), hw)


def first_exclusion(spec: EngineSpec, path: BandPath, value) -> int:
    """1-based first step whose band excludes ``value`` (scalar or per-step); 0 if none."""
    if spec.boundary == "mixture" and np.isnan(path.half_width).any():
        counts = path.steps * path.n_units
        return mixture.excludes(path.sum_tau * path.n_units, path.s_var, counts, value,
                                spec.config.m_bound, spec.config.rho, spec.config.alpha)
    miss = np.abs(path.center - value) > path.half_width
    idx = np.flatnonzero(miss)
    return int(idx[0]) + 1 if idx.size else 0


__all__ = [
    "DESIGNS",
    "BOUNDARY_KINDS",
    "STOP_KINDS",
    "EngineSpec",
    "StopRule",
    "Decision",
    "evaluate_stop",
    "half_width_for",
    "Engine",
    "group_steps",
    "BandPath",
    "band_path",
    "first_exclusion",
]
