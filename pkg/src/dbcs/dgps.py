"""Assignment policies and synthetic data-generating processes.

Every generator realises both potential outcomes internally, emits only the
observed arm and outcome with the true assignment probability, and returns
the per-step true effect so coverage can be checked against it.

Randomness comes from a Philox counter-based generator keyed by
``(seed, replicate)``; draws are taken in a fixed order (all of one kind,
time-major, then unit) so a replicate is reproducible regardless of which
process computes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .core import Observation
from .errors import ContractError

KINDS = (
    "binary_signup",
    "two_arm_bandit",
    "novelty_carryover",
    "panel_linear",
    "panel_nonlinear",
    "iid_gaussian_null",
    "prepaid_analogue",
)

DESIGN_OF = {
    "binary_signup": "fixed",
    "two_arm_bandit": "bandit",
    "novelty_carryover": "timeseries",
    "panel_linear": "panel",
    "panel_nonlinear": "panel",
    "iid_gaussian_null": "fixed",
    "prepaid_analogue": "bandit",
}

_PANEL_DEFAULTS = {
    "n_units": 20,
    "beta": 1.0,
    "rho": 0.5,
    "mu": 20.0,
    "mu_sd": 10.0,
    "eps_sd": 10.0,
    "x_mean": 25.0,
    "x_sd": 5.0,
    "x_fixed": None,
    "p_assign": 0.5,
}

DEFAULTS: Dict[str, dict] = {
    "binary_signup": {"p_control": 0.15, "p_treat": 0.05, "p_assign": 0.5},
    "two_arm_bandit": {"mu_control": 1.0, "mu_treat": 2.0, "sd": 1.0, "explore": 10, "p_floor": 0.01},
    "novelty_carryover": {"base_mean": 25.0, "base_sd": 10.0, "amplitude": 500.0, "p_assign": 0.5},
    "panel_linear": dict(_PANEL_DEFAULTS),
    "panel_nonlinear": dict(_PANEL_DEFAULTS),
    "iid_gaussian_null": {"sd": 1.0, "p_assign": 0.5},
    "prepaid_analogue": {"base_rate": 0.10, "effect": 0.0, "explore": 10, "p_min": 0.05},
}

PROXIES = (None, "ols", "running_mean")


@dataclass(frozen=True)
class DgpSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    proxy: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"unknown DGP kind {self.kind!r}; expected one of {KINDS}")
        unknown = set(self.params) - set(DEFAULTS[self.kind])
        if unknown:
            raise ContractError(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise ContractError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.proxy not in PROXIES:
            raise ContractError(f"unknown proxy {self.proxy!r}; expected one of {PROXIES}")
        if self.proxy == "ols" and self.kind not in ("panel_linear", "panel_nonlinear"):
            raise ContractError("the ols proxy needs a covariate; only panel kinds carry one")
        _validate(self.kind, self.resolved())

    def resolved(self) -> dict:
        out = dict(DEFAULTS[self.kind])
        out.update(self.params)
        return out

    @property
    def design(self) -> str:
        return DESIGN_OF[self.kind]


def _validate(kind: str, p: dict) -> None:
    def prob(name, lo=0.0, hi=1.0, open_=True):
        v = p[name]
        ok = (lo < v < hi) if open_ else (lo <= v <= hi)
        if not ok:
            raise ContractError(f"{kind}.{name} must lie in ({lo}, {hi}), got {v!r}")

    def nonneg(name):
        if not p[name] >= 0.0:
            raise ContractError(f"{kind}.{name} must be nonnegative, got {p[name]!r}")

    if kind == "binary_signup":
        prob("p_control", open_=False)
        prob("p_treat", open_=False)
        prob("p_assign")
    elif kind == "two_arm_bandit":
        nonneg("sd")
        if not (0.0 < p["p_floor"] < 0.5):
            raise ContractError("two_arm_bandit.p_floor must lie in (0, 0.5)")
    elif kind == "novelty_carryover":
        nonneg("base_sd")
        prob("p_assign")
    elif kind in ("panel_linear", "panel_nonlinear"):
        if not (isinstance(p["n_units"], (int, np.integer)) and p["n_units"] >= 1):
            raise ContractError("n_units must be a positive integer")
        if abs(p["rho"]) > 1.0:
            raise ContractError("|rho| must be at most 1")
        for name in ("mu_sd", "eps_sd", "x_sd"):
            nonneg(name)
        prob("p_assign")
    elif kind == "iid_gaussian_null":
        nonneg("sd")
        prob("p_assign")
    elif kind == "prepaid_analogue":
        if not (0.0 < p["p_min"] < 0.5):
            raise ContractError("prepaid_analogue.p_min must lie in (0, 0.5)")
        prob("base_rate", open_=False)
        if not (0.0 <= p["base_rate"] + p["effect"] <= 1.0):
            raise ContractError("prepaid_analogue base_rate + effect must be a probability")


@dataclass
class TruthPath:
    """Per-step true effects; the running mean is the estimand the bands target."""

    values: np.ndarray

    @property
    def running(self) -> np.ndarray:
        v = np.asarray(self.values, dtype=np.float64)
        return np.cumsum(v) / np.arange(1, v.shape[0] + 1)

    def __len__(self):
        return int(np.asarray(self.values).shape[0])


@dataclass
class Realization:
    """One generated sample path; arrays are shaped (T, n_units)."""

    kind: str
    w: np.ndarray
    y: np.ndarray
    p1: np.ndarray
    truth: TruthPath
    yhat: Optional[np.ndarray] = None
    x: Optional[np.ndarray] = None

    @property
    def horizon(self) -> int:
        return self.y.shape[0]

    @property
    def n_units(self) -> int:
        return self.y.shape[1]

    def observations(self) -> List[Observation]:
        """Records ordered by (t, unit)."""
        design = DESIGN_OF[self.kind]
        out = []
        T, n = self.y.shape
        for t in range(T):
            for i in range(n):
                if design in ("fixed", "bandit"):
                    unit = t  # every step is a fresh unit
                elif design == "timeseries":
                    unit = 0
                else:
                    unit = i
                pred = None if self.yhat is None else float(self.yhat[t, i])
                out.append(
                    Observation(unit, t + 1, int(self.w[t, i]), float(self.y[t, i]), float(self.p1[t, i]), pred)
                )
        return out


def rng_for(seed: int, replicate: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(replicate)])))


# ---------------------------------------------------------------------------
# policies


def assign_bandit(mean1: Optional[float], mean0: Optional[float], step: int,
                  explore: int = 10, p_floor: float = 0.01) -> float:
    """Treatment probability for the ratio-of-means bandit.

    A fair coin for the first ``explore`` steps, then mean1 / (mean1 + mean0).
    If either mean is nonpositive both are shifted by their minimum first; an
    unobserved arm or a 0/0 ratio gives 0.5.  The result is clamped to
    [p_floor, 1 - p_floor].
    """
    if step < 1:
        raise ContractError(f"step must be positive, got {step!r}")
    if step <= explore:
        return 0.5
    if mean1 is None or mean0 is None or not (math.isfinite(mean1) and math.isfinite(mean0)):
        p = 0.5
    else:
        if mean1 <= 0.0 or mean0 <= 0.0:
            low = min(mean1, mean0)
            mean1 -= low
            mean0 -= low
        denom = mean1 + mean0
        p = 0.5 if denom == 0.0 else mean1 / denom
    return min(max(p, p_floor), 1.0 - p_floor)


def thompson_normal(s1: float, n1: int, s0: float, n0: int, p_min: float = 0.05) -> float:
    """P(arm 1 better) under normal approximations to Beta(1, 1) posteriors, clamped."""
    m1 = (s1 + 1.0) / (n1 + 2.0)
    m0 = (s0 + 1.0) / (n0 + 2.0)
    v1 = m1 * (1.0 - m1) / (n1 + 3.0)
    v0 = m0 * (1.0 - m0) / (n0 + 3.0)
    z = (m1 - m0) / math.sqrt(v1 + v0)
    p = 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
    return min(max(p, p_min), 1.0 - p_min)


# ---------------------------------------------------------------------------
# proxy predictors


def ols_proxy(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Prediction for step t from an OLS fit of all earlier outcomes on [1, x].

    ``x`` is a time-invariant per-unit covariate.  The first step predicts 0;
    with no spread in ``x`` the fit collapses to the running mean.
    """
    T, n = y.shape
    out = np.zeros((T, n))
    sx = float(np.sum(x))
    sxx = float(np.sum(x * x))
    cy = np.cumsum(y.sum(axis=1))
    cxy = np.cumsum(y @ x)
    for t in range(1, T):
        k = float(t)
        N = n * k
        Sx, Sxx, Sy, Sxy = k * sx, k * sxx, cy[t - 1], cxy[t - 1]
        den = N * Sxx - Sx * Sx
        if den > 1e-12 * N * Sxx:
            slope = (N * Sxy - Sx * Sy) / den
        else:
            slope = 0.0
        intercept = (Sy - slope * Sx) / N
        out[t] = intercept + slope * x
    return out


def running_mean_proxy(y: np.ndarray) -> np.ndarray:
    """Prediction for step t equal to the mean of all earlier outcomes; 0 at t = 1."""
    T, n = y.shape
    out = np.zeros((T, n))
    if T > 1:
        cy = np.cumsum(y.sum(axis=1))[:-1]
        out[1:] = (cy / (n * np.arange(1, T)))[:, None]
    return out


# ---------------------------------------------------------------------------
# generators


def _binary_signup(p, T, rng):
    y0 = (rng.random(T) < p["p_control"]).astype(np.float64)
    y1 = (rng.random(T) < p["p_treat"]).astype(np.float64)
    w = (rng.random(T) < p["p_assign"]).astype(np.int8)
    y = np.where(w == 1, y1, y0)
    return w[:, None], y[:, None], np.full((T, 1), p["p_assign"]), y1 - y0, None


def _iid_gaussian_null(p, T, rng):
    y = rng.normal(0.0, p["sd"], T)
    w = (rng.random(T) < p["p_assign"]).astype(np.int8)
    return w[:, None], y[:, None], np.full((T, 1), p["p_assign"]), np.zeros(T), None


def _two_arm_bandit(p, T, rng):
    y0 = rng.normal(p["mu_control"], p["sd"], T)
    y1 = rng.normal(p["mu_treat"], p["sd"], T)
    u = rng.random(T)
    w = np.zeros(T, dtype=np.int8)
    probs = np.empty(T)
    s = [0.0, 0.0]
    c = [0, 0]
    for t in range(T):
        m1 = s[1] / c[1] if c[1] else None
        m0 = s[0] / c[0] if c[0] else None
        pt = assign_bandit(m1, m0, t + 1, int(p["explore"]), p["p_floor"])
        probs[t] = pt
        arm = 1 if u[t] < pt else 0
        w[t] = arm
        s[arm] += y1[t] if arm else y0[t]
        c[arm] += 1
    y = np.where(w == 1, y1, y0)
    return w[:, None], y[:, None], probs[:, None], y1 - y0, None


def _prepaid(p, T, rng):
    r1 = p["base_rate"] + p["effect"]
    y0 = (rng.random(T) < p["base_rate"]).astype(np.float64)
    y1 = (rng.random(T) < r1).astype(np.float64)
    u = rng.random(T)
    w = np.zeros(T, dtype=np.int8)
    probs = np.empty(T)
    s = [0.0, 0.0]
    c = [0, 0]
    for t in range(T):
        if t < int(p["explore"]):
            pt = 0.5
        else:
            pt = thompson_normal(s[1], c[1], s[0], c[0], p["p_min"])
        probs[t] = pt
        arm = 1 if u[t] < pt else 0
        w[t] = arm
        s[arm] += y1[t] if arm else y0[t]
        c[arm] += 1
    y = np.where(w == 1, y1, y0)
    return w[:, None], y[:, None], probs[:, None], y1 - y0, None


def _novelty(p, T, rng):
    base = rng.normal(p["base_mean"], p["base_sd"], T)
    w = (rng.random(T) < p["p_assign"]).astype(np.int8)
    prev = np.concatenate([[0], w[:-1]])
    lift = p["amplitude"] / np.sqrt(np.arange(1, T + 1))
    # treatment only helps when the previous step was untreated
    effect = np.where(prev == 0, lift, 0.0)
    y = base + w * effect
    return w[:, None], y[:, None], np.full((T, 1), p["p_assign"]), effect, None


def _panel(p, T, rng, nonlinear):
    n = int(p["n_units"])
    if p["x_fixed"] is None:
        x = rng.normal(p["x_mean"], p["x_sd"], n)
    else:
        x = np.full(n, float(p["x_fixed"]))
    mu_i = rng.normal(p["mu"], p["mu_sd"], n) if p["mu_sd"] > 0 else np.full(n, float(p["mu"]))
    eps0 = rng.normal(0.0, p["eps_sd"], n)
    eps = rng.normal(0.0, p["eps_sd"], (T, n))
    w = (rng.random((T, n)) < p["p_assign"]).astype(np.int8)
    drift = np.abs(x * np.sin(x)) if nonlinear else p["beta"] * x
    y0 = np.empty((T, n))
    prev = drift + eps0
    for t in range(T):
        prev = p["rho"] * prev + drift + eps[t]
        y0[t] = prev
    y1 = y0 + mu_i
    y = np.where(w == 1, y1, y0)
    return w, y, np.full((T, n), p["p_assign"]), np.full(T, mu_i.mean()), x


def realize(spec: DgpSpec, horizon: int, replicate: int = 0) -> Realization:
    """Generate one sample path of length ``horizon``."""
    if not (isinstance(horizon, (int, np.integer)) and horizon >= 1):
        raise ContractError(f"horizon must be a positive integer, got {horizon!r}")
    p = spec.resolved()
    rng = rng_for(spec.seed, replicate)
    T = int(horizon)
    kind = spec.kind
    if kind == "binary_signup":
        w, y, p1, eff, x = _binary_signup(p, T, rng)
    elif kind == "iid_gaussian_null":
        w, y, p1, eff, x = _iid_gaussian_null(p, T, rng)
    elif kind == "two_arm_bandit":
        w, y, p1, eff, x = _two_arm_bandit(p, T, rng)
    elif kind == "prepaid_analogue":
        w, y, p1, eff, x = _prepaid(p, T, rng)
    elif kind == "novelty_carryover":
        w, y, p1, eff, x = _novelty(p, T, rng)
    else:
        w, y, p1, eff, x = _panel(p, T, rng, kind == "panel_nonlinear")
    yhat = None
    if spec.proxy == "ols":
        yhat = ols_proxy(y, x)
    elif spec.proxy == "running_mean":
        yhat = running_mean_proxy(y)
    return Realization(kind, w, y, p1, TruthPath(np.asarray(eff, dtype=np.float64)), yhat, x)


def generate(spec: DgpSpec, horizon: int, replicate: int = 0):
    """``(observations, truth)`` for one sample path."""
    real = realize(spec, horizon, replicate)
    return real.observations(), real.truth


__all__ = [
    "KINDS",
    "DESIGN_OF",
    "DEFAULTS",
    "PROXIES",
    "DgpSpec",
    "TruthPath",
    "Realization",
    "rng_for",
    "assign_bandit",
    "thompson_normal",
    "ols_proxy",
    "running_mean_proxy",
    "realize",
    "generate",
]
