"""Monte-Carlo evaluation: coverage, stopping times, widths and power.

Replicate ``r`` of a run with base seed ``s`` draws from the counter-based
stream keyed by ``(s, r)``, so results do not depend on how replicates are
spread over worker processes.  Per-replicate results are collected in
replicate order and reduced in that order.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from statistics import NormalDist
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from . import boundaries, mixture
from .core import BoundaryConfig, ConfidenceBand, StreamState
from .dgps import DgpSpec, Realization, realize, rng_for
from .engine import BandPath, Decision, EngineSpec, StopRule, band_path, first_exclusion, _PRIORITY
from .errors import ContractError
from .estimators import ipw_arrays, panel_arrays


def max_workers() -> int:
    """Worker cap from ``DBCS_THREADS`` (default 1)."""
    raw = os.environ.get("DBCS_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ContractError(f"DBCS_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _pmap(fn, items, workers: Optional[int]):
    workers = min(workers or 1, max_workers(), max(1, len(items)))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _chunks(n: int, size: int):
    return [(a, min(a + size, n)) for a in range(0, n, size)]


def _mean_se(x) -> tuple:
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        return math.nan, math.nan
    m = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else math.nan
    return m, se


# ---------------------------------------------------------------------------
# reports


@dataclass
class McReport:
    """Monte-Carlo summary with standard errors.

    ``width_at_horizon`` is the full width (upper - lower) at the last step.
    ``stop_times`` holds per-replicate stopping steps (the horizon when no
    rule fired) and ``first_rejection`` the first step excluding zero (0 when
    never).
    """

    replicates: int
    uniform_miscoverage: float
    mean_stop_time: float
    width_at_horizon: float
    power: float
    miscoverage_se: float = math.nan
    stop_time_se: float = math.nan
    width_se: float = math.nan
    power_se: float = math.nan
    stop_times: np.ndarray = field(default=None, repr=False)
    first_rejection: np.ndarray = field(default=None, repr=False)
    decisions: List[str] = field(default=None, repr=False)

    @property
    def coverage(self) -> float:
        return 1.0 - self.uniform_miscoverage

    def rows(self, scenario: str, method: str) -> List[dict]:
        return [
            _row(scenario, method, "miscoverage", self.uniform_miscoverage, self.miscoverage_se),
            _row(scenario, method, "coverage", self.coverage, self.miscoverage_se),
            _row(scenario, method, "stop", self.mean_stop_time, self.stop_time_se),
            _row(scenario, method, "width", self.width_at_horizon, self.width_se),
            _row(scenario, method, "power", self.power, self.power_se),
        ]


def _row(scenario, method, metric, value, se=math.nan, n=None):
    return {"scenario": scenario, "method": method, "metric": metric, "value": value, "se": se, "n": n}


def _binom_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n) if n > 0 else math.nan


def report_from(miss, stops, rejections, widths, decisions=None) -> McReport:
    miss = np.asarray(miss, dtype=bool)
    stops = np.asarray(stops, dtype=np.float64)
    rejections = np.asarray(rejections, dtype=np.int64)
    widths = np.asarray(widths, dtype=np.float64)
    R = miss.size
    mc = float(miss.mean())
    pw = float((rejections > 0).mean())
    st, st_se = _mean_se(stops)
    wd, wd_se = _mean_se(widths)
    return McReport(
        replicates=R,
        uniform_miscoverage=mc,
        mean_stop_time=st,
        width_at_horizon=wd,
        power=pw,
        miscoverage_se=_binom_se(mc, R),
        stop_time_se=st_se,
        width_se=wd_se,
        power_se=_binom_se(pw, R),
        stop_times=stops,
        first_rejection=rejections,
        decisions=decisions,
    )


# ---------------------------------------------------------------------------
# per-path evaluation


def path_terms(real: Realization, proxy: bool):
    """Per-step aggregated ``(tau, sigma2)`` and the unit-level estimates."""
    value = real.y
    if proxy:
        if real.yhat is None:
            raise ContractError("proxy engine needs a DGP with a proxy predictor")
        value = real.y - real.yhat
    tau, s2 = ipw_arrays(real.w, value, real.p1)
    step_tau, step_s2 = panel_arrays(tau, s2)
    return step_tau, step_s2, tau


def _needs_bounds(rules: Sequence[StopRule]) -> bool:
    return any(r.kind in ("harm_threshold", "futility_below_epsilon") for r in rules)


def _first_true(mask: np.ndarray, start: int) -> int:
    idx = np.flatnonzero(mask[start:])
    return int(idx[0]) + start + 1 if idx.size else 0


def _first_exclusion_from(spec: EngineSpec, path: BandPath, value, start: int) -> int:
    """First step after ``start`` whose band excludes ``value``; 0 if none."""
    if start == 0:
        return first_exclusion(spec, path, value)
    value = np.broadcast_to(np.asarray(value, dtype=np.float64), path.sum_tau.shape)[start:]
    sub = BandPath(path.sum_tau[start:], path.s_var[start:], path.n_units[start:], path.half_width[start:])
    if spec.boundary == "mixture" and np.isnan(sub.half_width).any():
        counts = path.steps[start:] * sub.n_units
        k = mixture.excludes(sub.sum_tau * sub.n_units, sub.s_var, counts, value,
                             spec.config.m_bound, spec.config.rho, spec.config.alpha)
    else:
        k = _first_true(np.abs(path.center[start:] - value) > sub.half_width, 0)
    return k + start if k else 0


def evaluate_path(spec: EngineSpec, rules: Sequence[StopRule], real: Realization):
    """``(missed, stop_step, decision, first_rejection, full_width_at_T)`` for one path."""
    step_tau, step_s2, unit_tau = path_terms(real, spec.proxy)
    cfg = spec.config
    if spec.boundary in ("exact", "mixture") and np.any(np.abs(unit_tau) > cfg.m_bound):
        raise ContractError(f"|tau_hat| exceeds m_bound = {cfg.m_bound!r} on a generated path")
    T = real.horizon
    path = band_path(spec, step_tau, step_s2, real.n_units,
                     with_widths=spec.boundary != "mixture" or _needs_bounds(rules))
    # bands inside the warmup window are emitted but not used for inference
    warm = min(spec.warmup_steps, T)
    missed = _first_exclusion_from(spec, path, real.truth.running, warm) > 0
    rejection = _first_exclusion_from(spec, path, 0.0, warm)
    fired = []
    for r in rules:
        if r.kind == "null_exclusion":
            k = rejection
        elif r.kind == "harm_threshold":
            k = _first_true(path.upper < -r.epsilon, warm)
        elif r.kind == "futility_below_epsilon":
            k = _first_true(path.upper < r.epsilon, warm)
        else:
            k = r.horizon if r.horizon <= T else 0
        if k:
            fired.append((k, _PRIORITY[r.kind], r))
    if fired:
        k, _, r = min(fired, key=lambda f: (f[0], f[1]))
        decision = {
            "null_exclusion": Decision.STOP_REJECT_NULL,
            "harm_threshold": Decision.STOP_REJECT_NULL,
            "futility_below_epsilon": Decision.STOP_FUTILITY,
            "horizon": Decision.STOP_HORIZON,
        }[r.kind]
        stop = k
    else:
        stop, decision = T, Decision.CONTINUE
    if spec.boundary == "mixture" and np.isnan(path.half_width[-1]):
        hw = mixture.mixture_half_widths(path.s_var[-1:], [T * real.n_units], cfg.m_bound, cfg.rho, cfg.alpha)[0]
    else:
        hw = path.half_width[-1]
    return missed, stop, decision.value, rejection, 2.0 * float(hw)


def _mc_chunk(args):
    dgp, spec, rules, horizon, lo, hi = args
    return [evaluate_path(spec, rules, realize(dgp, horizon, r)) for r in range(lo, hi)]


def run_mc(
    dgp: DgpSpec,
    engine_spec: EngineSpec,
    rule: Union[StopRule, Sequence[StopRule], None],
    replicates: int,
    base_seed: int = 0,
    horizon: int = 100,
    workers: Optional[int] = None,
) -> McReport:
    """Run ``replicates`` sample paths and summarise them.

    Stopping times follow the fixed-horizon convention: a path on which no
    rule fires counts as stopping at ``horizon``.
    """
    if not (isinstance(replicates, int) and replicates >= 1):
        raise ContractError(f"replicates must be a positive integer, got {replicates!r}")
    if rule is None:
        rules = [StopRule("null_exclusion")]
    elif isinstance(rule, StopRule):
        rules = [rule]
    else:
        rules = list(rule)
    dgp = replace(dgp, seed=int(base_seed))
    chunks = [(dgp, engine_spec, rules, horizon, a, b) for a, b in _chunks(replicates, 250)]
    results = [row for part in _pmap(_mc_chunk, chunks, workers) for row in part]
    miss, stops, decisions, rej, widths = zip(*results)
    return report_from(miss, stops, rej, widths, list(decisions))


# ---------------------------------------------------------------------------
# peeking t-test


def _ttest_chunk(args):
    from scipy import stats

    alpha, max_n, seed, lo, hi = args
    x = np.stack([rng_for(seed, r).standard_normal(max_n) for r in range(lo, hi)])
    n = np.arange(1, max_n + 1, dtype=np.float64)
    cs = np.cumsum(x, axis=1)
    cs2 = np.cumsum(x * x, axis=1)
    mean = cs / n
    with np.errstate(divide="ignore", invalid="ignore"):
        var = (cs2 - n * mean * mean) / (n - 1.0)
        tstat = mean / np.sqrt(var / n)
    crit = np.full(max_n, np.inf)
    crit[1:] = stats.t.ppf(1.0 - alpha / 2.0, n[1:] - 1.0)
    rej = np.abs(tstat) > crit
    rej[:, 0] = False
    return np.logical_or.accumulate(rej, axis=1).sum(axis=0)


def peeking_ttest_curve(alpha: float, max_n: int, replicates: int, base_seed: int = 0,
                        workers: Optional[int] = None) -> np.ndarray:
    """Fraction of iid N(0, 1) paths on which a two-sided one-sample t-test
    at level ``alpha`` has rejected at some n' <= n; entry n - 1 is for n."""
    if not (0.0 < alpha < 1.0):
        raise ContractError(f"alpha must lie in (0, 1), got {alpha!r}")
    if max_n < 2:
        raise ContractError("max_n must be at least 2")
    if replicates < 1:
        raise ContractError("replicates must be positive")
    parts = _pmap(_ttest_chunk, [(alpha, max_n, base_seed, a, b) for a, b in _chunks(replicates, 500)], workers)
    return np.sum(parts, axis=0) / replicates


# ---------------------------------------------------------------------------
# fixed-time comparators


def z_quantile(alpha: float) -> float:
    return NormalDist().inv_cdf(1.0 - alpha / 2.0)


def comparator_ci(state: StreamState, alpha: float = 0.05) -> ConfidenceBand:
    """Fixed-time normal interval with the same center and variance bound."""
    if state.n_steps < 1:
        raise ContractError("comparator_ci needs a nonempty state")
    if not (0.0 < alpha < 1.0):
        raise ContractError(f"alpha must lie in (0, 1), got {alpha!r}")
    hw = z_quantile(alpha) * math.sqrt(state.s_var) / (state.n_steps * state.n_units)
    return ConfidenceBand.around(state.n_steps, state.sum_tau / state.n_steps, hw)


def uniform_schedule(horizon: int, k: int) -> List[int]:
    """K equally spaced look times ending at ``horizon`` (20, 40, ..., 100 for 100, 5)."""
    if k < 1 or horizon < k:
        raise ContractError("need 1 <= k <= horizon")
    return [round(horizon * (j + 1) / k) for j in range(k)]


def comparator_hybrid(states: Sequence[StreamState], alpha: float = 0.05) -> List[ConfidenceBand]:
    """Bonferroni intervals at the given looks, each at level alpha / K."""
    states = list(states)
    if not states:
        raise ContractError("comparator_hybrid needs a nonempty schedule")
    steps = [s.n_steps for s in states]
    if any(b <= a for a, b in zip(steps, steps[1:])):
        raise ContractError("schedule must be strictly increasing")
    level = alpha / len(states)
    return [comparator_ci(s, level) for s in states]


# ---------------------------------------------------------------------------
# scenarios

ASYMP = EngineSpec("panel", "asymptotic", False, BoundaryConfig(alpha=0.05, eta=0.77))


def _panel_dgp(kind="panel_linear", proxy=None, **params):
    return DgpSpec(kind, params, 0, proxy)


def scenario_table1(reps: int = 5000, seed: int = 0, workers=None) -> List[dict]:
    rows = []
    spec_plain = ASYMP
    spec_proxy = replace(ASYMP, proxy=True)
    cases = [
        ("table1_s1", "cs", _panel_dgp(), spec_plain),
        ("table1_s1", "cs_proxy", _panel_dgp(proxy="ols"), spec_proxy),
        ("table1_s2", "cs", _panel_dgp("panel_nonlinear"), spec_plain),
        ("table1_s2", "cs_proxy", _panel_dgp("panel_nonlinear", proxy="ols"), spec_proxy),
        ("table1_s3", "cs", _panel_dgp(n_units=1, x_fixed=25.0, mu_sd=0.0), spec_plain),
    ]
    for j, (name, method, dgp, spec) in enumerate(cases):
        # paired runs within a scenario share seeds
        s = seed + 1000 * (j // 2 if name != "table1_s3" else 2)
        rep = run_mc(dgp, spec, StopRule("null_exclusion"), reps, s, 100, workers)
        rows.extend(rep.rows(name, method))
    return rows


@dataclass
class Table2Result:
    rows: List[dict]
    per_method: Dict[str, Dict[str, np.ndarray]]


def _table2_chunk(args):
    seed, lo, hi, alpha, K, T = args
    dgp = DgpSpec("panel_linear", {"n_units": 5, "rho": 0.0, "beta": 0.0, "mu": 10.0}, seed, "running_mean")
    sched = np.asarray(uniform_schedule(T, K)) - 1
    z_ci = z_quantile(alpha)
    z_hy = z_quantile(alpha / K)
    cs_spec = replace(ASYMP, proxy=True, config=BoundaryConfig(alpha=alpha, eta=0.77))
    out = []
    for r in range(lo, hi):
        real = realize(dgp, T, r)
        truth = real.truth.running
        n = real.n_units
        tau0, s20, _ = path_terms(real, proxy=False)
        tau1, s21, _ = path_terms(real, proxy=True)
        plain = band_path(ASYMP, tau0, s20, n)
        cs = band_path(cs_spec, tau1, s21, n)
        steps = plain.steps
        base = np.sqrt(plain.s_var) / (steps * n)
        c = plain.center
        # confidence interval at T only
        h_ci = z_ci * base[-1]
        ci = (abs(c[-1] - truth[-1]) <= h_ci, T, c[-1] - h_ci > 0.0, 2.0 * h_ci)
        # Bonferroni looks
        h_hy = z_hy * base[sched]
        cover = bool(np.all(np.abs(c[sched] - truth[sched]) <= h_hy))
        hits = np.flatnonzero(c[sched] - h_hy > 0.0)
        hy = (cover, int(sched[hits[0]]) + 1 if hits.size else T, hits.size > 0, 2.0 * h_hy[-1])
        # confidence sequence
        cover_cs = bool(np.all(np.abs(cs.center - truth) <= cs.half_width))
        hits = np.flatnonzero(cs.lower > 0.0)
        seq = (cover_cs, int(hits[0]) + 1 if hits.size else T, hits.size > 0, 2.0 * cs.half_width[-1])
        out.append((ci, hy, seq))
    return out


def scenario_table2(reps: int = 5000, seed: int = 0, workers=None, alpha: float = 0.05) -> Table2Result:
    """CI, Bonferroni hybrid (K = 5) and CS on the simplified panel design.

    The CS uses the running-mean proxy; the two fixed-time comparators use
    the plain variance bound.  Stopping is the first positively significant
    look, or T when there is none.
    """
    T, K = 100, 5
    parts = _pmap(_table2_chunk, [(seed, a, b, alpha, K, T) for a, b in _chunks(reps, 250)], workers)
    res = [row for p in parts for row in p]
    rows = []
    per = {}
    for j, method in enumerate(("ci", "hybrid", "cs")):
        cover = np.array([r[j][0] for r in res], dtype=bool)
        stop = np.array([r[j][1] for r in res], dtype=np.float64)
        power = np.array([r[j][2] for r in res], dtype=bool)
        width = np.array([r[j][3] for r in res], dtype=np.float64)
        per[method] = {"cover": cover, "stop": stop, "power": power, "width": width}
        cv = float(cover.mean())
        pw = float(power.mean())
        rows += [
            _row("table2", method, "coverage", cv, _binom_se(cv, reps)),
            _row("table2", method, "miscoverage", 1.0 - cv, _binom_se(cv, reps)),
            _row("table2", method, "stop", *_mean_se(stop)),
            _row("table2", method, "width", *_mean_se(width)),
            _row("table2", method, "power", pw, _binom_se(pw, reps)),
        ]
    ratio = float(per["cs"]["width"].mean() / per["ci"]["width"].mean())
    rows.append(_row("table2", "cs_over_ci", "width_ratio", ratio))
    return Table2Result(rows, per)


def _signup_chunk(args):
    seed, lo, hi, N, checkpoints = args
    dgp = DgpSpec("binary_signup", {}, seed)
    cfg = BoundaryConfig(alpha=0.05, eta=0.77, m_bound=2.0)
    asym = EngineSpec("fixed", "asymptotic", False, cfg)
    exact = EngineSpec("fixed", "exact", False, cfg)
    out = []
    for r in range(lo, hi):
        real = realize(dgp, N, r)
        tau, s2, _ = path_terms(real, False)
        pa = band_path(asym, tau, s2)
        pe = band_path(exact, tau, s2)
        fa = first_exclusion(asym, pa, 0.0)
        fe = first_exclusion(exact, pe, 0.0)
        out.append((fa, fe, pa.half_width[checkpoints].copy(), pe.half_width[checkpoints].copy()))
    return out


def signup_paths(reps: int, seed: int = 0, N: int = 500, checkpoints: Sequence[int] = (), workers=None):
    """First null-exclusion steps (0 = never) and half-widths at checkpoints."""
    idx = np.asarray(checkpoints, dtype=np.int64) - 1
    parts = _pmap(_signup_chunk, [(seed, a, b, N, idx) for a, b in _chunks(reps, 100)], workers)
    res = [row for p in parts for row in p]
    fa = np.array([r[0] for r in res])
    fe = np.array([r[1] for r in res])
    ha = np.array([r[2] for r in res]).reshape(len(res), -1)
    he = np.array([r[3] for r in res]).reshape(len(res), -1)
    return fa, fe, ha, he


def censored_median(first: np.ndarray) -> float:
    """Median first-exclusion step counting never-excluding paths as +inf."""
    x = np.where(first > 0, first.astype(np.float64), np.inf)
    return float(np.median(x))


def scenario_signup(reps: int = 1000, seed: int = 0, N: int = 500, workers=None) -> List[dict]:
    fa, fe, _, _ = signup_paths(reps, seed, N, (), workers)
    rows = []
    for method, f in (("asymptotic", fa), ("exact", fe)):
        stopped = f[f > 0]
        rows += [
            _row("signup", method, "median_first_exclusion", censored_median(f), n=reps),
            _row("signup", method, "median_first_exclusion_given_stop",
                 float(np.median(stopped)) if stopped.size else math.nan, n=int(stopped.size)),
            _row("signup", method, "fraction_excluded", float(np.mean(f > 0)), _binom_se(float(np.mean(f > 0)), reps)),
        ]
    return rows


def scenario_signup_shrink(reps: int = 1000, seed: int = 0, workers=None) -> List[dict]:
    _, _, ha, he = signup_paths(reps, seed, 10_000, (500, 10_000), workers)
    ra = ha[:, 1] / ha[:, 0]
    re_ = he[:, 1] / he[:, 0]
    return [
        _row("signup_shrink", "asymptotic", "max_ratio_10000_over_500", float(ra.max()), n=reps),
        _row("signup_shrink", "asymptotic", "mean_ratio_10000_over_500", float(ra.mean()), n=reps),
        _row("signup_shrink", "exact", "min_ratio_10000_over_500", float(re_.min()), n=reps),
        _row("signup_shrink", "exact", "mean_ratio_10000_over_500", float(re_.mean()), n=reps),
    ]


def scenario_novelty(reps: int = 2000, seed: int = 0, horizon: int = 1000, workers=None,
                     warmups: Sequence[int] = (10, 0)) -> List[dict]:
    """Single-series novelty design, covering the running mean of the true effects.

    Reported for each warmup length; coverage is counted after the warmup.
    """
    rows = []
    for w in warmups:
        spec = EngineSpec("timeseries", "asymptotic", False, BoundaryConfig(alpha=0.05, eta=0.77), warmup_steps=w)
        rep = run_mc(DgpSpec("novelty_carryover"), spec, StopRule("null_exclusion"), reps, seed, horizon, workers)
        rows += rep.rows("novelty", f"cs_warmup_{w}")
    return rows


def scenario_mixture(reps: int = 2000, seed: int = 0, horizon: int = 2000, workers=None) -> List[dict]:
    spec = EngineSpec("fixed", "mixture", False, BoundaryConfig(alpha=0.05, m_bound=2.0, rho=1.0))
    rep = run_mc(DgpSpec("binary_signup"), spec, StopRule("null_exclusion"), reps, seed, horizon, workers)
    return rep.rows("mixture_signup", "mixture_cs")


def scenario_fig1(reps: int = 5000, seed: int = 0, max_n: int = 500, workers=None) -> List[dict]:
    rows = []
    for alpha in (0.05, 0.10):
        curve = peeking_ttest_curve(alpha, max_n, reps, seed, workers)
        for n in range(2, max_n + 1):
            rows.append(_row("fig1", f"ttest_alpha_{alpha:g}", f"ever_rejected_n{n}", float(curve[n - 1]),
                             _binom_se(float(curve[n - 1]), reps)))
    return rows


SCENARIOS = {
    "fig1": scenario_fig1,
    "table1": scenario_table1,
    "table2": lambda reps=5000, seed=0, workers=None: scenario_table2(reps, seed, workers).rows,
    "signup": scenario_signup,
    "signup_shrink": scenario_signup_shrink,
    "novelty": scenario_novelty,
    "mixture": scenario_mixture,
}


def rows_to_csv(rows: Sequence[dict], digits: int = 9) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["scenario", "method", "metric", "value", "se", "n"])
    for r in rows:
        writer.writerow([
            r["scenario"],
            r["method"],
            r["metric"],
            _fmt(r["value"], digits),
            _fmt(r["se"], digits),
            "" if r.get("n") is None else r["n"],
        ])
    return buf.getvalue()


def _fmt(x, digits=9) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return f"{x:.{digits}g}"


def svg_curve(curves: Dict[str, np.ndarray], width: int = 480, height: int = 300) -> str:
    """Minimal SVG line chart for curves on [0, 1]."""
    colors = ["#c0392b", "#2c3e50", "#27ae60", "#8e44ad"]
    pad = 30
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#999"/>']
    for j, (name, y) in enumerate(curves.items()):
        y = np.asarray(y, dtype=np.float64)
        xs = pad + (width - 2 * pad) * np.arange(y.size) / max(y.size - 1, 1)
        ys = height - pad - (height - 2 * pad) * np.clip(y, 0.0, 1.0)
        pts = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(xs, ys))
        color = colors[j % len(colors)]
        parts.append(f'<polyline fill="none" stroke="{color}" points="{pts}"/>')
        parts.append(f'<text x="{pad + 5}" y="{pad + 15 + 15 * j}" fill="{color}" font-size="12">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


__all__ = [
    "McReport",
    "report_from",
    "evaluate_path",
    "run_mc",
    "peeking_ttest_curve",
    "z_quantile",
    "comparator_ci",
    "comparator_hybrid",
    "uniform_schedule",
    "scenario_table1",
    "scenario_table2",
    "scenario_signup",
    "scenario_signup_shrink",
    "scenario_novelty",
    "scenario_mixture",
    "scenario_fig1",
    "signup_paths",
    "censored_median",
    "SCENARIOS",
    "rows_to_csv",
    "svg_curve",
    "max_workers",
]
