import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dbcs import BoundaryConfig, ConfidenceBand, Decision, Engine, EngineSpec, Observation, StopRule, evaluate_stop
from dbcs.engine import band_path, first_exclusion, group_steps
from dbcs.errors import ContractError, DataQualityError
from dbcs.estimators import ipw_arrays


def obs(t, w, y, p=0.5, unit=0, yhat=None):
    return Observation(unit, t, w, y, p, yhat)


def test_first_step_example(oracle):
    e = Engine(EngineSpec("fixed", "asymptotic", False, BoundaryConfig(alpha=0.05, eta=0.77)))
    b = e.step(obs(1, 1, 1.0))
    assert b.center == oracle["engine_first"]["center"]
    assert math.isclose(b.half_width, oracle["engine_first"]["half_width"], rel_tol=1e-14)
    b = e.step(obs(2, 0, 1.0))
    assert b.center == 0.0


def _random_stream(rng, T, with_pred=False, zero_pred=False):
    out = []
    for t in range(1, T + 1):
        p = rng.uniform(0.05, 0.95)
        yhat = 0.0 if zero_pred else (rng.gauss(0, 3) if with_pred else None)
        out.append(obs(t, int(rng.random() < p), rng.gauss(1, 5), p, yhat=yhat))
    return out


@pytest.mark.parametrize("boundary", ["asymptotic", "exact", "mixture"])
def test_panel_single_unit_equals_timeseries(boundary):
    rng = random.Random(7)
    cfg = BoundaryConfig(m_bound=1e6)
    for _ in range(100 if boundary == "asymptotic" else 10):
        stream = _random_stream(rng, rng.randrange(1, 60))
        a = Engine(EngineSpec("panel", boundary, False, cfg)).run([[r] for r in stream])
        b = Engine(EngineSpec("timeseries", boundary, False, cfg)).run([[r] for r in stream])
        assert a == b


def test_proxy_zero_equals_plain():
    rng = random.Random(8)
    for _ in range(100):
        stream = _random_stream(rng, rng.randrange(1, 60), zero_pred=True)
        a = Engine(EngineSpec("fixed", "asymptotic", True)).run([[r] for r in stream])
        b = Engine(EngineSpec("fixed", "asymptotic", False)).run([[r] for r in stream])
        assert a == b


def test_center_is_mean_of_estimates():
    rng = random.Random(9)
    stream = _random_stream(rng, 500)
    bands = Engine(EngineSpec()).run([[r] for r in stream])
    taus = [(r.outcome / r.p1 if r.arm else -r.outcome / (1 - r.p1)) for r in stream]
    ref = math.fsum(taus) / len(taus)
    assert abs(bands[-1].center - ref) <= 1e-12 * max(1.0, abs(ref))


def test_determinism():
    rng = random.Random(10)
    stream = _random_stream(rng, 200)
    a = Engine(EngineSpec()).run([[r] for r in stream])
    b = Engine(EngineSpec()).run([[r] for r in stream])
    assert a == b


def test_batch_path_matches_streaming():
    rng = random.Random(12)
    stream = _random_stream(rng, 300)
    for boundary in ("asymptotic", "exact", "mixture"):
        spec = EngineSpec("fixed", boundary, False, BoundaryConfig(m_bound=1e6))
        bands = Engine(spec).run([[r] for r in stream])
        tau, s2 = ipw_arrays(np.array([r.arm for r in stream]), np.array([r.outcome for r in stream]),
                             np.array([r.p1 for r in stream]))
        path = band_path(spec, tau, s2)
        assert np.array_equal(path.center, [b.center for b in bands])
        np.testing.assert_allclose(path.half_width, [b.half_width for b in bands], rtol=1e-13)


def test_panel_step_uses_batch_size():
    e = Engine(EngineSpec("panel"))
    b = e.step([obs(1, 1, 1.0, unit=0), obs(1, 0, 1.0, unit=1)])
    assert b.center == 0.0 and e.state.n_units == 2 and e.state.s_var == 8.0
    with pytest.raises(DataQualityError):
        e.step([obs(2, 1, 1.0, unit=0), obs(2, 1, 1.0, unit=0)])


def test_step_errors():
    e = Engine(EngineSpec())
    with pytest.raises(DataQualityError):
        e.step([])
    e.step(obs(3, 1, 1.0))
    with pytest.raises(DataQualityError):
        e.step(obs(3, 1, 1.0))
    with pytest.raises(DataQualityError):
        e.step([obs(4, 1, 1.0), obs(4, 0, 1.0)])
    with pytest.raises(DataQualityError):
        Engine(EngineSpec(proxy=True)).step(obs(1, 1, 1.0))


def test_exact_needs_bound_and_enforces_it():
    with pytest.raises(ContractError):
        EngineSpec("fixed", "exact")
    e = Engine(EngineSpec("fixed", "exact", False, BoundaryConfig(m_bound=2.0)))
    e.step(obs(1, 1, 1.0))
    with pytest.raises(ContractError):
        e.step(obs(2, 1, 1.5))


def test_time_gaps_allowed():
    e = Engine(EngineSpec())
    e.step(obs(1, 1, 1.0))
    assert e.step(obs(5, 0, 1.0)).step == 2


def test_stop_examples():
    nul = StopRule("null_exclusion")
    assert evaluate_stop(ConfidenceBand(1, -0.175, 0.125, -0.3, -0.05), nul) is Decision.STOP_REJECT_NULL
    assert evaluate_stop(ConfidenceBand(1, 0.01, 0.03, -0.02, 0.04), StopRule("futility_below_epsilon", 0.05)) is Decision.STOP_FUTILITY
    assert evaluate_stop(ConfidenceBand(1, 0.05, 0.15, -0.1, 0.2), nul) is Decision.CONTINUE


def test_stop_priority_and_warmup():
    band = ConfidenceBand.around(10, -0.2, 0.1)
    rules = [StopRule("horizon", horizon=10), StopRule("futility_below_epsilon", 0.05), nul := StopRule("null_exclusion")]
    assert evaluate_stop(band, rules) is Decision.STOP_REJECT_NULL
    assert evaluate_stop(band, [rules[0], rules[1]]) is Decision.STOP_FUTILITY
    assert evaluate_stop(band, rules, warmup_steps=10) is Decision.STOP_HORIZON
    assert evaluate_stop(band, nul, warmup_steps=10) is Decision.CONTINUE
    assert evaluate_stop(ConfidenceBand.around(3, -0.5, 0.1), StopRule("harm_threshold", 0.2)) is Decision.STOP_REJECT_NULL
    assert evaluate_stop(ConfidenceBand.around(3, -0.1, 0.05), StopRule("harm_threshold", 0.2)) is Decision.CONTINUE


@pytest.mark.parametrize("kw", [dict(kind="harm_threshold"), dict(kind="null_exclusion", epsilon=0.1),
                                dict(kind="horizon"), dict(kind="horizon", horizon=0), dict(kind="nope")])
def test_stop_rule_contract(kw):
    with pytest.raises(ContractError):
        StopRule(**kw)


def test_snapshot_resume():
    rng = random.Random(13)
    stream = _random_stream(rng, 100)
    full = Engine(EngineSpec()).run([[r] for r in stream])
    e = Engine(EngineSpec())
    first = e.run([[r] for r in stream[:40]])
    e2 = Engine.from_snapshot(EngineSpec(), e.snapshot())
    rest = e2.run([[r] for r in stream[40:]])
    assert first + rest == full
    with pytest.raises(DataQualityError):
        e2.step(stream[10])


def test_group_steps():
    recs = [obs(1, 1, 1.0, unit=0), obs(1, 0, 1.0, unit=1), obs(2, 1, 1.0, unit=0)]
    assert [len(b) for b in group_steps(recs)] == [2, 1]


def test_first_exclusion_mixture_matches_widths():
    rng = np.random.default_rng(3)
    tau = rng.uniform(-2, 2, 400) - 0.4
    spec = EngineSpec("fixed", "mixture", False, BoundaryConfig(m_bound=3.0))
    with_w = band_path(spec, tau, tau**2)
    no_w = band_path(spec, tau, tau**2, with_widths=False)
    assert first_exclusion(spec, with_w, 0.0) == first_exclusion(spec, no_w, 0.0)
