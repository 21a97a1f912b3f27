import math
import random

import pytest
from hypothesis import given, strategies as st

from dbcs import BoundaryConfig, ConfidenceBand, Observation, StreamState, fold, fold_many, restore, snapshot
from dbcs.core import dumps_snapshot, loads_snapshot
from dbcs.errors import ContractError, DataQualityError, PositivityError

finite = st.floats(-1e6, 1e6, allow_nan=False)
nonneg = st.floats(0.0, 1e6, allow_nan=False)


def test_fold_from_zero():
    s = fold(StreamState(), 2.0, 4.0)
    assert (s.n_steps, s.sum_tau, s.s_var, s.n_units) == (1, 2.0, 4.0, 1)


def test_fold_cancellation():
    s = fold(fold(StreamState(), 2.0, 4.0), -2.0, 4.0)
    assert (s.n_steps, s.sum_tau, s.s_var, s.n_units) == (2, 0.0, 8.0, 1)


def test_fold_500_records(oracle):
    s = StreamState()
    for _ in range(500):
        s = fold(s, 0.3, 4.1)
    assert s.n_steps == 500
    assert s.sum_tau == oracle["fold_500"]["sum_tau"]
    assert s.s_var == oracle["fold_500"]["s_var"]


def test_fold_many_matches_one_by_one():
    rng = random.Random(3)
    taus = [rng.uniform(-5, 5) for _ in range(300)]
    s2 = [t * t for t in taus]
    a = StreamState()
    for t, v in zip(taus, s2):
        a = fold(a, t, v)
    b = fold_many(fold_many(StreamState(), taus[:100], s2[:100]), taus[100:], s2[100:])
    assert a == b


@pytest.mark.parametrize("tau,s2", [(math.nan, 1.0), (1.0, math.inf), (1.0, -0.5)])
def test_fold_rejects_bad_inputs(tau, s2):
    with pytest.raises(DataQualityError):
        fold(StreamState(), tau, s2)


@given(st.lists(st.tuples(finite, nonneg), min_size=1, max_size=60), st.randoms())
def test_fold_order_invariance(pairs, rnd):
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    a = fold_many(StreamState(), *zip(*pairs))
    b = fold_many(StreamState(), *zip(*shuffled))
    ref_t = math.fsum(p[0] for p in pairs)
    ref_s = math.fsum(p[1] for p in pairs)
    scale_t = math.fsum(abs(p[0]) for p in pairs) + 1e-300
    assert a.n_steps == b.n_steps == len(pairs)
    assert abs(a.sum_tau - ref_t) <= 1e-14 * scale_t
    assert abs(b.sum_tau - ref_t) <= 1e-14 * scale_t
    assert abs(a.s_var - ref_s) <= 1e-14 * (ref_s + 1e-300)
    assert abs(b.s_var - ref_s) <= 1e-14 * (ref_s + 1e-300)


@given(st.lists(nonneg, min_size=1, max_size=80))
def test_s_var_monotone(vals):
    s = StreamState()
    prev = 0.0
    for v in vals:
        s = fold(s, 0.0, v)
        assert s.s_var >= prev
        prev = s.s_var


def test_compensated_drift_over_a_million():
    s = fold_many(StreamState(), [0.1] * 1_000_000, [0.1] * 1_000_000)
    assert abs(s.s_var - 100000.0) / 100000.0 < 1e-12


def test_snapshot_zero_state():
    rec = snapshot(StreamState())
    assert all(float(v) == 0.0 for k, v in rec.items() if k not in ("version", "n_units"))
    assert restore(rec) == StreamState()


def test_snapshot_example():
    s = fold_many(StreamState(), [0.3] * 500, [4.1] * 500)
    back = restore(snapshot(s))
    assert back == s
    assert snapshot(back) == snapshot(s)


def test_snapshot_round_trip_random():
    rng = random.Random(11)
    for _ in range(1000):
        n = rng.randrange(1, 10_000)
        s = fold_many(StreamState(), [rng.uniform(-1e3, 1e3) for _ in range(3)], [rng.uniform(0, 1e4) for _ in range(3)])
        s = StreamState(n, s.sum_tau * rng.uniform(-2, 2), s.s_var, rng.randrange(1, 50), s.sum_tau_lo, s.s_var_lo)
        assert restore(snapshot(s)) == s
        assert loads_snapshot(dumps_snapshot(s)) == s


@pytest.mark.parametrize("patch", [{"s_var": "-1"}, {"n_steps": "-2"}, {"n_units": "0"}, {"n_steps": "0", "sum_tau": "1.5"}])
def test_restore_rejects(patch):
    rec = snapshot(fold(StreamState(), 2.0, 4.0))
    rec.update(patch)
    with pytest.raises(DataQualityError):
        restore(rec)


def test_observation_positivity():
    with pytest.raises(PositivityError):
        Observation(0, 1, 1, 1.0, 1.0)
    with pytest.raises(PositivityError):
        Observation(0, 1, 1, 1.0, 0.0)
    with pytest.raises(DataQualityError):
        Observation(0, 0, 1, 1.0, 0.5)
    with pytest.raises(DataQualityError):
        Observation(0, 1, 1, math.inf, 0.5)
    with pytest.raises(DataQualityError):
        Observation(0, 1, 1, 1.0, 0.5, math.nan)


def test_boundary_config_domains():
    with pytest.raises(ContractError):
        BoundaryConfig(alpha=1.0)
    with pytest.raises(ContractError):
        BoundaryConfig(eta=0.0)
    with pytest.raises(ContractError):
        BoundaryConfig(m_bound=-1.0)
    with pytest.raises(ContractError):
        BoundaryConfig(rho=0.0)


@given(finite, nonneg)
def test_band_invariants(c, h):
    b = ConfidenceBand.around(1, c, h)
    assert b.lower == c - h and b.upper == c + h and b.half_width >= 0
    assert b.contains(c)
