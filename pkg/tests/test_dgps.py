import math

import numpy as np
import pytest

from dbcs import DgpSpec, assign_bandit, generate, realize
from dbcs.dgps import KINDS, ols_proxy, running_mean_proxy
from dbcs.errors import ContractError


def test_assign_bandit_examples():
    assert assign_bandit(3.0, 1.0, 5) == 0.5
    assert math.isclose(assign_bandit(2.0, 1.0, 11), 2 / 3)
    assert assign_bandit(1.0, 0.0, 11, p_floor=0.01) == 0.99
    assert assign_bandit(None, 1.0, 11) == 0.5
    assert assign_bandit(0.0, 0.0, 11) == 0.5
    # shift by the joint minimum keeps the better arm favoured
    assert assign_bandit(-1.0, -3.0, 11) == 0.99
    assert 0.5 < assign_bandit(1.0, -1.0, 11) <= 0.99


@pytest.mark.parametrize("kind", KINDS)
def test_seed_determinism(kind):
    a = realize(DgpSpec(kind, {}, 42), 50, 3)
    b = realize(DgpSpec(kind, {}, 42), 50, 3)
    c = realize(DgpSpec(kind, {}, 42), 50, 4)
    assert np.array_equal(a.y, b.y) and np.array_equal(a.w, b.w) and np.array_equal(a.truth.values, b.truth.values)
    assert not np.array_equal(a.y, c.y)


@pytest.mark.parametrize("kind", KINDS)
def test_probabilities_interior(kind):
    real = realize(DgpSpec(kind, {}, 1), 300)
    assert np.all(real.p1 >= 0.01) and np.all(real.p1 <= 0.99)


def test_binary_signup_truth():
    real = realize(DgpSpec("binary_signup", {}, 0), 200_000)
    assert abs(real.truth.running[-1] - (-0.10)) < 0.005


def test_novelty_truth():
    real = realize(DgpSpec("novelty_carryover", {}, 5), 400)
    w = real.w[:, 0]
    prev = np.concatenate([[0], w[:-1]])
    t = np.arange(1, 401)
    assert np.array_equal(real.truth.values[prev == 0], 500.0 / np.sqrt(t[prev == 0]))
    assert np.all(real.truth.values[prev == 1] == 0.0)


def test_panel_degenerate_truth():
    real = realize(DgpSpec("panel_linear", {"mu_sd": 0.0, "mu": 20.0}, 1), 30)
    assert np.all(real.truth.values == 20.0)


def test_panel_ar_noise_moments():
    p = {"n_units": 200, "x_fixed": 25.0}
    real = realize(DgpSpec("panel_linear", p, 2), 200)
    mu_i = real.y - realize(DgpSpec("panel_linear", p, 2), 200).y  # same draws
    assert np.all(mu_i == 0)
    # recover Y(0) on control cells: Y_t - rho Y_{t-1} - beta X on consecutive control pairs
    y, w = real.y, real.w
    both = (w[1:] == 0) & (w[:-1] == 0)
    resid = (y[1:] - 0.5 * y[:-1] - 25.0)[both]
    assert abs(resid.mean()) < 0.3 and abs(resid.std() - 10.0) < 0.3


def test_gaussian_null():
    real = realize(DgpSpec("iid_gaussian_null", {}, 3), 100_000)
    assert np.all(real.truth.values == 0.0)
    assert abs(real.y.mean()) < 0.02 and abs(real.y.std() - 1.0) < 0.02


def test_observations_shape():
    obs, truth = generate(DgpSpec("panel_linear", {"n_units": 3}, 0), 4)
    assert len(obs) == 12 and len(truth) == 4
    assert [o.unit_id for o in obs[:3]] == [0, 1, 2] and obs[3].time == 2
    obs, _ = generate(DgpSpec("novelty_carryover", {}, 0), 3)
    assert {o.unit_id for o in obs} == {0}


def test_proxies_use_only_the_past():
    rng = np.random.default_rng(0)
    y = rng.normal(size=(10, 4))
    x = rng.normal(size=4)
    for f in (lambda yy: ols_proxy(yy, x), running_mean_proxy):
        base = f(y)
        y2 = y.copy()
        y2[6:] += 100.0
        assert np.array_equal(f(y2)[:7], base[:7])
        assert np.all(base[0] == 0.0)


def test_spec_contracts():
    with pytest.raises(ContractError):
        DgpSpec("nope")
    with pytest.raises(ContractError):
        DgpSpec("binary_signup", {"p_assign": 1.0})
    with pytest.raises(ContractError):
        DgpSpec("binary_signup", {}, 0, "ols")
    with pytest.raises(ContractError):
        DgpSpec("binary_signup", {}, -1)
    with pytest.raises(ContractError):
        realize(DgpSpec("binary_signup"), 0)
