import math

import numpy as np
import pytest

from dhjlab import closed_forms as cf
from dhjlab import densities as D
from dhjlab.conjugation import sqrt_change, transport_density
from dhjlab.inversion import Tabulated, cdf_from_lt
from dhjlab.simulate import (FPTSampleSet, SimConfig, empirical_cdf, ks_compare,
                             simulate_fpt, simulate_fpt_coupled, with_seed)
from dhjlab.transforms import DriftParams, forward_fpt_lt, mean_fpt

EX1 = DriftParams(0.0, 1.0, 1.0)


def cfg(params=EX1, density=None, **kw):
    return SimConfig(params, density or D.uniform_density(params.S), **kw)


def within(sample, target, k=3.0):
    return abs(sample.mean - target) < k * sample.stderr


# -- configuration -----------------------------------------------------------

@pytest.mark.parametrize("kw", [dict(n_paths=0), dict(dt=0.0), dict(dt=0.02),
                                dict(t_max=-1.0), dict(scheme="milstein")])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        cfg(**kw)


def test_density_must_match_barrier():
    with pytest.raises(ValueError):
        SimConfig(EX1, D.uniform_density(2.0))


def test_density_without_compiled_sampler_is_rejected():
    q = D.uniform_density(2.0)
    moved = transport_density(q, sqrt_change(), 1.0)
    with pytest.raises(ValueError):
        SimConfig(EX1, moved)


def test_default_horizon():
    assert cfg().horizon == pytest.approx(2000.0)
    assert cfg(DriftParams(0.0, 2.0, math.inf)).horizon == pytest.approx(4000.0)


# -- reproducibility ---------------------------------------------------------

def test_determinism():
    a = simulate_fpt(cfg(n_paths=2000, seed=11))
    b = simulate_fpt(cfg(n_paths=2000, seed=11))
    np.testing.assert_array_equal(a.samples, b.samples)
    c = simulate_fpt(with_seed(cfg(n_paths=2000), 12))
    assert not np.array_equal(a.samples, c.samples)


def test_paths_do_not_depend_on_batch_size():
    # per-path streams: the first paths of a larger run are the same paths
    small = simulate_fpt(cfg(n_paths=300, seed=5, initial_hold=False))
    big = simulate_fpt(cfg(n_paths=900, seed=5, initial_hold=False))
    assert np.isin(small.samples, big.samples).all()


def test_parallel_matches_sequential():
    a = simulate_fpt(cfg(n_paths=3000, seed=9))
    b = simulate_fpt(cfg(n_paths=3000, seed=9, parallel=True))
    np.testing.assert_array_equal(a.samples, b.samples)


def test_sample_set_invariants():
    s = simulate_fpt(cfg(n_paths=5000, seed=1))
    assert s.nan_count == 0 and s.censored_count == 0
    assert s.n_hit == 5000
    assert np.all(s.samples > 0) and np.all(s.samples <= cfg().horizon)
    assert np.all(np.diff(s.samples) >= 0)


def test_censoring_counts():
    s = simulate_fpt(cfg(n_paths=2000, seed=1, t_max=0.5))
    assert s.censored_count > 0
    assert s.n_hit + s.censored_count == 2000
    assert s.censored_fraction == s.censored_count / 2000
    assert np.all(s.samples <= 0.5)


def test_csv_round_trip(tmp_path):
    s = simulate_fpt(cfg(n_paths=500, seed=2, t_max=2.0))
    p = tmp_path / "tau.csv"
    s.to_csv(str(p))
    back = FPTSampleSet.from_csv(str(p))
    np.testing.assert_array_equal(back.samples, s.samples)
    assert (back.n_paths, back.censored_count) == (500, s.censored_count)
    assert back.config["seed"] == 2


# -- discretisation ----------------------------------------------------------

def test_halving_dt_changes_mean_by_less_than_one_stderr():
    coarse, fine = simulate_fpt_coupled(cfg(n_paths=20_000, dt=1e-3, seed=3))
    assert abs(coarse.mean - fine.mean) < fine.stderr


def test_coupled_fine_run_is_plain_run():
    _, fine = simulate_fpt_coupled(cfg(n_paths=1000, dt=2e-3, seed=4))
    plain = simulate_fpt(cfg(n_paths=1000, dt=1e-3, seed=4))
    np.testing.assert_array_equal(fine.samples, plain.samples)


def test_bridge_correction_reduces_bias():
    target = mean_fpt(1.0, 1 / 3, 1.0)
    bridge = simulate_fpt(cfg(n_paths=50_000, dt=1e-3, seed=7))
    plain = simulate_fpt(cfg(n_paths=50_000, dt=1e-3, seed=7, scheme="euler"))
    assert abs(bridge.mean - target) < abs(plain.mean - target)


# -- distributional checks ----------------------------------------------------

def test_start_next_to_barrier():
    s = simulate_fpt(cfg(DriftParams(0.0, 1.0, 1.0, 1.0 - 1e-3), n_paths=2000, dt=1e-5,
                         seed=8))
    assert float(np.median(s.samples)) < 0.01


def test_negative_drift_is_slower():
    a = simulate_fpt(cfg(n_paths=20_000, seed=10))
    b = simulate_fpt(cfg(DriftParams(-0.5, 1.0, 1.0), n_paths=20_000, seed=10))
    assert b.mean > a.mean


@pytest.mark.parametrize("x,lam,expected", [(0.3, 1.0, 0.403160791674207184778),
                                            (0.0, 0.7, 0.456642880732473677001)])
def test_transform_of_samples_with_drift(x, lam, expected):
    p = DriftParams(-0.5, 1.0, 2.0, x)
    s = simulate_fpt(cfg(p, n_paths=40_000, dt=5e-4, seed=21))
    e = np.exp(-lam * s.samples)
    assert abs(e.mean() - expected) < 3 * e.std() / math.sqrt(e.size)
    assert forward_fpt_lt(lam, p, D.uniform_density().lt) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("hold", [True, False])
def test_mean_with_and_without_initial_hold(hold):
    s = simulate_fpt(cfg(n_paths=40_000, dt=5e-4, seed=31, initial_hold=hold))
    assert within(s, mean_fpt(1.0, 1 / 3, 1.0, initial_hold=hold))


def test_no_holding_limit():
    s = simulate_fpt(cfg(DriftParams(0.0, 1.0, math.inf), n_paths=40_000, dt=1e-4, seed=41))
    assert within(s, 1 / 3)


def test_empirical_cdf():
    s = FPTSampleSet(np.array([0.5, 1.0, 2.0]), 4, 1, 0)
    e = empirical_cdf(s, [0.4, 0.5, 1.5, 10.0])
    np.testing.assert_allclose(e.y, [0.0, 0.25, 0.5, 0.75])


def test_ks_detects_wrong_reference():
    s = simulate_fpt(cfg(n_paths=20_000, seed=50))
    t = np.linspace(0.01, 30.0, 400)
    right = cdf_from_lt(lambda l: cf.fhat_uniform(l, 1.0, 1.0), t)
    wrong = cdf_from_lt(lambda l: cf.fhat_uniform(l, 1.0, 3.0), t)
    assert ks_compare(s, right).passed
    assert not ks_compare(s, wrong).passed


def test_ks_with_callable_reference():
    s = FPTSampleSet(np.sort(np.random.default_rng(0).exponential(size=5000)), 5000, 0, 0)
    assert ks_compare(s, lambda t: -np.expm1(-np.asarray(t))).passed
    assert not ks_compare(s, lambda t: -np.expm1(-2 * np.asarray(t))).passed


@pytest.mark.slow
@pytest.mark.parametrize("name,beta", [("uniform", 1.0), ("sine", 3.0), ("parabolic", 1.0),
                                       ("triangular", 5.0)])
def test_ks_examples(name, beta):
    d = D.by_name(name, 1.0)
    s = simulate_fpt(SimConfig(DriftParams(0.0, 1.0, beta), d, n_paths=100_000, dt=1e-4,
                               seed=100))
    f = cf.closed_form(name, 1.0, beta)
    ref = cdf_from_lt(f, np.linspace(1e-3, s.samples[-1] * 1.01, 800))
    assert ref.all_ok
    assert isinstance(ref, Tabulated)
    res = ks_compare(s, ref)
    assert res.passed, res
