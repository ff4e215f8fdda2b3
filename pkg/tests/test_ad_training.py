import math

import numpy as np
import pytest

from frfc.ad_training import (
    AffineFamily,
    ConstantFamily,
    bilevel_cost,
    ex_post_ideal,
    m5_ad_train,
    make_family,
    meta_train,
    write_training_log,
)
from frfc.errors import InvalidParameter
from frfc.forecasters import AffineForecaster, TreeHyper, fit_least_squares
from frfc.optim import NelderMeadConfig, RandomSource
from frfc.problems import NewsvendorParams, build_newsvendor

NV = build_newsvendor(NewsvendorParams())
PHI = NewsvendorParams().critical_ratio


def contextual_data(seed, N):
    g = np.random.default_rng(seed)
    X = g.uniform(0, 1, (N, 1))
    Xi = 50 + 30 * X + g.uniform(-20, 20, (N, 1))
    return X, Xi


def test_families():
    f = make_family("affine", 2, 3)
    assert f.n_params == 8
    assert make_family("constant", 2, 3).n_params == 2
    X = np.zeros((5, 3))
    np.testing.assert_allclose(ConstantFamily(1, 3).start(X, np.arange(5.0)[:, None]), [2.0])
    theta = np.arange(8.0)
    np.testing.assert_array_equal(AffineFamily(2, 3).build(theta).params(), theta)
    with pytest.raises(InvalidParameter):
        make_family("quadratic", 1, 1)


def test_bilevel_cost_matches_direct_computation():
    X, Xi = contextual_data(0, 50)
    f = AffineForecaster([40.0], [[20.0]])
    z = f.predict(X)[:, 0]
    direct = np.mean((300 - 4000) * z + 4300 * np.maximum(z - Xi[:, 0], 0) + 4000 * np.maximum(Xi[:, 0] - z, 0))
    assert bilevel_cost(NV, X, Xi, f) == pytest.approx(direct)


def test_bilevel_cost_failure_is_inf():
    inst = build_newsvendor(NewsvendorParams(unreliable=True))
    X = np.zeros((2, 1))
    # a forecast with zero reliability has no one-scenario decision
    f = AffineForecaster([50.0, 0.0], [[0.0], [0.0]])
    assert bilevel_cost(inst, X, np.array([[10.0, 0.5], [20.0, 0.5]]), f) == math.inf


def test_ex_post_ideal_is_a_floor():
    X, Xi = contextual_data(1, 80)
    floor = ex_post_ideal(NV, Xi)
    f = fit_least_squares(X, Xi)
    assert floor <= bilevel_cost(NV, X, Xi, f)


def test_constant_recovers_quantile():
    g = np.random.default_rng(2)
    Xi = g.uniform(0, 100, (1000, 1))
    X = np.zeros((1000, 1))
    run = meta_train(NV, X, Xi, "constant", rng=RandomSource(2))
    assert run.forecaster.intercept[0] == pytest.approx(np.quantile(Xi, PHI), abs=1.5)
    assert run.final_cost <= run.start_cost
    # the sample-mean forecast is the least-squares start
    assert run.start_cost == pytest.approx(bilevel_cost(NV, X, Xi, AffineForecaster.constant(Xi.mean(0), 1)))


def test_affine_ad_beats_least_squares_in_sample():
    X, Xi = contextual_data(3, 300)
    ls = fit_least_squares(X, Xi)
    run = meta_train(NV, X, Xi, "affine", rng=RandomSource(3))
    assert run.final_cost < bilevel_cost(NV, X, Xi, ls)
    # the learned intercept carries the upward bias of a high critical ratio
    assert run.forecaster.intercept[0] > ls.intercept[0]
    assert run.evaluations > 0 and run.inner_solves == run.evaluations * 300


def test_trace_is_monotone_and_logged():
    X, Xi = contextual_data(4, 100)
    run = meta_train(NV, X, Xi, "affine", NelderMeadConfig(max_iter=50))
    assert all(b <= a + 1e-12 for a, b in zip(run.cost_trace, run.cost_trace[1:]))
    text = write_training_log(run)
    lines = text.strip().splitlines()
    assert lines[0] == "iteration,best_cost,evaluations"
    assert len(lines) == len(run.cost_trace) + 1
    assert lines[1].startswith("0,")


def test_param_cap():
    X, Xi = contextual_data(5, 20)
    with pytest.raises(InvalidParameter):
        meta_train(NV, X, Xi, "affine", param_cap=1)


def test_meta_train_deterministic():
    X, Xi = contextual_data(6, 60)
    a = meta_train(NV, X, Xi, rng=RandomSource(1), cfg=NelderMeadConfig(max_iter=40))
    b = meta_train(NV, X, Xi, rng=RandomSource(1), cfg=NelderMeadConfig(max_iter=40))
    np.testing.assert_array_equal(a.theta_star, b.theta_star)


def test_m5_ad_fits_each_leaf():
    X, Xi = contextual_data(7, 200)
    X = np.hstack([X, np.random.default_rng(7).uniform(0, 1, (200, 1))])
    res = m5_ad_train(NV, X, Xi, TreeHyper(40), NelderMeadConfig(max_iter=60))
    assert len(res.runs) == res.tree.n_leaves
    for idx, run in zip(res.tree.cohorts, res.runs):
        assert run.final_cost <= run.start_cost
        assert run.final_cost == pytest.approx(bilevel_cost(NV, X[idx], Xi[idx], run.forecaster))


def test_m5_ad_small_leaf_falls_back_to_constant():
    X = np.arange(6.0)[:, None] * np.ones((1, 6))
    X += np.random.default_rng(8).normal(size=X.shape) * 1e-3
    Xi = np.arange(6.0)[:, None] * 10
    res = m5_ad_train(NV, X, Xi, TreeHyper(1, max_depth=0), NelderMeadConfig(max_iter=30))
    assert any("using a constant forecast" in ln for ln in res.log)
    assert np.allclose(res.tree.payloads[0].slopes, 0.0)


def test_single_sample_constant_is_that_sample():
    run = meta_train(NV, np.zeros((1, 1)), np.array([[37.0]]), "constant")
    assert run.forecaster.intercept[0] == pytest.approx(37.0, abs=1e-3)


def test_symmetric_costs_match_least_squares():
    # p + pi - c = c + eta makes the critical ratio 1/2: median = mean here
    inst = build_newsvendor(NewsvendorParams(c=300, p=1000, eta=400, pi=0))
    assert inst.params.critical_ratio == pytest.approx(0.5)
    g = np.random.default_rng(11)
    X = g.uniform(0, 1, (2000, 1))
    Xi = 50 + 30 * X + g.uniform(-20, 20, (2000, 1))
    ls = fit_least_squares(X, Xi)
    run = meta_train(inst, X, Xi, "affine", rng=RandomSource(11))
    grid = np.linspace(0, 1, 11)[:, None]
    np.testing.assert_allclose(run.forecaster.predict(grid), ls.predict(grid), rtol=0.05)


def test_single_leaf_tree_equals_affine_training():
    X, Xi = contextual_data(12, 80)
    cfg = NelderMeadConfig(max_iter=80)
    res = m5_ad_train(NV, X, Xi, TreeHyper(50), cfg, RandomSource(3))
    assert res.tree.n_leaves == 1
    run = meta_train(NV, X, Xi, "affine", cfg, RandomSource(3).child(0))
    np.testing.assert_array_equal(res.runs[0].theta_star, run.theta_star)


def two_regime(seed, N):
    g = np.random.default_rng(seed)
    X = g.uniform(0, 1, (N, 1))
    low = X[:, 0] < 0.5
    Xi = np.where(low, 20 + 10 * X[:, 0] + g.uniform(-5, 5, N),
                  80 - 20 * X[:, 0] + g.uniform(-30, 30, N))[:, None]
    return X, Xi


def test_m5_ad_beats_global_ad_on_two_regimes():
    X, Xi = two_regime(13, 600)
    Xt, Xit = two_regime(14, 4000)
    res = m5_ad_train(NV, X, Xi, TreeHyper(100, max_depth=1))
    glob = meta_train(NV, X, Xi, "affine")
    assert bilevel_cost(NV, Xt, Xit, res.tree) < bilevel_cost(NV, Xt, Xit, glob.forecaster)


def test_leaf_costs_not_worse_than_leaf_least_squares():
    X, Xi = two_regime(15, 300)
    res = m5_ad_train(NV, X, Xi, TreeHyper(60), NelderMeadConfig(max_iter=100))
    for idx, run in zip(res.tree.cohorts, res.runs):
        ls = fit_least_squares(X[idx], Xi[idx])
        assert run.final_cost <= bilevel_cost(NV, X[idx], Xi[idx], ls) + 1e-9


def test_regret_floor_random_parameters():
    X, Xi = contextual_data(16, 100)
    floor = ex_post_ideal(NV, Xi)
    g = np.random.default_rng(16)
    for _ in range(20):
        f = AffineForecaster(g.normal(50, 30, 1), g.normal(0, 50, (1, 1)))
        assert bilevel_cost(NV, X, Xi, f) >= floor - 1e-9


def test_more_data_does_not_hurt_held_out_cost():
    Xt, Xit = contextual_data(17, 10_000)
    costs = {}
    for N in (100, 10_000):
        X, Xi = contextual_data(18 + N, N)
        f = meta_train(NV, X, Xi, "affine", rng=RandomSource(N)).forecaster
        costs[N] = NV.costs(NV.decide(f.predict(Xt)), Xit)
    diff = costs[10_000] - costs[100]
    se = diff.std(ddof=1) / np.sqrt(diff.size)
    assert diff.mean() <= 3 * se
