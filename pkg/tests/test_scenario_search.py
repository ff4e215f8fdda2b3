import math

import numpy as np
import pytest

from frfc.errors import InvalidParameter, SizeLimit
from frfc.optim import NelderMeadConfig, RandomSource
from frfc.problems import (
    TWO_PRODUCT,
    NewsvendorParams,
    build_multi_product,
    build_newsvendor,
    sample_multi_product,
    sample_newsvendor,
)
from frfc.scenario_search import ScalingReport, ScalingRow, find_optimal_scenario, sample_cost, scaling_report


def test_newsvendor_search_matches_saa():
    prm = NewsvendorParams()
    inst = build_newsvendor(prm)
    D = sample_newsvendor(prm, RandomSource(1), 200)
    res = find_optimal_scenario(inst, D)
    z_saa, obj = inst.saa(D)
    assert res.sample_cost == pytest.approx(obj, rel=1e-6)
    assert res.sample_cost <= res.start_cost
    assert res.failures == 0


def test_unreliable_search_matches_saa():
    prm = NewsvendorParams(unreliable=True)
    inst = build_newsvendor(prm)
    S = sample_newsvendor(prm, RandomSource(2), 300)
    res = find_optimal_scenario(inst, S)
    z_saa, _ = inst.saa(S)
    obj = sample_cost(inst, z_saa, S)
    assert abs(res.sample_cost - obj) <= max(0.5, 1e-3 * abs(obj))
    assert res.induced_z[0] == pytest.approx(res.xi[0] / res.xi[1])


def test_inner_failures_are_counted():
    prm = NewsvendorParams(unreliable=True)
    inst = build_newsvendor(prm)
    S = np.array([[50.0, 0.5], [60.0, 0.7]])
    calls = []

    def inner(xi):
        calls.append(xi)
        if len(calls) == 3:
            raise InvalidParameter("synthetic failure")
        return inst.decide(xi[None, :])[0]

    res = find_optimal_scenario(inst, S, NelderMeadConfig(max_iter=30), inner=inner)
    assert res.failures == 1
    assert math.isfinite(res.sample_cost)


def test_empty_samples_rejected():
    inst = build_newsvendor(NewsvendorParams())
    with pytest.raises(InvalidParameter):
        find_optimal_scenario(inst, np.zeros((0, 1)))


def test_two_product_scaling_small():
    inst = build_multi_product(TWO_PRODUCT)
    rep = scaling_report(inst, [50, 200], RandomSource(3),
                         lambda rng, N: sample_multi_product(TWO_PRODUCT, rng, N))
    for row in rep.rows:
        assert abs(row.rel_obj_gap) <= 1e-3
        assert row.z_search.sum() == pytest.approx(300.0, abs=1e-6)
    assert rep.lp_grows_faster in (True, False)
    text = rep.to_csv(timings=False)
    assert text.splitlines()[0] == "N,t_search_s,t_lp_s,z_search_1,z_search_2,z_lp_1,z_lp_2,rel_obj_gap"
    assert text.splitlines()[1].startswith("50,,,")
    assert "lp_time_grows_faster" in rep.to_csv(timings=True)


def test_scaling_report_validation():
    inst = build_multi_product(TWO_PRODUCT)
    sampler = lambda rng, N: sample_multi_product(TWO_PRODUCT, rng, N)
    with pytest.raises(InvalidParameter):
        scaling_report(inst, [100, 50], RandomSource(0), sampler)
    with pytest.raises(SizeLimit):
        scaling_report(inst, [100], RandomSource(0), sampler, max_columns=10)


def test_growth_flag():
    row = lambda N, ts, tl: ScalingRow(N, ts, tl, np.zeros(1), np.zeros(1), 0.0, 0.0)
    assert ScalingReport([row(1, 1.0, 1.0), row(10, 2.0, 20.0)]).lp_grows_faster is True
    assert ScalingReport([row(1, 1.0, 1.0), row(10, 20.0, 2.0)]).lp_grows_faster is False
    assert ScalingReport([row(1, 1.0, 1.0)]).lp_grows_faster is None


def test_identical_samples_give_degenerate_optimum():
    inst = build_multi_product(TWO_PRODUCT)
    S = np.tile([[250.0, 80.0]], (20, 1))
    res = find_optimal_scenario(inst, S)
    want = inst.costs(inst.decide(S[:1]), S[:1])[0]
    assert res.sample_cost == pytest.approx(want, abs=1e-6)


@pytest.mark.parametrize("seed", range(4))
def test_search_bounds(seed):
    inst = build_multi_product(TWO_PRODUCT)
    S = sample_multi_product(TWO_PRODUCT, RandomSource(seed), 150)
    res = find_optimal_scenario(inst, S)
    _, obj = inst.saa(S)
    mean_cost = sample_cost(inst, inst.decide(S.mean(axis=0)[None, :])[0], S)
    assert res.sample_cost <= mean_cost
    assert res.sample_cost >= obj - 1e-6 * (1 + abs(obj))
    assert res.sample_cost == pytest.approx(sample_cost(inst, res.induced_z, S), rel=1e-9)


def test_single_sample_row():
    inst = build_multi_product(TWO_PRODUCT)
    rep = scaling_report(inst, [1], RandomSource(5),
                         lambda rng, N: sample_multi_product(TWO_PRODUCT, rng, N))
    row = rep.rows[0]
    np.testing.assert_allclose(row.z_search, row.z_lp, atol=1e-6)
    assert row.rel_obj_gap == pytest.approx(0.0, abs=1e-9)
