"""One test per acceptance criterion; each prints a PASS/FAIL line."""
import time

import numpy as np
import pytest

from frfc.ad_training import bilevel_cost, meta_train
from frfc.cli import build_synthetic
from frfc.evaluation import ORACLE, ConditionalSamplePolicy, GapConfig, estimate_gaps
from frfc.forecasters import AffineForecaster, TreeHyper, best_split, fit_least_squares, node_sse
from frfc.lp import LinearProgram, LpStatus, solve_lp
from frfc.optim import RandomSource
from frfc.policies import PolicyHyper, fit_policy
from frfc.problems import (
    TWO_PRODUCT,
    NewsvendorParams,
    analytical_unreliable_optimum,
    build_multi_product,
    build_newsvendor,
    gen_dataset,
    random_frfc_instance,
    sample_multi_product,
    sample_newsvendor,
    unreliable_optimality_residual,
)
from frfc.scenario_search import find_optimal_scenario, sample_cost, scaling_report
from frfc.two_stage import (
    DEFAULT_PERTURBATION,
    construct_optimal_scenario,
    expected_cost,
    full_objective,
    mean_technology,
    one_scenario_solve,
    one_scenario_z_range,
    saa_solve,
)


def report(n, ok, detail):
    print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}: {detail}")


# 1 ------------------------------------------------------------------------


def test_criterion_1_analytical_unreliable_optimum():
    t0 = time.perf_counter()
    phi = NewsvendorParams().critical_ratio
    z = analytical_unreliable_optimum(phi, 100.0)
    res = abs(unreliable_optimality_residual(z, phi, 100.0))
    elapsed = time.perf_counter() - t0
    ok = round(phi, 3) == 0.928 and abs(z - 214.73) <= 0.01 and res <= 1e-8 and elapsed < 1.0
    report(1, ok, f"phi={phi:.6f} z*={z:.4f} residual={res:.2e} time={elapsed:.3f}s")
    assert round(phi, 3) == 0.928
    assert abs(z - 214.73) <= 0.01
    assert res <= 1e-8
    assert elapsed < 1.0


# 2 ------------------------------------------------------------------------


def test_criterion_2_unreliable_scenario_search():
    prm = NewsvendorParams(unreliable=True)
    inst = build_newsvendor(prm)
    rows, all_ok = [], True
    for r in range(5):
        S = sample_newsvendor(prm, RandomSource(7, r), 1000)
        res = find_optimal_scenario(inst, S)
        z_saa, _ = inst.saa(S)
        obj_s, obj_l = res.sample_cost, sample_cost(inst, z_saa, S)
        ratio = res.xi[0] / res.xi[1]
        agree = abs(obj_s - obj_l) <= max(0.5, 1e-3 * abs(obj_l))
        in_range = 205.0 <= ratio <= 225.0
        all_ok &= agree and in_range
        rows.append(f"rep {r}: D*/U*={ratio:.2f} saa={z_saa[0]:.2f} "
                    f"dobj={obj_s - obj_l:.3g} agree={agree} in_range={in_range}")
    report(2, all_ok, "; ".join(rows))
    assert all_ok


# 3 ------------------------------------------------------------------------


def test_criterion_3_two_product_scaling():
    inst = build_multi_product(TWO_PRODUCT)
    rep = scaling_report(inst, [100, 1000, 5000], RandomSource(3),
                         lambda rng, N: sample_multi_product(TWO_PRODUCT, rng, N))
    ok = True
    parts = []
    for row in rep.rows:
        good = abs(row.rel_obj_gap) <= 1e-3 and abs(row.z_search.sum() - 300.0) <= 1e-6 \
            and abs(row.z_lp.sum() - 300.0) <= 1e-6
        ok &= good
        parts.append(f"N={row.N} gap={row.rel_obj_gap:.1e} t_search={row.t_search_s:.2f}s "
                     f"t_lp={row.t_lp_s:.2f}s")
    parts.append(f"lp_grows_faster={rep.lp_grows_faster} (informational)")
    report(3, ok, "; ".join(parts))
    assert ok


# 4 ------------------------------------------------------------------------


def mean_technology_round_trip(seed):
    g = np.random.default_rng(seed)
    n, m, K = int(g.integers(1, 6)), int(g.integers(1, 7)), int(g.integers(1, 21))
    ri = random_frfc_instance(RandomSource(4, seed), n, m, K)
    p = ri.problem
    z, _ = saa_solve(p, ri.scenarios, ri.weights, DEFAULT_PERTURBATION)
    xs = construct_optimal_scenario(p, z, mean_technology(p, ri.scenarios, ri.weights))
    z1, val = one_scenario_solve(p, xs, DEFAULT_PERTURBATION)
    g_star = full_objective(p, z, xs)
    value_ok = abs(val - g_star) <= 1e-6 * max(1.0, abs(g_star))
    width = np.ptp(one_scenario_z_range(p, xs, DEFAULT_PERTURBATION), axis=1)
    tol = 1e-4 * (1.0 + np.abs(z).max())
    unique = bool(np.all(width <= 1e-5 * (1.0 + np.abs(z).max())))
    dist_ok = (not unique) or np.abs(z1 - z).max() <= tol
    return value_ok, dist_ok, unique


def test_criterion_4_mean_technology_round_trip():
    t0 = time.perf_counter()
    results = [mean_technology_round_trip(s) for s in range(200)]
    elapsed = time.perf_counter() - t0
    value_fail = sum(not v for v, _, _ in results)
    dist_fail = sum(not d for _, d, _ in results)
    unique = sum(u for _, _, u in results)
    ok = value_fail == 0 and dist_fail == 0 and elapsed < 60
    report(4, ok, f"200 instances, value failures={value_fail}, distance failures={dist_fail}, "
                  f"unique after perturbation={unique}, time={elapsed:.1f}s")
    assert value_fail == 0 and dist_fail == 0
    assert elapsed < 60


# 5 ------------------------------------------------------------------------


def test_criterion_5_zero_mean_technology():
    mismatches = []
    for seed in range(50):
        g = np.random.default_rng(seed)
        n, m, K = int(g.integers(1, 6)), int(g.integers(1, 7)), int(g.integers(2, 21))
        ri = random_frfc_instance(RandomSource(5, seed), n, m, K, random_T=True, zero_mean_T=True)
        p = ri.problem
        z, obj = saa_solve(p, ri.scenarios, ri.weights, DEFAULT_PERTURBATION)
        first = solve_lp(LinearProgram(DEFAULT_PERTURBATION.apply(p.c), A_ub=p.A, b_ub=p.b))
        assert first.status is LpStatus.OPTIMAL
        z0 = first.primal
        # same tolerances as the round trip: objective, then decision distance
        obj0 = expected_cost(p, z0, ri.scenarios, ri.weights)
        tol = 1e-4 * (1.0 + np.abs(z).max())
        if abs(obj0 - obj) > 1e-6 * max(1.0, abs(obj)) or np.abs(z0 - z).max() > tol:
            mismatches.append(seed)
    ok = not mismatches
    report(5, ok, f"{len(mismatches)}/50 instances where the sample optimum differs from the "
                  f"first-stage-only optimum")
    assert ok


# 6 ------------------------------------------------------------------------


def test_criterion_6_coupled_constraint():
    prm = NewsvendorParams(coupled=True)
    inst = build_newsvendor(prm)
    D = sample_newsvendor(prm, RandomSource(6), 1000)
    z, obj = inst.saa(D)
    xs = construct_optimal_scenario(inst.problem, z, inst.problem.T)
    z1, _ = one_scenario_solve(inst.problem, xs)
    attained = float(np.mean(inst.costs(z1, D)))
    broken = not np.isclose(xs.h[1], 2.0 * xs.h[0])
    rel = abs(attained - obj) / max(1.0, abs(obj))
    ok = np.allclose(xs.h, [-z[0], -z[0]]) and broken and rel <= 1e-6
    report(6, ok, f"h*={xs.h.round(4).tolist()} z*={z[0]:.4f} one-scenario z={z1[0]:.4f} rel={rel:.1e}")
    assert ok


# 7 ------------------------------------------------------------------------


def test_criterion_7_ad_bias_recovery():
    prm = NewsvendorParams()
    inst = build_newsvendor(prm)
    D = sample_newsvendor(prm, RandomSource(7), 5000)
    X = np.zeros((5000, 1))
    run = meta_train(inst, X, D, "constant", rng=RandomSource(7))
    theta = float(run.forecaster.intercept[0])
    mean_cost = bilevel_cost(inst, X, D, AffineForecaster.constant(D.mean(axis=0), 1))
    ok = abs(theta - 92.8) <= 0.03 * 92.8 and run.final_cost <= mean_cost
    report(7, ok, f"constant={theta:.3f} (target 92.8), cost={run.final_cost:.1f} "
                  f"vs sample-mean forecast {D.mean():.2f} cost={mean_cost:.1f}")
    assert ok


# 8, 9 ---------------------------------------------------------------------

ORDER_POLICIES = ("SAA", "ERSAA", "LS", "AD", "M5AD")
_GAP_CACHE = {}


def gap_report(problem):
    if problem not in _GAP_CACHE:
        seed = 11
        inst, gen = build_synthetic(problem, 1.0, seed)
        X, Xi = gen_dataset(gen, RandomSource(seed, 104), 1000)
        hyper = PolicyHyper(tree=TreeHyper(25), param_cap=200, seed=seed)
        pols = {k: fit_policy(k, inst, X, Xi, hyper) for k in ORDER_POLICIES}
        pols[ORACLE] = None
        pols["COND"] = ConditionalSamplePolicy(inst, gen, RandomSource(seed, 106), 1000)
        cfg = GapConfig(1000, 30, 30, seed=seed)
        _GAP_CACHE[problem] = estimate_gaps(pols, inst, gen, RandomSource(seed, 105), cfg)
    return _GAP_CACHE[problem]


@pytest.mark.parametrize("problem", ["shipment", "resource"])
def test_criterion_8_method_ordering(problem):
    rep = gap_report(problem)
    assert not rep.partial, rep.error
    med = {k: rep.median(k) for k in ORDER_POLICIES}
    saa_worst = all(med["SAA"] > med[k] for k in ("AD", "M5AD", "ERSAA"))
    ad_beats_ls = all(med[k] <= med["LS"] for k in ("AD", "M5AD"))
    ok = saa_worst and ad_beats_ls
    detail = " ".join(f"{k}={v:.3f}%" for k, v in med.items())
    report(8, ok, f"{problem}: median B99 {detail}")
    assert saa_worst and ad_beats_ls


@pytest.mark.parametrize("problem", ["shipment", "resource"])
def test_criterion_9_oracle_floor(problem):
    rep = gap_report(problem)
    b = rep.b99(ORACLE)
    ok = b.size == 30 and bool(np.all(b <= 0.5))
    # cross-check: an oracle deciding on an independent conditional draw
    cond = rep.b99("COND")
    report(9, ok, f"{problem}: oracle B99 max={b.max():.4f}% over {b.size} covariates; "
                  f"independent-draw oracle B99 max={cond.max():.4f}% median={np.median(cond):.4f}%")
    assert ok


# 10 -----------------------------------------------------------------------


def random_lp(g):
    m, n = int(g.integers(1, 8)), int(g.integers(1, 10))
    A = g.normal(size=(m, n))
    x0 = g.uniform(0, 1, n)
    b = A @ x0  # feasible by construction
    c = g.uniform(0.1, 2.0, n) + A.T @ g.normal(size=m)  # dual feasible: bounded
    k = int(g.integers(0, 4))
    A_ub = g.normal(size=(k, n)) if k else None
    b_ub = (A_ub @ x0 + g.uniform(0, 1, k)) if k else None
    return LinearProgram(c, A_eq=A, b_eq=b, A_ub=A_ub, b_ub=b_ub)


def kkt_failures(lp, sol):
    x, y, w = sol.primal, sol.duals_eq, sol.duals_ineq
    tol = 1e-7 * (1 + np.abs(lp.c).max() + np.abs(x).max())
    bad = 0
    bad += np.abs(lp.A_eq @ x - lp.b_eq).max() > tol if lp.n_eq else 0
    bad += (x < -tol).any()
    red = lp.c - (lp.A_eq.T @ y if lp.n_eq else 0)
    if lp.n_ub:
        bad += (lp.A_ub @ x - lp.b_ub > tol).any()
        bad += (w > tol).any()
        red = red - lp.A_ub.T @ w
        bad += np.abs(w * (lp.A_ub @ x - lp.b_ub)).max() > tol
    bad += (red < -tol).any()
    bad += np.abs(red * x).max() > tol
    dual_obj = (lp.b_eq @ y if lp.n_eq else 0) + (lp.b_ub @ w if lp.n_ub else 0)
    bad += abs(dual_obj - sol.objective) > tol * (1 + abs(sol.objective))
    return int(bad > 0)


def exhaustive_sse(X, Y, min_leaf):
    best = None
    for j in range(X.shape[1]):
        vals = np.unique(X[:, j])
        for a, b in zip(vals[:-1], vals[1:]):
            left = X[:, j] <= 0.5 * (a + b)
            if min_leaf <= left.sum() <= X.shape[0] - min_leaf:
                sse = node_sse(Y[left]) + node_sse(Y[~left])
                best = sse if best is None else min(best, sse)
    return best


def test_criterion_10_kernels():
    g = np.random.default_rng(10)
    lp_fail = 0
    for _ in range(1000):
        lp = random_lp(g)
        sol = solve_lp(lp, method="simplex")
        lp_fail += sol.status is not LpStatus.OPTIMAL or kkt_failures(lp, sol)

    split_fail = 0
    for _ in range(300):
        N = int(g.integers(2, 51))
        X = g.integers(0, 6, (N, int(g.integers(1, 4)))).astype(float)
        Y = g.normal(size=(N, int(g.integers(1, 3))))
        ml = int(g.integers(1, 6))
        got, want = best_split(X, Y, ml), exhaustive_sse(X, Y, ml)
        split_fail += (got is None) != (want is None) or (
            got is not None and abs(got.sse - want) > 1e-9 * (1 + want))

    ls_err = 0.0
    for _ in range(100):
        N, s = int(g.integers(5, 60)), int(g.integers(1, 4))
        X = g.normal(size=(N, s))
        Y = g.normal(size=(N, 2))
        f = fit_least_squares(X, Y)
        D = np.hstack([np.ones((N, 1)), X])
        coef = np.linalg.solve(D.T @ D, D.T @ Y)
        ls_err = max(ls_err, np.abs(f.intercept - coef[0]).max(), np.abs(f.slopes - coef[1:].T).max())

    def seeded_text():
        inst = build_multi_product(TWO_PRODUCT)
        rep = scaling_report(inst, [50, 100], RandomSource(1),
                             lambda rng, N: sample_multi_product(TWO_PRODUCT, rng, N))
        return rep.to_csv(timings=False)

    reproducible = seeded_text() == seeded_text()
    ok = lp_fail == 0 and split_fail == 0 and ls_err <= 1e-8 and reproducible
    report(10, ok, f"LP KKT failures={lp_fail}/1000, split mismatches={split_fail}/300, "
                   f"LS max error={ls_err:.1e}, byte-reproducible={reproducible}")
    assert ok
