"""Fast consistency checks run by ``frfc selftest``."""
from __future__ import annotations

import numpy as np

from .ad_training import meta_train
from .lp import LinearProgram, dual_objective, primal_residual, solve_lp
from .optim import RandomSource
from .problems import (
    NewsvendorParams,
    analytical_unreliable_optimum,
    build_newsvendor,
    critical_ratio,
    random_frfc_instance,
    unreliable_optimality_residual,
)
from .two_stage import (
    DEFAULT_PERTURBATION,
    construct_optimal_scenario,
    full_objective,
    one_scenario_solve,
    saa_solve,
)


def _lp_duality(seed: int, count: int = 100):
    gen = RandomSource(seed, 1).generator()
    failures = 0
    for _ in range(count):
        m, n = gen.integers(1, 6), gen.integers(1, 8)
        A = gen.normal(size=(m, n))
        lp = LinearProgram(gen.normal(size=n) + 1.0, A_ub=A, b_ub=A @ gen.uniform(0, 1, n) + 0.1,
                           A_eq=None, b_eq=None)
        sol = solve_lp(lp, method="simplex")
        if not sol.optimal:
            continue
        gap = abs(sol.objective - dual_objective(lp, sol))
        if gap > 1e-7 * (1 + abs(sol.objective)) or primal_residual(lp, sol.primal) > 1e-8:
            failures += 1
    return failures == 0, f"{failures} failures in {count} random LPs"


def _round_trip(seed: int, count: int = 20):
    failures = 0
    for i in range(count):
        ri = random_frfc_instance(RandomSource(seed, 100 + i), n=1 + i % 5, m=1 + i % 6, K=1 + i % 20)
        p = ri.problem
        H = np.array([s.h for s in ri.scenarios])
        z, _ = saa_solve(p, H, ri.weights, DEFAULT_PERTURBATION)
        xs = construct_optimal_scenario(p, z, p.T)
        _, val = one_scenario_solve(p, xs, DEFAULT_PERTURBATION)
        g = full_objective(p, z, xs)
        if abs(val - g) > 1e-6 * (1 + abs(g)):
            failures += 1
    return failures == 0, f"{failures} failures in {count} instances"


def _quantile(seed: int):
    inst = build_newsvendor(NewsvendorParams())
    gen = RandomSource(seed, 2).generator()
    D = gen.uniform(0.0, 100.0, 2000)[:, None]
    run = meta_train(inst, np.zeros((D.shape[0], 1)), D, "constant")
    target = 100.0 * critical_ratio(300, 4000, 300, 4000)
    value = float(run.theta_star[0])
    return abs(value - target) <= 0.03 * target, f"constant forecast {value:.3f}, target {target:.3f}"


def _analytical():
    phi = critical_ratio(300, 4000, 300, 4000)
    z = analytical_unreliable_optimum(phi, 100.0)
    res = unreliable_optimality_residual(z, phi, 100.0)
    return abs(z - 214.73) <= 0.01 and abs(res) <= 1e-8, f"z* = {z:.4f}, residual {res:.1e}"


def run_selftest(seed: int = 5):
    """``(name, passed, detail)`` per check."""
    checks = [
        ("lp-duality", lambda: _lp_duality(seed)),
        ("optimal-scenario-round-trip", lambda: _round_trip(seed)),
        ("quantile-recovery", lambda: _quantile(seed)),
        ("unreliable-analytical", _analytical),
    ]
    out = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, not a crashed selftest
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
