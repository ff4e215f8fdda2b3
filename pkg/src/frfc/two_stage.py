"""Two-stage linear programs with fixed recourse and fixed costs.

A problem is::

    min_z  c@z + E[Q(z, xi)]     s.t.  A z <= b,  z >= 0
    Q(z, xi) = min_y { q@y : W y = h - T z, y >= 0 }

with ``W`` and ``q`` deterministic.  A scenario carries ``h`` and, when the
technology matrix is random, its own ``T``.

Batch routines take right-hand sides as ``(K, m)`` arrays so that thousands of
second-stage problems can share cached optimal bases (see
:class:`frfc.lp.RhsFamily`).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from .errors import (
    DimensionMismatch,
    Infeasible,
    InvalidParameter,
    NumericalFailure,
    SecondStageInfeasible,
    SecondStageUnbounded,
    SizeLimit,
    Unbounded,
)
from .lp import LinearProgram, LpStatus, RhsFamily, solve_lp

FEAS_TOL = 1e-8


@dataclass(frozen=True)
class Scenario:
    h: np.ndarray
    T: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "h", np.asarray(self.h, dtype=float).ravel())
        if self.T is not None:
            object.__setattr__(self, "T", np.atleast_2d(np.asarray(self.T, dtype=float)))


@dataclass(frozen=True)
class UniquenessPerturbation:
    """Deterministic cost scaling ``1 + epsilon * (i + 1) / (n + 1)``."""

    epsilon: float = 1e-6

    def __post_init__(self):
        if self.epsilon < 0:
            raise InvalidParameter("epsilon must be >= 0")

    def multipliers(self, n: int) -> np.ndarray:
        return 1.0 + self.epsilon * (np.arange(1, n + 1) / (n + 1))

    def apply(self, costs: np.ndarray) -> np.ndarray:
        return np.asarray(costs, dtype=float) * self.multipliers(len(costs))


NO_PERTURBATION = UniquenessPerturbation(0.0)
DEFAULT_PERTURBATION = UniquenessPerturbation(1e-6)


@dataclass(frozen=True, eq=False)
class FrfcProblem:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    W: np.ndarray
    q: np.ndarray
    T: np.ndarray
    name: str = "frfc"
    _local: threading.local = field(default_factory=threading.local, init=False, repr=False)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        n = c.size
        A = np.asarray(self.A, dtype=float).reshape(-1, n)
        b = np.asarray(self.b, dtype=float).ravel()
        W = np.atleast_2d(np.asarray(self.W, dtype=float))
        q = np.asarray(self.q, dtype=float).ravel()
        T = np.asarray(self.T, dtype=float).reshape(W.shape[0], n)
        if A.shape[0] != b.size:
            raise DimensionMismatch("A and b disagree on the number of rows")
        if W.shape[1] != q.size:
            raise DimensionMismatch("W and q disagree on the number of recourse variables")
        for name, arr in (("c", c), ("A", A), ("b", b), ("W", W), ("q", q), ("T", T)):
            if not np.all(np.isfinite(arr)):
                raise InvalidParameter(f"{name} has non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def m(self) -> int:
        """Scenario dimension (rows of W)."""
        return self.W.shape[0]

    @property
    def n_y(self) -> int:
        return self.q.size

    def scenario(self, h, T=None) -> Scenario:
        s = Scenario(h, T)
        check_scenario(self, s)
        return s

    def in_Z(self, z: np.ndarray, tol: float = 1e-7) -> bool:
        z = np.asarray(z, dtype=float)
        scale = 1.0 + np.abs(z).max(initial=0.0)
        if z.min(initial=0.0) < -tol * scale:
            return False
        if self.A.shape[0] and (self.A @ z - self.b).max() > tol * (scale + np.abs(self.b).max()):
            return False
        return True

    # per-thread solver workspaces ------------------------------------------------
    def _families(self) -> dict:
        fam = getattr(self._local, "families", None)
        if fam is None:
            fam = self._local.families = {}
        return fam

    def recourse_family(self, pert: UniquenessPerturbation = NO_PERTURBATION) -> RhsFamily:
        key = ("recourse", pert.epsilon)
        fam = self._families()
        if key not in fam:
            fam[key] = RhsFamily(self.W, pert.apply(self.q))
        return fam[key]

    def one_scenario_matrix(self) -> np.ndarray:
        k = self.A.shape[0]
        top = np.hstack([self.A, np.zeros((k, self.n_y)), np.eye(k)])
        bottom = np.hstack([self.T, self.W, np.zeros((self.m, k))])
        return np.vstack([top, bottom])

    def one_scenario_family(self, pert: UniquenessPerturbation) -> RhsFamily:
        key = ("one", pert.epsilon)
        fam = self._families()
        if key not in fam:
            cost = np.concatenate([pert.apply(self.c), pert.apply(self.q), np.zeros(self.A.shape[0])])
            fam[key] = RhsFamily(self.one_scenario_matrix(), cost)
        return fam[key]


ScenarioLike = Union[Scenario, np.ndarray, Sequence[float]]


def check_scenario(p: FrfcProblem, s: Scenario) -> None:
    if s.h.size != p.m:
        raise DimensionMismatch(f"scenario has {s.h.size} entries, problem expects {p.m}")
    if s.T is not None and s.T.shape != p.T.shape:
        raise DimensionMismatch(f"scenario T has shape {s.T.shape}, expected {p.T.shape}")


def _as_scenario(p: FrfcProblem, s: ScenarioLike) -> Scenario:
    s = s if isinstance(s, Scenario) else Scenario(s)
    check_scenario(p, s)
    return s


def as_batch(p: FrfcProblem, scenarios) -> Tuple[np.ndarray, Optional[List[np.ndarray]]]:
    """Stack scenarios into ``(H, Ts)``; ``Ts`` is ``None`` when every ``T`` is fixed."""
    if isinstance(scenarios, np.ndarray):
        H = np.atleast_2d(np.asarray(scenarios, dtype=float))
        if H.shape[1] != p.m:
            raise DimensionMismatch(f"scenario rows have {H.shape[1]} entries, expected {p.m}")
        return H, None
    scen = [_as_scenario(p, s) for s in scenarios]
    if not scen:
        raise InvalidParameter("no scenarios given")
    H = np.vstack([s.h for s in scen])
    if all(s.T is None for s in scen):
        return H, None
    return H, [p.T if s.T is None else s.T for s in scen]


def _recourse_rhs(p: FrfcProblem, Z: np.ndarray, H: np.ndarray, Ts) -> np.ndarray:
    if Ts is None:
        return H - Z @ p.T.T
    return H - np.einsum("kij,kj->ki", np.asarray(Ts), Z)


def _family_solve(family: RhsFamily, R: np.ndarray, what: str, hint=None):
    try:
        return family.solve_many(R.T, hint)
    except Unbounded as exc:
        raise SecondStageUnbounded(f"{what} is unbounded") from exc
    except Infeasible as exc:
        raise SecondStageInfeasible(f"{what} is infeasible") from exc


# --------------------------------------------------------------------------
# second stage


def second_stage_batch(p: FrfcProblem, Z, scenarios, pert: UniquenessPerturbation = NO_PERTURBATION):
    """Values, duals and recourse decisions for pairs ``(Z[k], scenario k)``.

    ``Z`` may be one decision (broadcast) or ``(K, n)``.  Returns
    ``(values (K,), duals (K, m), Y (K, n_y))``; values use the true ``q``.
    """
    H, Ts = as_batch(p, scenarios)
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if Z.shape[1] != p.n:
        raise DimensionMismatch(f"z has {Z.shape[1]} entries, expected {p.n}")
    Z = np.broadcast_to(Z, (H.shape[0], p.n))
    R = _recourse_rhs(p, Z, H, Ts)
    Y, U, _ = _family_solve(p.recourse_family(pert), R, "second stage")
    Y = Y.T
    return Y @ p.q, U.T, Y


def second_stage_value(p: FrfcProblem, z, s: ScenarioLike) -> Tuple[float, np.ndarray]:
    """``Q(z, s)`` and the equality multipliers of the recourse LP."""
    s = _as_scenario(p, s)
    z = np.asarray(z, dtype=float).ravel()
    if z.size != p.n:
        raise DimensionMismatch(f"z has {z.size} entries, expected {p.n}")
    values, duals, _ = second_stage_batch(p, z, [s])
    return float(values[0]), duals[0]


def full_objective(p: FrfcProblem, z, s: ScenarioLike) -> float:
    """``G(z, s) = c@z + Q(z, s)``."""
    z = np.asarray(z, dtype=float).ravel()
    return float(p.c @ z) + second_stage_value(p, z, s)[0]


def full_objectives(p: FrfcProblem, Z, scenarios) -> np.ndarray:
    """Vectorized ``G(Z[k], scenario k)``."""
    values, _, _ = second_stage_batch(p, Z, scenarios)
    Z = np.broadcast_to(np.atleast_2d(np.asarray(Z, dtype=float)), (values.size, p.n))
    return Z @ p.c + values


def expected_cost(p: FrfcProblem, z, scenarios, weights=None) -> float:
    """Weighted average of ``G(z, .)`` over scenarios (uniform by default)."""
    costs = full_objectives(p, z, scenarios)
    w = _weights(weights, costs.size)
    return float(w @ costs)


def _weights(weights, K: int) -> np.ndarray:
    if weights is None:
        return np.full(K, 1.0 / K)
    w = np.asarray(weights, dtype=float).ravel()
    if w.size != K:
        raise DimensionMismatch("weights and scenarios differ in length")
    if w.min() < 0 or abs(w.sum() - 1.0) > 1e-9:
        raise InvalidParameter("weights must be nonnegative and sum to 1")
    return w


# --------------------------------------------------------------------------
# one scenario


def one_scenario_lp(p: FrfcProblem, s: Scenario, pert: UniquenessPerturbation) -> LinearProgram:
    T = p.T if s.T is None else s.T
    k = p.A.shape[0]
    return LinearProgram(
        np.concatenate([pert.apply(p.c), pert.apply(p.q)]),
        A_eq=np.hstack([T, p.W]),
        b_eq=s.h,
        A_ub=np.hstack([p.A, np.zeros((k, p.n_y))]) if k else None,
        b_ub=p.b if k else None,
    )


def one_scenario_batch(p: FrfcProblem, H: np.ndarray,
                       pert: UniquenessPerturbation = DEFAULT_PERTURBATION):
    """One-scenario optima for every row of ``H`` (fixed ``T``).

    Returns ``(Z (K, n), objectives (K,))`` with objectives at true costs.
    """
    H = np.atleast_2d(np.asarray(H, dtype=float))
    if H.shape[1] != p.m:
        raise DimensionMismatch(f"scenario rows have {H.shape[1]} entries, expected {p.m}")
    rhs = np.hstack([np.broadcast_to(p.b, (H.shape[0], p.b.size)), H])
    try:
        X, _, _ = p.one_scenario_family(pert).solve_many(rhs.T)
    except Infeasible as exc:
        raise Infeasible("one-scenario problem infeasible") from exc
    X = X.T
    Z = X[:, : p.n]
    Y = X[:, p.n: p.n + p.n_y]
    return Z, Z @ p.c + Y @ p.q


def one_scenario_solve(p: FrfcProblem, s: ScenarioLike,
                       pert: UniquenessPerturbation = DEFAULT_PERTURBATION) -> Tuple[np.ndarray, float]:
    """Solve ``min_{z in Z} c@z + Q(z, s)`` as one LP; objective at true costs."""
    s = _as_scenario(p, s)
    if s.T is None:
        Z, obj = one_scenario_batch(p, s.h[None, :], pert)
        return Z[0], float(obj[0])
    sol = solve_lp(one_scenario_lp(p, s, pert))
    if sol.status is LpStatus.INFEASIBLE:
        raise Infeasible("one-scenario problem infeasible")
    if sol.status is LpStatus.UNBOUNDED:
        raise Unbounded("one-scenario problem unbounded")
    z, y = sol.primal[: p.n], sol.primal[p.n:]
    return z, float(p.c @ z + p.q @ y)


# --------------------------------------------------------------------------
# sample average approximation

DEFAULT_MAX_COLUMNS = 3_000_000


def extensive_form(p: FrfcProblem, scenarios, weights=None,
                   pert: UniquenessPerturbation = NO_PERTURBATION) -> LinearProgram:
    """The deterministic equivalent LP over ``(z, y_1, ..., y_K)`` (sparse)."""
    H, Ts = as_batch(p, scenarios)
    K = H.shape[0]
    w = _weights(weights, K)
    cz, qy = pert.apply(p.c), pert.apply(p.q)
    blocks_T = sp.vstack([sp.csr_matrix(p.T if Ts is None else Ts[k]) for k in range(K)])
    A_eq = sp.hstack([blocks_T, sp.kron(sp.identity(K, format="csr"), sp.csr_matrix(p.W))]).tocsr()
    k_rows = p.A.shape[0]
    A_ub = None
    if k_rows:
        A_ub = sp.hstack([sp.csr_matrix(p.A), sp.csr_matrix((k_rows, K * p.n_y))]).tocsr()
    c = np.concatenate([cz, np.kron(w, qy)])
    return LinearProgram(c, A_eq=A_eq, b_eq=H.ravel(), A_ub=A_ub, b_ub=p.b if k_rows else None)


@dataclass
class SaaResult:
    z: np.ndarray
    objective: float
    method: str
    iterations: int = 0


def saa_solve(p: FrfcProblem, scenarios, weights=None,
              pert: UniquenessPerturbation = DEFAULT_PERTURBATION,
              method: str = "auto", max_columns: int = DEFAULT_MAX_COLUMNS,
              lp_method: str = "auto") -> Tuple[np.ndarray, float]:
    """``min_{z in Z} c@z + sum_k w_k Q(z, xi_k)``; returns ``(z, objective)``.

    ``method`` is ``"extensive"`` (one LP over all scenarios), ``"lshaped"``
    (Benders decomposition on cached recourse bases, fixed ``T`` only) or
    ``"auto"``.  The objective is reported at unperturbed costs.
    """
    res = saa_solve_full(p, scenarios, weights, pert, method, max_columns, lp_method)
    return res.z, res.objective


def saa_solve_full(p: FrfcProblem, scenarios, weights=None,
                   pert: UniquenessPerturbation = DEFAULT_PERTURBATION,
                   method: str = "auto", max_columns: int = DEFAULT_MAX_COLUMNS,
                   lp_method: str = "auto") -> SaaResult:
    H, Ts = as_batch(p, scenarios)
    K = H.shape[0]
    w = _weights(weights, K)
    columns = p.n + K * p.n_y
    if method == "auto":
        method = "extensive" if (Ts is not None or columns <= 20_000) else "lshaped"
    if method == "lshaped":
        if Ts is not None:
            raise InvalidParameter("the L-shaped route needs a fixed technology matrix")
        return _lshaped(p, H, w, pert)
    if method != "extensive":
        raise ValueError(f"unknown method {method!r}")
    if columns > max_columns:
        raise SizeLimit(f"extensive form has {columns} columns (cap {max_columns})")
    scen = H if Ts is None else [Scenario(H[k], Ts[k]) for k in range(K)]
    lp = extensive_form(p, scen, w, pert)
    if lp_method == "auto" and lp.n_eq * (lp.n_vars + lp.n_ub) <= 4_000_000:
        lp = LinearProgram(lp.c, lp.A_eq.toarray(), lp.b_eq,
                           lp.A_ub.toarray() if lp.n_ub else None, lp.b_ub if lp.n_ub else None)
    sol = solve_lp(lp, method=lp_method)
    if sol.status is LpStatus.INFEASIBLE:
        raise Infeasible("extensive form infeasible")
    if sol.status is LpStatus.UNBOUNDED:
        raise Unbounded("extensive form unbounded")
    z = sol.primal[: p.n]
    Y = sol.primal[p.n:].reshape(K, p.n_y)
    objective = float(p.c @ z + w @ (Y @ p.q))
    return SaaResult(z, objective, "extensive", sol.iterations)


def _lshaped(p: FrfcProblem, H: np.ndarray, w: np.ndarray,
             pert: UniquenessPerturbation, groups: int = 0,
             rel_tol: float = 1e-10, max_iter: int = 1000) -> SaaResult:
    """Multi-group L-shaped method.

    Scenarios are split into ``groups`` blocks, each with its own epigraph
    variable.  A box ``0 <= z <= M`` keeps early masters bounded and is
    enlarged if the final point touches it.
    """
    K = H.shape[0]
    G = groups or min(K, 20)
    group_of = np.arange(K) % G
    cz = pert.apply(p.c)
    family = p.recourse_family(pert)
    n = p.n

    hint = None

    def evaluate(z):
        nonlocal hint
        R = H - (p.T @ z)[None, :]
        Y, U, vals = _family_solve(family, R, "second stage", hint)
        hint = family.last_ids
        # vals are at perturbed costs; U rows are duals per scenario
        return vals, U.T, Y.T

    z0, _ = one_scenario_solve(p, H.T @ w, pert)
    scale = 1.0 + max(np.abs(z0).max(initial=0.0), np.abs(H).max(initial=0.0))
    M = 1e3 * scale
    cuts_A: List[np.ndarray] = []
    cuts_b: List[float] = []
    best_z, best_ub, best_Y = None, np.inf, None
    z = z0
    it = 0
    while True:
        it += 1
        vals, U, Y = evaluate(z)
        ub = float(cz @ z + w @ vals)
        if ub < best_ub:
            best_z, best_ub, best_Y = z.copy(), ub, Y
        # cut per group: theta_g >= sum_{k in g} w_k u_k (h_k - T z)
        for g in range(G):
            mask = group_of == g
            wu = w[mask][:, None] * U[mask]
            const = float(np.sum(wu * H[mask]))
            slope = -(wu.sum(axis=0) @ p.T)
            row = np.zeros(n + G)
            row[:n] = slope
            row[n + g] = -1.0
            cuts_A.append(row)
            cuts_b.append(-const)
        k_rows = p.A.shape[0]
        A_ub = np.vstack([np.hstack([p.A, np.zeros((k_rows, G))])] + [np.vstack(cuts_A)]) if k_rows \
            else np.vstack(cuts_A)
        b_ub = np.concatenate([p.b, cuts_b]) if k_rows else np.asarray(cuts_b)
        box = np.hstack([np.eye(n), np.zeros((n, G))])
        master = LinearProgram(
            np.concatenate([cz, np.ones(G)]),
            A_ub=sp.csr_matrix(np.vstack([A_ub, box])),
            b_ub=np.concatenate([b_ub, np.full(n, M)]),
            lb=np.concatenate([np.zeros(n), np.full(G, -np.inf)]),
        )
        sol = solve_lp(master, method="highs")
        if sol.status is not LpStatus.OPTIMAL:
            if sol.status is LpStatus.INFEASIBLE:
                raise Infeasible("first-stage set is empty")
            raise NumericalFailure("L-shaped master is unbounded despite the box")
        lb = sol.objective
        z = np.maximum(sol.primal[:n], 0.0)
        gap = best_ub - lb
        if gap <= rel_tol * (1.0 + abs(best_ub)) or it >= max_iter:
            if best_z.max(initial=0.0) >= 0.999 * M:
                raise NumericalFailure("L-shaped solution touches the artificial box")
            if gap > 1e-6 * (1.0 + abs(best_ub)):
                raise NumericalFailure(f"L-shaped stopped with relative gap {gap / (1 + abs(best_ub)):.2e}")
            break
    objective = float(p.c @ best_z + w @ (best_Y @ p.q))
    return SaaResult(best_z, objective, "lshaped", it)


# --------------------------------------------------------------------------
# optimal scenario


def mean_technology(p: FrfcProblem, scenarios, weights=None) -> np.ndarray:
    """``E[T]`` over a discrete scenario set."""
    H, Ts = as_batch(p, scenarios)
    if Ts is None:
        return p.T.copy()
    w = _weights(weights, H.shape[0])
    return np.einsum("k,kij->ij", w, np.asarray(Ts))


def construct_optimal_scenario(p: FrfcProblem, z_star, T_mean) -> Scenario:
    """The scenario ``(T_mean z_star, T_mean)``.

    When ``z_star`` solves the stochastic problem (and ``T`` is fixed), the
    one-scenario problem at this scenario has ``z_star`` among its optima.
    """
    z_star = np.asarray(z_star, dtype=float).ravel()
    T_mean = np.atleast_2d(np.asarray(T_mean, dtype=float))
    if z_star.size != p.n:
        raise DimensionMismatch(f"z has {z_star.size} entries, expected {p.n}")
    if T_mean.shape != p.T.shape:
        raise DimensionMismatch(f"T has shape {T_mean.shape}, expected {p.T.shape}")
    return Scenario(T_mean @ z_star, T_mean)


def one_scenario_z_range(p: FrfcProblem, s: Scenario, pert: UniquenessPerturbation,
                         rel_tol: float = 1e-9) -> np.ndarray:
    """Per-coordinate ``[min, max]`` of ``z`` over the optimal face.

    A zero-width range in every coordinate certifies a unique first stage.
    """
    lp = one_scenario_lp(p, s, pert)
    best = solve_lp(lp)
    if not best.optimal:
        raise Infeasible("one-scenario problem has no optimum")
    cap = best.objective + rel_tol * (1.0 + abs(best.objective))
    A_ub = np.vstack([lp.A_ub, lp.c[None, :]]) if lp.n_ub else lp.c[None, :]
    b_ub = np.concatenate([lp.b_ub, [cap]]) if lp.n_ub else np.array([cap])
    out = np.zeros((p.n, 2))
    for i in range(p.n):
        for col, sign in ((0, 1.0), (1, -1.0)):
            e = np.zeros(lp.n_vars)
            e[i] = sign
            sol = solve_lp(LinearProgram(e, lp.A_eq, lp.b_eq, A_ub, b_ub))
            if sol.status is LpStatus.UNBOUNDED:
                out[i, col] = sign * np.inf
            elif not sol.optimal:
                out[i, col] = best.primal[i]
            else:
                out[i, col] = sol.primal[i]
    return out
