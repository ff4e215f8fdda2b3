"""Dense linear programming with primal and dual extraction.

Problems are stated as::

    min  c @ x
    s.t. A_eq @ x == b_eq
         A_ub @ x <= b_ub
         x >= lb                 (entries of lb may be -inf)

and reduced internally to standard form ``A x = b, x >= 0``.  The solver is a
two-phase revised simplex that keeps an explicit basis inverse (refactored
periodically).  Pricing is Dantzig's rule until a pivot budget of
``3 * (rows + cols)`` is spent, after which Bland's rule takes over.

Large sparse instances can be routed to HiGHS (through scipy) with
``method="highs"``; the returned :class:`LpSolution` has the same sign
conventions either way.

:class:`RhsFamily` re-solves one standard-form LP under many right-hand sides.
Optimal bases are cached; a right-hand side whose values are primal feasible
for a cached basis is solved by a matrix product, and the rest are finished
by dual simplex from the closest cached basis.  Every cached basis is dual
feasible for all right-hand sides because the matrix and costs never change.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import DimensionMismatch, Infeasible, NumericalFailure, Unbounded

FEAS_TOL = 1e-8
PIVOT_TOL = 1e-9
GAP_TOL = 1e-7
OPT_TOL = 1e-9
REFACTOR_EVERY = 50
DENSE_LIMIT = 40_000  # entries of the standard-form matrix handled densely


class LpStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


def _as_matrix(A, n: int, name: str):
    if A is None:
        return np.zeros((0, n))
    if sp.issparse(A):
        A = sp.csr_matrix(A, dtype=float)
        if not np.all(np.isfinite(A.data)):
            raise ValueError(f"{name} has non-finite entries")
    else:
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if A.size == 0:
            A = A.reshape(0, n)
        if not np.all(np.isfinite(A)):
            raise ValueError(f"{name} has non-finite entries")
    if A.shape[1] != n:
        raise DimensionMismatch(f"{name} has {A.shape[1]} columns, expected {n}")
    return A


def _as_rhs(b, rows: int, name: str) -> np.ndarray:
    b = np.zeros(0) if b is None else np.asarray(b, dtype=float).ravel()
    if b.size != rows:
        raise DimensionMismatch(f"{name} has length {b.size}, expected {rows}")
    if not np.all(np.isfinite(b)):
        raise ValueError(f"{name} has non-finite entries")
    return b


@dataclass(frozen=True)
class LinearProgram:
    """``min c@x`` subject to equality rows, ``<=`` rows and lower bounds.

    Matrices may be dense arrays or scipy sparse matrices.  ``lb`` defaults to
    zero; use ``-np.inf`` for free variables.
    """

    c: np.ndarray
    A_eq: Optional[object] = None
    b_eq: Optional[np.ndarray] = None
    A_ub: Optional[object] = None
    b_ub: Optional[np.ndarray] = None
    lb: Optional[np.ndarray] = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("objective has non-finite entries")
        n = c.size
        A_eq = _as_matrix(self.A_eq, n, "A_eq")
        A_ub = _as_matrix(self.A_ub, n, "A_ub")
        b_eq = _as_rhs(self.b_eq, A_eq.shape[0], "b_eq")
        b_ub = _as_rhs(self.b_ub, A_ub.shape[0], "b_ub")
        lb = np.zeros(n) if self.lb is None else np.asarray(self.lb, dtype=float).ravel()
        if lb.size != n:
            raise DimensionMismatch(f"lb has length {lb.size}, expected {n}")
        if np.any(np.isnan(lb)) or np.any(lb == np.inf):
            raise ValueError("lower bounds must be finite or -inf")
        for name, value in (("c", c), ("A_eq", A_eq), ("b_eq", b_eq),
                            ("A_ub", A_ub), ("b_ub", b_ub), ("lb", lb)):
            object.__setattr__(self, name, value)

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_eq(self) -> int:
        return self.A_eq.shape[0]

    @property
    def n_ub(self) -> int:
        return self.A_ub.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.A_eq) or sp.issparse(self.A_ub)


@dataclass
class LpSolution:
    status: LpStatus
    primal: Optional[np.ndarray] = None
    duals_eq: Optional[np.ndarray] = None
    duals_ineq: Optional[np.ndarray] = None
    objective: float = float("nan")
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _dense(A) -> np.ndarray:
    return A.toarray() if sp.issparse(A) else A


# --------------------------------------------------------------------------
# standard form


@dataclass
class _StandardForm:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    n: int
    free: np.ndarray
    shift: np.ndarray
    const: float

    def recover(self, x_std: np.ndarray) -> np.ndarray:
        x = x_std[: self.n].copy()
        if self.free.size:
            x[self.free] -= x_std[self.n: self.n + self.free.size]
        return x + self.shift


def _standard_form(lp: LinearProgram) -> _StandardForm:
    n = lp.n_vars
    finite = np.isfinite(lp.lb)
    shift = np.where(finite, lp.lb, 0.0)
    free = np.flatnonzero(~finite)
    A_eq, A_ub = _dense(lp.A_eq), _dense(lp.A_ub)
    m_eq, m_ub = A_eq.shape[0], A_ub.shape[0]
    top = np.hstack([A_eq, -A_eq[:, free], np.zeros((m_eq, m_ub))])
    bottom = np.hstack([A_ub, -A_ub[:, free], np.eye(m_ub)])
    A = np.vstack([top, bottom])
    b = np.concatenate([lp.b_eq - A_eq @ shift, lp.b_ub - A_ub @ shift])
    c = np.concatenate([lp.c, -lp.c[free], np.zeros(m_ub)])
    return _StandardForm(A, b, c, n, free, shift, float(lp.c @ shift))


# --------------------------------------------------------------------------
# basis bookkeeping


class _Basis:
    """Basic column indices plus an explicit inverse of the basis matrix."""

    def __init__(self, A: np.ndarray, cols: np.ndarray, Binv: Optional[np.ndarray] = None):
        self.cols = np.asarray(cols, dtype=int).copy()
        self.Binv = np.linalg.inv(A[:, self.cols]) if Binv is None else Binv.copy()
        self.updates = 0

    def refactor(self, A: np.ndarray) -> None:
        self.Binv = np.linalg.inv(A[:, self.cols])
        self.updates = 0

    def pivot(self, r: int, col: np.ndarray, j: int) -> None:
        prow = self.Binv[r] / col[r]
        self.Binv -= np.outer(col, prow)
        self.Binv[r] = prow
        self.cols[r] = j
        self.updates += 1


def _primal_iterations(A, b, c, basis: _Basis, allowed: np.ndarray,
                       max_iter: int, bland_after: int):
    """Primal simplex from a feasible basis.  Returns (status, iterations)."""
    dtol = OPT_TOL * (1.0 + np.abs(c).max(initial=0.0))
    xB = basis.Binv @ b
    it = 0
    while True:
        if basis.updates >= REFACTOR_EVERY:
            basis.refactor(A)
            xB = basis.Binv @ b
        y = c[basis.cols] @ basis.Binv
        d = c - y @ A
        d[basis.cols] = 0.0
        d[~allowed] = 0.0
        cand = np.flatnonzero(d < -dtol)
        if cand.size == 0:
            return LpStatus.OPTIMAL, it
        bland = it >= bland_after
        j = int(cand[0]) if bland else int(cand[np.argmin(d[cand])])
        col = basis.Binv @ A[:, j]
        pos = np.flatnonzero(col > PIVOT_TOL)
        if pos.size == 0:
            return LpStatus.UNBOUNDED, it
        ratios = np.maximum(xB[pos], 0.0) / col[pos]
        rmin = ratios.min()
        ties = pos[ratios <= rmin + 1e-12 * (1.0 + rmin)]
        if bland:
            r = int(ties[np.argmin(basis.cols[ties])])
        else:
            r = int(ties[np.argmax(col[ties])])
        theta = max(xB[r], 0.0) / col[r]
        xB -= theta * col
        xB[r] = theta
        basis.pivot(r, col, j)
        it += 1
        if it > max_iter:
            raise NumericalFailure(f"simplex exceeded {max_iter} pivots")


def _crash_basis(A: np.ndarray) -> np.ndarray:
    """Per row, a positive singleton column usable as a starting basic column (or -1)."""
    m = A.shape[0]
    chosen = np.full(m, -1)
    nz = A != 0
    singles = np.flatnonzero(nz.sum(axis=0) == 1)
    for j in singles:
        r = int(np.argmax(nz[:, j]))
        if chosen[r] < 0 and A[r, j] > 0:
            chosen[r] = j
    return chosen


@dataclass
class _StdResult:
    status: LpStatus
    x: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    basis: Optional[np.ndarray] = None  # basic column indices
    rows: Optional[np.ndarray] = None  # rows kept after redundancy removal
    iterations: int = 0


def simplex_standard(A: np.ndarray, b: np.ndarray, c: np.ndarray,
                     max_iter: Optional[int] = None) -> _StdResult:
    """Two-phase revised simplex for ``min c@x, A x = b, x >= 0`` (dense)."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, N = A.shape
    if max_iter is None:
        max_iter = 50 * (m + N) + 1000
    bland_after = 3 * (m + N)
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign
    feas_tol = FEAS_TOL * (1.0 + np.abs(b).max(initial=0.0))

    chosen = _crash_basis(A)
    art_rows = np.flatnonzero(chosen < 0)
    n_art = art_rows.size
    iterations = 0
    rows = np.arange(m)
    if n_art:
        art = np.zeros((m, n_art))
        art[art_rows, np.arange(n_art)] = 1.0
        Aext = np.hstack([A, art])
        cols = chosen.copy()
        cols[art_rows] = N + np.arange(n_art)
        basis = _Basis(Aext, cols)
        cost1 = np.concatenate([np.zeros(N), np.ones(n_art)])
        allowed = np.ones(N + n_art, dtype=bool)
        status, it = _primal_iterations(Aext, b, cost1, basis, allowed, max_iter, bland_after)
        iterations += it
        basis.refactor(Aext)
        xB = basis.Binv @ b
        infeas = float(xB[basis.cols >= N].sum())
        if infeas > feas_tol:
            return _StdResult(LpStatus.INFEASIBLE, iterations=iterations)
        # drive artificial columns out of the basis; rows where that is
        # impossible are linearly dependent and get dropped
        keep_rows = np.ones(m, dtype=bool)
        keep_pos = np.ones(m, dtype=bool)
        for r in range(m):
            if basis.cols[r] < N:
                continue
            row = basis.Binv[r] @ A
            row[basis.cols[basis.cols < N]] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > 1e-7:
                col = basis.Binv @ Aext[:, j]
                basis.pivot(r, col, j)
                iterations += 1
            else:
                keep_rows[art_rows[basis.cols[r] - N]] = False
                keep_pos[r] = False
        rows = np.flatnonzero(keep_rows)
        A = A[rows]
        b = b[rows]
        basis = _Basis(A, basis.cols[keep_pos])
    else:
        basis = _Basis(A, chosen)

    allowed = np.ones(N, dtype=bool)
    status, it = _primal_iterations(A, b, c, basis, allowed, max_iter, bland_after)
    iterations += it
    if status is LpStatus.UNBOUNDED:
        return _StdResult(status, iterations=iterations)
    basis.refactor(A)
    x = np.zeros(N)
    x[basis.cols] = np.maximum(basis.Binv @ b, 0.0)
    y_kept = c[basis.cols] @ basis.Binv
    y = np.zeros(m)
    y[rows] = y_kept
    y *= sign
    return _StdResult(LpStatus.OPTIMAL, x, y, basis.cols.copy(), rows, iterations)


# --------------------------------------------------------------------------
# public entry point


def _solve_highs(lp: LinearProgram, presolve: bool = True) -> LpSolution:
    bounds = [(lo if np.isfinite(lo) else None, None) for lo in lp.lb]
    res = linprog(
        lp.c,
        A_ub=lp.A_ub if lp.n_ub else None,
        b_ub=lp.b_ub if lp.n_ub else None,
        A_eq=lp.A_eq if lp.n_eq else None,
        b_eq=lp.b_eq if lp.n_eq else None,
        bounds=bounds,
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9,
                 "presolve": presolve},
    )
    if res.status == 2 and presolve:
        # presolve does not separate "infeasible" from "infeasible or unbounded"
        return _solve_highs(lp, presolve=False)
    if res.status == 2:
        return LpSolution(LpStatus.INFEASIBLE, iterations=int(res.nit))
    if res.status == 3:
        return LpSolution(LpStatus.UNBOUNDED, iterations=int(res.nit))
    if res.status != 0:
        raise NumericalFailure(f"HiGHS failed: {res.message}")
    duals_eq = np.asarray(res.eqlin.marginals) if lp.n_eq else np.zeros(0)
    duals_ub = np.asarray(res.ineqlin.marginals) if lp.n_ub else np.zeros(0)
    return LpSolution(LpStatus.OPTIMAL, np.asarray(res.x), duals_eq, duals_ub,
                      float(res.fun), int(res.nit))


def solve_lp(lp: LinearProgram, method: str = "auto") -> LpSolution:
    """Solve ``lp``.

    ``method`` is ``"simplex"`` (dense two-phase revised simplex), ``"highs"``
    (scipy's HiGHS dual simplex, sparse-friendly) or ``"auto"``, which picks
    the dense simplex unless the standard-form matrix would be large.
    """
    if method == "auto":
        m = lp.n_eq + lp.n_ub
        n = lp.n_vars + lp.n_ub + int(np.sum(~np.isfinite(lp.lb)))
        method = "simplex" if m * n <= DENSE_LIMIT else "highs"
    if method == "highs":
        return _solve_highs(lp)
    if method != "simplex":
        raise ValueError(f"unknown method {method!r}")

    std = _standard_form(lp)
    res = simplex_standard(std.A, std.b, std.c)
    if res.status is not LpStatus.OPTIMAL:
        return LpSolution(res.status, iterations=res.iterations)
    x = std.recover(res.x)
    return LpSolution(
        LpStatus.OPTIMAL,
        x,
        res.y[: lp.n_eq],
        res.y[lp.n_eq:],
        float(lp.c @ x),
        res.iterations,
    )


def dual_objective(lp: LinearProgram, sol: LpSolution) -> float:
    """Objective of the dual point carried by ``sol``.

    Reduced costs ``c - A^T y`` are charged against finite lower bounds.
    """
    y_eq, y_ub = sol.duals_eq, sol.duals_ineq
    reduced = lp.c - lp.A_eq.T @ y_eq - lp.A_ub.T @ y_ub
    reduced = np.asarray(reduced).ravel()
    finite = np.isfinite(lp.lb)
    return float(lp.b_eq @ y_eq + lp.b_ub @ y_ub + reduced[finite] @ lp.lb[finite])


def primal_residual(lp: LinearProgram, x: np.ndarray) -> float:
    """Largest violation of any constraint or bound at ``x``."""
    worst = 0.0
    if lp.n_eq:
        worst = max(worst, float(np.abs(lp.A_eq @ x - lp.b_eq).max()))
    if lp.n_ub:
        worst = max(worst, float(np.maximum(lp.A_ub @ x - lp.b_ub, 0.0).max()))
    finite = np.isfinite(lp.lb)
    if finite.any():
        worst = max(worst, float(np.maximum(lp.lb[finite] - x[finite], 0.0).max()))
    return worst


# --------------------------------------------------------------------------
# many right-hand sides, one matrix


@dataclass
class _CachedBasis:
    cols: np.ndarray
    Binv: np.ndarray
    y: np.ndarray
    key: tuple = ()
    hits: int = 0
    ident: int = 0


@dataclass
class RhsFamily:
    """Solve ``min c@x, A x = b, x >= 0`` for many ``b`` with fixed ``A, c``.

    ``A`` must have full row rank.  Infeasible right-hand sides raise
    :class:`Infeasible`; an unbounded LP is reported when the first solve
    happens.
    """

    A: np.ndarray
    c: np.ndarray
    max_cache: int = 400
    _cache: list = field(default_factory=list, init=False, repr=False)
    dual_pivots: int = field(default=0, init=False)
    cold_solves: int = field(default=0, init=False)
    _next_id: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.c = np.asarray(self.c, dtype=float)
        if self.A.shape[1] != self.c.size:
            raise DimensionMismatch("A and c disagree on the number of columns")

    @property
    def n_bases(self) -> int:
        return len(self._cache)

    def _add(self, cols: np.ndarray) -> _CachedBasis:
        cols = np.asarray(cols, dtype=int)
        key = tuple(sorted(cols.tolist()))
        for entry in self._cache:
            if entry.key == key:
                return entry
        Binv = np.linalg.inv(self.A[:, cols])
        self._next_id += 1
        entry = _CachedBasis(cols.copy(), Binv, self.c[cols] @ Binv, key, 0, self._next_id)
        self._cache.append(entry)
        if len(self._cache) > self.max_cache:
            self._cache.sort(key=lambda e: -e.hits)
            del self._cache[self.max_cache // 2:]
        return entry

    def _cold(self, b: np.ndarray) -> _CachedBasis:
        res = simplex_standard(self.A, b, self.c)
        self.cold_solves += 1
        if res.status is LpStatus.INFEASIBLE:
            raise Infeasible("LP infeasible for this right-hand side")
        if res.status is LpStatus.UNBOUNDED:
            raise Unbounded("LP unbounded")
        if res.rows.size != self.A.shape[0]:
            raise NumericalFailure("RhsFamily requires a full-row-rank matrix")
        return self._add(res.basis)

    def _reoptimize(self, start: _CachedBasis, b: np.ndarray) -> _CachedBasis:
        ftol = FEAS_TOL * (1.0 + np.abs(b).max(initial=0.0))
        entry = start
        for _ in range(3):
            entry = self._dual_simplex(entry, b)
            # the fresh inverse may expose infeasibility the updated one hid
            if (entry.Binv @ b).min(initial=0.0) >= -ftol:
                break
        return entry

    def _dual_simplex(self, start: _CachedBasis, b: np.ndarray) -> _CachedBasis:
        A, c = self.A, self.c
        m, N = A.shape
        basis = _Basis(A, start.cols, start.Binv)
        ftol = FEAS_TOL * (1.0 + np.abs(b).max(initial=0.0))
        xB = basis.Binv @ b
        d = c - (c[basis.cols] @ basis.Binv) @ A
        d[basis.cols] = 0.0
        np.maximum(d, 0.0, out=d)
        is_basic = np.zeros(N, dtype=bool)
        is_basic[basis.cols] = True
        bland_after = 3 * (m + N)
        max_iter = 50 * (m + N) + 1000
        it = 0
        while True:
            infeasible = np.flatnonzero(xB < -ftol)
            if infeasible.size == 0:
                break
            bland = it >= bland_after
            if bland:
                r = int(infeasible[np.argmin(basis.cols[infeasible])])
            else:
                r = int(infeasible[np.argmin(xB[infeasible])])
            row = basis.Binv[r] @ A
            elig = np.flatnonzero((row < -PIVOT_TOL) & ~is_basic)
            if elig.size == 0:
                raise Infeasible("LP infeasible for this right-hand side")
            ratios = d[elig] / -row[elig]
            rmin = ratios.min()
            ties = elig[ratios <= rmin + 1e-12 * (1.0 + rmin)]
            j = int(ties[0]) if bland else int(ties[np.argmin(row[ties])])
            col = basis.Binv @ A[:, j]
            step = d[j] / row[j]
            d -= step * row
            d[j] = 0.0
            leaving = basis.cols[r]
            d[leaving] = -step
            np.maximum(d, 0.0, out=d)
            theta = xB[r] / col[r]
            xB -= theta * col
            xB[r] = theta
            is_basic[leaving] = False
            is_basic[j] = True
            basis.pivot(r, col, j)
            if basis.updates >= REFACTOR_EVERY:
                basis.refactor(A)
                xB = basis.Binv @ b
                d = c - (c[basis.cols] @ basis.Binv) @ A
                d[basis.cols] = 0.0
                np.maximum(d, 0.0, out=d)
            it += 1
            self.dual_pivots += 1
            if it > max_iter:
                raise NumericalFailure(f"dual simplex exceeded {max_iter} pivots")
        return self._add(basis.cols)

    def solve_many(self, B: np.ndarray, hint: Optional[np.ndarray] = None):
        """Solve for every column of ``B`` (shape ``m x K``).

        Returns ``(X, Y, obj)``: primal solutions (``N x K``), duals
        (``m x K``) and objective values (``K``).  ``hint`` holds, per
        column, the basis id to try first (as left in ``last_ids`` by an
        earlier call); unknown ids are ignored.
        """
        B = np.asarray(B, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        m, K = B.shape
        if m != self.A.shape[0]:
            raise DimensionMismatch(f"rhs has {m} rows, expected {self.A.shape[0]}")
        N = self.A.shape[1]
        X = np.zeros((N, K))
        Y = np.zeros((m, K))
        obj = np.zeros(K)
        ftol = FEAS_TOL * (1.0 + np.abs(B).max(axis=0))
        pending = np.arange(K)
        best_entry = np.full(K, -1)
        best_score = np.full(K, -np.inf)

        used = np.zeros(K, dtype=int)

        def assign(entry, idx, xb):
            X[np.ix_(entry.cols, idx)] = np.maximum(xb, 0.0)
            Y[:, idx] = entry.y[:, None]
            obj[idx] = entry.y @ B[:, idx]
            used[idx] = entry.ident
            entry.hits += idx.size

        def sweep(entries, pending):
            for entry in entries:
                if pending.size == 0:
                    break
                xb = entry.Binv @ B[:, pending]
                worst = xb.min(axis=0)
                ok = worst >= -ftol[pending]
                if ok.any():
                    assign(entry, pending[ok], xb[:, ok])
                better = worst > best_score[pending]
                best_score[pending[better]] = worst[better]
                best_entry[pending[better]] = entry.ident
                pending = pending[~ok]
            return pending

        by_id = {e.ident: e for e in self._cache}
        if hint is not None and self._cache:
            # try each column's previous basis; failures restart from it
            hint = np.asarray(hint, dtype=int)
            left = []
            for ident in np.unique(hint):
                idx = np.flatnonzero(hint == ident)
                entry = by_id.get(int(ident))
                if entry is None:
                    left.append(idx)
                    continue
                rest = sweep([entry], idx)
                if rest.size:
                    left.append(rest)
            pending = np.sort(np.concatenate(left)) if left else np.zeros(0, dtype=int)
            unknown = pending[best_entry[pending] < 0]
            if unknown.size:
                pending = np.union1d(pending[best_entry[pending] >= 0],
                                     sweep(sorted(self._cache, key=lambda e: -e.hits), unknown))
        else:
            pending = sweep(sorted(self._cache, key=lambda e: -e.hits), pending)
        while pending.size:
            k = int(pending[0])
            if not self._cache:
                entry = self._cold(B[:, k])
            else:
                start = by_id.get(int(best_entry[k]), self._cache[0])
                entry = self._reoptimize(start, B[:, k])
            by_id[entry.ident] = entry
            pending = sweep([entry], pending)
            if pending.size and pending[0] == k:
                # numerical edge: accept the basis reached by dual simplex
                xb = entry.Binv @ B[:, [k]]
                assign(entry, np.array([k]), xb)
                pending = pending[1:]
        self.last_ids = used
        return X, Y, obj

    def solve(self, b: np.ndarray):
        X, Y, obj = self.solve_many(np.asarray(b, dtype=float)[:, None])
        return X[:, 0], Y[:, 0], float(obj[0])
