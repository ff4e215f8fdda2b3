"""Nelder-Mead minimization and seeded random variates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import InvalidParameter, NonFiniteObjective


@dataclass(frozen=True)
class NelderMeadConfig:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    rel_step: float = 0.05
    abs_step: float = 0.5
    epsilon: float = 1e-7
    max_iter: int = 2000
    restarts: int = 1
    restart_always: bool = False

    def __post_init__(self):
        if not self.reflection > 0:
            raise InvalidParameter("reflection must be > 0")
        if not self.expansion > 1:
            raise InvalidParameter("expansion must be > 1")
        if not 0 < self.contraction < 1:
            raise InvalidParameter("contraction must be in (0, 1)")
        if not 0 < self.shrink < 1:
            raise InvalidParameter("shrink must be in (0, 1)")
        if not self.epsilon > 0:
            raise InvalidParameter("epsilon must be > 0")
        if self.max_iter < 1:
            raise InvalidParameter("max_iter must be >= 1")

    def initial_steps(self, start: np.ndarray) -> np.ndarray:
        return np.maximum(self.rel_step * np.abs(start), self.abs_step)


@dataclass
class NelderMeadResult:
    x: np.ndarray
    fun: float
    iterations: int
    evaluations: int
    converged: bool
    trace: List[float] = field(default_factory=list)
    eval_trace: List[int] = field(default_factory=list)

    def __iter__(self):
        # (best point, best value, iterations)
        return iter((self.x, self.fun, self.iterations))


def _clean(value) -> float:
    value = float(value)
    return math.inf if math.isnan(value) else value


def _run(func, start, f_start, cfg: NelderMeadConfig, budget: int, trace: List[float],
         eval_trace: List[int], eval_offset: int):
    n = start.size
    steps = cfg.initial_steps(start)
    simplex = np.vstack([start] + [start + steps[i] * np.eye(n)[i] for i in range(n)])
    values = np.empty(n + 1)
    values[0] = f_start
    for i in range(1, n + 1):
        values[i] = func(simplex[i])
    evals = n
    it = 0
    converged = False
    prev_best = float(values.min())
    while it < budget:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        best, worst = values[0], values[-1]
        centroid = simplex[:-1].mean(axis=0)

        xr = centroid + cfg.reflection * (centroid - simplex[-1])
        fr = func(xr)
        evals += 1
        if fr < best:
            xe = centroid + cfg.expansion * (xr - centroid)
            fe = func(xe)
            evals += 1
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
        elif fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
        else:
            if fr < worst:
                xc = centroid + cfg.contraction * (xr - centroid)
            else:
                xc = centroid + cfg.contraction * (simplex[-1] - centroid)
            fc = func(xc)
            evals += 1
            if fc < min(fr, worst):
                simplex[-1], values[-1] = xc, fc
            else:
                for i in range(1, n + 1):
                    simplex[i] = simplex[0] + cfg.shrink * (simplex[i] - simplex[0])
                    values[i] = func(simplex[i])
                evals += n
        it += 1
        new_best = float(values.min())
        assert new_best <= prev_best, "best value increased"
        trace.append(new_best)
        eval_trace.append(eval_offset + evals)
        finite = values[np.isfinite(values)]
        spread = float(finite.max() - finite.min()) if finite.size == values.size else math.inf
        tol = cfg.epsilon * max(1.0, abs(new_best))
        diameter = float(np.abs(simplex - simplex[0]).max())
        if (prev_best - new_best < tol and spread < tol) or diameter < 1e-12 * (1.0 + np.abs(simplex[0]).max()):
            converged = True
            prev_best = new_best
            break
        prev_best = new_best
    i = int(np.argmin(values))
    return simplex[i].copy(), float(values[i]), it, evals, converged


def nelder_mead(objective: Callable[[np.ndarray], float], start: Sequence[float],
                config: Optional[NelderMeadConfig] = None) -> NelderMeadResult:
    """Minimize ``objective`` from ``start``.

    The run stops once an iteration lowers the best value by less than
    ``epsilon`` while all simplex values agree to within ``epsilon`` (both
    relative to ``max(1, |best|)``), or when ``max_iter`` iterations are spent.
    If the budget runs out, the search restarts from the best point with a
    fresh simplex (``config.restarts`` times).  NaN values count as ``+inf``.
    """
    cfg = config or NelderMeadConfig()
    x0 = np.array(start, dtype=float).ravel()
    func = lambda v: _clean(objective(v))  # noqa: E731
    f0 = func(x0)
    if not math.isfinite(f0):
        raise NonFiniteObjective(f"objective is {f0} at the starting point")
    trace: List[float] = []
    eval_trace: List[int] = []
    x, fx, iters, evals, converged = _run(func, x0, f0, cfg, cfg.max_iter, trace, eval_trace, 1)
    evals += 1
    for _ in range(cfg.restarts):
        if converged and not cfg.restart_always:
            break
        x2, f2, it2, ev2, converged = _run(func, x, fx, cfg, cfg.max_iter, trace, eval_trace, evals)
        iters += it2
        evals += ev2
        improved = f2 < fx
        if f2 <= fx:
            x, fx = x2, f2
        if cfg.restart_always and not improved:
            break
    return NelderMeadResult(x, fx, iters, evals, converged, trace, eval_trace)


# --------------------------------------------------------------------------
# random variates


@dataclass(frozen=True)
class RandomSource:
    """Seed plus stream id; equal pairs always yield equal variate sequences."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, *keys: int) -> "RandomSource":
        """A distinct stream derived from this one (for per-task splitting)."""
        stream = int(self.stream)
        for k in keys:
            stream = (stream * 1_000_003 + int(k) + 1) % (2**63)
        return RandomSource(self.seed, stream)


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        if not self.b > self.a:
            raise InvalidParameter("uniform needs b > a")
        return gen.uniform(self.a, self.b, size=count)


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float

    def draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        if not self.sigma > 0:
            raise InvalidParameter("normal needs sigma > 0")
        return gen.normal(self.mu, self.sigma, size=count)


@dataclass(frozen=True)
class Beta:
    alpha: float
    beta: float

    def draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        if not (self.alpha > 0 and self.beta > 0):
            raise InvalidParameter("beta needs alpha, beta > 0")
        return gen.beta(self.alpha, self.beta, size=count)


@dataclass(frozen=True)
class FoldedNormal:
    """Componentwise absolute value of a multivariate normal."""

    mean: tuple
    cov: tuple

    @classmethod
    def of(cls, mean, cov) -> "FoldedNormal":
        mean = np.asarray(mean, dtype=float).ravel()
        cov = np.asarray(cov, dtype=float)
        return cls(tuple(mean), tuple(map(tuple, cov)))

    def draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        mean = np.asarray(self.mean)
        cov = np.asarray(self.cov)
        if cov.shape != (mean.size, mean.size):
            raise InvalidParameter("covariance shape does not match the mean")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise InvalidParameter("covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() < -1e-10:
            raise InvalidParameter("covariance must be positive semidefinite")
        return np.abs(gen.multivariate_normal(mean, cov, size=count, method="eigh"))


def sample(dist, rng: RandomSource, count: int) -> np.ndarray:
    """Draw ``count`` variates of ``dist`` from a fresh generator for ``rng``."""
    if count < 0:
        raise InvalidParameter("count must be >= 0")
    return dist.draw(rng.generator(), count)


def psd_project(mat: np.ndarray) -> np.ndarray:
    """Nearest (Frobenius) PSD matrix: clip negative eigenvalues, re-symmetrize."""
    sym = 0.5 * (mat + mat.T)
    w, v = np.linalg.eigh(sym)
    out = (v * np.clip(w, 0.0, None)) @ v.T
    return 0.5 * (out + out.T)


def random_correlation(gen: np.random.Generator, dim: int) -> np.ndarray:
    """Unit-diagonal matrix with off-diagonals ``2 * Beta(2, 2) - 1``, made PSD.

    A projected matrix is rescaled back to unit diagonal, which keeps it PSD.
    """
    mat = np.eye(dim)
    iu = np.triu_indices(dim, 1)
    mat[iu] = 2.0 * gen.beta(2.0, 2.0, size=iu[0].size) - 1.0
    mat = mat + np.triu(mat, 1).T
    if np.linalg.eigvalsh(mat).min() < 0:
        mat = psd_project(mat)
        d = np.sqrt(np.clip(np.diag(mat), 1e-12, None))
        mat = mat / np.outer(d, d)
        mat = 0.5 * (mat + mat.T)
    return mat
