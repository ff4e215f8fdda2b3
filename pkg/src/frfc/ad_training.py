"""Application-driven forecast training.

Forecast parameters are chosen to minimize the average realized cost of the
decisions they induce: predict a scenario, solve the one-scenario problem,
pay the cost under the observed outcome.  The outer search is Nelder-Mead
started from the least-squares fit of the same family.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    FrfcError,
    InvalidParameter,
    LeafTooSmall,
    NonFiniteObjective,
    RankDeficient,
)
from .forecasters import (
    AffineForecaster,
    Forecaster,
    TreeHyper,
    fit_least_squares,
    fit_m5_structure,
)
from .optim import NelderMeadConfig, RandomSource, nelder_mead
from .two_stage import DEFAULT_PERTURBATION, UniquenessPerturbation

DEFAULT_PARAM_CAP = 64


def _xy(X, Xi):
    X = np.asarray(X, dtype=float)
    Xi = np.asarray(Xi, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if Xi.ndim == 1:
        Xi = Xi[:, None]
    if X.shape[0] != Xi.shape[0]:
        raise DimensionMismatch("covariates and outcomes differ in length")
    if X.shape[0] == 0:
        raise InvalidParameter("training data is empty")
    return X, Xi


# --------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class ConstantFamily:
    """``psi(x) = theta`` (covariates ignored)."""

    n_outputs: int
    n_features: int

    @property
    def n_params(self) -> int:
        return self.n_outputs

    def build(self, theta) -> AffineForecaster:
        return AffineForecaster.constant(theta, self.n_features)

    def start(self, X, Y) -> np.ndarray:
        return np.asarray(Y, dtype=float).mean(axis=0)


@dataclass(frozen=True)
class AffineFamily:
    """``psi(x) = theta_0 + Theta x``."""

    n_outputs: int
    n_features: int

    @property
    def n_params(self) -> int:
        return self.n_outputs * (self.n_features + 1)

    def build(self, theta) -> AffineForecaster:
        return AffineForecaster.from_params(theta, self.n_outputs, self.n_features)

    def start(self, X, Y) -> np.ndarray:
        return fit_least_squares(X, Y).params()


Family = Union[ConstantFamily, AffineFamily]


def make_family(kind: Union[str, Family], n_outputs: int, n_features: int) -> Family:
    if not isinstance(kind, str):
        return kind
    if kind == "constant":
        return ConstantFamily(n_outputs, n_features)
    if kind == "affine":
        return AffineFamily(n_outputs, n_features)
    raise InvalidParameter(f"unknown forecast family {kind!r}")


# --------------------------------------------------------------------------
# cost


def bilevel_cost(inst, X, Xi, f: Forecaster,
                 pert: UniquenessPerturbation = DEFAULT_PERTURBATION) -> float:
    """Average of ``G(z(psi(x_n)), xi_n)``; any solver failure gives ``+inf``."""
    X, Xi = _xy(X, Xi)
    try:
        Z = inst.decide(f.predict(X), pert)
        value = float(np.mean(inst.costs(Z, Xi)))
    except (FrfcError, np.linalg.LinAlgError, ValueError):
        return math.inf
    return value if math.isfinite(value) else math.inf


def ex_post_ideal(inst, Xi, pert: UniquenessPerturbation = DEFAULT_PERTURBATION) -> float:
    """Average cost with perfect foresight, a floor for :func:`bilevel_cost`."""
    Xi = np.atleast_2d(np.asarray(Xi, dtype=float))
    return float(np.mean(inst.costs(inst.decide(Xi, pert), Xi)))


# --------------------------------------------------------------------------
# training


@dataclass
class AdTrainingRun:
    theta_star: np.ndarray
    final_cost: float
    cost_trace: List[float]
    inner_solves: int
    forecaster: AffineForecaster
    start_cost: float
    evaluations: int = 0
    eval_trace: List[int] = field(default_factory=list)
    converged: bool = True

    def log_rows(self):
        """``(iteration, best cost, evaluations)`` rows; iteration 0 is the start."""
        return [(i, c, e) for i, (c, e) in enumerate(zip(self.cost_trace, self.eval_trace))]


def write_training_log(run: AdTrainingRun, out=None) -> str:
    """Write the training log CSV to ``out`` (a path or file); return the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iteration", "best_cost", "evaluations"])
    for it, cost, ev in run.log_rows():
        w.writerow([it, repr(float(cost)), ev])
    text = buf.getvalue()
    if isinstance(out, str):
        with open(out, "w", newline="") as fh:
            fh.write(text)
    elif out is not None:
        out.write(text)
    return text


def meta_train(inst, X, Xi, family: Union[str, Family] = "affine",
               cfg: Optional[NelderMeadConfig] = None, rng: Optional[RandomSource] = None,
               pert: UniquenessPerturbation = DEFAULT_PERTURBATION,
               param_cap: int = DEFAULT_PARAM_CAP, start=None) -> AdTrainingRun:
    """Minimize :func:`bilevel_cost` over a forecast family.

    The search starts from the family's least-squares fit (or ``start``).  A
    non-finite start cost is retried once from a slightly perturbed point.
    """
    X, Xi = _xy(X, Xi)
    fam = make_family(family, Xi.shape[1], X.shape[1])
    if fam.n_params > param_cap:
        raise InvalidParameter(f"family has {fam.n_params} parameters (cap {param_cap})")
    cfg = cfg or NelderMeadConfig()
    rng = rng or RandomSource(0)
    theta0 = np.asarray(fam.start(X, Xi) if start is None else start, dtype=float).ravel()
    N = X.shape[0]

    def cost(theta):
        return bilevel_cost(inst, X, Xi, fam.build(theta), pert)

    c0 = cost(theta0)
    if not math.isfinite(c0):
        gen = rng.generator()
        theta0 = theta0 + 1e-3 * (1.0 + np.abs(theta0)) * gen.standard_normal(theta0.size)
        c0 = cost(theta0)
        if not math.isfinite(c0):
            raise NonFiniteObjective("bilevel cost is not finite at the start")
    res = nelder_mead(cost, theta0, cfg)
    trace = [c0] + list(res.trace)
    evals = [1] + list(res.eval_trace)
    return AdTrainingRun(res.x, res.fun, trace, res.evaluations * N, fam.build(res.x), c0,
                         res.evaluations, evals, res.converged)


@dataclass
class M5AdResult:
    tree: object
    runs: List[AdTrainingRun]
    log: List[str]


def m5_ad_train(inst, X, Xi, hyper: TreeHyper = TreeHyper(),
                cfg: Optional[NelderMeadConfig] = None, rng: Optional[RandomSource] = None,
                pert: UniquenessPerturbation = DEFAULT_PERTURBATION,
                param_cap: int = DEFAULT_PARAM_CAP) -> M5AdResult:
    """CART partition, then an independent affine AD fit on each leaf cohort.

    Cohorts with fewer than ``s + 1`` points get an AD-trained constant.
    """
    X, Xi = _xy(X, Xi)
    rng = rng or RandomSource(0)
    tree = fit_m5_structure(X, Xi, hyper)
    s = X.shape[1]
    payloads, runs, log = [], [], []
    for leaf, idx in enumerate(tree.cohorts):
        try:
            if idx.size < s + 1:
                raise LeafTooSmall(f"leaf {leaf} has {idx.size} points, needs {s + 1}")
            run = meta_train(inst, X[idx], Xi[idx], "affine", cfg, rng.child(leaf), pert, param_cap)
        except (LeafTooSmall, RankDeficient) as exc:
            log.append(f"{exc}; using a constant forecast")
            run = meta_train(inst, X[idx], Xi[idx], "constant", cfg, rng.child(leaf), pert, param_cap)
        runs.append(run)
        payloads.append(run.forecaster)
        log.append(f"leaf {leaf}: n={idx.size} start={run.start_cost:.6g} final={run.final_cost:.6g}")
    return M5AdResult(tree.with_payloads(payloads), runs, log)
