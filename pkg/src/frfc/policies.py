"""Decision policies mapping a covariate vector to a first-stage decision."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ad_training import DEFAULT_PARAM_CAP, m5_ad_train, meta_train
from .errors import DimensionMismatch, InvalidParameter
from .forecasters import TreeHyper, fit_cart, fit_least_squares
from .optim import NelderMeadConfig, RandomSource
from .two_stage import DEFAULT_PERTURBATION, UniquenessPerturbation

KINDS = ("SAA", "KNN", "ERSAA", "LS", "CART", "AD", "M5AD")


@dataclass(frozen=True)
class PolicyHyper:
    k: Optional[int] = None  # KNN neighbours, default ceil(sqrt(N))
    tree: TreeHyper = field(default_factory=TreeHyper)
    nm: NelderMeadConfig = field(default_factory=NelderMeadConfig)
    param_cap: int = DEFAULT_PARAM_CAP
    seed: int = 0

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise InvalidParameter("k must be >= 1")


@dataclass
class Policy:
    kind: str
    inst: object
    state: dict
    pert: UniquenessPerturbation = DEFAULT_PERTURBATION

    @property
    def forecaster(self):
        return self.state.get("forecaster")

    def _x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.state["n_features"]:
            raise DimensionMismatch(f"x has {x.size} entries, expected {self.state['n_features']}")
        return x

    def neighbours(self, x) -> np.ndarray:
        """Training indices of the ``k`` nearest covariates (ties by index)."""
        x = self._x(x)
        dist = np.sqrt(((self.state["X"] - x[None, :]) ** 2).sum(axis=1))
        return np.argsort(dist, kind="stable")[: self.state["k"]]

    def scenarios_for(self, x) -> np.ndarray:
        """The outcome sample a sample-based policy optimizes over at ``x``."""
        x = self._x(x)
        if self.kind == "SAA":
            return self.state["Xi"]
        if self.kind == "KNN":
            return self.state["Xi"][self.neighbours(x)]
        if self.kind == "ERSAA":
            return self.forecaster.predict(x)[0][None, :] + self.state["residuals"]
        raise InvalidParameter(f"{self.kind} is not sample based")

    def decide(self, x) -> np.ndarray:
        x = self._x(x)
        if self.kind == "SAA":
            if "z" not in self.state:
                self.state["z"] = self.inst.saa(self.state["Xi"], pert=self.pert)[0]
            return self.state["z"].copy()
        if self.kind in ("KNN", "ERSAA"):
            return self.inst.saa(self.scenarios_for(x), pert=self.pert)[0]
        return self.inst.decide(self.forecaster.predict(x), self.pert)[0]

    def decide_batch(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind in ("LS", "CART", "AD", "M5AD"):
            return self.inst.decide(self.forecaster.predict(X), self.pert)
        return np.vstack([self.decide(x) for x in X])


def fit_policy(kind: str, inst, X, Xi, hyper: PolicyHyper = PolicyHyper(),
               pert: UniquenessPerturbation = DEFAULT_PERTURBATION) -> Policy:
    """Fit one policy kind on training pairs ``(X[n], Xi[n])``."""
    if kind not in KINDS:
        raise InvalidParameter(f"unknown policy kind {kind!r}; expected one of {KINDS}")
    X = np.asarray(X, dtype=float)
    Xi = np.asarray(Xi, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if Xi.ndim == 1:
        Xi = Xi[:, None]
    if X.shape[0] != Xi.shape[0]:
        raise DimensionMismatch("covariates and outcomes differ in length")
    N = X.shape[0]
    if N == 0:
        raise InvalidParameter("training data is empty")
    state = {"n_features": X.shape[1]}
    rng = RandomSource(hyper.seed, KINDS.index(kind))
    if kind == "SAA":
        state["Xi"] = Xi.copy()
    elif kind == "KNN":
        state["X"], state["Xi"] = X.copy(), Xi.copy()
        state["k"] = min(N, hyper.k or math.ceil(math.sqrt(N)))
    elif kind in ("ERSAA", "LS"):
        f = fit_least_squares(X, Xi)
        state["forecaster"] = f
        if kind == "ERSAA":
            state["residuals"] = Xi - f.predict(X)
    elif kind == "CART":
        state["forecaster"] = fit_cart(X, Xi, hyper.tree)
    elif kind == "AD":
        run = meta_train(inst, X, Xi, "affine", hyper.nm, rng, pert, hyper.param_cap)
        state["forecaster"], state["run"] = run.forecaster, run
    else:
        res = m5_ad_train(inst, X, Xi, hyper.tree, hyper.nm, rng, pert, hyper.param_cap)
        state["forecaster"], state["run"] = res.tree, res
    return Policy(kind, inst, state, pert)
