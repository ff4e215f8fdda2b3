"""Pointwise forecast families and their statistical fits.

Covariates are rows of ``X`` (``N x s``), targets rows of ``Y`` (``N x m``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from .errors import DimensionMismatch, InvalidParameter, RankDeficient

RIDGE = 1e-10


def _as_rows(X, width: Optional[int] = None, name: str = "x") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if width is not None and X.shape[1] != width:
        raise DimensionMismatch(f"{name} has {X.shape[1]} columns, expected {width}")
    return X


def _training(X, Y):
    """Training arrays; a 1-D ``X`` or ``Y`` is one column over the samples."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    X = X[:, None] if X.ndim == 1 else X
    Y = Y[:, None] if Y.ndim == 1 else Y
    if X.ndim != 2 or Y.ndim != 2:
        raise DimensionMismatch("training arrays must be 1-D or 2-D")
    if Y.shape[0] != X.shape[0]:
        raise DimensionMismatch("X and Y differ in length")
    return X, Y


@dataclass(frozen=True)
class AffineForecaster:
    """``psi(x) = intercept + slopes @ x``."""

    intercept: np.ndarray
    slopes: np.ndarray

    def __post_init__(self):
        b = np.array(self.intercept, dtype=float).ravel()
        W = np.array(self.slopes, dtype=float)
        if W.ndim != 2 or W.shape[0] != b.size:
            raise DimensionMismatch("slopes must be (m, s) with m = len(intercept)")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(W))):
            raise InvalidParameter("forecaster parameters must be finite")
        b.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "intercept", b)
        object.__setattr__(self, "slopes", W)

    @property
    def n_outputs(self) -> int:
        return self.intercept.size

    @property
    def n_features(self) -> int:
        return self.slopes.shape[1]

    def predict(self, X) -> np.ndarray:
        X = _as_rows(X, self.n_features)
        return self.intercept[None, :] + X @ self.slopes.T

    def params(self) -> np.ndarray:
        """Flattened ``[intercept, slopes row-major]``."""
        return np.concatenate([self.intercept, self.slopes.ravel()])

    @classmethod
    def from_params(cls, theta, n_outputs: int, n_features: int) -> "AffineForecaster":
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != n_outputs * (n_features + 1):
            raise DimensionMismatch("parameter vector has the wrong length")
        return cls(theta[:n_outputs], theta[n_outputs:].reshape(n_outputs, n_features))

    @classmethod
    def constant(cls, value, n_features: int) -> "AffineForecaster":
        value = np.asarray(value, dtype=float).ravel()
        return cls(value, np.zeros((value.size, n_features)))


@dataclass
class TreeNode:
    """Internal node when ``feature >= 0``; otherwise a leaf with index ``leaf``."""

    feature: int = -1
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    leaf: int = -1


@dataclass(frozen=True)
class TreeHyper:
    min_leaf: int = 25
    max_depth: Optional[int] = None

    def __post_init__(self):
        if self.min_leaf < 1:
            raise InvalidParameter("min_leaf must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise InvalidParameter("max_depth must be >= 0")


@dataclass
class TreeForecaster:
    """Binary tree; ``x`` goes left iff ``x[feature] <= threshold``.

    ``payloads[leaf]`` is a constant vector (CART), an
    :class:`AffineForecaster` (M5), or ``None`` before leaves are filled.
    ``cohorts[leaf]`` holds the training indices routed to that leaf.
    """

    nodes: List[TreeNode]
    payloads: List[Union[np.ndarray, AffineForecaster, None]]
    n_features: int
    n_outputs: int
    hyper: TreeHyper = field(default_factory=TreeHyper)
    cohorts: List[np.ndarray] = field(default_factory=list)

    @property
    def n_leaves(self) -> int:
        return len(self.payloads)

    def leaf_index(self, X) -> np.ndarray:
        X = _as_rows(X, self.n_features)
        out = np.empty(X.shape[0], dtype=int)
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            k, idx = stack.pop()
            node = self.nodes[k]
            if node.feature < 0:
                out[idx] = node.leaf
                continue
            go_left = X[idx, node.feature] <= node.threshold
            stack.append((node.left, idx[go_left]))
            stack.append((node.right, idx[~go_left]))
        return out

    def predict(self, X) -> np.ndarray:
        X = _as_rows(X, self.n_features)
        leaves = self.leaf_index(X)
        out = np.empty((X.shape[0], self.n_outputs))
        for leaf in np.unique(leaves):
            idx = leaves == leaf
            payload = self.payloads[leaf]
            if payload is None:
                raise InvalidParameter(f"leaf {leaf} has no payload")
            if isinstance(payload, AffineForecaster):
                out[idx] = payload.predict(X[idx])
            else:
                out[idx] = payload[None, :]
        return out

    def with_payloads(self, payloads) -> "TreeForecaster":
        if len(payloads) != self.n_leaves:
            raise DimensionMismatch("one payload per leaf required")
        return TreeForecaster(list(self.nodes), list(payloads), self.n_features,
                              self.n_outputs, self.hyper, list(self.cohorts))


Forecaster = Union[AffineForecaster, TreeForecaster]


def predict(f: Forecaster, X) -> np.ndarray:
    """Forecasts for each row of ``X`` (a single vector gives one row)."""
    return f.predict(X)


# --------------------------------------------------------------------------
# least squares


def fit_least_squares(X, Y, ridge: float = RIDGE) -> AffineForecaster:
    """Per-output least squares with intercept via ridge-guarded normal equations."""
    X, Y = _training(X, Y)
    N, s = X.shape
    if N < s + 1:
        raise RankDeficient(f"{N} points cannot determine {s + 1} coefficients")
    D = np.hstack([np.ones((N, 1)), X])
    if np.linalg.matrix_rank(D) < s + 1:
        raise RankDeficient("design matrix is singular")
    G = D.T @ D + ridge * np.eye(s + 1)
    coef = np.linalg.solve(G, D.T @ Y)
    return AffineForecaster(coef[0], coef[1:].T)


# --------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    sse: float
    n_left: int


def node_sse(Y: np.ndarray) -> float:
    """Sum over outputs of squared deviations from the column means."""
    if Y.shape[0] == 0:
        return 0.0
    return float(((Y - Y.mean(axis=0)) ** 2).sum())


def best_split(X: np.ndarray, Y: np.ndarray, min_leaf: int) -> Optional[Split]:
    """The ``(feature, threshold)`` minimizing left plus right SSE.

    Thresholds are midpoints between consecutive distinct sorted values;
    both sides must hold at least ``min_leaf`` points.  Ties go to the lowest
    feature, then the lowest threshold.
    """
    N = X.shape[0]
    if N < 2 * min_leaf:
        return None
    Yc = Y - Y.mean(axis=0)
    total_sq = float((Yc ** 2).sum())
    best: Optional[Split] = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        cs = np.cumsum(Yc[order], axis=0)
        n_left = np.arange(1, N)
        # split after position i (0-based) puts i + 1 points on the left
        s_left = cs[:-1]
        s_right = cs[-1][None, :] - s_left
        gain = (s_left ** 2).sum(axis=1) / n_left + (s_right ** 2).sum(axis=1) / (N - n_left)
        valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (N - n_left >= min_leaf)
        if not valid.any():
            continue
        cand = np.flatnonzero(valid)
        sse = total_sq - gain[cand]
        i = int(cand[np.argmin(sse)])
        value = float(total_sq - gain[i])
        tol = 1e-12 * (1.0 + total_sq)
        if best is None or value < best.sse - tol:
            best = Split(j, 0.5 * (xs[i] + xs[i + 1]), max(value, 0.0), i + 1)
    return best


def _grow(X: np.ndarray, Y: np.ndarray, hyper: TreeHyper):
    nodes: List[TreeNode] = [TreeNode()]
    cohorts: List[np.ndarray] = []
    stack = [(0, np.arange(X.shape[0]), 0)]
    while stack:
        k, idx, depth = stack.pop()
        split = None
        if hyper.max_depth is None or depth < hyper.max_depth:
            split = best_split(X[idx], Y[idx], hyper.min_leaf)
            parent = node_sse(Y[idx])
            if split is not None and not split.sse < parent - 1e-12 * (1.0 + parent):
                split = None
        if split is None:
            nodes[k].leaf = len(cohorts)
            cohorts.append(idx)
            continue
        go_left = X[idx, split.feature] <= split.threshold
        nodes[k].feature = split.feature
        nodes[k].threshold = split.threshold
        nodes[k].left = len(nodes)
        nodes[k].right = len(nodes) + 1
        nodes.extend([TreeNode(), TreeNode()])
        # right pushed first so the left subtree gets the lower leaf numbers
        stack.append((nodes[k].right, idx[~go_left], depth + 1))
        stack.append((nodes[k].left, idx[go_left], depth + 1))
    return nodes, cohorts


def fit_m5_structure(X, Y, hyper: TreeHyper = TreeHyper()) -> TreeForecaster:
    """CART partition with cohorts recorded and leaf payloads unset."""
    X, Y = _training(X, Y)
    if X.shape[0] == 0:
        raise InvalidParameter("cannot fit a tree on empty data")
    nodes, cohorts = _grow(X, Y, hyper)
    return TreeForecaster(nodes, [None] * len(cohorts), X.shape[1], Y.shape[1], hyper, cohorts)


def fit_cart(X, Y, hyper: TreeHyper = TreeHyper()) -> TreeForecaster:
    """Regression tree with cohort-mean leaves."""
    X, Y = _training(X, Y)
    tree = fit_m5_structure(X, Y, hyper)
    return tree.with_payloads([Y[idx].mean(axis=0) for idx in tree.cohorts])


def fit_m5(X, Y, hyper: TreeHyper = TreeHyper(), ridge: float = RIDGE) -> TreeForecaster:
    """CART partition with a least-squares affine model per leaf.

    Leaves too small (or too collinear) for a regression keep the cohort mean.
    """
    X, Y = _training(X, Y)
    tree = fit_m5_structure(X, Y, hyper)
    payloads = []
    for idx in tree.cohorts:
        try:
            payloads.append(fit_least_squares(X[idx], Y[idx], ridge))
        except RankDeficient:
            payloads.append(AffineForecaster.constant(Y[idx].mean(axis=0), X.shape[1]))
    return tree.with_payloads(payloads)
