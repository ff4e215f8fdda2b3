import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frfc.errors import DimensionMismatch, InvalidParameter, RankDeficient
from frfc.forecasters import (
    AffineForecaster,
    TreeHyper,
    best_split,
    fit_cart,
    fit_least_squares,
    fit_m5,
    node_sse,
    predict,
)


def exhaustive_split(X, Y, min_leaf):
    """Every (feature, midpoint) pair scored from scratch."""
    best = None
    for j in range(X.shape[1]):
        vals = np.unique(X[:, j])
        for a, b in zip(vals[:-1], vals[1:]):
            t = 0.5 * (a + b)
            left = X[:, j] <= t
            if left.sum() < min_leaf or (~left).sum() < min_leaf:
                continue
            sse = node_sse(Y[left]) + node_sse(Y[~left])
            if best is None or sse < best[2] - 1e-9 * (1 + sse):
                best = (j, t, sse)
    return best


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.integers(2, 50), st.integers(1, 4), st.integers(1, 3),
       st.integers(1, 10), st.booleans())
def test_best_split_matches_exhaustive(seed, N, s, m, min_leaf, discrete):
    g = np.random.default_rng(seed)
    X = g.integers(0, 5, (N, s)).astype(float) if discrete else g.normal(size=(N, s))
    Y = g.normal(size=(N, m))
    got = best_split(X, Y, min_leaf)
    want = exhaustive_split(X, Y, min_leaf)
    if want is None:
        assert got is None
        return
    assert got is not None
    assert got.sse == pytest.approx(want[2], rel=1e-9, abs=1e-9)
    # the chosen split really has the reported error
    left = X[:, got.feature] <= got.threshold
    assert node_sse(Y[left]) + node_sse(Y[~left]) == pytest.approx(got.sse, rel=1e-9, abs=1e-9)
    assert left.sum() == got.n_left


def test_split_tie_breaks_to_lowest_feature():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
    Y = np.array([[0.0], [0.0], [1.0], [1.0]])
    sp = best_split(X, Y, 1)
    assert (sp.feature, sp.threshold, sp.sse) == (0, 0.5, 0.0)


def test_constant_features_do_not_split():
    X = np.ones((10, 2))
    assert best_split(X, np.arange(10.0)[:, None], 1) is None
    tree = fit_cart(X, np.arange(10.0), TreeHyper(1))
    assert tree.n_leaves == 1
    np.testing.assert_allclose(tree.predict(X[:1]), [[4.5]])


def test_cart_step_function():
    X = np.linspace(0, 1, 100)[:, None]
    Y = np.where(X[:, 0] < 0.3, 1.0, 5.0)
    tree = fit_cart(X, Y, TreeHyper(5))
    np.testing.assert_allclose(tree.predict([[0.1], [0.9]]).ravel(), [1.0, 5.0])
    assert tree.n_leaves == 2


def test_cart_leaves_respect_min_leaf():
    g = np.random.default_rng(3)
    X = g.normal(size=(300, 3))
    Y = g.normal(size=(300, 2))
    tree = fit_cart(X, Y, TreeHyper(25))
    sizes = [c.size for c in tree.cohorts]
    assert min(sizes) >= 25 and sum(sizes) == 300
    # leaf values are cohort means, and every training point lands in its cohort
    leaf = tree.leaf_index(X)
    for k, idx in enumerate(tree.cohorts):
        assert np.all(leaf[idx] == k)
        np.testing.assert_allclose(tree.payloads[k], Y[idx].mean(axis=0))


def test_max_depth():
    g = np.random.default_rng(4)
    X = g.normal(size=(200, 2))
    tree = fit_cart(X, X[:, 0] ** 2, TreeHyper(1, max_depth=2))
    assert tree.n_leaves <= 4


def normal_equations_oracle(X, Y):
    D = np.hstack([np.ones((X.shape[0], 1)), X])
    coef, *_ = np.linalg.lstsq(D, Y, rcond=None)
    return coef


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 4), st.integers(1, 3))
def test_least_squares_matches_oracle(seed, s, m):
    g = np.random.default_rng(seed)
    N = s + 1 + int(g.integers(0, 40))
    X = g.normal(size=(N, s))
    Y = g.normal(size=(N, m)) + X @ g.normal(size=(s, m))
    f = fit_least_squares(X, Y)
    coef = normal_equations_oracle(X, Y)
    np.testing.assert_allclose(f.intercept, coef[0], atol=1e-8)
    np.testing.assert_allclose(f.slopes, coef[1:].T, atol=1e-8)


def test_least_squares_exact_fit():
    X = np.arange(10.0)[:, None]
    f = fit_least_squares(X, 3.0 + 2.0 * X)
    np.testing.assert_allclose(f.predict([[20.0]]), [[43.0]])


def test_least_squares_rank_errors():
    with pytest.raises(RankDeficient):
        fit_least_squares(np.ones((1, 1)), np.ones((1, 1)))
    with pytest.raises(RankDeficient):
        fit_least_squares(np.ones((10, 1)), np.arange(10.0))
    with pytest.raises(DimensionMismatch):
        fit_least_squares(np.ones((3, 1)), np.ones((4, 1)))


def test_m5_recovers_piecewise_affine():
    X = np.linspace(-1, 1, 400)[:, None]
    Y = np.where(X[:, 0] <= 0, 1 + 2 * X[:, 0], 10 - 3 * X[:, 0])
    tree = fit_m5(X, Y, TreeHyper(20, max_depth=1))
    np.testing.assert_allclose(tree.predict([[-0.5], [0.5]]).ravel(), [0.0, 8.5], atol=1e-8)


def test_affine_params_round_trip():
    f = AffineForecaster([1.0, 2.0], [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    g = AffineForecaster.from_params(f.params(), 2, 3)
    np.testing.assert_array_equal(g.intercept, f.intercept)
    np.testing.assert_array_equal(g.slopes, f.slopes)
    np.testing.assert_allclose(predict(f, [[1.0, 0.0, 0.0]]), [[2.0, 6.0]])
    with pytest.raises(DimensionMismatch):
        f.predict([[1.0, 2.0]])


def test_tree_errors():
    with pytest.raises(InvalidParameter):
        fit_cart(np.zeros((0, 1)), np.zeros((0, 1)))
    with pytest.raises(InvalidParameter):
        TreeHyper(0)


def test_affine_substitution():
    np.testing.assert_allclose(AffineForecaster([1.0], [[2.0]]).predict([[3.0]]), [[7.0]])


def test_tree_routing():
    X = np.array([[0.0]] * 25 + [[1.0]] * 25)
    Y = np.array([[0.0]] * 25 + [[10.0]] * 25)
    tree = fit_cart(X, Y, TreeHyper(25))
    assert tree.n_leaves == 2
    assert tree.nodes[0].threshold == 0.5
    np.testing.assert_allclose(tree.predict([[0.2], [0.7]]).ravel(), [0.0, 10.0])


def test_constant_targets():
    X = np.random.default_rng(5).normal(size=(30, 2))
    f = fit_least_squares(X, np.full(30, 4.0))
    np.testing.assert_allclose(f.slopes, 0.0, atol=1e-10)
    assert f.intercept[0] == pytest.approx(4.0)
    assert fit_cart(X, np.full(30, 4.0), TreeHyper(2)).n_leaves == 1


def test_m5_shares_cart_partition_and_fits_leaves():
    g = np.random.default_rng(6)
    X = g.normal(size=(300, 2))
    Y = np.column_stack([np.abs(X[:, 0]) + 0.1 * g.normal(size=300)])
    cart = fit_cart(X, Y, TreeHyper(30))
    m5 = fit_m5(X, Y, TreeHyper(30))
    assert [(n.feature, n.threshold) for n in cart.nodes] == [(n.feature, n.threshold) for n in m5.nodes]
    for idx, payload in zip(m5.cohorts, m5.payloads):
        ls = fit_least_squares(X[idx], Y[idx])
        np.testing.assert_allclose(payload.slopes, ls.slopes)


def test_single_leaf_m5_is_least_squares():
    g = np.random.default_rng(7)
    X = g.normal(size=(40, 2))
    Y = X @ [1.0, -2.0] + 3.0
    m5 = fit_m5(X, Y, TreeHyper(30))
    assert m5.n_leaves == 1
    np.testing.assert_allclose(m5.predict(X), fit_least_squares(X, Y).predict(X))


def test_identical_data_identical_tree():
    g = np.random.default_rng(8)
    X = g.integers(0, 3, (100, 3)).astype(float)
    Y = g.normal(size=(100, 2))
    a, b = fit_cart(X, Y, TreeHyper(5)), fit_cart(X.copy(), Y.copy(), TreeHyper(5))
    assert [(n.feature, n.threshold) for n in a.nodes] == [(n.feature, n.threshold) for n in b.nodes]
