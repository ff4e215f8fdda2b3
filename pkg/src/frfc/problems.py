"""Instance builders: newsvendor variants, resource allocation, shipment
planning, and the covariate/demand generator used for the contextual
experiments.

Every builder returns an :class:`Instance`, which couples a
:class:`~frfc.two_stage.FrfcProblem` with the map from an uncertain vector
``xi`` (demands, or demand plus reliability) to scenarios, and with
closed-form one-scenario decisions and costs where those exist.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import InvalidParameter
from .optim import RandomSource, random_correlation
from .two_stage import (
    DEFAULT_PERTURBATION,
    FrfcProblem,
    Scenario,
    UniquenessPerturbation,
    full_objectives,
    one_scenario_batch,
    saa_solve,
)


@dataclass
class Instance:
    """A two-stage problem plus the ``xi -> scenario`` map.

    ``xi_map``/``xi_offset`` give ``h = xi_offset + xi_map @ xi`` for fixed-T
    problems.  ``scenario_fn`` overrides that map (random ``T``).
    ``decide_fn(Xi)`` and ``cost_fn(Z, Xi)`` are optional exact shortcuts for
    the one-scenario decision and ``G(z, xi)``.
    """

    problem: FrfcProblem
    xi_dim: int
    xi_map: Optional[np.ndarray] = None
    xi_offset: Optional[np.ndarray] = None
    scenario_fn: Optional[Callable] = None
    decide_fn: Optional[Callable] = None
    cost_fn: Optional[Callable] = None
    params: object = None
    name: str = ""

    def __post_init__(self):
        m = self.problem.m
        if self.scenario_fn is None:
            if self.xi_map is None:
                self.xi_map = np.eye(m, self.xi_dim)
            if self.xi_offset is None:
                self.xi_offset = np.zeros(m)

    @property
    def n(self) -> int:
        return self.problem.n

    @property
    def fixed_T(self) -> bool:
        return self.scenario_fn is None

    def scenarios(self, Xi):
        """Scenario batch for rows of ``Xi``: an ``(K, m)`` array or a list."""
        Xi = np.atleast_2d(np.asarray(Xi, dtype=float))
        if self.scenario_fn is not None:
            return self.scenario_fn(Xi)
        return self.xi_offset[None, :] + Xi @ self.xi_map.T

    def scenario(self, xi) -> Scenario:
        s = self.scenarios(np.asarray(xi, dtype=float)[None, :])
        return s[0] if isinstance(s, list) else Scenario(s[0])

    def decide(self, Xi_hat, pert: UniquenessPerturbation = DEFAULT_PERTURBATION) -> np.ndarray:
        """One-scenario decisions for each forecast row (``K x n``)."""
        Xi_hat = np.atleast_2d(np.asarray(Xi_hat, dtype=float))
        if self.decide_fn is not None:
            return self.decide_fn(Xi_hat)
        if not self.fixed_T:
            from .two_stage import one_scenario_solve

            return np.vstack([one_scenario_solve(self.problem, s, pert)[0]
                              for s in self.scenarios(Xi_hat)])
        return one_scenario_batch(self.problem, self.scenarios(Xi_hat), pert)[0]

    def costs(self, Z, Xi) -> np.ndarray:
        """``G(Z[k], Xi[k])`` for every row (``Z`` may be a single decision)."""
        Xi = np.atleast_2d(np.asarray(Xi, dtype=float))
        Z = np.broadcast_to(np.atleast_2d(np.asarray(Z, dtype=float)), (Xi.shape[0], self.n))
        if self.cost_fn is not None:
            return self.cost_fn(Z, Xi)
        return full_objectives(self.problem, Z, self.scenarios(Xi))

    def saa(self, Xi, weights=None, pert: UniquenessPerturbation = DEFAULT_PERTURBATION, **kw):
        return saa_solve(self.problem, self.scenarios(Xi), weights, pert, **kw)


# --------------------------------------------------------------------------
# newsvendor


@dataclass(frozen=True)
class ProductParams:
    c: float
    p: float
    eta: float
    pi: float

    def __post_init__(self):
        if not (self.p > self.c >= 0):
            raise InvalidParameter("need p > c >= 0")
        if self.eta < 0 or self.pi < 0:
            raise InvalidParameter("eta and pi must be >= 0")

    @property
    def critical_ratio(self) -> float:
        return (self.p + self.pi - self.c) / (self.p + self.pi + self.eta)


@dataclass(frozen=True)
class NewsvendorParams:
    """Single-product newsvendor; ``b`` bounds the Uniform(0, b) demand."""

    c: float = 300.0
    p: float = 4000.0
    eta: float = 300.0
    pi: float = 4000.0
    b: float = 100.0
    unreliable: bool = False
    coupled: bool = False
    coupled_penalty: Optional[float] = None

    def __post_init__(self):
        ProductParams(self.c, self.p, self.eta, self.pi)
        if not self.b > 0:
            raise InvalidParameter("demand bound b must be > 0")
        if self.unreliable and self.coupled:
            raise InvalidParameter("unreliable and coupled variants are exclusive")

    @property
    def critical_ratio(self) -> float:
        return critical_ratio(self.c, self.p, self.eta, self.pi)


def critical_ratio(c: float, p: float, eta: float, pi: float) -> float:
    """Quantile level ``(p + pi - c) / (p + pi + eta)``."""
    return (p + pi - c) / (p + pi + eta)


def newsvendor_cost(z, D, c, p, eta, pi):
    """``(c - p) z + (p + eta)[z - D]_+ + pi [D - z]_+`` elementwise."""
    z = np.asarray(z, dtype=float)
    D = np.asarray(D, dtype=float)
    return (c - p) * z + (p + eta) * np.maximum(z - D, 0.0) + pi * np.maximum(D - z, 0.0)


def unreliable_cost(z, D, U, c, p, eta, pi):
    """Cost when ``U z`` units arrive: ``(c - p) v + (p + eta)[v - D]_+ + pi [D - v]_+``."""
    v = np.asarray(U, dtype=float) * np.asarray(z, dtype=float)
    return newsvendor_cost(v, D, c, p, eta, pi)


def build_newsvendor(params: NewsvendorParams) -> Instance:
    """Single-product newsvendor as a two-stage LP.

    Standard: ``h = -D``, ``T = -1``, ``W = [1, -1]``, ``q = (p + eta, pi)``,
    first-stage cost ``c - p``.  ``unreliable=True`` adds the delivered
    quantity ``v = U z`` as a recourse variable (xi = (D, U), random ``T``);
    ``coupled=True`` adds the row ``z >= 2D`` with a penalized slack.
    """
    c, p, eta, pi = params.c, params.p, params.eta, params.pi
    if params.unreliable:
        # y = (y+, y-, v):  y+ - y- - v = -D ;  v - U z = 0
        W = np.array([[1.0, -1.0, -1.0], [0.0, 0.0, 1.0]])
        q = np.array([p + eta, pi, c - p])
        T = np.array([[0.0], [-0.5]])
        prob = FrfcProblem([0.0], np.zeros((0, 1)), [], W, q, T, name="newsvendor-unreliable")

        def scen(Xi):
            return [Scenario([-d, 0.0], [[0.0], [-u]]) for d, u in Xi]

        def decide(Xi):
            D, U = Xi[:, 0], Xi[:, 1]
            if np.any(U <= 0):
                raise InvalidParameter("reliability must be positive")
            return np.maximum(D, 0.0)[:, None] / U[:, None]

        def cost(Z, Xi):
            return unreliable_cost(Z[:, 0], Xi[:, 0], Xi[:, 1], c, p, eta, pi)

        return Instance(prob, 2, scenario_fn=scen, decide_fn=decide, cost_fn=cost,
                        params=params, name=prob.name)

    if params.coupled:
        penalty = params.coupled_penalty or 10.0 * (p + pi + eta)
        # y = (y+, y-, yd, ys):  y+ - y- = z - D ;  yd - ys = z - 2D
        W = np.array([[1.0, -1.0, 0.0, 0.0], [0.0, 0.0, 1.0, -1.0]])
        q = np.array([p + eta, pi, 0.0, penalty])
        T = np.array([[-1.0], [-1.0]])
        prob = FrfcProblem([c - p], np.zeros((0, 1)), [], W, q, T, name="newsvendor-coupled")
        return Instance(prob, 1, xi_map=np.array([[-1.0], [-2.0]]), params=params, name=prob.name)

    W = np.array([[1.0, -1.0]])
    q = np.array([p + eta, pi])
    prob = FrfcProblem([c - p], np.zeros((0, 1)), [], W, q, [[-1.0]], name="newsvendor")
    return Instance(
        prob, 1, xi_map=np.array([[-1.0]]),
        decide_fn=lambda Xi: np.maximum(Xi[:, :1], 0.0),
        cost_fn=lambda Z, Xi: newsvendor_cost(Z[:, 0], Xi[:, 0], c, p, eta, pi),
        params=params, name=prob.name,
    )


@dataclass(frozen=True)
class MultiProductParams:
    products: tuple
    budget: float
    demand_bounds: tuple = ()

    def __post_init__(self):
        if not self.products:
            raise InvalidParameter("need at least one product")
        if not self.budget > 0:
            raise InvalidParameter("budget must be > 0")


TWO_PRODUCT = MultiProductParams(
    products=(ProductParams(300.0, 1500.0, 300.0, 1500.0), ProductParams(1000.0, 3000.0, 1000.0, 3000.0)),
    budget=300.0,
    demand_bounds=((100.0, 400.0), (50.0, 150.0)),
)


def build_multi_product(params: MultiProductParams = TWO_PRODUCT) -> Instance:
    """Independent newsvendors tied by ``sum(z) <= budget``."""
    k = len(params.products)
    c = np.array([pr.c - pr.p for pr in params.products])
    W = np.zeros((k, 2 * k))
    q = np.zeros(2 * k)
    for i, pr in enumerate(params.products):
        W[i, 2 * i: 2 * i + 2] = [1.0, -1.0]
        q[2 * i: 2 * i + 2] = [pr.p + pr.eta, pr.pi]
    prob = FrfcProblem(c, np.ones((1, k)), [params.budget], W, q, -np.eye(k), name="newsvendor-multi")
    cs = np.array([pr.c for pr in params.products])
    ps = np.array([pr.p for pr in params.products])
    etas = np.array([pr.eta for pr in params.products])
    pis = np.array([pr.pi for pr in params.products])

    def cost(Z, Xi):
        return newsvendor_cost(Z, Xi, cs, ps, etas, pis).sum(axis=1)

    # one scenario: fill demands in decreasing order of underage margin
    margin = ps + pis - cs
    order = np.argsort(-margin, kind="stable")

    def decide(Xi):
        Z = np.zeros_like(Xi)
        left = np.full(Xi.shape[0], params.budget)
        for i in order:
            if margin[i] <= 0:
                continue
            Z[:, i] = np.minimum(np.maximum(Xi[:, i], 0.0), left)
            left -= Z[:, i]
        return Z

    return Instance(prob, k, xi_map=-np.eye(k), decide_fn=decide, cost_fn=cost,
                    params=params, name=prob.name)


def sample_newsvendor(params: NewsvendorParams, rng: RandomSource, N: int) -> np.ndarray:
    """``N`` outcome rows: ``D ~ U(0, b)``, plus ``U ~ U(0, 1)`` when unreliable."""
    if N < 1:
        raise InvalidParameter("N must be >= 1")
    gen = rng.generator()
    D = gen.uniform(0.0, params.b, N)
    if params.unreliable:
        return np.column_stack([D, gen.uniform(0.0, 1.0, N)])
    return D[:, None]


def sample_multi_product(params: MultiProductParams, rng: RandomSource, N: int) -> np.ndarray:
    """``N`` demand rows, product ``i`` uniform on ``demand_bounds[i]``."""
    if N < 1:
        raise InvalidParameter("N must be >= 1")
    if len(params.demand_bounds) != len(params.products):
        raise InvalidParameter("demand bounds missing")
    gen = rng.generator()
    return np.column_stack([gen.uniform(lo, hi, N) for lo, hi in params.demand_bounds])


def analytical_unreliable_optimum(phi: float, b: float) -> float:
    """Optimal order for Uniform(0, b) demand and Uniform(0, 1) reliability."""
    if not 0 < phi < 1:
        raise InvalidParameter("phi must lie in (0, 1)")
    if not b > 0:
        raise InvalidParameter("b must be > 0")
    if phi <= 2.0 / 3.0:
        return 1.5 * phi * b
    return b / math.sqrt(3.0 * (1.0 - phi))


def unreliable_optimality_residual(z: float, phi: float, b: float) -> float:
    """``int_0^1 u F(z u) du - phi E[U]`` by adaptive quadrature.

    Zero exactly at the optimal order quantity.
    """

    def integrand(u):
        return u * min(max(z * u / b, 0.0), 1.0)

    kink = b / z if z > b else None
    val, _ = integrate.quad(integrand, 0.0, 1.0, points=[kink] if kink else None,
                            epsabs=1e-13, epsrel=1e-13)
    return val - 0.5 * phi


# --------------------------------------------------------------------------
# resource allocation and shipment planning


@dataclass(frozen=True)
class ResourceAllocationParams:
    c: tuple
    q: tuple
    rho: tuple
    mu: tuple  # |I| x |J|

    def __post_init__(self):
        c, q, rho, mu = map(np.asarray, (self.c, self.q, self.rho, self.mu))
        if mu.shape != (c.size, q.size) or rho.size != c.size:
            raise InvalidParameter("inconsistent resource-allocation shapes")
        if np.any(c <= 0) or np.any(q <= 0):
            raise InvalidParameter("costs must be positive")
        if np.any(rho <= 0) or np.any(rho > 1):
            raise InvalidParameter("yields must lie in (0, 1]")
        if np.any(mu < 0):
            raise InvalidParameter("service rates must be >= 0")

    @classmethod
    def random(cls, rng: RandomSource, n_resources: int = 20, n_clients: int = 30):
        g = rng.generator()
        return cls(
            tuple(g.uniform(5.0, 15.0, n_resources)),
            tuple(g.uniform(50.0, 100.0, n_clients)),
            tuple(g.uniform(0.7, 1.0, n_resources)),
            tuple(map(tuple, g.uniform(0.5, 1.5, (n_resources, n_clients)))),
        )


def build_resource_allocation(params: ResourceAllocationParams) -> Instance:
    """Resources ``z`` bought up front, then allocated to client demands.

    Recourse columns: allocations ``y_ij`` (i-major), unmet demand ``y_j``,
    capacity slacks, demand surpluses.  Rows: capacity (``h = 0``,
    ``T = -diag(rho)``) then demand (``h = xi``).
    """
    c = np.asarray(params.c, dtype=float)
    q = np.asarray(params.q, dtype=float)
    rho = np.asarray(params.rho, dtype=float)
    mu = np.asarray(params.mu, dtype=float)
    I, J = mu.shape
    n_alloc = I * J
    W = np.zeros((I + J, n_alloc + J + I + J))
    for i in range(I):
        W[i, i * J:(i + 1) * J] = 1.0
        W[I:, i * J:(i + 1) * J] = np.diag(mu[i])
    W[I:, n_alloc:n_alloc + J] = np.eye(J)
    W[:I, n_alloc + J:n_alloc + J + I] = np.eye(I)
    W[I:, n_alloc + J + I:] = -np.eye(J)
    qv = np.concatenate([np.zeros(n_alloc), q, np.zeros(I + J)])
    T = np.vstack([-np.diag(rho), np.zeros((J, I))])
    prob = FrfcProblem(c, np.zeros((0, I)), [], W, qv, T, name="resource-allocation")

    # one scenario decomposes by client: serve j from the cheapest resource
    # per delivered unit, or leave it unmet if that is cheaper
    unit = c[:, None] / (rho[:, None] * np.where(mu > 0, mu, np.nan))
    unit = np.where(np.isnan(unit), np.inf, unit)
    best_i = np.argmin(unit, axis=0)
    best_unit = unit[best_i, np.arange(J)]
    served = best_unit < q
    per_demand = np.zeros((J, I))
    for j in np.flatnonzero(served):
        i = best_i[j]
        per_demand[j, i] = 1.0 / (rho[i] * mu[i, j])

    def decide(Xi):
        return np.maximum(Xi, 0.0) @ per_demand

    xi_map = np.vstack([np.zeros((I, J)), np.eye(J)])
    return Instance(prob, J, xi_map=xi_map, decide_fn=decide, params=params, name=prob.name)


@dataclass(frozen=True)
class ShipmentParams:
    c: float
    r: float
    s: tuple  # |I| x |J|

    def __post_init__(self):
        if not (self.r > self.c > 0):
            raise InvalidParameter("need r > c > 0")
        if np.any(np.asarray(self.s) < 0):
            raise InvalidParameter("shipping costs must be >= 0")

    @classmethod
    def random(cls, rng: RandomSource, n_warehouses: int = 5, n_locations: int = 12,
               c: float = 5.0, r: float = 10.0):
        g = rng.generator()
        return cls(c, r, tuple(map(tuple, g.uniform(1.0, 5.0, (n_warehouses, n_locations)))))


def build_shipment(params: ShipmentParams) -> Instance:
    """Production ``z`` at warehouses, emergency production and shipping after demand.

    Recourse columns: shipments ``y_ij`` (i-major), emergency ``y_i``,
    capacity slacks, demand surpluses.  Rows: demand (``h = xi``) then
    capacity (``h = 0``, ``T = -I``).
    """
    s = np.asarray(params.s, dtype=float)
    I, J = s.shape
    n_ship = I * J
    W = np.zeros((J + I, n_ship + I + I + J))
    for i in range(I):
        W[:J, i * J:(i + 1) * J] = np.eye(J)
        W[J + i, i * J:(i + 1) * J] = 1.0
    W[J:, n_ship:n_ship + I] = -np.eye(I)
    W[J:, n_ship + I:n_ship + 2 * I] = np.eye(I)
    W[:J, n_ship + 2 * I:] = -np.eye(J)
    qv = np.concatenate([s.ravel(), np.full(I, params.r), np.zeros(I + J)])
    T = np.vstack([np.zeros((J, I)), -np.eye(I)])
    prob = FrfcProblem(np.full(I, params.c), np.zeros((0, I)), [], W, qv, T, name="shipment")

    # one scenario: produce each location's demand at its cheapest warehouse
    nearest = np.argmin(s, axis=0)
    assign = np.zeros((J, I))
    assign[np.arange(J), nearest] = 1.0

    def decide(Xi):
        return np.maximum(Xi, 0.0) @ assign

    xi_map = np.vstack([np.eye(J), np.zeros((I, J))])
    return Instance(prob, J, xi_map=xi_map, decide_fn=decide, params=params, name=prob.name)


# --------------------------------------------------------------------------
# synthetic covariates and demands


_SLOPE_BASE = (10.0, 5.0, 2.0)


@dataclass(frozen=True)
class SyntheticGenerator:
    """``xi_j = a_j + sum_l B[j, l] x_l**degree + eps_j``, ``x`` folded normal."""

    a: tuple
    B: tuple
    sigma: tuple
    cov: tuple
    degree: float = 1.0

    def __post_init__(self):
        a, B, sigma, cov = (np.asarray(v, dtype=float) for v in (self.a, self.B, self.sigma, self.cov))
        if B.shape != (a.size, cov.shape[0]) or sigma.size != a.size:
            raise InvalidParameter("coefficient shapes must be (J,), (J, L), (J,)")
        if cov.shape[0] != cov.shape[1]:
            raise InvalidParameter("covariance must be square")
        if np.any(sigma < 0):
            raise InvalidParameter("noise levels must be >= 0")
        if not self.degree > 0:
            raise InvalidParameter("degree must be > 0")

    @classmethod
    def random(cls, rng: RandomSource, n_clients: int, n_covariates: int = 3,
               degree: float = 1.0, sigma: float = 5.0) -> "SyntheticGenerator":
        if not 1 <= n_covariates <= len(_SLOPE_BASE):
            raise InvalidParameter(f"n_covariates must be in 1..{len(_SLOPE_BASE)}")
        g = rng.generator()
        a = 50.0 + 5.0 * g.standard_normal(n_clients)
        B = np.column_stack([base + g.uniform(-4.0, 4.0, n_clients)
                             for base in _SLOPE_BASE[:n_covariates]])
        cov = random_correlation(g, n_covariates)
        return cls(tuple(a), tuple(map(tuple, B)), tuple(np.full(n_clients, sigma)),
                   tuple(map(tuple, cov)), degree)

    @property
    def n_clients(self) -> int:
        return len(self.a)

    @property
    def n_covariates(self) -> int:
        return len(self.cov)

    def with_sigma(self, sigma: float) -> "SyntheticGenerator":
        return SyntheticGenerator(self.a, self.B, tuple(np.full(self.n_clients, sigma)),
                                  self.cov, self.degree)

    def mean(self, X) -> np.ndarray:
        """Noise-free demand for covariate rows ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.asarray(self.a)[None, :] + (X ** self.degree) @ np.asarray(self.B).T

    def covariates(self, gen: np.random.Generator, N: int) -> np.ndarray:
        L = self.n_covariates
        return np.abs(gen.multivariate_normal(np.zeros(L), np.asarray(self.cov), size=N, method="eigh"))

    def noise(self, gen: np.random.Generator, N: int) -> np.ndarray:
        return gen.standard_normal((N, self.n_clients)) * np.asarray(self.sigma)[None, :]

    def conditional(self, x, rng: RandomSource, K: int) -> np.ndarray:
        """``K`` demand draws from ``xi | x``."""
        gen = rng.generator()
        return self.mean(np.asarray(x, dtype=float)[None, :]) + self.noise(gen, K)


def gen_dataset(g: SyntheticGenerator, rng: RandomSource, N: int):
    """``N`` i.i.d. pairs ``(x, xi)``; returns ``(X (N, L), Xi (N, J))``."""
    if N < 1:
        raise InvalidParameter("N must be >= 1")
    gen = rng.generator()
    X = g.covariates(gen, N)
    Xi = g.mean(X) + g.noise(gen, N)
    return X, Xi


def recourse_probe(inst: Instance, rng: RandomSource, trials: int = 100, scale: float = 200.0) -> int:
    """Count infeasible second stages over random ``(z, xi)`` pairs (0 expected).

    ``z`` is drawn on ``[0, scale]`` and then clipped into the first-stage
    budget rows where present; ``xi`` is real valued (negative entries too).
    """
    from .errors import SecondStageInfeasible

    gen = rng.generator()
    p = inst.problem
    failures = 0
    for _ in range(trials):
        z = gen.uniform(0.0, scale, p.n)
        if p.A.shape[0]:
            over = (p.A @ z - p.b).max()
            if over > 0:
                z *= max(0.0, float(np.min(p.b / np.maximum(p.A @ z, 1e-12))))
        xi = gen.normal(0.0, scale, inst.xi_dim)
        if not inst.fixed_T:
            xi[-1] = abs(xi[-1]) + 1e-3
        try:
            full_objectives(p, z, inst.scenarios(xi[None, :]))
        except SecondStageInfeasible:
            failures += 1
    return failures


# --------------------------------------------------------------------------
# random small instances for property checks


@dataclass
class RandomInstance:
    problem: FrfcProblem
    scenarios: list  # Scenario objects
    weights: np.ndarray


def random_frfc_instance(rng: RandomSource, n: int = 3, m: int = 4, K: int = 10,
                         random_T: bool = False, zero_mean_T: bool = False) -> RandomInstance:
    """A small problem with complete recourse and a discrete distribution.

    ``W = [W0, I, -I]`` with positive costs on the identity blocks, so every
    right-hand side is feasible and the recourse duals are bounded.  ``Z``
    is a budget polytope.  With ``random_T`` each scenario carries its own
    ``T``; ``zero_mean_T`` makes those matrices average to zero exactly.
    """
    if n < 1 or m < 1 or K < 1:
        raise InvalidParameter("sizes must be >= 1")
    g = rng.generator()
    k0 = int(g.integers(1, m + 1))
    W = np.hstack([g.normal(0.0, 1.0, (m, k0)), np.eye(m), -np.eye(m)])
    q = np.concatenate([g.uniform(0.5, 3.0, k0), g.uniform(2.0, 6.0, 2 * m)])
    c = g.normal(0.0, 1.0, n)
    A = np.vstack([np.ones((1, n)), g.uniform(0.0, 1.0, (max(0, n - 1), n))])
    b = np.concatenate([[10.0], g.uniform(3.0, 8.0, max(0, n - 1))])
    T = g.normal(0.0, 1.0, (m, n))
    H = g.normal(0.0, 3.0, (K, m))
    w = g.dirichlet(np.ones(K))
    scen = []
    Ts = [None] * K
    if random_T:
        Ts = [T + g.normal(0.0, 1.0, (m, n)) for _ in range(K)]
        if zero_mean_T:
            mean = sum(wk * Tk for wk, Tk in zip(w, Ts))
            Ts = [Tk - mean for Tk in Ts]
    for k in range(K):
        scen.append(Scenario(H[k], Ts[k]))
    T_nominal = T if not random_T else sum(wk * Tk for wk, Tk in zip(w, Ts))
    prob = FrfcProblem(c, A, b, W, q, T_nominal, name="random")
    return RandomInstance(prob, scen, w)
