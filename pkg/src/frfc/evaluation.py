"""Out-of-sample evaluation: optimality-gap bounds and train/test cost tables."""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from .errors import FrfcError, InvalidParameter
from .optim import RandomSource
from .policies import PolicyHyper, fit_policy
from .two_stage import DEFAULT_PERTURBATION, UniquenessPerturbation

ORACLE = "ORACLE"


@dataclass(frozen=True)
class GapConfig:
    n_samples: int = 1000
    n_reps: int = 30
    n_covariates: int = 30
    confidence: float = 0.99
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1 or self.n_covariates < 1:
            raise InvalidParameter("sample and covariate counts must be >= 1")
        if self.n_reps < 2:
            raise InvalidParameter("at least two replications are needed for a bound")
        if not 0.5 < self.confidence < 1:
            raise InvalidParameter("confidence must lie in (0.5, 1)")


@dataclass
class GapRecord:
    covariate_index: int
    replication: int
    policy: str
    policy_cost: float
    cond_opt: float
    gap_pct: float
    B99_pct: float = math.nan


@dataclass
class GapReport:
    config: GapConfig
    covariates: List[np.ndarray] = field(default_factory=list)
    records: List[GapRecord] = field(default_factory=list)
    bounds: Dict[str, List[float]] = field(default_factory=dict)
    abs_bounds: Dict[str, List[float]] = field(default_factory=dict)
    partial: bool = False
    error: str = ""

    @property
    def policies(self) -> List[str]:
        return list(self.bounds)

    def b99(self, policy: str) -> np.ndarray:
        """Per-covariate upper bounds, in percent of the conditional optimum."""
        return np.asarray(self.bounds[policy])

    def median(self, policy: str) -> float:
        return float(np.median(self.b99(policy)))

    def to_csv(self, out=None, header: Sequence[str] = ()) -> str:
        buf = io.StringIO()
        for line in header:
            buf.write(f"# {line}\n")
        buf.write(f"# seed={self.config.seed} samples={self.config.n_samples} "
                  f"reps={self.config.n_reps} covariates={self.config.n_covariates}\n")
        if self.partial:
            buf.write(f"# partial: {self.error}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["covariate_index", "replication", "policy", "policy_cost", "cond_opt",
                    "gap_pct", "B99_pct"])
        for r in self.records:
            w.writerow([r.covariate_index, r.replication, r.policy, repr(r.policy_cost),
                        repr(r.cond_opt), repr(r.gap_pct), repr(r.B99_pct)])
        text = buf.getvalue()
        if isinstance(out, str):
            with open(out, "w", newline="") as fh:
                fh.write(text)
        elif out is not None:
            out.write(text)
        return text


def upper_bound(gaps, confidence: float = 0.99) -> float:
    """One-sided Student-t upper confidence bound on the mean of ``gaps``."""
    gaps = np.asarray(gaps, dtype=float)
    R = gaps.size
    if R < 2:
        raise InvalidParameter("need at least two replications")
    t = stats.t.ppf(confidence, R - 1)
    return float(gaps.mean() + t * gaps.std(ddof=1) / math.sqrt(R))


def estimate_gaps(policies: Dict[str, object], inst, generator, rng: RandomSource,
                  config: GapConfig = GapConfig(), covariates=None,
                  pert: UniquenessPerturbation = DEFAULT_PERTURBATION) -> GapReport:
    """Optimality-gap bounds for several policies on shared evaluation samples.

    For each covariate ``x`` every policy decides once.  Each replication
    draws ``n_samples`` outcomes from ``xi | x``, solves the sample problem
    (the conditional optimum) and records each policy's average cost minus
    that optimum.  The one-sided bound over replications is reported in
    percent of the mean conditional optimum.  The name ``ORACLE`` (value
    ``None``) denotes the sample problem's own solution.
    """
    report = GapReport(config)
    for name in policies:
        report.bounds[name] = []
        report.abs_bounds[name] = []
    if covariates is None:
        covariates = generator.covariates(rng.child(0).generator(), config.n_covariates)
    covariates = np.atleast_2d(np.asarray(covariates, dtype=float))
    try:
        for i, x in enumerate(covariates):
            decisions = {name: (None if pol is None else np.asarray(pol.decide(x)))
                         for name, pol in policies.items()}
            gaps = {name: [] for name in policies}
            opts = []
            rows = []
            for r in range(config.n_reps):
                Xi = generator.conditional(x, rng.child(1, i, r), config.n_samples)
                z_opt, _ = inst.saa(Xi, pert=pert)
                opt = float(np.mean(inst.costs(z_opt, Xi)))
                opts.append(opt)
                for name, z in decisions.items():
                    cost = opt if z is None else float(np.mean(inst.costs(z, Xi)))
                    gaps[name].append(cost - opt)
                    rows.append((r, name, cost, opt))
            scale = abs(float(np.mean(opts)))
            scale = scale if scale > 0 else 1.0
            bound = {}
            for name in policies:
                b = upper_bound(gaps[name], config.confidence)
                report.abs_bounds[name].append(b)
                bound[name] = 100.0 * b / scale
                report.bounds[name].append(bound[name])
            for r, name, cost, opt in rows:
                report.records.append(GapRecord(i, r, name, cost, opt,
                                                100.0 * (cost - opt) / scale, bound[name]))
            report.covariates.append(x)
    except FrfcError as exc:
        report.partial = True
        report.error = f"{type(exc).__name__}: {exc}"
    return report


def estimate_gap(pol, inst, generator, rng: RandomSource, config: GapConfig = GapConfig(),
                 **kw) -> GapReport:
    """Single-policy form of :func:`estimate_gaps`."""
    name = ORACLE if pol is None else getattr(pol, "kind", "policy")
    return estimate_gaps({name: pol}, inst, generator, rng, config, **kw)


@dataclass
class ConditionalSamplePolicy:
    """Decides by solving the sample problem on an independent draw from ``xi | x``."""

    inst: object
    generator: object
    rng: RandomSource
    n_samples: int = 1000
    kind: str = "COND"

    def decide(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        # a stable stream per covariate value
        key = int.from_bytes(hashlib.sha256(np.ascontiguousarray(x).tobytes()).digest()[:4], "little")
        Xi = self.generator.conditional(x, self.rng.child(key), self.n_samples)
        return self.inst.saa(Xi)[0]


# --------------------------------------------------------------------------
# train/test comparison


@dataclass
class CostTable:
    kinds: List[str]
    costs: Dict[str, List[float]]

    def mean(self, kind: str) -> float:
        return float(np.mean(self.costs[kind]))

    def spread(self, kind: str) -> float:
        v = self.costs[kind]
        return float(np.std(v, ddof=1)) if len(v) > 1 else 0.0

    def columns(self) -> List[str]:
        # duplicates keep their own column, suffixed by position
        seen: Dict[str, int] = {}
        out = []
        for k in self.kinds:
            seen[k] = seen.get(k, 0) + 1
            out.append(k if seen[k] == 1 else f"{k}#{seen[k]}")
        return out


def out_of_sample_costs(kinds: Sequence[str], inst, X, Xi, split: float = 0.8,
                        replications: int = 1, rng: Optional[RandomSource] = None,
                        hyper: PolicyHyper = PolicyHyper()) -> CostTable:
    """Average test cost of each policy kind over shuffled train/test splits.

    ``split >= 1`` trains and tests on all rows (no shuffle).
    """
    if replications < 1:
        raise InvalidParameter("replications must be >= 1")
    if not split > 0:
        raise InvalidParameter("split must be > 0")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Xi = np.asarray(Xi, dtype=float)
    if Xi.ndim == 1:
        Xi = Xi[:, None]
    N = X.shape[0]
    rng = rng or RandomSource(0)
    table = CostTable(list(kinds), {c: [] for c in CostTable(list(kinds), {}).columns()})
    cols = table.columns()
    for rep in range(replications):
        if split >= 1:
            train = test = np.arange(N)
        else:
            perm = rng.child(rep).generator().permutation(N)
            n_train = int(round(split * N))
            if n_train < 1 or n_train >= N:
                raise InvalidParameter("split leaves an empty train or test set")
            train, test = perm[:n_train], perm[n_train:]
        for kind, col in zip(kinds, cols):
            pol = fit_policy(kind, inst, X[train], Xi[train], hyper)
            Z = pol.decide_batch(X[test])
            table.costs[col].append(float(np.mean(inst.costs(Z, Xi[test]))))
    return table
