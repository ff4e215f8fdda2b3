"""Search for a single scenario whose one-scenario decision is cheapest on a sample."""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import FrfcError, InvalidParameter, SizeLimit
from .optim import NelderMeadConfig, RandomSource, nelder_mead
from .two_stage import DEFAULT_PERTURBATION, UniquenessPerturbation, saa_solve_full


@dataclass
class ScenarioSearchResult:
    xi: np.ndarray
    scenario: object
    induced_z: np.ndarray
    sample_cost: float
    evaluations: int
    elapsed: float
    start_cost: float
    failures: int = 0


def sample_cost(inst, z, samples) -> float:
    """``(1/N) sum_n G(z, xi_n)``."""
    return float(np.mean(inst.costs(z, samples)))


def find_optimal_scenario(inst, samples, cfg: Optional[NelderMeadConfig] = None,
                          rng: Optional[RandomSource] = None,
                          inner: Optional[Callable] = None,
                          pert: UniquenessPerturbation = DEFAULT_PERTURBATION) -> ScenarioSearchResult:
    """Nelder-Mead over the scenario vector, from the sample mean.

    ``inner(xi) -> z`` defaults to the instance's one-scenario decision.
    Inner failures score ``+inf`` and are counted in ``failures``.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise InvalidParameter("samples must be nonempty")
    cfg = cfg or NelderMeadConfig()
    if inner is None:
        def inner(xi):
            return inst.decide(xi[None, :], pert)[0]

    failures = 0

    def outer(xi):
        nonlocal failures
        try:
            z = inner(np.asarray(xi, dtype=float))
            return sample_cost(inst, z, samples)
        except (FrfcError, np.linalg.LinAlgError):
            failures += 1
            return math.inf

    t0 = time.perf_counter()
    start = samples.mean(axis=0)
    start_cost = outer(start)
    res = nelder_mead(outer, start, cfg)
    z = inner(res.x)
    elapsed = time.perf_counter() - t0
    return ScenarioSearchResult(res.x, inst.scenario(res.x), z, sample_cost(inst, z, samples),
                                res.evaluations, elapsed, start_cost, failures)


@dataclass
class ScalingRow:
    N: int
    t_search_s: float
    t_lp_s: float
    z_search: np.ndarray
    z_lp: np.ndarray
    obj_search: float
    obj_lp: float

    @property
    def rel_obj_gap(self) -> float:
        return (self.obj_search - self.obj_lp) / max(1.0, abs(self.obj_lp))


@dataclass
class ScalingReport:
    rows: List[ScalingRow]

    @property
    def lp_grows_faster(self) -> Optional[bool]:
        """Whether extensive-form time grew faster than search time over the last pair."""
        if len(self.rows) < 2:
            return None
        a, b = self.rows[-2], self.rows[-1]
        lp = b.t_lp_s / max(a.t_lp_s, 1e-9)
        search = b.t_search_s / max(a.t_search_s, 1e-9)
        return lp > search

    def to_csv(self, out=None, header: Sequence[str] = (), timings: bool = True) -> str:
        """CSV text; ``timings=False`` blanks the clock columns (for byte-stable files)."""
        buf = io.StringIO()
        for line in header:
            buf.write(f"# {line}\n")
        n = self.rows[0].z_search.size if self.rows else 0
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "t_search_s", "t_lp_s"] + [f"z_search_{i + 1}" for i in range(n)]
                   + [f"z_lp_{i + 1}" for i in range(n)] + ["rel_obj_gap"])
        for r in self.rows:
            t = [f"{r.t_search_s:.4f}", f"{r.t_lp_s:.4f}"] if timings else ["", ""]
            w.writerow([r.N] + t + [f"{v:.6f}" for v in r.z_search] + [f"{v:.6f}" for v in r.z_lp]
                       + [f"{r.rel_obj_gap:.3e}"])
        if timings and self.lp_grows_faster is not None:
            buf.write(f"# lp_time_grows_faster={self.lp_grows_faster}\n")
        text = buf.getvalue()
        if isinstance(out, str):
            with open(out, "w", newline="") as fh:
                fh.write(text)
        elif out is not None:
            out.write(text)
        return text


def scaling_report(inst, sample_sizes: Sequence[int], rng: RandomSource,
                   sampler: Callable[[RandomSource, int], np.ndarray],
                   cfg: Optional[NelderMeadConfig] = None,
                   max_columns: int = 3_000_000) -> ScalingReport:
    """Scenario search against the extensive-form LP for growing sample sizes."""
    sizes = list(sample_sizes)
    if sizes != sorted(sizes) or not sizes or sizes[0] < 1:
        raise InvalidParameter("sample sizes must be positive and ascending")
    rows = []
    for N in sizes:
        samples = sampler(rng.child(N), N)
        columns = inst.n + N * inst.problem.n_y
        if columns > max_columns:
            raise SizeLimit(f"N={N} needs {columns} extensive-form columns (cap {max_columns})")
        res = find_optimal_scenario(inst, samples, cfg, rng)
        t0 = time.perf_counter()
        lp = saa_solve_full(inst.problem, inst.scenarios(samples), method="extensive",
                            max_columns=max_columns)
        t_lp = time.perf_counter() - t0
        rows.append(ScalingRow(N, res.elapsed, t_lp, res.induced_z, lp.z, res.sample_cost,
                               sample_cost(inst, lp.z, samples)))
    return ScalingReport(rows)
