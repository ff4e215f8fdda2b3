"""Command-line experiment driver.

Subcommands write CSV files that start with ``#`` provenance lines (package
version, resolved configuration, seed).  Exit codes: 0 success, 1 runtime or
solve failure, 2 usage error, 3 selftest failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Dict, List, Optional


from . import __version__
from .errors import FrfcError
from .evaluation import ORACLE, ConditionalSamplePolicy, GapConfig, estimate_gaps
from .forecasters import TreeHyper
from .optim import NelderMeadConfig, RandomSource
from .policies import KINDS, PolicyHyper, fit_policy
from .problems import (
    TWO_PRODUCT,
    NewsvendorParams,
    ResourceAllocationParams,
    ShipmentParams,
    SyntheticGenerator,
    analytical_unreliable_optimum,
    build_multi_product,
    build_newsvendor,
    build_resource_allocation,
    build_shipment,
    gen_dataset,
    sample_multi_product,
    sample_newsvendor,
)
from .scenario_search import find_optimal_scenario, sample_cost, scaling_report

COND = "COND"
DEFAULT_SEEDS = {"newsvendor-scenario": 7, "two-product": 3, "synthetic": 11, "selftest": 5}


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _int_list(text: str) -> List[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return vals


def _policy_list(text: str) -> List[str]:
    vals = [v.strip() for v in text.split(",") if v.strip()]
    extra = (ORACLE, COND)
    bad = [v for v in vals if v not in KINDS and v not in extra]
    if bad or not vals:
        raise argparse.ArgumentTypeError(
            f"unknown policies {bad}; choose from {', '.join(KINDS + extra)}")
    return vals


def read_config(path: str) -> Dict[str, str]:
    """``key = value`` lines; ``#`` comments and blank lines ignored."""
    out = {}
    with open(path) as fh:
        for ln in fh:
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            if "=" not in ln:
                raise UsageError(f"bad config line: {ln!r}")
            key, value = ln.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _header(args: argparse.Namespace) -> List[str]:
    items = {k: v for k, v in vars(args).items() if k not in ("func", "config", "out")}
    cfg = " ".join(f"{k}={_show(v)}" for k, v in sorted(items.items()))
    return [f"frfc {__version__}", f"command: {args.command}", f"config: {cfg}", f"seed: {args.seed}"]


def _show(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return str(v)


def _write(path: str, lines: List[str], body: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        for ln in lines:
            fh.write(f"# {ln}\n")
        fh.write(body)


# --------------------------------------------------------------------------
# subcommands


def cmd_newsvendor_scenario(args) -> int:
    prm = NewsvendorParams(args.c, args.p, args.eta, args.pi, args.b, unreliable=True)
    inst = build_newsvendor(prm)
    phi = args.phi_override if args.phi_override is not None else prm.critical_ratio
    analytical = analytical_unreliable_optimum(phi, args.b)
    rows = ["rep,D_star,U_star,ratio,saa_z,analytical,obj_search,obj_saa,agree,in_range"]
    all_ok = True
    for r in range(args.reps):
        samples = sample_newsvendor(prm, RandomSource(args.seed, r), args.n)
        res = find_optimal_scenario(inst, samples, NelderMeadConfig(epsilon=args.epsilon))
        z_saa, _ = inst.saa(samples)
        obj_s = res.sample_cost
        obj_l = sample_cost(inst, z_saa, samples)
        ratio = float(res.induced_z[0])
        agree = abs(obj_s - obj_l) <= max(0.5, 1e-3 * abs(obj_l))
        in_range = args.lo <= ratio <= args.hi
        all_ok &= agree and in_range
        rows.append(f"{r},{res.xi[0]:.4f},{res.xi[1]:.6f},{ratio:.4f},{z_saa[0]:.4f},"
                    f"{analytical:.4f},{obj_s:.6f},{obj_l:.6f},{int(agree)},{int(in_range)}")
    path = os.path.join(args.out, "newsvendor_scenario.csv")
    _write(path, _header(args), "\n".join(rows) + "\n")
    print(f"wrote {path}")
    print(f"analytical optimum {analytical:.4f} (phi={phi:.6f})")
    print(("PASS" if all_ok else "FAIL") + f": search agrees with SAA and ratio in [{args.lo}, {args.hi}]"
          f" for all {args.reps} replications")
    return 0


def cmd_two_product(args) -> int:
    inst = build_multi_product(TWO_PRODUCT)
    rep = scaling_report(inst, args.sizes, RandomSource(args.seed),
                         lambda rng, N: sample_multi_product(TWO_PRODUCT, rng, N))
    path = os.path.join(args.out, "two_product.csv")
    _write(path, _header(args), rep.to_csv(timings=args.timings))
    print(f"wrote {path}")
    for row in rep.rows:
        print(f"N={row.N}: search {row.t_search_s:.3f}s lp {row.t_lp_s:.3f}s "
              f"z_search=({row.z_search[0]:.2f}, {row.z_search[1]:.2f}) "
              f"z_lp=({row.z_lp[0]:.2f}, {row.z_lp[1]:.2f}) rel_gap={row.rel_obj_gap:.2e} "
              f"budget_used={row.z_search.sum():.4f}")
    print(f"lp time grows faster than search time: {rep.lp_grows_faster}")
    return 0


def build_synthetic(problem: str, degree: float, seed: int):
    """Default instance and generator for the contextual experiments."""
    if problem == "resource":
        inst = build_resource_allocation(ResourceAllocationParams.random(RandomSource(seed, 101)))
        J = 30
    else:
        inst = build_shipment(ShipmentParams.random(RandomSource(seed, 102)))
        J = 12
    gen = SyntheticGenerator.random(RandomSource(seed, 103), J, 3, degree)
    return inst, gen


def cmd_synthetic(args) -> int:
    inst, gen = build_synthetic(args.problem, args.p, args.seed)
    X, Xi = gen_dataset(gen, RandomSource(args.seed, 104), args.n)
    hyper = PolicyHyper(k=args.k, tree=TreeHyper(args.min_leaf), param_cap=args.param_cap,
                        seed=args.seed)
    policies = {}
    for kind in args.policies:
        if kind == ORACLE:
            policies[kind] = None
        elif kind == COND:
            # knows the true conditional law; decides on an independent draw
            policies[kind] = ConditionalSamplePolicy(inst, gen, RandomSource(args.seed, 106), args.samples)
        else:
            policies[kind] = fit_policy(kind, inst, X, Xi, hyper)
        print(f"fitted {kind}", flush=True)
    cfg = GapConfig(args.samples, args.reps, args.covariates, seed=args.seed)
    report = estimate_gaps(policies, inst, gen, RandomSource(args.seed, 105), cfg)
    path = os.path.join(args.out, f"synthetic_{args.problem}_p{_show(args.p)}_n{args.n}.csv")
    _write(path, _header(args), report.to_csv())
    print(f"wrote {path}")
    for kind in policies:
        if report.bounds[kind]:
            print(f"{kind}: median B99 = {report.median(kind):.3f}%")
    if report.partial:
        print(f"error: {report.error}", file=sys.stderr)
        return 1
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    results = run_selftest(args.seed)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return 0 if all(ok for _, ok, _ in results) else 3


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frfc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"frfc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, name):
        p.add_argument("--seed", type=int, default=DEFAULT_SEEDS[name])
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--config", help="key = value file; flags override it")

    p = sub.add_parser("newsvendor-scenario", help="unreliable-supplier scenario search")
    common(p, "newsvendor-scenario")
    p.add_argument("--n", type=_positive_int, default=1000, help="samples per replication")
    p.add_argument("--reps", type=_positive_int, default=5)
    p.add_argument("--b", type=float, default=100.0)
    p.add_argument("--c", type=float, default=300.0)
    p.add_argument("--p", type=float, default=4000.0)
    p.add_argument("--eta", type=float, default=300.0)
    p.add_argument("--pi", type=float, default=4000.0)
    p.add_argument("--phi-override", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=1e-7)
    p.add_argument("--lo", type=float, default=205.0)
    p.add_argument("--hi", type=float, default=225.0)
    p.set_defaults(func=cmd_newsvendor_scenario)

    p = sub.add_parser("two-product", help="scenario search vs extensive form, growing N")
    common(p, "two-product")
    p.add_argument("--sizes", type=_int_list, default=[100, 1000, 5000])
    p.add_argument("--timings", action="store_true",
                   help="include clock columns in the CSV (not byte-reproducible)")
    p.set_defaults(func=cmd_two_product)

    p = sub.add_parser("synthetic", help="policy optimality gaps on synthetic data")
    common(p, "synthetic")
    p.add_argument("--problem", choices=("resource", "shipment"), default="shipment")
    p.add_argument("--p", type=float, choices=(0.5, 1.0, 2.0), default=1.0)
    p.add_argument("--n", type=_positive_int, default=1000)
    p.add_argument("--policies", type=_policy_list, default=list(KINDS))
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--reps", type=_positive_int, default=30)
    p.add_argument("--covariates", type=_positive_int, default=30)
    p.add_argument("--k", type=_positive_int, default=None)
    p.add_argument("--min-leaf", type=_positive_int, default=25)
    p.add_argument("--param-cap", type=_positive_int, default=200)
    p.set_defaults(func=cmd_synthetic)

    p = sub.add_parser("selftest", help="fast acceptance subset")
    common(p, "selftest")
    p.set_defaults(func=cmd_selftest)
    return parser


def parse(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            values = read_config(args.config)
        except (OSError, UsageError) as exc:
            parser.error(str(exc))
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        for key in values:
            if key not in known or key in ("config", "help"):
                parser.error(f"unknown config key {key!r}")
        typed = {}
        for k, v in values.items():
            action = known[k]
            if isinstance(action, argparse._StoreTrueAction):
                typed[k] = v.lower() in ("1", "true", "yes", "on")
            else:
                try:
                    typed[k] = action.type(v) if action.type else v
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    parser.error(f"bad value for {k}: {exc}")
        sub.set_defaults(**typed)
        args = parser.parse_args(argv)
    return args


def main(argv: Optional[List[str]] = None) -> int:
    args = parse(argv)
    if getattr(args, "reps", 2) < 2 and args.command == "synthetic":
        build_parser().error("--reps must be >= 2 for a confidence bound")
    try:
        return args.func(args)
    except FrfcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
