"""Command line front end.

Subcommands:
  schedule   run one algorithm on an instance file, write schedule + metrics
  verify     check a schedule file against an instance file
  bench      run a grid of (algo, beta, seed) and emit CSV with an RSD summary
  gen        generate a synthetic instance (or build one from a flow trace)
  tightness  emit the worst-case fan-in family instance and its witness

Exit codes: 0 success, 1 bad usage or bad input, 2 infeasible schedule
(from verify, or an internal scheduling bug caught on output).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from statistics import mean, pstdev

from . import workload
from .baseline import sequential_baseline
from .dma import BetaError, check_beta, dma
from .gdm import backfill, g_dm, g_dm_rt, simulate_online
from .model import (
    Instance,
    load_instance,
    load_schedule,
    metrics_to_json,
    save_instance,
    save_schedule,
    schedule_to_json,
    validate_instance,
)
from .oracle import tightness_instance, tightness_witness
from .rooted import NotATreeError, dma_rt
from .verify import lower_bounds, metrics, verify_schedule

ALGOS = ("dma", "dma-rt", "gdm", "gdm-rt", "baseline")


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 1


def _default_seed() -> int:
    raw = os.environ.get("SCHED_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _load_instance_checked(path: str) -> Instance | None:
    if not os.path.exists(path):
        print(f"error: no such file: {path}", file=sys.stderr)
        return None
    try:
        inst = load_instance(path)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: cannot parse {path}: {exc}", file=sys.stderr)
        return None
    problems = validate_instance(inst)
    if problems:
        for p in problems:
            print(f"error: {path}: {p}", file=sys.stderr)
        return None
    return inst


def _run_algo(inst: Instance, algo: str, beta, seed: int, use_backfill: bool):
    gate = any(j.release > 0 for j in inst.jobs)
    if algo == "dma":
        sched = dma(inst, beta, seed, gate_releases=gate)
    elif algo == "dma-rt":
        sched = dma_rt(inst, beta, seed, gate_releases=gate)
    elif algo == "gdm":
        sched, _ = g_dm(inst, beta, seed)
    elif algo == "gdm-rt":
        sched, _ = g_dm_rt(inst, beta, seed)
    elif algo == "baseline":
        sched = sequential_baseline(inst)
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    if use_backfill:
        sched = backfill(inst, sched)
    return sched


def cmd_schedule(args) -> int:
    inst = _load_instance_checked(args.instance)
    if inst is None:
        return 1
    if args.algo not in ALGOS:
        return _fail(f"unknown algo {args.algo!r}; choose from {', '.join(ALGOS)}")
    try:
        beta = check_beta(args.beta)
    except (BetaError, ValueError) as exc:
        return _fail(str(exc))
    try:
        if args.online:
            if args.a is not None:
                inst = workload.gen_arrivals(inst, args.a, args.seed)
            met, sched = simulate_online(
                inst, args.algo, beta, args.seed, use_backfill=args.backfill, return_schedule=True
            )
        else:
            sched = _run_algo(inst, args.algo, beta, args.seed, args.backfill)
            met = None
    except NotATreeError as exc:
        return _fail(str(exc))
    problems = verify_schedule(inst, sched)
    if problems:
        print("error: produced schedule failed verification:", file=sys.stderr)
        for p in problems:
            print(f"  {p}", file=sys.stderr)
        return 2
    if met is None:
        met = metrics(inst, sched, check=False)
    save_schedule(sched, args.out + ".schedule.json")
    with open(args.out + ".metrics.json", "w") as fh:
        json.dump(metrics_to_json(met), fh, indent=2)
        fh.write("\n")
    print(
        f"{args.algo} beta={beta} seed={args.seed}: makespan={met.makespan} "
        f"total_weighted_ct={float(met.total_weighted_completion):.6g}"
    )
    return 0


def cmd_verify(args) -> int:
    inst = _load_instance_checked(args.instance)
    if inst is None:
        return 1
    if not os.path.exists(args.schedule):
        return _fail(f"no such file: {args.schedule}")
    try:
        sched = load_schedule(args.schedule)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        return _fail(f"cannot parse {args.schedule}: {exc}")
    problems = verify_schedule(inst, sched)
    if problems:
        print("infeasible:")
        for p in problems:
            print(f"  {p}")
        return 2
    met = metrics(inst, sched, check=False)
    delta, path = lower_bounds(inst)
    print(
        f"feasible: makespan={met.makespan} total_weighted_ct={float(met.total_weighted_completion):.6g} "
        f"lower_bound={max(delta, path)}"
    )
    return 0


def _parse_gen_spec(spec: str) -> dict:
    out: dict = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad gen spec item {part!r}; expected key=value")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _instance_from_gen_spec(spec: dict, seed: int) -> Instance:
    m = int(spec.get("m", 10))
    n = int(spec.get("n", 10))
    mean_mu = float(spec.get("mean_mu", 3))
    shape = spec.get("shape", "dag")
    return workload.gen_instance(
        m=m,
        n=n,
        mean_mu=mean_mu,
        seed=int(spec.get("seed", seed)),
        shape=shape,
        max_flows=int(spec.get("max_flows", 6)),
        max_size=int(spec.get("max_size", 10)),
        weights=spec.get("weights", "equal"),
        a=float(spec["a"]) if "a" in spec else None,
    )


def cmd_bench(args) -> int:
    if args.instance:
        inst = _load_instance_checked(args.instance)
        if inst is None:
            return 1
        mean_mu_str = ""
    elif args.gen:
        try:
            spec = _parse_gen_spec(args.gen)
            inst = _instance_from_gen_spec(spec, args.seeds[0] if args.seeds else 0)
        except ValueError as exc:
            return _fail(str(exc))
        mean_mu_str = spec.get("mean_mu", "3")
    else:
        return _fail("bench needs --instance or --gen")
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    if not algos:
        return _fail("empty algo list")
    for a in algos:
        if a not in ALGOS:
            return _fail(f"unknown algo {a!r}; choose from {', '.join(ALGOS)}")
    try:
        betas = [check_beta(b.strip()) for b in args.betas.split(",") if b.strip()]
    except (BetaError, ValueError) as exc:
        return _fail(str(exc))
    if not betas:
        return _fail("empty beta list")
    seeds = args.seeds or [0]

    rows = []
    for algo in algos:
        for beta in betas:
            for seed in seeds:
                for rep in range(args.repeats):
                    eff_seed = seed + rep
                    t0 = time.perf_counter()
                    try:
                        if args.online:
                            met = simulate_online(inst, algo, beta, eff_seed, use_backfill=args.backfill)
                        else:
                            sched = _run_algo(inst, algo, beta, eff_seed, args.backfill)
                            met = metrics(inst, sched, check=False)
                    except NotATreeError as exc:
                        return _fail(str(exc))
                    ms = (time.perf_counter() - t0) * 1000
                    rows.append((algo, beta, eff_seed, met.makespan, met.total_weighted_completion, ms))

    lines = ["algo,beta,seed,m,mean_mu,makespan,total_weighted_ct,runtime_ms"]
    for algo, beta, seed, mk, twc, ms in rows:
        lines.append(
            f"{algo},{beta},{seed},{inst.m},{mean_mu_str},{mk},{float(twc):.6f},{ms:.3f}"
        )
    for algo in algos:
        for beta in betas:
            vals = [float(twc) for a, b, _, _, twc, _ in rows if a == algo and b == beta]
            if len(vals) > 1 and mean(vals) > 0:
                rsd = pstdev(vals) / mean(vals)
                lines.append(
                    f"# rsd algo={algo} beta={beta} runs={len(vals)} "
                    f"mean_twc={mean(vals):.6f} rsd_twc={rsd:.6f}"
                )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen(args) -> int:
    if args.trace:
        if not os.path.exists(args.trace):
            return _fail(f"no such file: {args.trace}")
        try:
            coflows = workload.load_flow_trace(args.trace, args.m)
        except workload.TraceFormatError as exc:
            return _fail(str(exc))
        inst = workload.partition_into_jobs(coflows, args.mean_mu, args.seed, args.shape)
        inst = workload.gen_weights(inst, args.weights, args.seed)
        if args.a is not None:
            inst = workload.gen_arrivals(inst, args.a, args.seed)
    else:
        try:
            inst = workload.gen_instance(
                m=args.m,
                n=args.n,
                mean_mu=args.mean_mu,
                seed=args.seed,
                shape=args.shape,
                max_flows=args.max_flows,
                max_size=args.max_size,
                weights=args.weights,
                a=args.a,
            )
        except ValueError as exc:
            return _fail(str(exc))
    problems = validate_instance(inst)
    if problems:
        for p in problems:
            print(f"error: generated instance invalid: {p}", file=sys.stderr)
        return 2
    save_instance(inst, args.out)
    njobs = len(inst.jobs)
    ncof = sum(len(j.coflows) for j in inst.jobs)
    print(f"wrote {args.out}: m={inst.m} jobs={njobs} coflows={ncof}")
    return 0


def cmd_tightness(args) -> int:
    if args.K < 1:
        return _fail("K must be >= 1")
    if args.d < 1:
        return _fail("d must be >= 1")
    job = tightness_instance(args.K, args.d)
    m = 2 * args.K + 1
    inst = Instance(m, [job])
    witness = tightness_witness(args.K, args.d)
    problems = verify_schedule(inst, witness)
    if problems:
        for p in problems:
            print(f"error: witness failed verification: {p}", file=sys.stderr)
        return 2
    if args.out:
        save_instance(inst, args.out + ".instance.json")
        save_schedule(witness, args.out + ".witness.json")
    delta, path = lower_bounds(inst)
    span = witness.span
    bound = max(delta, path)
    print(
        f"K={args.K} d={args.d}: witness_makespan={span} max(aggregate,critical_path)={bound} "
        f"ratio={span / bound:.6g}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coflowsched", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("schedule", help="run one algorithm on an instance")
    ps.add_argument("--instance", required=True)
    ps.add_argument("--algo", required=True, help=f"one of {', '.join(ALGOS)}")
    ps.add_argument("--beta", default="2", help="rational > 1/e, e.g. 2 or 1/2")
    ps.add_argument("--seed", type=int, default=_default_seed())
    ps.add_argument("--backfill", action="store_true")
    ps.add_argument("--online", action="store_true", help="replay releases as arrivals")
    ps.add_argument(
        "--a", type=float, default=None,
        help="with --online: overwrite releases with Poisson arrivals at a * theta_0",
    )
    ps.add_argument("--out", required=True, help="prefix for .schedule.json and .metrics.json")
    ps.set_defaults(func=cmd_schedule)

    pv = sub.add_parser("verify", help="verify a schedule against an instance")
    pv.add_argument("--instance", required=True)
    pv.add_argument("--schedule", required=True)
    pv.set_defaults(func=cmd_verify)

    pb = sub.add_parser("bench", help="grid of runs, CSV out")
    pb.add_argument("--instance", default=None)
    pb.add_argument("--gen", default=None, help="spec like m=10,n=8,mean_mu=3,shape=dag")
    pb.add_argument("--algos", default="gdm", help="comma separated")
    pb.add_argument("--betas", default="2", help="comma separated rationals")
    pb.add_argument("--seeds", type=int, nargs="*", default=None)
    pb.add_argument("--repeats", type=int, default=1)
    pb.add_argument("--backfill", action="store_true")
    pb.add_argument("--online", action="store_true")
    pb.add_argument("--out", default=None)
    pb.set_defaults(func=cmd_bench)

    pg = sub.add_parser("gen", help="generate an instance JSON")
    pg.add_argument("--m", type=int, default=10)
    pg.add_argument("--n", type=int, default=10)
    pg.add_argument("--mean-mu", dest="mean_mu", type=float, default=3.0)
    pg.add_argument("--shape", choices=("dag", "tree"), default="dag")
    pg.add_argument("--max-flows", dest="max_flows", type=int, default=6)
    pg.add_argument("--max-size", dest="max_size", type=int, default=10)
    pg.add_argument("--weights", choices=("equal", "uniform01"), default="equal")
    pg.add_argument("--a", type=float, default=None, help="Poisson arrival intensity multiplier")
    pg.add_argument("--trace", default=None, help="flow trace file: coflow_id src dst size")
    pg.add_argument("--seed", type=int, default=_default_seed())
    pg.add_argument("--out", required=True)
    pg.set_defaults(func=cmd_gen)

    pt = sub.add_parser("tightness", help="worst-case fan-in family and witness")
    pt.add_argument("--K", type=int, required=True)
    pt.add_argument("--d", type=int, default=1)
    pt.add_argument("--out", default=None, help="prefix for .instance.json and .witness.json")
    pt.set_defaults(func=cmd_tightness)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold into the validation code
        return 1 if exc.code else 0
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
