"""Seed sensitivity: relative standard deviation of the grouped scheduler."""
from __future__ import annotations

import argparse
import statistics

from coflowsched import g_dm, g_dm_rt
from coflowsched.workload import gen_instance


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=20)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--mean-mu", type=float, default=5.0)
    ap.add_argument("--shape", choices=("dag", "tree"), default="dag")
    ap.add_argument("--beta", type=int, default=2)
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--instances", type=int, default=5)
    args = ap.parse_args()

    algo = g_dm_rt if args.shape == "tree" else g_dm
    print("instance_seed,mean_twc,rsd_twc,mean_makespan")
    for iseed in range(args.instances):
        inst = gen_instance(m=args.m, n=args.n, mean_mu=args.mean_mu,
                            seed=iseed, shape=args.shape)
        twcs, spans = [], []
        for s in range(args.runs):
            _, met = algo(inst, args.beta, s)
            twcs.append(float(met.total_weighted_completion))
            spans.append(met.makespan)
        rsd = statistics.pstdev(twcs) / statistics.mean(twcs)
        print(f"{iseed},{statistics.mean(twcs):.1f},{rsd:.4f},{statistics.mean(spans):.1f}")


if __name__ == "__main__":
    main()
