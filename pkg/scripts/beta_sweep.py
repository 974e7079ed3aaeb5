"""Sweep the delay parameter beta and report makespan / weighted completion.

Larger beta shrinks the random delay window, so schedules start denser but
collide more; the sweep makes the tradeoff visible per algorithm. Output is
CSV on stdout, one row per (beta, seed, algo).
"""
from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction

from coflowsched import dma, dma_rt, g_dm, g_dm_rt, metrics
from coflowsched.workload import gen_instance


def parse_beta(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(text)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=10)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--mean-mu", type=float, default=3.0)
    ap.add_argument("--shape", choices=("dag", "tree"), default="dag")
    ap.add_argument("--betas", default="0.5,1,2,4,16,256")
    ap.add_argument("--seeds", type=int, default=5, help="algorithm seeds per beta")
    ap.add_argument("--instance-seed", type=int, default=0)
    args = ap.parse_args()

    inst = gen_instance(m=args.m, n=args.n, mean_mu=args.mean_mu,
                        seed=args.instance_seed, shape=args.shape)
    if args.shape == "tree":
        algos = {"dma_rt": lambda b, s: metrics(inst, dma_rt(inst, b, s)),
                 "g_dm_rt": lambda b, s: g_dm_rt(inst, b, s)[1]}
    else:
        algos = {"dma": lambda b, s: metrics(inst, dma(inst, b, s)),
                 "g_dm": lambda b, s: g_dm(inst, b, s)[1]}

    w = csv.writer(sys.stdout)
    w.writerow(["beta", "seed", "algo", "makespan", "total_weighted_ct"])
    for raw in args.betas.split(","):
        beta = parse_beta(raw.strip())
        for seed in range(args.seeds):
            for name, run in algos.items():
                met = run(beta, seed)
                w.writerow([raw.strip(), seed, name, met.makespan,
                            float(met.total_weighted_completion)])


if __name__ == "__main__":
    main()
