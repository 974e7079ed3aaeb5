"""Geometric grouping of ordered jobs.

After ordering, each job gets the key T_j + rho_j + D_j where D_j is the
effective size of the aggregate demand of the first j jobs in the order
(a nondecreasing proxy for when the prefix can finish). Keys are binned
into geometrically growing intervals (gamma * 2^(b-1), gamma * 2^b], with
gamma the smallest positive flow size: jobs in the same bin have keys
within a factor two of each other, so scheduling bins in order costs only
a constant factor against each job's own lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .bna import effective_size
from .dagstats import critical_path_size
from .model import Instance, sum_demands


@dataclass(frozen=True)
class Grouping:
    gamma: int
    horizon: int  # max release plus total packets; keys were expected under this
    levels: int  # highest bin index B; bins are 0..B
    groups: tuple[frozenset[int], ...]
    keys: Mapping[int, int]
    skipped: frozenset[int]  # zero-key jobs; they complete at release with no packets


def prefix_effective_sizes(inst: Instance, sigma: Sequence[int]) -> dict[int, int]:
    """D_j per job: effective size of the aggregate of sigma's prefix through j."""
    from .model import DemandMatrix

    out: dict[int, int] = {}
    acc: dict = {}
    for j in sigma:
        job = inst.job(j)
        agg = sum_demands((c.demand for c in job.coflows), inst.m)
        for pair, v in agg.entries.items():
            acc[pair] = acc.get(pair, 0) + v
        out[j] = effective_size(DemandMatrix(inst.m, dict(acc)))
    return out


def grouping_keys(inst: Instance, sigma: Sequence[int]) -> dict[int, int]:
    prefix = prefix_effective_sizes(inst, sigma)
    keys: dict[int, int] = {}
    for j in sigma:
        job = inst.job(j)
        keys[j] = critical_path_size(job) + job.release + prefix[j]
    return keys


def partition(inst: Instance, keys: Mapping[int, int]) -> Grouping:
    sizes = [v for job in inst.jobs for c in job.coflows for v in c.demand.entries.values()]
    gamma = min(sizes) if sizes else 1
    grand = sum(sizes)
    max_rho = max((job.release for job in inst.jobs), default=0)
    horizon = max_rho + grand
    levels = 0
    while gamma << levels < horizon:
        levels += 1
    top = max((k for k in keys.values()), default=0)
    while gamma << levels < top:
        levels += 1  # keys can exceed the horizon; cover them anyway
    buckets: list[set[int]] = [set() for _ in range(levels + 1)]
    skipped = set()
    for j, k in keys.items():
        if k == 0:
            skipped.add(j)
            continue
        b = 0
        while gamma << b < k:
            b += 1
        buckets[b].add(j)
    return Grouping(
        gamma=gamma,
        horizon=horizon,
        levels=levels,
        groups=tuple(frozenset(b) for b in buckets),
        keys=dict(keys),
        skipped=frozenset(skipped),
    )
