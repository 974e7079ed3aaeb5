"""Serial reference scheduler: one job at a time, no overlap.

Each job runs in isolation (coflows back-to-back in topological order,
each optimally decomposed) starting at the later of the previous job's
finish and its own release. Deterministic, trivially feasible, and the
natural yardstick for how much the merging pipeline buys.
"""

from __future__ import annotations

from .dma import isolated_schedule
from .model import Instance, Schedule, TimedMatching
from .ordering import order_jobs


def sequential_baseline(inst: Instance, use_ordering: bool = True) -> Schedule:
    """use_ordering runs jobs in the weighted-completion order; otherwise
    input order. Releases are always respected."""
    if use_ordering:
        sigma = order_jobs(inst).sigma
        jobs = [inst.job(j) for j in sigma]
    else:
        jobs = list(inst.jobs)
    items: list[TimedMatching] = []
    clock = 0
    for job in jobs:
        iso = isolated_schedule(job)
        start = max(clock, job.release)
        for it in iso.items:
            items.append(TimedMatching(it.start + start, it.duration, it.assignments))
        clock = start + iso.span
    return Schedule(inst.m, items)
