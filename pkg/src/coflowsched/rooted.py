"""Randomized scheduling of rooted-tree jobs.

A fan-in tree splits into one chain per source, all sharing the root. Each
chain draws its own delay and proposes a start for every coflow on it (its
delay plus the sizes of the chain's earlier coflows). A coflow then starts
at the smallest proposal that respects all of its parents' finish times,
processed level by level so parents are fixed first. The proposal through
the latest-finishing parent always qualifies, so the candidate set is
never empty; chains of proposals let delays propagate down the tree
without ever stretching a chain beyond its own delayed length.

Fan-out trees are handled by mirroring: reverse the edges, plan starts for
the mirrored fan-in, then flip the plan around its horizon so that parent
blocks precede child blocks again in the original orientation.

Multiple tree jobs (the forest case) get a second layer of per-job delays
on top of their individually repaired schedules, then one more merge and
repair, exactly like the DAG pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .bna import bna_decompose, effective_size
from .dagstats import aggregate_size, is_rooted_tree, levels, path_sub_jobs
from .dma import (
    IsolatedSchedule,
    check_beta,
    delay_bound,
    draw_delays,
    feasibilize,
    instance_aggregate,
    merge,
)
from .model import Instance, Job, Schedule, TimedMatching
from .seeding import stream


class NotATreeError(ValueError):
    pass


@dataclass(frozen=True)
class CoflowStartPlan:
    """Planned start slot per coflow, with the per-chain bookkeeping.

    candidate_starts[(coflow, chain index)] is the proposal the chain made;
    starts[coflow] is the chosen minimum among qualifying proposals, and
    chosen_chain records which chain attained it.
    """

    path_delays: tuple[int, ...]
    candidate_starts: Mapping[tuple[int, int], int]
    starts: Mapping[int, int]
    chosen_chain: Mapping[int, int]


def plan_tree_starts(job: Job, beta: object = 2, seed: int = 0) -> CoflowStartPlan:
    """Starts for a fan-in tree job; fan-out callers mirror first."""
    if is_rooted_tree(job) != "fan_in":
        raise NotATreeError(f"job {job.id} is not a fan-in tree")
    beta = check_beta(beta)
    paths = path_sub_jobs(job)
    size = {c.id: effective_size(c.demand) for c in job.coflows}
    delta = aggregate_size(job.coflows)
    hi = delay_bound(delta, beta)
    delays = tuple(
        stream(seed, "path-delay", job.id, p).randint(0, hi) for p in range(len(paths))
    )
    candidates: dict[tuple[int, int], int] = {}
    on_paths: dict[int, list[int]] = {}
    for p, path in enumerate(paths):
        cursor = delays[p]
        for cid in path.coflow_ids:
            candidates[(cid, p)] = cursor
            cursor += size[cid]
            on_paths.setdefault(cid, []).append(p)
    starts: dict[int, int] = {}
    chosen: dict[int, int] = {}
    _, level_sets = levels(job)
    for level in level_sets:
        for cid in sorted(level):
            need = max(
                (starts[p] + size[p] for p in job.parents(cid)),
                default=0,
            )
            viable = [
                (candidates[(cid, p)], p) for p in on_paths[cid] if candidates[(cid, p)] >= need
            ]
            if not viable:
                raise RuntimeError(
                    f"no chain proposal for coflow {cid} clears its parents; "
                    "the latest parent's own chain should always qualify"
                )
            t, p = min(viable)
            starts[cid] = t
            chosen[cid] = p
    return CoflowStartPlan(delays, candidates, starts, chosen)


def _mirror(job: Job) -> Job:
    return Job(job.id, job.weight, job.release, job.coflows, [(b, a) for a, b in job.edges])


def tree_starts(job: Job, beta: object = 2, seed: int = 0) -> dict[int, int]:
    """Start slot per coflow for either tree orientation.

    Fan-out jobs are planned on the mirrored fan-in and flipped: with S the
    mirrored horizon, a block at [t, t + D) maps to [S - t - D, S - t), so
    mirrored child-before-parent becomes parent-before-child.
    """
    shape = is_rooted_tree(job)
    if shape is None:
        raise NotATreeError(f"job {job.id} is not a rooted tree")
    if shape == "fan_in":
        return dict(plan_tree_starts(job, beta, seed).starts)
    plan = plan_tree_starts(_mirror(job), beta, seed)
    size = {c.id: effective_size(c.demand) for c in job.coflows}
    horizon = max(plan.starts[cid] + size[cid] for cid in plan.starts)
    return {cid: horizon - plan.starts[cid] - size[cid] for cid in plan.starts}


def _tree_isolated(job: Job, starts: Mapping[int, int]) -> IsolatedSchedule:
    items: list[TimedMatching] = []
    for c in job.coflows:
        result = bna_decompose(c.demand)
        for seg_start, seg_dur, matching in result.segments():
            items.append(
                TimedMatching(
                    starts[c.id] + seg_start,
                    seg_dur,
                    [(s, r, job.id, c.id) for s, r in matching],
                )
            )
    return IsolatedSchedule(job.id, tuple(items), dict(starts))


def dma_srt(job: Job, beta: object = 2, seed: int = 0, m: int | None = None) -> Schedule:
    """Schedule one rooted-tree job: plan starts, overlay, repair."""
    if m is None:
        if not job.coflows:
            raise ValueError("cannot infer m from a job with no coflows")
        m = job.coflows[0].demand.m
    starts = tree_starts(job, beta, seed)
    return feasibilize(merge(m, [_tree_isolated(job, starts)]))


def dma_rt(inst: Instance, beta: object = 2, seed: int = 0, gate_releases: bool = False) -> Schedule:
    """Forest of rooted trees: per-job tree schedules, delayed and merged."""
    beta = check_beta(beta)
    for job in inst.jobs:
        if job.coflows and is_rooted_tree(job) is None:
            raise NotATreeError(f"job {job.id} is not a rooted tree")
    per_job = []
    for job in inst.jobs:
        if not job.coflows:
            continue
        sched = dma_srt(job, beta, seed, m=inst.m)
        per_job.append(IsolatedSchedule(job.id, sched.items, {}))
    delta = instance_aggregate(inst)
    delays = draw_delays(inst.jobs, delta, beta, seed)
    placed = [
        IsolatedSchedule(s.job_id, s.items, s.coflow_starts, delays[s.job_id]) for s in per_job
    ]
    sched = feasibilize(merge(inst.m, placed))
    if gate_releases and inst.jobs:
        max_rho = max(job.release for job in inst.jobs)
        first = min((it.start for it in sched.items), default=max_rho)
        if first < max_rho:
            sched = sched.shifted(max_rho - first)
    return sched
