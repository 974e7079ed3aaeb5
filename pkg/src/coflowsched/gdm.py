"""Grouped delay-and-merge scheduling, backfilling, and online replay.

G-DM targets total weighted completion: order the jobs with the
primal-dual rule, bin them into geometric groups by key, then run the
delay-and-merge pipeline group by group. A group is gated at the later of
the previous group's finish and the largest release inside the group, so
smaller-key jobs finish early instead of being steamrolled by heavy ones.
G-DM-RT is the same loop with the rooted-tree pipeline per group.

Backfilling is a feasibility-preserving post-pass: scanning slots in
order, any sender/receiver pair left idle is given to the highest
priority released, precedence-ready, unfinished flow. Base packets only
ever move earlier, so every job's completion is at most what it was.

The online simulator replays releases: at every arrival it freezes what
has been transmitted, rebuilds the residual instance of arrived-but-
unfinished work, and reschedules it from the current clock with the
chosen algorithm. Completions are then measured from each job's arrival.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .dagstats import topological_order
from .dma import dma
from .grouping import Grouping, grouping_keys, partition
from .model import (
    Coflow,
    DemandMatrix,
    Instance,
    Job,
    Metrics,
    Schedule,
    TimedMatching,
)
from .ordering import OrderingResult, order_jobs
from .rooted import dma_rt
from .seeding import derive_seed
from .verify import metrics as compute_metrics

GroupScheduler = Callable[[Instance, object, int], Schedule]


@dataclass(frozen=True)
class GroupedRun:
    schedule: Schedule
    metrics: Metrics
    ordering: OrderingResult
    grouping: Grouping
    gates: tuple[tuple[int, int], ...]  # (group index, gate slot) for nonempty groups


def _grouped_pipeline(
    inst: Instance, beta: object, seed: int, scheduler: GroupScheduler
) -> GroupedRun:
    ordering = order_jobs(inst)
    keys = grouping_keys(inst, ordering.sigma)
    grouping = partition(inst, keys)
    items: list[TimedMatching] = []
    gates: list[tuple[int, int]] = []
    clock = 0
    for b, group in enumerate(grouping.groups):
        ids = [j for j in ordering.sigma if j in group]
        if not ids:
            continue
        jobs = [inst.job(j) for j in ids]
        gate = max([clock] + [j.release for j in jobs])
        sub = Instance(inst.m, jobs)
        sched_b = scheduler(sub, beta, derive_seed(seed, "group", b))
        for it in sched_b.items:
            items.append(TimedMatching(it.start + gate, it.duration, it.assignments))
        gates.append((b, gate))
        clock = gate + sched_b.span
    schedule = Schedule(inst.m, items)
    met = compute_metrics(inst, schedule, check=False)
    return GroupedRun(schedule, met, ordering, grouping, tuple(gates))


def g_dm(
    inst: Instance,
    beta: object = 2,
    seed: int = 0,
    use_backfill: bool = False,
) -> tuple[Schedule, Metrics]:
    run = _grouped_pipeline(inst, beta, seed, lambda sub, b, s: dma(sub, b, s))
    sched = run.schedule
    if use_backfill:
        sched = backfill(inst, sched, priority=run.ordering.sigma)
        return sched, compute_metrics(inst, sched, check=False)
    return sched, run.metrics


def g_dm_rt(
    inst: Instance,
    beta: object = 2,
    seed: int = 0,
    use_backfill: bool = False,
) -> tuple[Schedule, Metrics]:
    run = _grouped_pipeline(inst, beta, seed, lambda sub, b, s: dma_rt(sub, b, s))
    sched = run.schedule
    if use_backfill:
        sched = backfill(inst, sched, priority=run.ordering.sigma)
        return sched, compute_metrics(inst, sched, check=False)
    return sched, run.metrics


def grouped_run(inst: Instance, beta: object = 2, seed: int = 0, rooted: bool = False) -> GroupedRun:
    """Full bookkeeping variant of g_dm / g_dm_rt, for tests and reports."""
    scheduler: GroupScheduler = (lambda sub, b, s: dma_rt(sub, b, s)) if rooted else (
        lambda sub, b, s: dma(sub, b, s)
    )
    return _grouped_pipeline(inst, beta, seed, scheduler)


# ---------------------------------------------------------------------------
# Backfilling.


def backfill(inst: Instance, base: Schedule, priority: Sequence[int] | None = None) -> Schedule:
    """Greedy slot-by-slot fill of idle port pairs.

    Priority: jobs in the given order (instance order by default), coflows
    in topological order within a job, flows by (src, dst) within a
    coflow. A flow is eligible once its job is released, all parent
    coflows have completed, and it still owes packets. Base assignments
    are replayed first each slot and only skipped once their flow owes
    nothing, so the result never falls behind the base schedule.
    """
    if priority is None:
        priority = [j.id for j in inst.jobs]
    jobs = {j.id: j for j in inst.jobs}
    order = [jobs[j] for j in priority]

    remaining: dict[tuple[int, int, int, int], int] = {}
    for job in inst.jobs:
        for c in job.coflows:
            for (s, r), v in c.demand.entries.items():
                remaining[(s, r, job.id, c.id)] = v
    flows_of: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for (s, r, j, c) in remaining:
        flows_of.setdefault((j, c), []).append((s, r))
    for key in flows_of:
        flows_of[key].sort()
    topo = {j.id: topological_order(j) for j in inst.jobs}

    completion: dict[tuple[int, int], int] = {}

    def propagate(now: int) -> None:
        # empty coflows finish with their parents; chains settle in topo order
        for job in inst.jobs:
            for cid in topo[job.id]:
                key = (job.id, cid)
                if key in completion:
                    continue
                if flows_of.get(key):
                    continue
                parents = job.parents(cid)
                if all((job.id, p) in completion for p in parents):
                    parent_done = max(
                        (completion[(job.id, p)] for p in parents), default=0
                    )
                    completion[key] = max(job.release, parent_done, now)

    propagate(0)

    span = base.span
    by_start: dict[int, list[TimedMatching]] = {}
    for it in base.items:
        by_start.setdefault(it.start, []).append(it)
    active: list[TimedMatching] = []
    out_slots: list[frozenset] = []
    for t in range(span):
        active = [it for it in active if it.end > t] + by_start.get(t, [])
        used_s: set[int] = set()
        used_r: set[int] = set()
        assigns: list[tuple[int, int, int, int]] = []
        for it in active:
            for quad in sorted(it.assignments):
                if remaining.get(quad, 0) > 0:
                    assigns.append(quad)
                    used_s.add(quad[0])
                    used_r.add(quad[1])
        for job in order:
            if job.release > t:
                continue
            for cid in topo[job.id]:
                key = (job.id, cid)
                if key in completion:
                    continue
                if any((job.id, p) not in completion or completion[(job.id, p)] > t for p in job.parents(cid)):
                    continue
                for (s, r) in flows_of.get(key, []):
                    quad = (s, r, job.id, cid)
                    if remaining.get(quad, 0) > 0 and s not in used_s and r not in used_r:
                        assigns.append(quad)
                        used_s.add(s)
                        used_r.add(r)
        for quad in assigns:
            remaining[quad] -= 1
        for job in inst.jobs:
            for cid in topo[job.id]:
                key = (job.id, cid)
                if key not in completion and flows_of.get(key) and all(
                    remaining[(s, r, job.id, cid)] == 0 for (s, r) in flows_of[key]
                ):
                    completion[key] = t + 1
        propagate(t + 1)
        out_slots.append(frozenset(assigns))
        if not any(remaining.values()):
            break

    items: list[TimedMatching] = []
    for t, assigns in enumerate(out_slots):
        if not assigns:
            continue
        if items and items[-1].end == t and items[-1].assignments == assigns:
            prev = items.pop()
            items.append(TimedMatching(prev.start, prev.duration + 1, prev.assignments))
        else:
            items.append(TimedMatching(t, 1, assigns))
    return Schedule(inst.m, items)


# ---------------------------------------------------------------------------
# Online replay.


def _register_algos() -> dict[str, Callable[[Instance, object, int], Schedule]]:
    from .baseline import sequential_baseline

    return {
        "dma": lambda sub, b, s: dma(sub, b, s),
        "dma-rt": lambda sub, b, s: dma_rt(sub, b, s),
        "gdm": lambda sub, b, s: g_dm(sub, b, s)[0],
        "gdm-rt": lambda sub, b, s: g_dm_rt(sub, b, s)[0],
        "baseline": lambda sub, b, s: sequential_baseline(sub),
    }


def _residual_instance(inst: Instance, transmitted: dict[tuple[int, int, int, int], int], now: int) -> Instance:
    """Arrived-but-unfinished work.

    A coflow with untransmitted packets keeps its residual entries. A
    coflow that never had packets is complete only once all its parents
    are, so incomplete empty coflows survive (they still gate children
    through chains like real -> empty -> real). Edges into completed
    coflows drop. Releases are cleared; the caller re-anchors at the
    current clock.
    """
    jobs = []
    for job in inst.jobs:
        if job.release > now:
            continue
        done: set[int] = set()
        residual_entries: dict[int, dict] = {}
        for cid in topological_order(job):
            c = job.coflow(cid)
            entries = {}
            for (s, r), v in c.demand.entries.items():
                left = v - transmitted.get((s, r, job.id, c.id), 0)
                if left > 0:
                    entries[(s, r)] = left
            if c.demand.entries:
                if not entries:
                    done.add(cid)
            elif all(p in done for p in job.parents(cid)):
                done.add(cid)
            residual_entries[cid] = entries
        keep = [
            Coflow(c.id, DemandMatrix(inst.m, residual_entries[c.id]))
            for c in job.coflows
            if c.id not in done
        ]
        if not keep:
            continue
        kept_ids = {c.id for c in keep}
        edges = [(a, b) for a, b in job.edges if a in kept_ids and b in kept_ids]
        jobs.append(Job(job.id, job.weight, 0, keep, edges))
    return Instance(inst.m, jobs)


def simulate_online(
    inst: Instance,
    algo: str = "gdm",
    beta: object = 2,
    seed: int = 0,
    use_backfill: bool = False,
    return_schedule: bool = False,
):
    """Replay releases as arrivals, rescheduling residual work at each one.

    Completion is measured from each job's arrival. Returns Metrics, or
    (Metrics, executed Schedule) when return_schedule is set; the executed
    schedule is the union of every run segment, clipped at reschedules,
    and is feasible for the original instance.
    """
    algos = _register_algos()
    if algo not in algos:
        raise ValueError(f"unknown algorithm {algo!r}; pick from {sorted(algos)}")
    run = algos[algo]

    epochs = sorted({j.release for j in inst.jobs})
    transmitted: dict[tuple[int, int, int, int], int] = {}
    executed: list[TimedMatching] = []

    def execute(sched: Schedule, until: int | None) -> None:
        for it in sched.items:
            end = it.end if until is None else min(it.end, until)
            if end <= it.start:
                continue
            executed.append(TimedMatching(it.start, end - it.start, it.assignments))
            for quad in it.assignments:
                transmitted[quad] = transmitted.get(quad, 0) + (end - it.start)

    current: Schedule | None = None
    for epoch in epochs:
        if current is not None:
            execute(current, epoch)
        residual = _residual_instance(inst, transmitted, epoch)
        if residual.jobs:
            current = run(residual, beta, derive_seed(seed, "epoch", epoch))
            if use_backfill:
                current = backfill(residual, current)
            current = current.shifted(epoch)
        else:
            current = None
    if current is not None:
        execute(current, None)

    final = Schedule(inst.m, executed)
    met = compute_metrics(inst, final, online=True, check=False)
    if return_schedule:
        return met, final
    return met
