"""Independent feasibility checking and metric extraction.

Everything here is re-derived from the raw (start, duration, assignments)
items of a schedule; no scheduler bookkeeping is trusted. A schedule is
feasible for an instance when:

  * every item is a matching and any two overlapping items stay disjoint
    on both sender and receiver ports,
  * each flow receives exactly its demanded packets, no more, no fewer,
    and no unknown flow appears,
  * a coflow's first packet never precedes the completion of any parent,
  * a job's first packet never precedes its release slot.

Completion convention: a flow occupying slots [t, t+k) completes at t+k.
An empty coflow completes at max(release, parents' completions), and a
job with no demand at all completes at its release.
"""

from __future__ import annotations

from fractions import Fraction

from .bna import effective_size
from .dagstats import critical_path_size, topological_order
from .model import Assignment, Instance, Metrics, Schedule, sum_demands


class InfeasibleScheduleError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def verify_schedule(inst: Instance, sched: Schedule) -> list[str]:
    problems: list[str] = []
    if sched.m != inst.m:
        problems.append(f"schedule is for m={sched.m}, instance has m={inst.m}")

    for idx, it in enumerate(sched.items):
        if it.start < 0:
            problems.append(f"item {idx}: negative start {it.start}")
        srcs = [a[0] for a in it.assignments]
        dsts = [a[1] for a in it.assignments]
        if len(set(srcs)) != len(srcs) or len(set(dsts)) != len(dsts):
            problems.append(f"item {idx}: assignments are not a matching")
        for s, r, j, c in sorted(it.assignments):
            if not (1 <= s <= inst.m and 1 <= r <= inst.m):
                problems.append(f"item {idx}: port pair ({s},{r}) outside 1..{inst.m}")

    # port capacity across overlapping items, via an event sweep
    events: dict[int, list[tuple[int, Assignment]]] = {}
    for it in sched.items:
        events.setdefault(it.start, []).append((+1, it))  # type: ignore[arg-type]
        events.setdefault(it.end, []).append((-1, it))  # type: ignore[arg-type]
    send_load: dict[int, int] = {}
    recv_load: dict[int, int] = {}
    for t in sorted(events):
        grew = False
        for sign, it in events[t]:
            for s, r, _, _ in it.assignments:
                send_load[s] = send_load.get(s, 0) + sign
                recv_load[r] = recv_load.get(r, 0) + sign
            grew = grew or sign > 0
        if grew:
            over_s = sorted(s for s, v in send_load.items() if v > 1)
            over_r = sorted(r for r, v in recv_load.items() if v > 1)
            if over_s or over_r:
                problems.append(
                    f"slot {t}: port overuse (senders {over_s}, receivers {over_r})"
                )

    # exact demand accounting
    demanded: dict[Assignment, int] = {}
    for job in inst.jobs:
        for c in job.coflows:
            for (s, r), v in c.demand.entries.items():
                demanded[(s, r, job.id, c.id)] = v
    sent = sched.transmitted_totals()
    for quad in sorted(set(demanded) | set(sent)):
        want = demanded.get(quad, 0)
        got = sent.get(quad, 0)
        if got != want:
            s, r, j, c = quad
            problems.append(
                f"flow ({s},{r}) of job {j} coflow {c}: transmitted {got}, demand {want}"
            )

    # precedence and release, from raw first/last slots
    for job in inst.jobs:
        first: dict[int, int] = {}
        last: dict[int, int] = {}
        for it in sched.items:
            for s, r, j, c in it.assignments:
                if j != job.id:
                    continue
                first[c] = min(first.get(c, it.start), it.start)
                last[c] = max(last.get(c, it.end), it.end)
        for c in sorted(first):
            if first[c] < job.release:
                problems.append(
                    f"job {job.id} coflow {c} starts at {first[c]} before release {job.release}"
                )
        try:
            completion = _coflow_completions_one(job, last)
        except Exception:
            continue  # malformed precedence graph, reported by validate_instance
        for a, b in sorted(job.edges):
            if b in first and a in completion and first[b] < completion[a]:
                problems.append(
                    f"job {job.id}: coflow {b} starts at {first[b]} before parent {a} completes at {completion[a]}"
                )
    return problems


def _coflow_completions_one(job, last: dict[int, int]) -> dict[int, int]:
    """Completion per coflow given raw last-transmission boundaries."""
    completion: dict[int, int] = {}
    for cid in topological_order(job):
        if cid in last:
            completion[cid] = last[cid]
        else:
            parents = job.parents(cid)
            completion[cid] = max(
                [completion[p] for p in parents if p in completion] + [job.release]
            )
    return completion


def coflow_completions(inst: Instance, sched: Schedule) -> dict[tuple[int, int], int]:
    """Completion slot of every coflow, empty coflows propagated from parents."""
    last: dict[tuple[int, int], int] = {}
    for it in sched.items:
        for s, r, j, c in it.assignments:
            last[(j, c)] = max(last.get((j, c), it.end), it.end)
    out: dict[tuple[int, int], int] = {}
    for job in inst.jobs:
        per = _coflow_completions_one(job, {c: e for (j, c), e in last.items() if j == job.id})
        for c, e in per.items():
            out[(job.id, c)] = e
    return out


def metrics(inst: Instance, sched: Schedule, online: bool = False, check: bool = True) -> Metrics:
    """Makespan and weighted completion. online subtracts each job's release,
    measuring flow time from arrival instead of absolute completion."""
    if check:
        problems = verify_schedule(inst, sched)
        if problems:
            raise InfeasibleScheduleError(problems)
    completions = coflow_completions(inst, sched)
    per_job: dict[int, int] = {}
    for job in inst.jobs:
        finish = max((completions[(job.id, c.id)] for c in job.coflows), default=job.release)
        finish = max(finish, job.release)
        per_job[job.id] = finish - job.release if online else finish
    total = sum((job.weight * per_job[job.id] for job in inst.jobs), Fraction(0))
    makespan = max(per_job.values(), default=0)
    return Metrics(makespan=makespan, per_job_completion=per_job, total_weighted_completion=total)


def lower_bounds(inst: Instance) -> tuple[int, int]:
    """(aggregate size over everything, max critical path over jobs).

    Any feasible schedule's makespan is at least the max of the two: the
    first through port capacity, the second through precedence chains.
    """
    all_coflows = [c for job in inst.jobs for c in job.coflows]
    delta = effective_size(sum_demands((c.demand for c in all_coflows), inst.m))
    path = max((critical_path_size(job) for job in inst.jobs), default=0)
    return delta, path
