"""Delay-and-merge scheduling for DAGs of coflows.

Pipeline: schedule every job in isolation (back-to-back matching
decomposition of its coflows in topological order), shift each job by an
independent uniform random delay in {0, ..., floor(Delta/beta)} where
Delta is the aggregate size of the whole input, overlay the delayed
schedules on one timeline, then repair port overuse interval by interval.

The repair (feasibilization) cuts the overlay at every matching boundary.
Within one interval the active matchings sum to a demand matrix D_I whose
effective size alpha_I is the worst port overuse; decomposing l_I * D_I
re-packs that interval into alpha_I * l_I feasible slots. Intervals are
laid out in their original order, so precedence survives: a parent's last
packet still lands in an interval strictly before any child packet's.
Idle stretches are kept idle, not compressed; delays exist to spread load
and the timeline preserves them.

With beta > 1/e the expected stretch of random delaying is bounded; the
argument fails for smaller beta, so such beta values are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .bna import bna_decompose, effective_size
from .dagstats import topological_order
from .model import (
    Assignment,
    DemandMatrix,
    Instance,
    Job,
    PortPair,
    Schedule,
    TimedMatching,
    sum_demands,
)
from .seeding import stream


class BetaError(ValueError):
    pass


def check_beta(beta: object) -> Fraction:
    b = Fraction(beta)  # type: ignore[arg-type]
    if float(b) <= 1 / math.e:
        raise BetaError(f"beta must exceed 1/e ~ 0.3679, got {b}")
    return b


def delay_bound(delta: int, beta: object) -> int:
    """Largest delay a job may draw: floor(delta / beta)."""
    return math.floor(Fraction(delta) / check_beta(beta))


@dataclass(frozen=True)
class IsolatedSchedule:
    """One job scheduled alone starting at slot 0, plus a shift to apply.

    items hold flow-level assignments; coflow_starts records where each
    coflow's block begins (before the delay). span includes the delay.
    """

    job_id: int
    items: tuple[TimedMatching, ...]
    coflow_starts: Mapping[int, int]
    delay: int = 0

    @property
    def span(self) -> int:
        return self.delay + max((it.end for it in self.items), default=0)

    def placed_items(self) -> list[TimedMatching]:
        return [TimedMatching(it.start + self.delay, it.duration, it.assignments) for it in self.items]


def isolated_schedule(job: Job) -> IsolatedSchedule:
    """Coflows back-to-back in topological order, each optimally decomposed.

    The span is the sum of the coflows' effective sizes, which is the
    optimal makespan for a path-shaped job.
    """
    items: list[TimedMatching] = []
    starts: dict[int, int] = {}
    cursor = 0
    demand = {c.id: c.demand for c in job.coflows}
    for cid in topological_order(job):
        starts[cid] = cursor
        result = bna_decompose(demand[cid])
        for seg_start, seg_dur, matching in result.segments():
            items.append(
                TimedMatching(
                    cursor + seg_start,
                    seg_dur,
                    [(s, r, job.id, cid) for s, r in matching],
                )
            )
        cursor += result.span
    return IsolatedSchedule(job.id, tuple(items), starts)


def draw_delays(jobs: Sequence[Job], delta: int, beta: object, seed: int) -> dict[int, int]:
    """Independent uniform delays in {0..floor(delta/beta)}, one per job.

    Each job draws from its own stream keyed by (seed, job id), so the set
    of jobs present does not perturb any individual draw.
    """
    hi = delay_bound(delta, beta)
    return {job.id: stream(seed, "job-delay", job.id).randint(0, hi) for job in jobs}


@dataclass(frozen=True)
class TimelineInterval:
    start: int
    end: int
    demand: Mapping[PortPair, int]
    contributors: Mapping[PortPair, tuple[tuple[int, int], ...]]  # (job, coflow) per unit

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class MergedTimeline:
    m: int
    breakpoints: tuple[int, ...]
    intervals: tuple[TimelineInterval, ...]

    @property
    def span(self) -> int:
        return self.breakpoints[-1] if self.breakpoints else 0


def merge(m: int, schedules: Iterable[IsolatedSchedule]) -> MergedTimeline:
    """Overlay delayed per-job schedules; cut at every matching boundary.

    Within each interval the demand matrix counts how many active
    matchings use each port pair, and contributors records which
    (job, coflow) each unit belongs to, in sorted order for determinism.
    """
    placed: list[TimedMatching] = []
    for sched in schedules:
        placed.extend(sched.placed_items())
    if not placed:
        return MergedTimeline(m, (), ())
    cuts = sorted({it.start for it in placed} | {it.end for it in placed})
    starts: dict[int, list[TimedMatching]] = {}
    ends: dict[int, list[TimedMatching]] = {}
    for it in placed:
        starts.setdefault(it.start, []).append(it)
        ends.setdefault(it.end, []).append(it)
    active: dict[PortPair, list[tuple[int, int]]] = {}
    intervals: list[TimelineInterval] = []
    for k, t in enumerate(cuts[:-1]):
        for it in ends.get(t, []):
            for s, r, j, c in it.assignments:
                active[(s, r)].remove((j, c))
                if not active[(s, r)]:
                    del active[(s, r)]
        for it in starts.get(t, []):
            for s, r, j, c in it.assignments:
                active.setdefault((s, r), []).append((j, c))
        demand = {pair: len(owners) for pair, owners in active.items()}
        contributors = {pair: tuple(sorted(owners)) for pair, owners in active.items()}
        intervals.append(TimelineInterval(t, cuts[k + 1], demand, contributors))
    return MergedTimeline(m, tuple(cuts), tuple(intervals))


def feasibilize(timeline: MergedTimeline) -> Schedule:
    """Repack each interval into feasible slots, in interval order.

    An interval whose demand is already a matching (every port used at
    most once) passes through unchanged; otherwise the interval's demand,
    scaled by its length, is matching-decomposed and each unit of a port
    pair is attributed back to its contributors in sorted order. Idle
    intervals stay idle.
    """
    items: list[TimedMatching] = []
    cursor = timeline.breakpoints[0] if timeline.breakpoints else 0
    for iv in timeline.intervals:
        length = iv.length
        if not iv.demand:
            cursor += length
            continue
        alpha = effective_size(DemandMatrix(timeline.m, dict(iv.demand)))
        if alpha <= 1:
            assigns = [
                (s, r, jc[0], jc[1])
                for (s, r), owners in sorted(iv.contributors.items())
                for jc in owners
            ]
            items.append(TimedMatching(cursor, length, assigns))
            cursor += length
            continue
        scaled = DemandMatrix(timeline.m, {pair: cnt * length for pair, cnt in iv.demand.items()})
        result = bna_decompose(scaled)
        # owed packets per port pair, parcelled out contributor by contributor
        queues: dict[PortPair, list[list[object]]] = {
            pair: [[j, c, length] for (j, c) in owners]
            for pair, owners in iv.contributors.items()
        }
        for seg_start, seg_dur, matching in result.segments():
            runs: dict[PortPair, list[tuple[int, int, int, int]]] = {}
            for pair in sorted(matching):
                off = 0
                left = seg_dur
                pieces: list[tuple[int, int, int, int]] = []
                queue = queues[pair]
                while left > 0:
                    head = queue[0]
                    take = min(left, head[2])  # type: ignore[arg-type]
                    pieces.append((off, take, head[0], head[1]))  # type: ignore[arg-type]
                    head[2] -= take  # type: ignore[operator]
                    off += take
                    left -= take
                    if head[2] == 0:
                        queue.pop(0)
                runs[pair] = pieces
            offsets = sorted({0, seg_dur} | {
                boundary for pieces in runs.values() for (o, ln, _, _) in pieces for boundary in (o, o + ln)
            })
            for a, b in zip(offsets, offsets[1:]):
                assigns = []
                for (s, r), pieces in sorted(runs.items()):
                    for o, ln, j, c in pieces:
                        if o <= a and b <= o + ln:
                            assigns.append((s, r, j, c))
                            break
                items.append(TimedMatching(cursor + seg_start + a, b - a, assigns))
        expanded = result.span
        if expanded != alpha * length:
            raise RuntimeError("interval repack produced the wrong span")
        cursor += expanded
    return Schedule(timeline.m, items)


def instance_aggregate(inst: Instance) -> int:
    """Effective size of all demand summed over every job and coflow."""
    mats = [c.demand for job in inst.jobs for c in job.coflows]
    return effective_size(sum_demands(mats, inst.m))


def dma(inst: Instance, beta: object = 2, seed: int = 0, gate_releases: bool = False) -> Schedule:
    """Delay, merge, feasibilize. Randomized via seed; deterministic given it.

    Releases are ignored unless gate_releases is set, in which case the
    finished schedule is shifted right so no assignment precedes the max
    release among scheduled jobs.
    """
    beta = check_beta(beta)
    iso = [isolated_schedule(job) for job in inst.jobs]
    delta = instance_aggregate(inst)
    delays = draw_delays(inst.jobs, delta, beta, seed)
    placed = [replace(s, delay=delays[s.job_id]) for s in iso]
    sched = feasibilize(merge(inst.m, placed))
    if gate_releases and inst.jobs:
        max_rho = max(job.release for job in inst.jobs)
        first = min((it.start for it in sched.items), default=max_rho)
        if first < max_rho:
            sched = sched.shifted(max_rho - first)
    return sched
