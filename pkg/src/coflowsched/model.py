"""Core domain types for multi-stage coflow scheduling on an m x m switch.

A job is a DAG of coflows with Starts-After precedence: a coflow may begin
transmitting only once every parent coflow has completed all of its flows.
Time is discrete integer slots starting at 0, flow sizes are integer packet
counts, and in any single slot the switch carries a matching (each sender
port and each receiver port serves at most one flow).

Schedules are run-length encoded: each item holds one matching for an
integer number of slots, and every assignment names the flow it serves as
a (src, dst, job_id, coflow_id) quadruple.

Weights are stored as exact rationals. JSON emits them as floats; parsing
goes through the decimal string form, so weights representable in a few
decimal digits (the generator quantizes to denominator 10**6) survive a
round trip exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

PortPair = tuple[int, int]
Assignment = tuple[int, int, int, int]  # (src, dst, job_id, coflow_id)


def _as_size(value: object) -> int:
    # bool is an int subclass; reject it along with floats etc.
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"flow sizes must be integers, got {value!r}")
    if value < 0:
        raise ValueError(f"flow sizes must be nonnegative, got {value}")
    return value


@dataclass(frozen=True)
class DemandMatrix:
    """Sparse m x m demand matrix; absent entries are zero packets.

    Zero-size entries are dropped at construction so two matrices with the
    same positive entries compare equal. Port indices are 1-based; entries
    outside 1..m are representable (validate_instance reports them) so that
    malformed inputs can be loaded and diagnosed rather than crashing the
    parser.
    """

    m: int
    entries: Mapping[PortPair, int]

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or isinstance(self.m, bool) or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        cleaned: dict[PortPair, int] = {}
        for (src, dst), size in self.entries.items():
            size = _as_size(size)
            if size > 0:
                cleaned[(int(src), int(dst))] = size
        object.__setattr__(self, "entries", cleaned)

    @property
    def total(self) -> int:
        return sum(self.entries.values())

    def entry(self, src: int, dst: int) -> int:
        return self.entries.get((src, dst), 0)


def sum_demands(mats: Iterable[DemandMatrix], m: int) -> DemandMatrix:
    """Entrywise sum, used for aggregate loads across coflows."""
    acc: dict[PortPair, int] = {}
    for mat in mats:
        for pair, size in mat.entries.items():
            acc[pair] = acc.get(pair, 0) + size
    return DemandMatrix(m, acc)


@dataclass(frozen=True)
class Coflow:
    id: int
    demand: DemandMatrix


@dataclass(frozen=True)
class Job:
    """A DAG of coflows. edges (a, b) means coflow b starts after a completes."""

    id: int
    weight: Fraction
    release: int
    coflows: tuple[Coflow, ...]
    edges: frozenset[tuple[int, int]]

    def __init__(
        self,
        id: int,
        weight: object = 1,
        release: int = 0,
        coflows: Iterable[Coflow] = (),
        edges: Iterable[tuple[int, int]] = (),
    ) -> None:
        object.__setattr__(self, "id", int(id))
        object.__setattr__(self, "weight", Fraction(weight))  # type: ignore[arg-type]
        if isinstance(release, bool) or not isinstance(release, int):
            raise ValueError(f"release must be an integer slot, got {release!r}")
        object.__setattr__(self, "release", release)
        object.__setattr__(self, "coflows", tuple(coflows))
        object.__setattr__(self, "edges", frozenset((int(a), int(b)) for a, b in edges))

    def coflow(self, coflow_id: int) -> Coflow:
        for c in self.coflows:
            if c.id == coflow_id:
                return c
        raise KeyError(f"job {self.id} has no coflow {coflow_id}")

    def coflow_ids(self) -> tuple[int, ...]:
        return tuple(c.id for c in self.coflows)

    def parents(self, coflow_id: int) -> tuple[int, ...]:
        return tuple(sorted(a for a, b in self.edges if b == coflow_id))

    def children(self, coflow_id: int) -> tuple[int, ...]:
        return tuple(sorted(b for a, b in self.edges if a == coflow_id))


@dataclass(frozen=True)
class Instance:
    m: int
    jobs: tuple[Job, ...]

    def __init__(self, m: int, jobs: Iterable[Job] = ()) -> None:
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "jobs", tuple(jobs))

    def job(self, job_id: int) -> Job:
        for j in self.jobs:
            if j.id == job_id:
                return j
        raise KeyError(f"no job {job_id}")


@dataclass(frozen=True)
class TimedMatching:
    """One switch configuration held for `duration` consecutive slots.

    Assignments are flow quadruples. Matching-ness (each src and each dst
    at most once) is an invariant of well-formed schedules; it is checked
    by the verifier, not at construction, so tampered schedules can be
    loaded and reported on.
    """

    start: int
    duration: int
    assignments: frozenset[Assignment]

    def __init__(self, start: int, duration: int, assignments: Iterable[Assignment]) -> None:
        if isinstance(duration, bool) or not isinstance(duration, int) or duration < 1:
            raise ValueError(f"duration must be a positive integer, got {duration!r}")
        if isinstance(start, bool) or not isinstance(start, int):
            raise ValueError(f"start must be an integer slot, got {start!r}")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "duration", duration)
        object.__setattr__(
            self, "assignments", frozenset((int(s), int(r), int(j), int(c)) for s, r, j, c in assignments)
        )

    @property
    def end(self) -> int:
        return self.start + self.duration


@dataclass(frozen=True)
class Schedule:
    m: int
    items: tuple[TimedMatching, ...]

    def __init__(self, m: int, items: Iterable[TimedMatching] = ()) -> None:
        object.__setattr__(self, "m", int(m))
        object.__setattr__(
            self, "items", tuple(sorted(items, key=lambda it: (it.start, it.end, sorted(it.assignments))))
        )

    @property
    def span(self) -> int:
        return max((it.end for it in self.items), default=0)

    @property
    def total_packets(self) -> int:
        return sum(it.duration * len(it.assignments) for it in self.items)

    def transmitted_totals(self) -> dict[Assignment, int]:
        totals: dict[Assignment, int] = {}
        for it in self.items:
            for a in it.assignments:
                totals[a] = totals.get(a, 0) + it.duration
        return totals

    def loads_at(self, slot: int) -> tuple[dict[int, int], dict[int, int]]:
        """Per-sender and per-receiver packet counts carried in one slot."""
        send: dict[int, int] = {}
        recv: dict[int, int] = {}
        for it in self.items:
            if it.start <= slot < it.end:
                for s, r, _, _ in it.assignments:
                    send[s] = send.get(s, 0) + 1
                    recv[r] = recv.get(r, 0) + 1
        return send, recv

    def coflow_completion(self, job_id: int, coflow_id: int) -> int | None:
        """Last slot boundary at which this coflow transmits, or None if it never does."""
        ends = [it.end for it in self.items if any(a[2] == job_id and a[3] == coflow_id for a in it.assignments)]
        return max(ends) if ends else None

    def job_completion(self, job_id: int) -> int | None:
        ends = [it.end for it in self.items if any(a[2] == job_id for a in it.assignments)]
        return max(ends) if ends else None

    def shifted(self, offset: int) -> "Schedule":
        return Schedule(self.m, (TimedMatching(it.start + offset, it.duration, it.assignments) for it in self.items))


@dataclass(frozen=True)
class Metrics:
    makespan: int
    per_job_completion: Mapping[int, int]
    total_weighted_completion: Fraction


class CycleError(ValueError):
    pass


def _toposort(ids: list[int], edges: Iterable[tuple[int, int]]) -> list[int]:
    """Kahn's algorithm, lowest id first among ready nodes. Raises CycleError."""
    import heapq

    indeg = {i: 0 for i in ids}
    children: dict[int, list[int]] = {i: [] for i in ids}
    for a, b in edges:
        if a in indeg and b in indeg:
            indeg[b] += 1
            children[a].append(b)
    heap = [i for i in ids if indeg[i] == 0]
    heapq.heapify(heap)
    order: list[int] = []
    while heap:
        node = heapq.heappop(heap)
        order.append(node)
        for ch in children[node]:
            indeg[ch] -= 1
            if indeg[ch] == 0:
                heapq.heappush(heap, ch)
    if len(order) != len(ids):
        raise CycleError("precedence graph has a cycle")
    return order


def validate_instance(inst: Instance) -> list[str]:
    """Structural checks; returns human-readable violations, empty when clean."""
    problems: list[str] = []
    if inst.m < 1:
        problems.append(f"num_servers must be >= 1, got {inst.m}")
    seen_jobs: set[int] = set()
    for job in inst.jobs:
        tag = f"job {job.id}"
        if job.id in seen_jobs:
            problems.append(f"duplicate job id {job.id}")
        seen_jobs.add(job.id)
        if job.weight <= 0:
            problems.append(f"{tag}: weight must be positive, got {job.weight}")
        if job.release < 0:
            problems.append(f"{tag}: release must be nonnegative, got {job.release}")
        ids = [c.id for c in job.coflows]
        if len(set(ids)) != len(ids):
            problems.append(f"{tag}: duplicate coflow ids")
        for c in job.coflows:
            if c.demand.m != inst.m:
                problems.append(f"{tag} coflow {c.id}: demand is {c.demand.m}x{c.demand.m}, instance has m={inst.m}")
            for (s, r) in c.demand.entries:
                if not (1 <= s <= inst.m and 1 <= r <= inst.m):
                    problems.append(f"{tag} coflow {c.id}: port pair ({s},{r}) outside 1..{inst.m}")
        known = set(ids)
        edges_ok = True
        for a, b in sorted(job.edges):
            if a not in known or b not in known:
                problems.append(f"{tag}: edge ({a},{b}) references unknown coflow")
                edges_ok = False
            elif a == b:
                problems.append(f"{tag}: self-edge on coflow {a}")
                edges_ok = False
        if edges_ok:
            try:
                _toposort(ids, job.edges)
            except CycleError:
                problems.append(f"{tag}: precedence graph has a cycle")
    return problems


# ---------------------------------------------------------------------------
# JSON round trip.


def _weight_to_json(w: Fraction) -> float | int:
    if w.denominator == 1:
        return int(w)
    return float(w)


def _weight_from_json(raw: object) -> Fraction:
    if isinstance(raw, bool):
        raise ValueError(f"bad weight {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        # repr(float) is the shortest round-tripping decimal, so weights with
        # short decimal forms (the generator's 10**-6 grid) parse exactly
        return Fraction(repr(raw))
    raise ValueError(f"bad weight {raw!r}")


def instance_to_json(inst: Instance) -> dict:
    return {
        "num_servers": inst.m,
        "jobs": [
            {
                "id": job.id,
                "weight": _weight_to_json(job.weight),
                "release_time": job.release,
                "coflows": [
                    {
                        "id": c.id,
                        "flows": [
                            {"src": s, "dst": r, "size": v}
                            for (s, r), v in sorted(c.demand.entries.items())
                        ],
                    }
                    for c in job.coflows
                ],
                "edges": [list(e) for e in sorted(job.edges)],
            }
            for job in inst.jobs
        ],
    }


def instance_from_json(data: dict) -> Instance:
    if not isinstance(data, dict) or "num_servers" not in data or "jobs" not in data:
        raise ValueError("instance JSON needs num_servers and jobs")
    m = data["num_servers"]
    if isinstance(m, bool) or not isinstance(m, int):
        raise ValueError(f"num_servers must be an integer, got {m!r}")
    jobs = []
    for jraw in data["jobs"]:
        coflows = []
        for craw in jraw.get("coflows", []):
            entries: dict[PortPair, int] = {}
            for f in craw.get("flows", []):
                pair = (f["src"], f["dst"])
                entries[pair] = entries.get(pair, 0) + _as_size(f["size"])
            coflows.append(Coflow(int(craw["id"]), DemandMatrix(m, entries)))
        jobs.append(
            Job(
                id=jraw["id"],
                weight=_weight_from_json(jraw.get("weight", 1)),
                release=jraw.get("release_time", 0),
                coflows=coflows,
                edges=[(e[0], e[1]) for e in jraw.get("edges", [])],
            )
        )
    return Instance(m, jobs)


def schedule_to_json(sched: Schedule) -> dict:
    return {
        "num_servers": sched.m,
        "items": [
            {
                "start": it.start,
                "duration": it.duration,
                "assignments": [list(a) for a in sorted(it.assignments)],
            }
            for it in sched.items
        ],
    }


def schedule_from_json(data: dict) -> Schedule:
    if not isinstance(data, dict) or "num_servers" not in data or "items" not in data:
        raise ValueError("schedule JSON needs num_servers and items")
    items = [
        TimedMatching(it["start"], it["duration"], [tuple(a) for a in it["assignments"]])
        for it in data["items"]
    ]
    return Schedule(data["num_servers"], items)


def metrics_to_json(met: Metrics) -> dict:
    return {
        "makespan": met.makespan,
        "per_job_completion": {str(j): c for j, c in sorted(met.per_job_completion.items())},
        "total_weighted_completion": float(met.total_weighted_completion),
        "total_weighted_completion_exact": f"{met.total_weighted_completion.numerator}/{met.total_weighted_completion.denominator}",
    }


def load_instance(path: str) -> Instance:
    with open(path) as fh:
        return instance_from_json(json.load(fh))


def save_instance(inst: Instance, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_json(inst), fh, indent=2)
        fh.write("\n")


def load_schedule(path: str) -> Schedule:
    with open(path) as fh:
        return schedule_from_json(json.load(fh))


def save_schedule(sched: Schedule, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(schedule_to_json(sched), fh, indent=2)
        fh.write("\n")


def iter_flows(inst: Instance) -> Iterator[tuple[int, int, int, int, int]]:
    """Yields (job_id, coflow_id, src, dst, size) for every positive flow."""
    for job in inst.jobs:
        for c in job.coflows:
            for (s, r), v in sorted(c.demand.entries.items()):
                yield job.id, c.id, s, r, v
