"""Precedence-graph measurements used by the schedulers.

Sizes here are effective sizes of demand matrices: the critical path size
of a job lower-bounds any schedule of it, and the aggregate size of all
its coflows lower-bounds the same thing through port capacity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bna import effective_size
from .model import Coflow, CycleError, Job, _toposort, sum_demands

__all__ = [
    "CycleError",
    "JobStats",
    "PathSubJob",
    "aggregate_size",
    "critical_path_size",
    "is_rooted_tree",
    "job_stats",
    "levels",
    "path_sub_jobs",
    "topological_order",
]


def topological_order(job: Job) -> tuple[int, ...]:
    """Coflow ids respecting every precedence edge, lowest id first among ties."""
    return tuple(_toposort([c.id for c in job.coflows], job.edges))


def aggregate_size(coflows: tuple[Coflow, ...] | list[Coflow], m: int | None = None) -> int:
    coflows = tuple(coflows)
    if m is None:
        if not coflows:
            return 0
        m = coflows[0].demand.m
    return effective_size(sum_demands((c.demand for c in coflows), m))


def critical_path_size(job: Job) -> int:
    """Largest total effective size along any directed path of coflows."""
    order = topological_order(job)
    size = {c.id: effective_size(c.demand) for c in job.coflows}
    best: dict[int, int] = {}
    for cid in order:
        parents = job.parents(cid)
        best[cid] = size[cid] + max((best[p] for p in parents), default=0)
    return max(best.values(), default=0)


def levels(job: Job) -> tuple[int, tuple[frozenset[int], ...]]:
    """(height H, level sets): level of a coflow is its longest edge distance
    from any source, so sources sit in level 0 and H-1 is the deepest level."""
    order = topological_order(job)
    level: dict[int, int] = {}
    for cid in order:
        parents = job.parents(cid)
        level[cid] = max((level[p] + 1 for p in parents), default=0)
    if not level:
        return 0, ()
    height = max(level.values()) + 1
    sets = [set() for _ in range(height)]
    for cid, lv in level.items():
        sets[lv].add(cid)
    return height, tuple(frozenset(s) for s in sets)


def is_rooted_tree(job: Job) -> str | None:
    """'fan_in', 'fan_out', or None.

    Fan-in: every coflow except a single root has exactly one outgoing edge
    and the root has none (all precedence funnels into the root). Fan-out
    is the mirror. A single coflow or a path counts as fan-in.
    """
    ids = [c.id for c in job.coflows]
    if not ids:
        return None
    try:
        _toposort(ids, job.edges)
    except CycleError:
        return None
    out_deg = {i: 0 for i in ids}
    in_deg = {i: 0 for i in ids}
    for a, b in job.edges:
        out_deg[a] += 1
        in_deg[b] += 1
    if len(job.edges) != len(ids) - 1:
        return None
    sinks = [i for i in ids if out_deg[i] == 0]
    if len(sinks) == 1 and all(out_deg[i] == 1 for i in ids if i != sinks[0]):
        return "fan_in"
    sources = [i for i in ids if in_deg[i] == 0]
    if len(sources) == 1 and all(in_deg[i] == 1 for i in ids if i != sources[0]):
        return "fan_out"
    return None


@dataclass(frozen=True)
class PathSubJob:
    """Coflow ids along one root-to-leaf chain, in precedence order."""

    coflow_ids: tuple[int, ...]


def path_sub_jobs(job: Job) -> tuple[PathSubJob, ...]:
    """Decompose a rooted tree into its maximal chains.

    Fan-in trees yield one path per source, each ending at the root.
    Fan-out trees are mirrored: one path per leaf, each starting at the
    root. Paths are ordered by their distinguishing endpoint's id.
    """
    shape = is_rooted_tree(job)
    if shape is None:
        raise ValueError(f"job {job.id} is not a rooted tree")
    if shape == "fan_in":
        next_hop = {a: b for a, b in job.edges}
        sources = sorted(set(c.id for c in job.coflows) - {b for _, b in job.edges})
        paths = []
        for src in sources:
            chain = [src]
            while chain[-1] in next_hop:
                chain.append(next_hop[chain[-1]])
            paths.append(PathSubJob(tuple(chain)))
        return tuple(paths)
    mirrored = Job(job.id, job.weight, job.release, job.coflows, [(b, a) for a, b in job.edges])
    return tuple(PathSubJob(tuple(reversed(p.coflow_ids))) for p in path_sub_jobs(mirrored))


@dataclass(frozen=True)
class JobStats:
    topo_order: tuple[int, ...]
    critical_path: int
    aggregate: int
    height: int
    level_sets: tuple[frozenset[int], ...]


def job_stats(job: Job, m: int | None = None) -> JobStats:
    height, level_sets = levels(job)
    return JobStats(
        topo_order=topological_order(job),
        critical_path=critical_path_size(job),
        aggregate=aggregate_size(job.coflows, m),
        height=height,
        level_sets=level_sets,
    )
