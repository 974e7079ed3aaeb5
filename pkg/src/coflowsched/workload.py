"""Instance construction: trace ingestion and synthetic generators.

Trace lines are "coflow_id src dst size" with 1-based ports; ports beyond
m fold back modularly so a trace recorded on a big fabric replays on a
small one. Coflows are then partitioned into jobs by shuffling and
slicing into geometric-length blocks, and each block gets either a random
DAG (every forward pair is an edge with probability 1/2) or that DAG
reduced to a fan-in tree.

All randomness flows through named streams off the master seed, so each
piece (partition, edges, weights, arrivals) is independently reproducible.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .model import Coflow, DemandMatrix, Instance, Job, PortPair
from .seeding import stream


class TraceFormatError(ValueError):
    pass


def fold_port(port: int, m: int) -> int:
    return (port - 1) % m + 1


def load_flow_trace(path: str, m: int) -> list[Coflow]:
    """Parse a whitespace trace into per-coflow demand matrices.

    Flows of the same coflow id accumulate; same (src, dst) adds up.
    Coflows come out sorted by id. Malformed lines name their line number.
    """
    demands: dict[int, dict[PortPair, int]] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise TraceFormatError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            try:
                cid, src, dst, size = (int(p) for p in parts)
            except ValueError:
                raise TraceFormatError(f"{path}:{lineno}: non-integer field") from None
            if size < 0:
                raise TraceFormatError(f"{path}:{lineno}: negative size {size}")
            pair = (fold_port(src, m), fold_port(dst, m))
            per = demands.setdefault(cid, {})
            per[pair] = per.get(pair, 0) + size
    return [Coflow(cid, DemandMatrix(m, demands[cid])) for cid in sorted(demands)]


def _geometric(rng, mean: float) -> int:
    """Geometric on {1, 2, ...} with the given mean, clamped to [1, 2*mean]."""
    if mean <= 1:
        return 1
    p = 1.0 / mean
    u = rng.random()
    k = 1 + math.floor(math.log(1.0 - u) / math.log(1.0 - p))
    return max(1, min(k, int(2 * mean)))


def partition_into_jobs(
    coflows: list[Coflow],
    mean_mu: float,
    seed: int,
    shape: str = "dag",
) -> Instance:
    """Shuffle coflows, slice into geometric blocks, wire precedence.

    shape "dag": each topologically ordered pair within a block is an edge
    with probability 1/2. shape "tree": the same draw reduced so every
    non-final coflow keeps exactly one outgoing edge (uniform among its
    drawn edges, or to a uniformly random later coflow if it drew none),
    which yields a fan-in tree rooted at the block's last coflow.

    Coflows are re-indexed 1..mu within each job, in topological order.
    Jobs get weight 1 and release 0; see gen_weights / gen_arrivals.
    """
    if shape not in ("dag", "tree"):
        raise ValueError(f"shape must be 'dag' or 'tree', got {shape!r}")
    if not coflows:
        return Instance(max((c.demand.m for c in coflows), default=1), [])
    m = coflows[0].demand.m
    rng = stream(seed, "partition")
    pool = list(coflows)
    rng.shuffle(pool)
    blocks: list[list[Coflow]] = []
    at = 0
    while at < len(pool):
        size = _geometric(rng, mean_mu)
        blocks.append(pool[at : at + size])
        at += size
    jobs = []
    for bidx, block in enumerate(blocks, start=1):
        mu = len(block)
        erng = stream(seed, "edges", bidx)
        drawn: dict[int, list[int]] = {i: [] for i in range(1, mu + 1)}
        for i in range(1, mu + 1):
            for k in range(i + 1, mu + 1):
                if erng.random() < 0.5:
                    drawn[i].append(k)
        if shape == "dag":
            edges = [(i, k) for i, ks in drawn.items() for k in ks]
        else:
            edges = []
            for i in range(1, mu):
                if drawn[i]:
                    k = drawn[i][erng.randrange(len(drawn[i]))]
                else:
                    k = erng.randrange(i + 1, mu + 1)
                edges.append((i, k))
        renamed = [Coflow(i, c.demand) for i, c in enumerate(block, start=1)]
        jobs.append(Job(bidx, 1, 0, renamed, edges))
    return Instance(m, jobs)


def gen_weights(inst: Instance, mode: str, seed: int) -> Instance:
    """'equal' sets every weight to 1; 'uniform01' draws from (0, 1],
    quantized to millionths so downstream rational arithmetic stays exact."""
    if mode == "equal":
        jobs = [Job(j.id, 1, j.release, j.coflows, j.edges) for j in inst.jobs]
    elif mode == "uniform01":
        jobs = []
        for j in inst.jobs:
            u = stream(seed, "weight", j.id).random()
            w = Fraction(max(1, round(u * 10**6)), 10**6)
            jobs.append(Job(j.id, w, j.release, j.coflows, j.edges))
    else:
        raise ValueError(f"unknown weight mode {mode!r}")
    return Instance(inst.m, jobs)


def arrival_rate_base(inst: Instance) -> Fraction:
    """theta_0: coflows per slot at service capacity, i.e. the total coflow
    count over the sum of every coflow's effective size."""
    from .bna import effective_size

    total = sum(effective_size(c.demand) for j in inst.jobs for c in j.coflows)
    if total == 0:
        return Fraction(0)
    return Fraction(sum(len(j.coflows) for j in inst.jobs), total)


def gen_arrivals(inst: Instance, a: float, seed: int) -> Instance:
    """Poisson arrivals at rate a * theta_0: exponential gaps between jobs,
    floored to integer slots. Larger a means denser arrivals. The first job
    arrives at slot 0."""
    theta0 = arrival_rate_base(inst)
    if theta0 == 0 or not inst.jobs:
        return inst
    rate = float(a) * float(theta0)
    rng = stream(seed, "arrivals")
    clock = 0.0
    jobs = []
    for j in inst.jobs:
        jobs.append(Job(j.id, j.weight, int(clock), j.coflows, j.edges))
        clock += rng.expovariate(rate)
    return Instance(inst.m, jobs)


def gen_coflows(
    num: int,
    m: int,
    seed: int,
    max_flows: int = 6,
    max_size: int = 10,
) -> list[Coflow]:
    """Synthetic sparse coflows: each draws 1..max_flows random port pairs
    with sizes 1..max_size (collisions on a pair accumulate)."""
    out = []
    for cid in range(1, num + 1):
        rng = stream(seed, "coflow", cid)
        entries: dict[PortPair, int] = {}
        for _ in range(rng.randint(1, max_flows)):
            pair = (rng.randint(1, m), rng.randint(1, m))
            entries[pair] = entries.get(pair, 0) + rng.randint(1, max_size)
        out.append(Coflow(cid, DemandMatrix(m, entries)))
    return out


def gen_instance(
    m: int,
    n: int,
    mean_mu: float,
    seed: int,
    shape: str = "dag",
    max_flows: int = 6,
    max_size: int = 10,
    weights: str = "equal",
    a: float | None = None,
) -> Instance:
    """End-to-end synthetic instance: n jobs on m ports with about mean_mu
    coflows each. a, if given, adds Poisson arrivals at a * theta_0."""
    want = max(1, round(n * mean_mu))
    coflows = gen_coflows(want, m, seed, max_flows, max_size)
    inst = partition_into_jobs(coflows, mean_mu, seed, shape)
    inst = gen_weights(inst, weights, seed)
    if a is not None:
        inst = gen_arrivals(inst, a, seed)
    return inst
