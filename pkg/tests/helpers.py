"""Shared instance builders for the test suite."""
from __future__ import annotations

import random
from fractions import Fraction

from coflowsched import Coflow, DemandMatrix, Instance, Job


def dm(m, entries):
    return DemandMatrix(m, entries)


def one_flow(m, s, r, size, cid=1):
    return Coflow(cid, DemandMatrix(m, {(s, r): size}))


def single_coflow_job(m, entries, jid=1, weight=1, release=0):
    return Job(jid, weight, release, (Coflow(1, DemandMatrix(m, entries)),))


def path_job(m, sizes, jid=1, weight=1, release=0, pair=(1, 1)):
    """Chain of single-flow coflows, all on the same port pair."""
    cofs = [one_flow(m, pair[0], pair[1], sz, cid=i + 1) for i, sz in enumerate(sizes)]
    edges = [(i, i + 1) for i in range(1, len(sizes))]
    return Job(jid, weight, release, cofs, edges)


def fig_job(m=2, size=1):
    """7-coflow DAG with two incomparable prefixes: both 1,2,3,4,5,6,7 and
    2,3,1,5,4,6,7 are valid topological orders."""
    cofs = []
    for cid in range(1, 8):
        s = (cid - 1) % m + 1
        r = cid % m + 1
        cofs.append(Coflow(cid, DemandMatrix(m, {(s, r): size})))
    edges = [(1, 4), (2, 4), (2, 3), (3, 5), (4, 6), (5, 6), (6, 7)]
    return Job(1, 1, 0, cofs, edges)


def fan_in_job(m=3, size=1, jid=1, release=0):
    """3 leaves feeding one root: leaves 1..3 on disjoint pairs, root 4."""
    cofs = [
        one_flow(m, 1, 1, size, cid=1),
        one_flow(m, 2, 2, size, cid=2),
        one_flow(m, 3, 3, size, cid=3),
        one_flow(m, 1, 2, size, cid=4),
    ]
    return Job(jid, 1, release, cofs, [(1, 4), (2, 4), (3, 4)])


def fan_out_job(m=3, size=1, jid=1):
    cofs = [
        one_flow(m, 1, 2, size, cid=1),
        one_flow(m, 1, 1, size, cid=2),
        one_flow(m, 2, 2, size, cid=3),
        one_flow(m, 3, 3, size, cid=4),
    ]
    return Job(jid, 1, 0, cofs, [(1, 2), (1, 3), (1, 4)])


def tiny_instance(seed, releases=False):
    """Random instance inside the oracle guard: m <= 3, <= 10 packets,
    <= 5 coflows total."""
    rng = random.Random(seed)
    m = rng.randint(2, 3)
    budget = rng.randint(4, 10)
    njobs = rng.randint(1, 3)
    jobs = []
    cid = 0
    left = 5
    for j in range(1, njobs + 1):
        ncof = rng.randint(1, min(2, left))
        left -= ncof
        cofs = []
        ids = []
        for _ in range(ncof):
            cid += 1
            ids.append(cid)
            entries = {}
            for _ in range(rng.randint(1, 2)):
                if budget <= 0:
                    break
                take = rng.randint(1, min(3, budget))
                budget -= take
                pair = (rng.randint(1, m), rng.randint(1, m))
                entries[pair] = entries.get(pair, 0) + take
            cofs.append(Coflow(cid, DemandMatrix(m, entries)))
        edges = [(ids[i], ids[i + 1]) for i in range(len(ids) - 1) if rng.random() < 0.5]
        rho = rng.randint(0, 2) if releases else 0
        jobs.append(Job(j, Fraction(rng.randint(1, 3)), rho, cofs, edges))
    return Instance(m, jobs)


def random_demand(rng, m, max_entries=4, max_size=6):
    entries = {}
    for _ in range(rng.randint(1, max_entries)):
        pair = (rng.randint(1, m), rng.randint(1, m))
        entries[pair] = entries.get(pair, 0) + rng.randint(1, max_size)
    return DemandMatrix(m, entries)
