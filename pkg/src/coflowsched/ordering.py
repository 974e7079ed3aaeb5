"""Weighted-completion job ordering via a primal-dual LP argument.

Jobs are ordered back to front. Each round looks at the most loaded port
(senders 1..m first, then receivers, lowest index breaking ties) and the
unscheduled job with the largest critical-path-plus-release key. If that
key exceeds the port load, the job is pinned last and its remaining
weight becomes an eta dual; otherwise a lambda dual grows on the port
until some job's remaining weight hits zero, and that job is pinned last.
All arithmetic is exact rationals, and the resulting duals satisfy the
complementary constraints with equality, which the checker verifies.

Degenerate case: if every unscheduled job has zero demand, the port load
is 0 and no lambda denominator exists; the key job is pinned via eta.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .bna import server_loads
from .dagstats import critical_path_size
from .model import Instance, sum_demands

Server = tuple[str, int]  # ("s", port) or ("r", port)


@dataclass(frozen=True)
class LambdaRecord:
    """One lambda dual: raised on `server` while the first `position` jobs
    of sigma were still unscheduled (the record's active set)."""

    position: int
    server: Server
    value: Fraction


@dataclass(frozen=True)
class OrderingResult:
    sigma: tuple[int, ...]  # sigma[k-1] is the job at position k
    eta: Mapping[int, Fraction]
    lambdas: tuple[LambdaRecord, ...]
    phi: Mapping[int, Server]  # position -> port examined that round


def _job_loads(inst: Instance) -> dict[int, dict[Server, int]]:
    loads: dict[int, dict[Server, int]] = {}
    for job in inst.jobs:
        agg = sum_demands((c.demand for c in job.coflows), inst.m)
        send, recv = server_loads(agg)
        per: dict[Server, int] = {}
        for i in range(1, inst.m + 1):
            per[("s", i)] = send[i]
            per[("r", i)] = recv[i]
        loads[job.id] = per
    return loads


def _servers(m: int) -> list[Server]:
    return [("s", i) for i in range(1, m + 1)] + [("r", i) for i in range(1, m + 1)]


def order_jobs(inst: Instance) -> OrderingResult:
    jobs = list(inst.jobs)
    n = len(jobs)
    loads = _job_loads(inst)
    key = {job.id: critical_path_size(job) + job.release for job in jobs}
    residual = {job.id: Fraction(job.weight) for job in jobs}
    total: dict[Server, int] = {srv: 0 for srv in _servers(inst.m)}
    for job in jobs:
        for srv, v in loads[job.id].items():
            total[srv] += v

    unscheduled = sorted(residual)
    sigma: list[int] = [0] * n
    eta: dict[int, Fraction] = {}
    lambdas: list[LambdaRecord] = []
    phi: dict[int, Server] = {}
    for k in range(n, 0, -1):
        port = max(_servers(inst.m), key=lambda srv: total[srv])  # max() keeps first tie
        phi[k] = port
        load = total[port]
        head = min(unscheduled, key=lambda j: (-key[j], j))
        if key[head] > load or load == 0:
            eta[head] = residual[head]
            pick = head
        else:
            ratio = {
                j: residual[j] / loads[j][port]
                for j in unscheduled
                if loads[j][port] > 0
            }
            pick = min(ratio, key=lambda j: (ratio[j], j))
            lam = ratio[pick]
            lambdas.append(LambdaRecord(k, port, lam))
            for j in unscheduled:
                residual[j] -= lam * loads[j][port]
        sigma[k - 1] = pick
        unscheduled.remove(pick)
        for srv, v in loads[pick].items():
            total[srv] -= v
    return OrderingResult(tuple(sigma), eta, tuple(lambdas), phi)


@dataclass(frozen=True)
class DualReport:
    feasible: bool
    violations: tuple[str, ...]
    objective: Fraction


def check_dual_feasibility(inst: Instance, result: OrderingResult) -> DualReport:
    """Recompute every dual constraint from scratch, exactly.

    For each job j the duals must satisfy
        w_j = eta_j + sum over lambda records with position >= pos(j) of
              load_j(record.server) * record.value
    with every eta and lambda nonnegative. The dual objective is
        sum_records value * f(server, active set) + sum_j eta_j * key_j
    where f(i, J) = (sum_j load^2 + (sum_j load)^2) / 2 over J, and weak
    duality makes it a lower bound on the optimal weighted completion.
    """
    problems: list[str] = []
    loads = _job_loads(inst)
    key = {job.id: critical_path_size(job) + job.release for job in inst.jobs}
    pos = {j: k + 1 for k, j in enumerate(result.sigma)}
    if sorted(pos) != sorted(j.id for j in inst.jobs):
        problems.append("sigma is not a permutation of the jobs")
        return DualReport(False, tuple(problems), Fraction(0))
    for j, val in result.eta.items():
        if val < 0:
            problems.append(f"eta[{j}] = {val} < 0")
    for rec in result.lambdas:
        if rec.value < 0:
            problems.append(f"lambda at position {rec.position} = {rec.value} < 0")
    for job in inst.jobs:
        covered = result.eta.get(job.id, Fraction(0))
        for rec in result.lambdas:
            if rec.position >= pos[job.id]:
                covered += rec.value * loads[job.id][rec.server]
        if covered != job.weight:
            problems.append(
                f"job {job.id}: dual cover {covered} != weight {job.weight}"
            )
    objective = Fraction(0)
    for rec in result.lambdas:
        active = result.sigma[: rec.position]
        vals = [loads[j][rec.server] for j in active]
        f = Fraction(sum(v * v for v in vals) + sum(vals) ** 2, 2)
        objective += rec.value * f
    for j, val in result.eta.items():
        objective += val * key[j]
    return DualReport(not problems, tuple(problems), objective)
