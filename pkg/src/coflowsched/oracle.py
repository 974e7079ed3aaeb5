"""Exhaustive optimal scheduling for tiny instances, plus the worst-case
family showing randomized delaying is necessary for fan-in trees.

The search branches over maximal matchings of the currently transmittable
packets. Restricting to maximal matchings is safe for both objectives:
adding an extra available packet to a slot never delays anything else
(ports are independent and precedence only ever unlocks earlier).

States are memoized on (residual flow sizes, min(t, last release)); once
every job has arrived the dynamics are time-invariant, and the weighted
objective is stored in time-shifted form so the cap stays exact.

Guard rails keep the state space tiny: m <= 3, total packets <= 10,
total coflows <= 5. Anything larger raises OracleGuardError.
"""

from __future__ import annotations

from fractions import Fraction

from .model import Coflow, DemandMatrix, Instance, Job, Schedule, TimedMatching

GUARD_M = 3
GUARD_PACKETS = 10
GUARD_COFLOWS = 5


class OracleGuardError(ValueError):
    pass


def _check_guard(inst: Instance) -> None:
    packets = sum(c.demand.total for j in inst.jobs for c in j.coflows)
    coflows = sum(len(j.coflows) for j in inst.jobs)
    if inst.m > GUARD_M or packets > GUARD_PACKETS or coflows > GUARD_COFLOWS:
        raise OracleGuardError(
            f"oracle limits: m <= {GUARD_M}, packets <= {GUARD_PACKETS}, "
            f"coflows <= {GUARD_COFLOWS}; got m={inst.m}, packets={packets}, coflows={coflows}"
        )


class _Search:
    def __init__(self, inst: Instance):
        from .dagstats import topological_order

        self.inst = inst
        self.flows: list[tuple[int, int, int, int, int]] = []  # (job, coflow, src, dst, size)
        for job in inst.jobs:
            for c in job.coflows:
                for (s, r), v in sorted(c.demand.entries.items()):
                    self.flows.append((job.id, c.id, s, r, v))
        self.flow_of_coflow: dict[tuple[int, int], list[int]] = {}
        for idx, (j, c, _, _, _) in enumerate(self.flows):
            self.flow_of_coflow.setdefault((j, c), []).append(idx)
        self.release = {job.id: job.release for job in inst.jobs}
        self.horizon = max(self.release.values(), default=0)
        self.real_jobs = {
            job.id for job in inst.jobs if any(c.demand.total for c in job.coflows)
        }
        self.weights = {job.id: job.weight for job in inst.jobs}
        self.topo = {job.id: topological_order(job) for job in inst.jobs}
        self.parents = {
            (job.id, cid): job.parents(cid) for job in inst.jobs for cid in self.topo[job.id]
        }
        self.job_flow_idx = {
            job.id: [i for i, f in enumerate(self.flows) if f[0] == job.id] for job in inst.jobs
        }

    def _coflow_done(self, residual: tuple[int, ...]) -> dict[tuple[int, int], bool]:
        """Done flags with empty coflows completing once their parents do."""
        done: dict[tuple[int, int], bool] = {}
        for job in self.inst.jobs:
            for cid in self.topo[job.id]:
                idxs = self.flow_of_coflow.get((job.id, cid), [])
                if idxs:
                    done[(job.id, cid)] = all(residual[i] == 0 for i in idxs)
                else:
                    done[(job.id, cid)] = all(
                        done[(job.id, p)] for p in self.parents[(job.id, cid)]
                    )
        return done

    def _moves(self, residual: tuple[int, ...], t: int) -> list[tuple[int, int, int]]:
        """(src, dst, flow index) for every packet transmittable at slot t."""
        done = self._coflow_done(residual)
        out = []
        for idx, (j, c, s, r, _) in enumerate(self.flows):
            if residual[idx] == 0:
                continue
            if self.release[j] > t:
                continue
            if all(done[(j, p)] for p in self.parents[(j, c)]):
                out.append((s, r, idx))
        return out

    @staticmethod
    def _maximal_sets(moves: list[tuple[int, int, int]]) -> list[tuple[int, ...]]:
        results: set[frozenset[int]] = set()

        def rec(i: int, used_s: frozenset[int], used_r: frozenset[int], chosen: tuple[int, ...]):
            if i == len(moves):
                results.add(frozenset(chosen))
                return
            s, r, f = moves[i]
            if s not in used_s and r not in used_r:
                rec(i + 1, used_s | {s}, used_r | {r}, chosen + (f,))
            rec(i + 1, used_s, used_r, chosen)

        rec(0, frozenset(), frozenset(), ())
        maximal = []
        for cand in results:
            used_s = {moves_idx[0] for moves_idx in moves if moves_idx[2] in cand}
            used_r = {moves_idx[1] for moves_idx in moves if moves_idx[2] in cand}
            if not any(s not in used_s and r not in used_r for s, r, _ in moves):
                maximal.append(tuple(sorted(cand)))
        return sorted(maximal)

    def _unfinished_weight(self, residual: tuple[int, ...]) -> Fraction:
        total = Fraction(0)
        for j in self.real_jobs:
            if any(residual[i] for i in self.job_flow_idx[j]):
                total += self.weights[j]
        return total

    def makespan(self) -> tuple[int, Schedule]:
        memo: dict[tuple, tuple[int, tuple[int, ...] | None]] = {}

        def solve(residual: tuple[int, ...], t: int) -> int:
            if not any(residual):
                return 0
            tau = min(t, self.horizon)
            key = (residual, tau)
            if key in memo:
                return memo[key][0]
            memo[key] = (10**9, None)  # cycle guard; states strictly shrink or t grows
            moves = self._moves(residual, tau)
            if not moves:
                best = 1 + solve(residual, tau + 1)
                memo[key] = (best, ())
                return best
            best, best_set = 10**9, None
            for chosen in self._maximal_sets(moves):
                nxt = list(residual)
                for f in chosen:
                    nxt[f] -= 1
                val = 1 + solve(tuple(nxt), tau + 1)
                if val < best:
                    best, best_set = val, chosen
            memo[key] = (best, best_set)
            return best

        start = tuple(v for _, _, _, _, v in self.flows)
        value = solve(start, 0)
        sched = self._rebuild(memo, start, lambda res, tau: (res, tau))
        empties = max(
            (self.release[j.id] for j in self.inst.jobs if j.id not in self.real_jobs),
            default=0,
        )
        return max(value, empties), sched

    def weighted(self) -> tuple[Fraction, Schedule]:
        memo: dict[tuple, tuple[Fraction, tuple[int, ...] | None]] = {}

        def solve(residual: tuple[int, ...], t: int) -> Fraction:
            if not any(residual):
                return Fraction(0)
            tau = min(t, self.horizon)
            key = (residual, tau)
            if key in memo:
                return memo[key][0]
            memo[key] = (Fraction(10**12), None)
            w = self._unfinished_weight(residual)
            moves = self._moves(residual, tau)
            if not moves:
                best = w + solve(residual, tau + 1)
                memo[key] = (best, ())
                return best
            best, best_set = None, None
            for chosen in self._maximal_sets(moves):
                nxt = list(residual)
                for f in chosen:
                    nxt[f] -= 1
                val = w + solve(tuple(nxt), tau + 1)
                if best is None or val < best:
                    best, best_set = val, chosen
            memo[key] = (best, best_set)
            return best

        start = tuple(v for _, _, _, _, v in self.flows)
        value = solve(start, 0)
        sched = self._rebuild(memo, start, lambda res, tau: (res, tau))
        offset = sum(
            (self.weights[j.id] * self.release[j.id] for j in self.inst.jobs if j.id not in self.real_jobs),
            Fraction(0),
        )
        return value + offset, sched

    def _rebuild(self, memo, start: tuple[int, ...], keyfn) -> Schedule:
        items: list[TimedMatching] = []
        residual, t = start, 0
        while any(residual):
            tau = min(t, self.horizon)
            _, chosen = memo[keyfn(residual, tau)]
            if chosen:
                assigns = []
                nxt = list(residual)
                for f in chosen:
                    j, c, s, r, _ = self.flows[f]
                    assigns.append((s, r, j, c))
                    nxt[f] -= 1
                items.append(TimedMatching(t, 1, assigns))
                residual = tuple(nxt)
            t += 1
            if t > 10**6:
                raise RuntimeError("oracle witness rebuild ran away")
        return Schedule(self.inst.m, _compress(items))


def _compress(items: list[TimedMatching]) -> list[TimedMatching]:
    """Merge consecutive unit slots holding the identical matching."""
    out: list[TimedMatching] = []
    for it in items:
        if out and out[-1].end == it.start and out[-1].assignments == it.assignments:
            prev = out.pop()
            out.append(TimedMatching(prev.start, prev.duration + it.duration, prev.assignments))
        else:
            out.append(it)
    return out


def optimal_makespan(inst: Instance) -> tuple[int, Schedule]:
    _check_guard(inst)
    return _Search(inst).makespan()


def optimal_weighted_completion(inst: Instance) -> tuple[Fraction, Schedule]:
    _check_guard(inst)
    return _Search(inst).weighted()


# ---------------------------------------------------------------------------
# Worst-case fan-in family: without randomized delays, precedence lets an
# adversary force makespan Omega(sqrt(mu)) * max(aggregate, critical path).


def tightness_instance(K: int, d: int = 1) -> Job:
    """Fan-in precedence job with mu = (2K)^2 coflows on m = 2K+1 ports.

    Coflows 1..2K each carry a single flow of size d from sender 1 to
    receiver 2. Block i (1 <= i <= 2K-1) holds coflows i*2K+1..(i+1)*2K,
    each a single flow from sender i+1 to receiver i+2. The first half of
    each block fans in from the middle of the previous block, the second
    half from its start, so any schedule must thread 2K chains of length
    2K through shared ports. Aggregate and critical path both equal 2Kd
    while the optimum is (2K+1)Kd.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if d < 1:
        raise ValueError("d must be >= 1")
    m = 2 * K + 1
    coflows = []
    edges: list[tuple[int, int]] = []
    mu = (2 * K) ** 2
    for c in range(1, mu + 1):
        i = (c - 1) // (2 * K)  # block index, 0 for the source block
        src, dst = i + 1, i + 2
        coflows.append(Coflow(c, DemandMatrix(m, {(src, dst): d})))
    for c in range(2 * K + 1, mu + 1):
        i = (c - 1) // (2 * K)
        offset = c - i * 2 * K  # 1..2K within block i
        if offset <= K:
            parents = range(c - 2 * K, c - K)  # c-2K .. c-K-1
        else:
            parents = range(c - 3 * K + 1, c - 2 * K + 1)  # c-3K+1 .. c-2K
        for p in parents:
            edges.append((p, c))
    return Job(1, 1, 0, coflows, edges)


def tightness_witness(K: int, d: int = 1) -> Schedule:
    """A feasible schedule of the tightness job with makespan (2K+1)Kd.

    Phases of length d each: the first K source coflows alone, then for
    each block boundary K rounds pairing one coflow of block i with one of
    block i+1 (their ports differ, so each pair is a matching), then the
    last K coflows alone.
    """
    job = tightness_instance(K, d)
    m = 2 * K + 1
    demand = {c.id: next(iter(c.demand.entries)) for c in job.coflows}
    phases: list[list[int]] = []
    for c in range(1, K + 1):
        phases.append([c])
    for i in range(1, 2 * K):
        for c in range(1, K + 1):
            phases.append([(2 * i - 1) * K + c, 2 * i * K + c])
    mu = (2 * K) ** 2
    for c in range(mu - K + 1, mu + 1):
        phases.append([c])
    items = []
    for p, batch in enumerate(phases):
        assigns = []
        for cid in batch:
            s, r = demand[cid]
            assigns.append((s, r, job.id, cid))
        items.append(TimedMatching(p * d, d, assigns))
    return Schedule(m, items)
