"""Optimal single-coflow scheduling by matching decomposition.

An integer demand matrix can always be transmitted in exactly D slots,
where D is its effective size: the largest total load on any sender or
receiver port. The decomposition repeatedly extracts a matching that
covers every port whose load equals the current D ("tight" ports) and
holds it until some flow on the matching empties or some uncovered port
becomes tight. Every round strictly shrinks D or empties an entry, so at
most m^2 + 2m rounds occur and the emitted slot count telescopes to D.

Finding a matching that covers all tight ports uses the classic padding
trick from preemptive open-shop scheduling: pad the matrix with slack so
every row and column sums to D, take a perfect matching of the padded
positive entries, and keep its real edges. A tight port has zero slack,
so all of its padded edges are real and the restriction covers it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import DemandMatrix, PortPair


class DecompositionError(RuntimeError):
    """Internal invariant broke; indicates a bug, not bad input."""


def server_loads(d: DemandMatrix) -> tuple[dict[int, int], dict[int, int]]:
    """Total packets each sender emits and each receiver absorbs."""
    send = {i: 0 for i in range(1, d.m + 1)}
    recv = {i: 0 for i in range(1, d.m + 1)}
    for (s, r), v in d.entries.items():
        send[s] += v
        recv[r] += v
    return send, recv


def effective_size(d: DemandMatrix) -> int:
    send, recv = server_loads(d)
    return max(max(send.values(), default=0), max(recv.values(), default=0))


@dataclass(frozen=True)
class BnaResult:
    """Matchings with cumulative switch times.

    times has one more entry than matchings; matchings[k] is held during
    [times[k], times[k+1]). times[-1] equals the effective size of the
    input, and an empty matrix yields zero matchings with times == (0,).
    """

    matchings: tuple[frozenset[PortPair], ...]
    times: tuple[int, ...]

    @property
    def span(self) -> int:
        return self.times[-1]

    def segments(self) -> list[tuple[int, int, frozenset[PortPair]]]:
        """(start, duration, matching) triples in time order."""
        return [
            (self.times[k], self.times[k + 1] - self.times[k], mk)
            for k, mk in enumerate(self.matchings)
        ]


def _perfect_matching(m: int, adj: dict[int, list[int]]) -> dict[int, int]:
    """Perfect sender->receiver matching; adjacency must admit one."""
    match_r: dict[int, int] = {}  # receiver -> sender
    # cheap greedy pass first, augmenting paths only for the leftovers
    for s in range(1, m + 1):
        for r in adj[s]:
            if r not in match_r:
                match_r[r] = s
                break

    def augment(s: int, seen: set[int]) -> bool:
        for r in adj[s]:
            if r in seen:
                continue
            seen.add(r)
            if r not in match_r or augment(match_r[r], seen):
                match_r[r] = s
                return True
        return False

    matched_s = set(match_r.values())
    for s in range(1, m + 1):
        if s not in matched_s and not augment(s, set()):
            raise DecompositionError("padded demand graph lost its perfect matching")
    return {s: r for r, s in match_r.items()}


def _critical_matching(
    m: int,
    residual: dict[PortPair, int],
    send: dict[int, int],
    recv: dict[int, int],
    size: int,
) -> list[PortPair]:
    """A matching on positive entries covering every port with load == size."""
    adj: dict[int, list[int]] = {s: [] for s in range(1, m + 1)}
    for (s, r) in residual:
        adj[s].append(r)
    row_def = {s: size - send[s] for s in range(1, m + 1)}
    col_def = {r: size - recv[r] for r in range(1, m + 1)}
    slack: set[PortPair] = set()
    for s in range(1, m + 1):
        if row_def[s] == 0:
            continue
        for r in range(1, m + 1):
            take = min(row_def[s], col_def[r])
            if take > 0:
                row_def[s] -= take
                col_def[r] -= take
                if (s, r) not in residual:
                    adj[s].append(r)
                    slack.add((s, r))
            if row_def[s] == 0:
                break
    for s in range(1, m + 1):
        adj[s].sort()
    perfect = _perfect_matching(m, adj)
    return sorted((s, r) for s, r in perfect.items() if (s, r) in residual)


def bna_decompose(d: DemandMatrix) -> BnaResult:
    m = d.m
    residual = dict(d.entries)
    matchings: list[frozenset[PortPair]] = []
    times = [0]
    while residual:
        send = {i: 0 for i in range(1, m + 1)}
        recv = {i: 0 for i in range(1, m + 1)}
        for (s, r), v in residual.items():
            send[s] += v
            recv[r] += v
        size = max(max(send.values()), max(recv.values()))
        matching = _critical_matching(m, residual, send, recv, size)
        matched_s = {s for s, _ in matching}
        matched_r = {r for _, r in matching}
        for s, load in send.items():
            if load == size and s not in matched_s:
                raise DecompositionError(f"tight sender {s} left uncovered")
        for r, load in recv.items():
            if load == size and r not in matched_r:
                raise DecompositionError(f"tight receiver {r} left uncovered")

        # hold until a matched flow empties or an uncovered port turns tight
        step = min(residual[(s, r)] for s, r in matching)
        for s in range(1, m + 1):
            if s not in matched_s:
                step = min(step, size - send[s])
        for r in range(1, m + 1):
            if r not in matched_r:
                step = min(step, size - recv[r])
        if step <= 0:
            raise DecompositionError("zero-length round")

        for pair in matching:
            left = residual[pair] - step
            if left:
                residual[pair] = left
            else:
                del residual[pair]
        matchings.append(frozenset(matching))
        times.append(times[-1] + step)
    return BnaResult(tuple(matchings), tuple(times))
