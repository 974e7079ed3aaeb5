from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from coflowsched import (
    Coflow,
    DemandMatrix,
    InfeasibleScheduleError,
    Instance,
    Job,
    Schedule,
    TimedMatching,
    dma,
    lower_bounds,
    metrics,
    verify_schedule,
)
from coflowsched.workload import gen_instance
from helpers import path_job, single_coflow_job


def test_capacity_violation_two_packets_same_src():
    job = single_coflow_job(2, {(1, 1): 1, (1, 2): 1})
    inst = Instance(2, [job])
    bad = Schedule(2, [TimedMatching(0, 1, [(1, 1, 1, 1)]), TimedMatching(0, 1, [(1, 2, 1, 1)])])
    problems = verify_schedule(inst, bad)
    assert any("overuse" in p for p in problems)


def test_precedence_violation_child_starts_early():
    job = path_job(1, [2, 1])
    inst = Instance(1, [job])
    bad = Schedule(1, [
        TimedMatching(0, 1, [(1, 1, 1, 2)]),
        TimedMatching(1, 2, [(1, 1, 1, 1)]),
    ])
    problems = verify_schedule(inst, bad)
    assert any("before parent" in p for p in problems)


def test_demand_accounting_catches_shortfall_and_excess():
    job = single_coflow_job(1, {(1, 1): 2})
    inst = Instance(1, [job])
    short = Schedule(1, [TimedMatching(0, 1, [(1, 1, 1, 1)])])
    assert verify_schedule(inst, short)
    extra = Schedule(1, [TimedMatching(0, 3, [(1, 1, 1, 1)])])
    assert verify_schedule(inst, extra)
    phantom = Schedule(1, [TimedMatching(0, 2, [(1, 1, 1, 1)]), TimedMatching(2, 1, [(1, 1, 9, 9)])])
    assert verify_schedule(inst, phantom)


def test_release_violation():
    job = single_coflow_job(1, {(1, 1): 1}, release=5)
    inst = Instance(1, [job])
    early = Schedule(1, [TimedMatching(0, 1, [(1, 1, 1, 1)])])
    problems = verify_schedule(inst, early)
    assert any("release" in p for p in problems)
    ontime = Schedule(1, [TimedMatching(5, 1, [(1, 1, 1, 1)])])
    assert not verify_schedule(inst, ontime)


def test_wrong_port_count_flagged():
    job = single_coflow_job(2, {(1, 1): 1})
    inst = Instance(2, [job])
    sched = Schedule(3, [TimedMatching(0, 1, [(1, 1, 1, 1)])])
    assert verify_schedule(inst, sched)


def test_metrics_single_flow():
    job = single_coflow_job(1, {(1, 1): 3})
    inst = Instance(1, [job])
    sched = Schedule(1, [TimedMatching(0, 3, [(1, 1, 1, 1)])])
    met = metrics(inst, sched)
    assert met.makespan == 3
    assert met.per_job_completion == {1: 3}
    assert met.total_weighted_completion == 3


def test_metrics_empty_schedule_zero_demand():
    inst = Instance(2, [Job(1, 1, 0, (Coflow(1, DemandMatrix(2, {})),))])
    met = metrics(inst, Schedule(2, []))
    assert met.makespan == 0
    assert met.per_job_completion == {1: 0}


def test_metrics_raises_on_infeasible_by_default():
    job = single_coflow_job(1, {(1, 1): 2})
    inst = Instance(1, [job])
    short = Schedule(1, [TimedMatching(0, 1, [(1, 1, 1, 1)])])
    with pytest.raises(InfeasibleScheduleError):
        metrics(inst, short)
    met = metrics(inst, short, check=False)
    assert met.makespan == 1


def test_online_metrics_measure_from_arrival():
    job = single_coflow_job(1, {(1, 1): 2}, release=4)
    inst = Instance(1, [job])
    sched = Schedule(1, [TimedMatching(4, 2, [(1, 1, 1, 1)])])
    offline = metrics(inst, sched)
    online = metrics(inst, sched, online=True)
    assert offline.per_job_completion == {1: 6}
    assert online.per_job_completion == {1: 2}


def test_empty_coflows_complete_with_their_parents():
    job = Job(
        1,
        1,
        0,
        (
            Coflow(1, DemandMatrix(1, {(1, 1): 2})),
            Coflow(2, DemandMatrix(1, {})),
            Coflow(3, DemandMatrix(1, {(1, 1): 1})),
        ),
        [(1, 2), (2, 3)],
    )
    inst = Instance(1, [job])
    ok = Schedule(1, [
        TimedMatching(0, 2, [(1, 1, 1, 1)]),
        TimedMatching(2, 1, [(1, 1, 1, 3)]),
    ])
    assert not verify_schedule(inst, ok)
    # coflow 3 gated through the empty middle coflow
    early = Schedule(1, [
        TimedMatching(1, 2, [(1, 1, 1, 1)]),
        TimedMatching(0, 1, [(1, 1, 1, 3)]),
    ])
    assert any("before parent" in p for p in verify_schedule(inst, early))


def test_lower_bounds_single_and_stacked():
    job = single_coflow_job(2, {(1, 1): 2, (1, 2): 1})
    assert lower_bounds(Instance(2, [job])) == (3, 3)

    stacked = Job(
        1,
        1,
        0,
        (
            Coflow(1, DemandMatrix(2, {(1, 1): 1})),
            Coflow(2, DemandMatrix(2, {(1, 1): 1})),
        ),
    )
    # two unit coflows, no edge: aggregate 2, critical path 1
    assert lower_bounds(Instance(2, [stacked])) == (2, 1)


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 100_000))
def test_verifier_blesses_dma_and_rejects_tampering(seed):
    inst = gen_instance(m=4, n=3, mean_mu=2, seed=seed, max_flows=3, max_size=4)
    sched = dma(inst, beta=2, seed=seed)
    assert not verify_schedule(inst, sched)
    if sched.items:
        first = sched.items[0]
        tampered = Schedule(sched.m, sched.items[1:] + (TimedMatching(first.start, first.duration + 1, first.assignments),))
        assert verify_schedule(inst, tampered)
