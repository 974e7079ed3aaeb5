from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coflowsched import (
    Coflow,
    CycleError,
    DemandMatrix,
    Instance,
    Job,
    Schedule,
    TimedMatching,
    instance_from_json,
    instance_to_json,
    schedule_from_json,
    schedule_to_json,
    sum_demands,
    topological_order,
    validate_instance,
)
from helpers import fig_job, tiny_instance


def test_demand_drops_zero_entries():
    d = DemandMatrix(2, {(1, 1): 3, (1, 2): 0})
    assert d.entries == {(1, 1): 3}
    assert d.total == 3
    assert d.entry(1, 2) == 0


def test_demand_rejects_non_integer_sizes():
    with pytest.raises(ValueError):
        DemandMatrix(2, {(1, 1): 1.5})
    with pytest.raises(ValueError):
        DemandMatrix(2, {(1, 1): -1})
    with pytest.raises(ValueError):
        DemandMatrix(2, {(1, 1): True})


def test_sum_demands():
    a = DemandMatrix(2, {(1, 1): 2})
    b = DemandMatrix(2, {(1, 1): 1, (2, 1): 4})
    s = sum_demands([a, b], 2)
    assert s.entries == {(1, 1): 3, (2, 1): 4}


def test_job_weight_coerced_to_fraction():
    j = Job(1, 0.5, 0, (Coflow(1, DemandMatrix(1, {})),))
    assert j.weight == Fraction(1, 2)
    with pytest.raises(ValueError):
        Job(1, 1, 0.5)


def test_timed_matching_requires_positive_duration():
    with pytest.raises(ValueError):
        TimedMatching(0, 0, [(1, 1, 1, 1)])


def test_schedule_span_and_shift():
    sched = Schedule(2, [TimedMatching(3, 2, [(1, 1, 1, 1)])])
    assert sched.span == 5
    assert sched.shifted(4).items[0].start == 7


def test_validate_catches_each_violation():
    good = tiny_instance(0)
    assert validate_instance(good) == []

    dup = Instance(2, [Job(1), Job(1)])
    assert any("job id" in v for v in validate_instance(dup))

    bad_port = Instance(1, [Job(1, 1, 0, (Coflow(1, DemandMatrix(1, {(2, 1): 1})),))])
    assert any("port" in v for v in validate_instance(bad_port))

    self_edge = Instance(
        1, [Job(1, 1, 0, (Coflow(1, DemandMatrix(1, {})),), [(1, 1)])]
    )
    assert validate_instance(self_edge)

    cycle = Instance(
        1,
        [
            Job(
                1,
                1,
                0,
                (Coflow(1, DemandMatrix(1, {})), Coflow(2, DemandMatrix(1, {}))),
                [(1, 2), (2, 1)],
            )
        ],
    )
    assert any("cycle" in v for v in validate_instance(cycle))

    neg = Instance(1, [Job(1, -1, 0, (Coflow(1, DemandMatrix(1, {})),))])
    assert any("weight" in v for v in validate_instance(neg))


def test_toposort_respects_edges_and_breaks_ties_low_first():
    job = fig_job()
    order = topological_order(job)
    assert order == (1, 2, 3, 4, 5, 6, 7)
    pos = {c: i for i, c in enumerate(order)}
    for a, b in job.edges:
        assert pos[a] < pos[b]


def test_toposort_cycle_raises():
    job = Job(
        1,
        1,
        0,
        (Coflow(1, DemandMatrix(1, {})), Coflow(2, DemandMatrix(1, {}))),
        [(1, 2), (2, 1)],
    )
    with pytest.raises(CycleError):
        topological_order(job)


@given(st.integers(0, 10_000))
def test_instance_json_round_trip(seed):
    inst = tiny_instance(seed, releases=True)
    back = instance_from_json(instance_to_json(inst))
    assert back == inst


def test_json_round_trip_keeps_micro_quantized_weights_exact():
    # float-encoded weights survive because repr(float) is the shortest
    # decimal that parses back to the same value
    w = Fraction(975691, 1_000_000)
    inst = Instance(1, [Job(1, w, 0, (Coflow(1, DemandMatrix(1, {(1, 1): 1})),))])
    back = instance_from_json(instance_to_json(inst))
    assert back.jobs[0].weight == w


def test_schedule_json_round_trip():
    sched = Schedule(
        2,
        [
            TimedMatching(0, 2, [(1, 1, 1, 1), (2, 2, 1, 2)]),
            TimedMatching(2, 1, [(1, 2, 1, 2)]),
        ],
    )
    assert schedule_from_json(schedule_to_json(sched)) == sched


def test_schedule_load_queries_are_consistent():
    sched = Schedule(
        2,
        [
            TimedMatching(0, 2, [(1, 1, 1, 1)]),
            TimedMatching(2, 3, [(1, 1, 1, 2)]),
        ],
    )
    assert sched.total_packets == 5
    total = sum(
        sum(sched.loads_at(t)[0].values()) for t in range(sched.span)
    )
    assert total == 5
    assert sched.coflow_completion(1, 1) == 2
    assert sched.coflow_completion(1, 2) == 5
    assert sched.job_completion(1) == 5
    assert sched.coflow_completion(1, 9) is None
