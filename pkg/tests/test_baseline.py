from __future__ import annotations

from hypothesis import given, settings, strategies as st

from coflowsched import (
    Instance,
    dma,
    metrics,
    sequential_baseline,
    verify_schedule,
)
from coflowsched.workload import gen_instance
from helpers import path_job, single_coflow_job


def test_one_path_job_matches_zero_delay_dma():
    inst = Instance(2, [path_job(2, [2, 3])])
    base = sequential_baseline(inst)
    delayed = dma(inst, beta=10_000, seed=0)
    assert metrics(inst, base).makespan == metrics(inst, delayed).makespan == 5


def test_port_disjoint_jobs_still_run_one_at_a_time():
    # no interleaving by design, so spans add even when ports are free
    jobs = [
        single_coflow_job(2, {(1, 1): 3}, jid=1),
        single_coflow_job(2, {(2, 2): 4}, jid=2),
    ]
    inst = Instance(2, jobs)
    base = sequential_baseline(inst)
    assert base.span == 7
    assert not verify_schedule(inst, base)


def test_no_two_jobs_share_a_slot():
    inst = gen_instance(m=4, n=4, mean_mu=2, seed=8)
    base = sequential_baseline(inst)
    for t in range(base.span):
        owners = set()
        for it in base.items:
            if it.start <= t < it.end:
                owners.update(j for _, _, j, _ in it.assignments)
        assert len(owners) <= 1


def test_respects_releases():
    job = single_coflow_job(1, {(1, 1): 2}, release=6)
    inst = Instance(1, [job])
    base = sequential_baseline(inst)
    assert not verify_schedule(inst, base)
    assert base.items[0].start >= 6


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 100_000), st.booleans())
def test_feasible_on_random_instances(seed, ordered):
    inst = gen_instance(m=4, n=3, mean_mu=2, seed=seed, weights="uniform01")
    base = sequential_baseline(inst, use_ordering=ordered)
    assert not verify_schedule(inst, base)
