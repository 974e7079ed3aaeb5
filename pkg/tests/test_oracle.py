from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from coflowsched import (
    Instance,
    OracleGuardError,
    aggregate_size,
    critical_path_size,
    dma,
    effective_size,
    lower_bounds,
    metrics,
    optimal_makespan,
    optimal_weighted_completion,
    tightness_instance,
    tightness_witness,
    verify_schedule,
)
from coflowsched.dagstats import levels
from helpers import path_job, single_coflow_job, tiny_instance


def test_makespan_single_coflow_equals_effective_size():
    job = single_coflow_job(2, {(1, 1): 2, (1, 2): 1, (2, 2): 1})
    inst = Instance(2, [job])
    val, wit = optimal_makespan(inst)
    assert val == effective_size(job.coflows[0].demand) == 3
    assert not verify_schedule(inst, wit)
    assert wit.span == val


def test_makespan_path_job_two_coflows():
    inst = Instance(2, [path_job(2, [2, 3])])
    val, _ = optimal_makespan(inst)
    assert val == 5


def test_weighted_single_job_is_weight_times_makespan():
    job = single_coflow_job(2, {(1, 1): 2}, weight=3)
    inst = Instance(2, [job])
    val, wit = optimal_weighted_completion(inst)
    mk, _ = optimal_makespan(inst)
    assert val == 3 * mk == 6
    assert not verify_schedule(inst, wit)


def test_weighted_two_unit_jobs_prefers_heavy_first():
    # same port pair, sizes 1 and 1, weights 2 and 1: 2*1 + 1*2 = 4
    inst = Instance(
        1,
        [
            single_coflow_job(1, {(1, 1): 1}, jid=1, weight=2),
            single_coflow_job(1, {(1, 1): 1}, jid=2, weight=1),
        ],
    )
    val, wit = optimal_weighted_completion(inst)
    assert val == 4
    met = metrics(inst, wit)
    assert met.total_weighted_completion == 4


def test_guards_reject_oversized_inputs():
    with pytest.raises(OracleGuardError):
        optimal_makespan(Instance(4, [single_coflow_job(4, {(1, 1): 1})]))
    with pytest.raises(OracleGuardError):
        optimal_makespan(Instance(2, [single_coflow_job(2, {(1, 1): 11})]))
    big = Instance(2, [path_job(2, [1] * 6)])
    with pytest.raises(OracleGuardError):
        optimal_makespan(big)


def test_zero_demand_job_counts_its_release():
    job = single_coflow_job(2, {}, jid=1, weight=2, release=4)
    val, _ = optimal_weighted_completion(Instance(2, [job]))
    assert val == 8


# -- tightness family --------------------------------------------------------


def test_tightness_structure_k2():
    job = tightness_instance(2, 1)
    assert len(job.coflows) == 16
    assert aggregate_size(job.coflows) == 4
    assert critical_path_size(job) == 4
    h, _ = levels(job)
    assert h == 4  # 2K levels


def test_tightness_k1_oracle_value():
    job = tightness_instance(1, 1)
    inst = Instance(3, [job])
    val, _ = optimal_makespan(inst)
    assert val == 3


@pytest.mark.parametrize(
    "K,d,span",
    [(1, 1, 3), (2, 1, 10), (2, 2, 20)],
)
def test_tightness_witness_feasible_with_expected_span(K, d, span):
    job = tightness_instance(K, d)
    inst = Instance(2 * K + 1, [job])
    wit = tightness_witness(K, d)
    assert not verify_schedule(inst, wit)
    assert wit.span == span
    delta, tpath = lower_bounds(inst)
    assert max(delta, tpath) == 2 * K * d
    assert Fraction(span, max(delta, tpath)) == Fraction(2 * K + 1, 2)


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 100_000))
def test_oracle_lower_bounds_any_algorithm(seed):
    inst = tiny_instance(seed)
    val, _ = optimal_makespan(inst)
    sched = dma(inst, beta=2, seed=seed)
    assert sched.span >= val
    delta, tpath = lower_bounds(inst)
    assert val >= max(delta, tpath)


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 100_000))
def test_oracle_witness_matches_value(seed):
    inst = tiny_instance(seed)
    val, wit = optimal_makespan(inst)
    assert not verify_schedule(inst, wit)
    assert wit.span == val
    wval, wwit = optimal_weighted_completion(inst)
    assert not verify_schedule(inst, wwit)
    assert metrics(inst, wwit).total_weighted_completion == wval
