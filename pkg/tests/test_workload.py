from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from coflowsched import is_rooted_tree, validate_instance
from coflowsched.workload import (
    TraceFormatError,
    arrival_rate_base,
    fold_port,
    gen_arrivals,
    gen_instance,
    gen_weights,
    load_flow_trace,
    partition_into_jobs,
)


def test_fold_port_wraps_modularly():
    assert fold_port(1, 4) == 1
    assert fold_port(4, 4) == 4
    assert fold_port(5, 4) == 1
    assert fold_port(9, 4) == 1


def test_trace_two_lines_same_coflow(tmp_path):
    p = tmp_path / "trace.txt"
    p.write_text("1 1 2 5\n1 2 1 3\n")
    cofs = load_flow_trace(str(p), 4)
    assert len(cofs) == 1
    assert cofs[0].demand.entries == {(1, 2): 5, (2, 1): 3}


def test_trace_accumulates_folded_collisions(tmp_path):
    p = tmp_path / "trace.txt"
    p.write_text("7 1 2 5\n7 5 2 3\n")  # port 5 folds onto 1 when m=4
    cofs = load_flow_trace(str(p), 4)
    assert cofs[0].demand.entries == {(1, 2): 8}


def test_trace_empty_and_comments(tmp_path):
    p = tmp_path / "trace.txt"
    p.write_text("")
    assert load_flow_trace(str(p), 4) == []
    p.write_text("# header\n\n2 1 1 1\n")
    assert len(load_flow_trace(str(p), 4)) == 1


def test_trace_errors_carry_line_numbers(tmp_path):
    p = tmp_path / "trace.txt"
    p.write_text("1 1 2 5\n1 2 oops 3\n")
    with pytest.raises(TraceFormatError) as err:
        load_flow_trace(str(p), 4)
    assert ":2:" in str(err.value)

    p.write_text("1 1 2\n")
    with pytest.raises(TraceFormatError):
        load_flow_trace(str(p), 4)


def test_mean_mu_one_gives_singleton_jobs():
    inst = gen_instance(m=4, n=6, mean_mu=1, seed=0)
    assert all(len(j.coflows) == 1 and not j.edges for j in inst.jobs)


def test_ten_coflows_mean_five_gives_about_two_jobs():
    from coflowsched.workload import gen_coflows

    cofs = gen_coflows(10, 4, seed=1)
    inst = partition_into_jobs(cofs, 5, seed=1)
    assert 1 <= len(inst.jobs) <= 4
    assert validate_instance(inst) == []
    assert sum(len(j.coflows) for j in inst.jobs) == 10


def test_tree_shape_always_rooted():
    for seed in range(8):
        inst = gen_instance(m=5, n=4, mean_mu=3, seed=seed, shape="tree")
        for j in inst.jobs:
            assert is_rooted_tree(j) == "fan_in"


def test_weights_equal_and_uniform():
    inst = gen_instance(m=4, n=5, mean_mu=2, seed=3)
    assert all(j.weight == 1 for j in inst.jobs)
    u1 = gen_weights(inst, "uniform01", seed=9)
    u2 = gen_weights(inst, "uniform01", seed=9)
    assert [j.weight for j in u1.jobs] == [j.weight for j in u2.jobs]
    for j in u1.jobs:
        assert 0 < j.weight <= 1
        assert j.weight.denominator <= 1_000_000
    with pytest.raises(ValueError):
        gen_weights(inst, "slanted", seed=0)


def test_arrivals_first_job_at_zero_and_sorted():
    inst = gen_instance(m=4, n=5, mean_mu=2, seed=3)
    timed = gen_arrivals(inst, a=2.0, seed=4)
    rhos = [j.release for j in timed.jobs]
    assert rhos[0] == 0
    assert rhos == sorted(rhos)
    assert gen_arrivals(inst, a=2.0, seed=4) == timed


def test_arrival_rate_base_counts_packet_loads():
    inst = gen_instance(m=4, n=3, mean_mu=2, seed=5)
    from coflowsched import effective_size

    theta = arrival_rate_base(inst)
    total_cofs = sum(len(j.coflows) for j in inst.jobs)
    denom = sum(effective_size(c.demand) for j in inst.jobs for c in j.coflows)
    assert theta == Fraction(total_cofs, denom)


@settings(deadline=None, max_examples=50)
@given(st.integers(0, 100_000), st.sampled_from(["dag", "tree"]))
def test_generated_instances_always_validate(seed, shape):
    inst = gen_instance(m=5, n=4, mean_mu=2.5, seed=seed, shape=shape, weights="uniform01")
    assert validate_instance(inst) == []
    for j in inst.jobs:
        assert [c.id for c in j.coflows] == list(range(1, len(j.coflows) + 1))


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 100_000))
def test_partition_blocks_respect_mean_clamp(seed):
    from coflowsched.workload import gen_coflows

    cofs = gen_coflows(12, 4, seed=seed)
    inst = partition_into_jobs(cofs, 3, seed=seed)
    for j in inst.jobs:
        assert 1 <= len(j.coflows) <= 6  # clamp [1, 2 * mean_mu]
