"""Scheduling DAGs of coflows on a non-blocking m x m switch.

Randomized delay-and-merge schedulers for makespan, a primal-dual job
ordering with geometric grouping for total weighted completion, an
independent feasibility verifier, an exact oracle for tiny instances,
and workload tooling (trace ingestion, synthetic generation, benchmarks).
"""

from .baseline import sequential_baseline
from .bna import BnaResult, DecompositionError, bna_decompose, effective_size, server_loads
from .dagstats import (
    JobStats,
    PathSubJob,
    aggregate_size,
    critical_path_size,
    is_rooted_tree,
    job_stats,
    levels,
    path_sub_jobs,
    topological_order,
)
from .dma import (
    BetaError,
    IsolatedSchedule,
    MergedTimeline,
    check_beta,
    delay_bound,
    dma,
    draw_delays,
    feasibilize,
    instance_aggregate,
    isolated_schedule,
    merge,
)
from .gdm import GroupedRun, backfill, g_dm, g_dm_rt, grouped_run, simulate_online
from .grouping import Grouping, grouping_keys, partition, prefix_effective_sizes
from .model import (
    Assignment,
    Coflow,
    CycleError,
    DemandMatrix,
    Instance,
    Job,
    Metrics,
    PortPair,
    Schedule,
    TimedMatching,
    instance_from_json,
    instance_to_json,
    load_instance,
    load_schedule,
    metrics_to_json,
    save_instance,
    save_schedule,
    schedule_from_json,
    schedule_to_json,
    sum_demands,
    validate_instance,
)
from .oracle import (
    OracleGuardError,
    optimal_makespan,
    optimal_weighted_completion,
    tightness_instance,
    tightness_witness,
)
from .ordering import (
    DualReport,
    LambdaRecord,
    OrderingResult,
    check_dual_feasibility,
    order_jobs,
)
from .rooted import CoflowStartPlan, NotATreeError, dma_rt, dma_srt, plan_tree_starts, tree_starts
from .verify import (
    InfeasibleScheduleError,
    coflow_completions,
    lower_bounds,
    metrics,
    verify_schedule,
)

__all__ = [name for name in dir() if not name.startswith("_")]
