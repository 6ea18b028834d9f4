"""Flexible flow shop simulation with a routing buffer and setup-aware bus movement."""

from rbsched.buffer import (
    BufferGrid,
    LinkageChain,
    Move,
    apply_linkage,
    eligible_feeders,
    enumerate_linkages,
    lane_heads,
    place_entering_bus,
    select_min_cost_linkage,
    select_random_linkage,
)
from rbsched.harness import BatchStats, ComparisonReport, compare_schemes, export_report, run_batch
from rbsched.model import (
    Bus,
    BusType,
    Instance,
    SetupModel,
    builtin_paper_instance,
    parse_instance,
    serialize_instance,
    validate_instance,
)
from rbsched.setup_cost import occupied_adjacent_pairs, setup_cost_between, total_buffer_setup_cost
from rbsched.simulator import ScheduleResult, SchemeConfig, compute_metrics, simulate
from rbsched.verify import verify_schedule

__version__ = "0.1.0"
