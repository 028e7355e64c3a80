"""Container yard planning engine.

Classifies import containers with discriminant scores, assigns them to yard
slots to minimize rehandling, and rebalances truck pickup appointments across
the operational day. Serves a CLI and an HTTP API for the planner console.
"""

from .classify import (
    Category,
    Classification,
    DiscriminantCoefficients,
    StackClass,
    cargo_variable,
    classify,
    classify_all,
    consignee_variable,
    days_passed,
    discriminant_scores,
    operational_category,
    owner_census_map,
    remaining_free_days,
)
from .config import ConfigError, EngineConfig
from .manifest import (
    ManifestError,
    ManifestResult,
    RowError,
    parse_manifest,
    serialize_manifest,
    source_adapter,
)
from .metrics import (
    MetricsReport,
    Scenario,
    ScenarioResult,
    compare_scenarios,
    histogram,
    pt_improvement,
    run_ladder,
    run_scenario,
    throughput_gain,
)
from .model import (
    Container,
    Slot,
    TerminalParams,
    TimeBlock,
    TruckVisit,
    Violation,
    VisitOrigin,
    YardLayout,
    YardState,
    containers_above,
    validate_yard,
)
from .placement import (
    InfeasibleModelError,
    ObjectiveWeights,
    Optimality,
    PlacementModel,
    PlacementPlan,
    SegmentFullError,
    SegmentPlan,
    SegmentSizingError,
    expected_rehandles,
    partition_segments,
    pickup_key,
    pickup_keys,
    place_incremental,
    solve_batch,
    solve_greedy,
    zorder_violations,
)
from .scheduling import (
    RebalanceReport,
    Schedule,
    block_capacity,
    departure_time,
    detect_congestion,
    fill_slack,
    internal_op_time,
    processing_time,
    rebalance,
    run_recursive,
)

__version__ = "0.1.0"
