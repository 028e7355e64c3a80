"""Day evaluation: the four yard scenarios, gain metrics, and histogram series.

A scenario run builds a yard (random or solved), keeps or rebalances the
appointment schedule, then plays the day block by block: every serviced truck
pays the block's gate departure time, the internal operation time, and a
penalty per blocker moved to reach its container. Trucks beyond a block's
capacity go unserviced, which is exactly the throughput congestion destroys.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import IntEnum
from typing import Mapping, Sequence

from .classify import Category, Classification, classify_all
from .config import EngineConfig
from .model import Container, Slot, TerminalParams, TruckVisit, VisitOrigin, YardLayout, YardState
from .placement import (
    PickupKey,
    PlacementModel,
    SegmentFullError,
    SegmentPlan,
    StackGrid,
    apply_plan,
    partition_segments,
    pickup_key,
    pickup_keys,
    reposition,
    solve_batch,
)
from .scheduling import (
    RebalanceReport,
    Schedule,
    departure_time,
    run_recursive,
)


class Scenario(IntEnum):
    RANDOM_NO_SEG = 1
    RANDOM_SEG = 2
    ZSCORE_SEG = 3
    IPS = 4


SCENARIO_LABELS = {
    Scenario.RANDOM_NO_SEG: "random stacking, no segments",
    Scenario.RANDOM_SEG: "random stacking within segments",
    Scenario.ZSCORE_SEG: "score-ordered stacking within segments",
    Scenario.IPS: "score-ordered stacking with recursive appointments",
}


class Lcg64:
    """64-bit linear congruential generator; seeded, portable, reproducible."""

    MULTIPLIER = 6364136223846793005
    INCREMENT = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int) -> None:
        self.state = seed & self.MASK

    def next_raw(self) -> int:
        self.state = (self.MULTIPLIER * self.state + self.INCREMENT) & self.MASK
        return self.state

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_raw() >> 32) % n


@dataclass(frozen=True)
class BlockSeries:
    index: int
    demand: int
    serviced: int
    capacity: int


@dataclass(frozen=True)
class HistogramRow:
    index: int
    before: int
    after: int
    capacity: int


@dataclass
class ScenarioResult:
    scenario: Scenario
    pt: float | None  # mean per-truck processing minutes; None when nothing serviced
    m: int
    histogram: list[BlockSeries]
    seed: int
    rehandles: int
    yard: YardState
    plan: SegmentPlan | None
    schedule_before: Schedule
    schedule_after: Schedule
    rebalance_report: RebalanceReport | None = None

    @property
    def pt_defined(self) -> bool:
        return self.pt is not None


@dataclass(frozen=True)
class MetricsReport:
    """Gain metrics with the inputs echoed for audit."""

    t_throughput: float
    pt_improve: float
    m_optimized: int
    m_baseline: int
    pt_hyp: float
    pt_real: float
    pt_baseline: float


def throughput_gain(m_optimized: int, m_baseline: int) -> float:
    """Relative increase in trucks serviced over the baseline."""
    if m_baseline < 1:
        raise ValueError("baseline throughput must be >= 1")
    return (m_optimized - m_baseline) / m_baseline


def pt_improvement(pt_hyp: float, pt_real: float, pt_baseline: float) -> float:
    """Processing-time improvement relative to the hypothetical optimum.

    Positive values say the truck count should drop to relieve congestion;
    negative values say the yard has headroom for more trucks.
    """
    if pt_hyp <= 0:
        raise ValueError("hypothetical processing time must be > 0")
    return (abs(pt_hyp - pt_real) - (pt_hyp - pt_baseline)) / pt_hyp


def compare_scenarios(results: Mapping[Scenario, ScenarioResult]) -> MetricsReport:
    """Gain metrics across the ladder: baseline=1, hypothetical=3, realized=4."""
    base = results[Scenario.RANDOM_NO_SEG]
    hyp = results[Scenario.ZSCORE_SEG]
    real = results[Scenario.IPS]
    if base.pt is None or hyp.pt is None or real.pt is None:
        raise ValueError("cannot compare scenarios with undefined processing time")
    return MetricsReport(
        t_throughput=throughput_gain(real.m, base.m),
        pt_improve=pt_improvement(hyp.pt, real.pt, base.pt),
        m_optimized=real.m,
        m_baseline=base.m,
        pt_hyp=hyp.pt,
        pt_real=real.pt,
        pt_baseline=base.pt,
    )


def build_schedule(
    containers: Sequence[Container], params: TerminalParams, day: date
) -> Schedule:
    """Pre-existing appointment blocks from the manifest, in manifest order."""
    schedule = Schedule.empty(day, params)
    seq = 0
    for c in containers:
        if c.appointment_block is None:
            continue
        if not 0 <= c.appointment_block < params.blocks_per_day:
            raise ValueError(
                f"{c.id}: appointment block {c.appointment_block} outside 0..{params.blocks_per_day - 1}"
            )
        schedule.blocks[c.appointment_block].visits.append(
            TruckVisit(c.id, c.carrier_id, seq, VisitOrigin.PRE_EXISTING)
        )
        seq += 1
    return schedule


def category_census(classifications: Mapping[str, Classification]) -> dict[Category, int]:
    census = {Category.CAT1: 0, Category.CAT2: 0, Category.CAT3: 0}
    for cls in classifications.values():
        census[cls.category] += 1
    return census


def random_yard(
    containers: Sequence[Container],
    layout: YardLayout,
    params: TerminalParams,
    seed: int,
    plan: SegmentPlan | None = None,
    classifications: Mapping[str, Classification] | None = None,
) -> YardState:
    """Seeded random stacking, optionally confined to each category's segment."""
    rng = Lcg64(seed)
    bay_map = plan.bay_map() if plan is not None else {}
    stack_keys = sorted(layout.stacks())
    heights: dict[tuple[int, int], int] = {k: 0 for k in stack_keys}
    placement: dict[str, Slot] = {}
    for c in containers:
        if plan is not None:
            if classifications is None:
                raise ValueError("segmented random placement needs classifications")
            seg = SegmentPlan.segment_for_category(classifications[c.id].category)
            candidates = [
                k for k in stack_keys if bay_map.get(k[0]) == seg and heights[k] < params.max_tier
            ]
        else:
            candidates = [k for k in stack_keys if heights[k] < params.max_tier]
        if not candidates:
            raise SegmentFullError(f"no slot left for {c.id} during random placement")
        stack = candidates[rng.below(len(candidates))]
        placement[c.id] = Slot(stack[0], stack[1], heights[stack], bay_map.get(stack[0], ""))
        heights[stack] += 1
    return YardState(layout, params, placement, segment_map=bay_map or None)


def evaluate_day(
    yard: YardState,
    plan: SegmentPlan | None,
    schedule: Schedule,
    params: TerminalParams,
) -> tuple[float | None, int, list[BlockSeries], int]:
    """Play the day: (mean processing minutes, trucks serviced, series, rehandles).

    Within a block trucks are serviced in booking order up to the block
    capacity; each pays the block's departure time, the internal operation
    time, and the rehandle penalty for blockers moved at retrieval.
    """
    grid = StackGrid.from_yard(yard, plan)
    cap = params.block_capacity
    io = params.io_minutes
    samples: list[float] = []
    series: list[BlockSeries] = []
    total_rehandles = 0
    for block in schedule.blocks:
        demand = block.truck_count
        dt = departure_time(demand, params)
        serviced = 0
        for visit in sorted(block.visits, key=lambda v: v.booked_at)[:cap]:
            if visit.container_id not in grid.loc:
                continue
            moves = grid.retrieve(visit.container_id)
            total_rehandles += moves
            samples.append(dt + io + moves * params.rehandle_minutes)
            serviced += 1
        series.append(BlockSeries(block.index, demand, serviced, cap))
    pt = sum(samples) / len(samples) if samples else None
    return pt, len(samples), series, total_rehandles


def run_scenario(
    containers: Sequence[Container],
    scenario: Scenario,
    config: EngineConfig,
    seed: int | None = None,
) -> ScenarioResult:
    """Run one ladder rung end to end on a manifest snapshot."""
    containers = list(containers)
    params = config.params
    seed_used = config.seed if seed is None else seed
    if containers:
        current = config.current_date or max(c.arrival_date for c in containers)
    else:
        current = config.current_date or date(2000, 1, 1)
    layout = config.layout(len(containers))
    classifications = classify_all(containers, current, config.coefficients)
    registry = {c.id: c for c in containers}
    schedule_before = build_schedule(containers, params, current)

    plan: SegmentPlan | None = None
    if scenario is Scenario.RANDOM_NO_SEG:
        yard = random_yard(containers, layout, params, seed_used)
    else:
        plan = partition_segments(layout, category_census(classifications), params)
        if scenario is Scenario.RANDOM_SEG:
            yard = random_yard(containers, layout, params, seed_used, plan, classifications)
        else:
            model = PlacementModel(
                layout=layout,
                params=params,
                containers=containers,
                classifications=classifications,
                plan=plan,
                weights=config.weights,
            )
            solved = solve_batch(model, config.solver_budget)
            yard = YardState(layout, params, {}, segment_map=plan.bay_map())
            yard = apply_plan(yard, solved)

    schedule_after = schedule_before
    report: RebalanceReport | None = None
    if scenario is Scenario.IPS:
        keys: dict[str, PickupKey] = pickup_keys(containers, classifications)

        def on_created(cid: str, block: int) -> None:
            nonlocal yard
            booked = registry[cid].with_appointment(block)
            registry[cid] = booked
            keys[cid] = pickup_key(booked, classifications[cid])
            try:
                move_plan = reposition(
                    yard, booked, classifications[cid], keys, plan, config.weights
                )
            except SegmentFullError:
                return
            yard = apply_plan(yard, move_plan)

        unappointed = [c for c in containers if c.appointment_block is None]
        schedule_after, report = run_recursive(
            schedule_before, registry, classifications, unappointed, on_created
        )

    pt, m, series, rehandles = evaluate_day(yard, plan, schedule_after, params)
    return ScenarioResult(
        scenario=scenario,
        pt=pt,
        m=m,
        histogram=series,
        seed=seed_used,
        rehandles=rehandles,
        yard=yard,
        plan=plan,
        schedule_before=schedule_before,
        schedule_after=schedule_after,
        rebalance_report=report,
    )


def run_ladder(
    containers: Sequence[Container],
    config: EngineConfig,
    seed: int | None = None,
) -> dict[Scenario, ScenarioResult]:
    """All four scenarios on the same manifest and seed."""
    return {s: run_scenario(containers, s, config, seed) for s in Scenario}


def histogram(
    schedule_before: Schedule, schedule_after: Schedule, params: TerminalParams
) -> list[HistogramRow]:
    """Per-block demand before/after rebalancing against the block capacity."""
    cap = params.block_capacity
    if len(schedule_before.blocks) != len(schedule_after.blocks):
        raise ValueError("schedules must cover the same blocks")
    return [
        HistogramRow(b.index, b.truck_count, a.truck_count, cap)
        for b, a in zip(schedule_before.blocks, schedule_after.blocks)
    ]


def format_report_text(results: Mapping[Scenario, ScenarioResult]) -> str:
    """Key/value report, one section per scenario, stable across runs."""
    lines: list[str] = []
    for scenario in sorted(results):
        r = results[scenario]
        lines.append(f"scenario: {int(scenario)}")
        lines.append(f"label: {SCENARIO_LABELS[scenario]}")
        lines.append(f"pt: {_fmt_pt(r.pt)}")
        lines.append(f"m: {r.m}")
        lines.append(f"seed: {r.seed}")
        lines.append(f"rehandles: {r.rehandles}")
        if r.rebalance_report is not None:
            lines.append(f"moves: {len(r.rebalance_report.moves)}")
            lines.append(f"created: {len(r.rebalance_report.created)}")
        for row in r.histogram:
            lines.append(
                f"block.{row.index}: demand={row.demand} serviced={row.serviced} capacity={row.capacity}"
            )
        lines.append("")
    if len(results) == len(Scenario):
        report = compare_scenarios(results)
        lines.append(f"throughput_gain: {report.t_throughput:.4f}")
        lines.append(f"pt_improvement: {report.pt_improve:.4f}")
        lines.append("")
    return "\n".join(lines)


def format_report_csv(results: Mapping[Scenario, ScenarioResult]) -> str:
    lines = ["scenario,pt,m,seed"]
    for scenario in sorted(results):
        r = results[scenario]
        lines.append(f"{int(scenario)},{_fmt_pt(r.pt)},{r.m},{r.seed}")
    return "\n".join(lines) + "\n"


def _fmt_pt(pt: float | None) -> str:
    return "undefined" if pt is None else f"{pt:.4f}"
