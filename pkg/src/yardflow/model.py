"""Domain model: containers, terminal parameters, yard geometry, and stack state.

Everything here is a plain value type. Yard snapshots are updated functionally
(`with_container` / `without_container` return new states), so snapshots can be
shared freely between the solver, the scheduler, and the service.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date
from enum import Enum
from typing import Iterable, Mapping


class VisitOrigin(str, Enum):
    """How a truck visit entered the schedule."""

    PRE_EXISTING = "pre_existing"
    IPS_CREATED = "ips_created"


@dataclass(frozen=True)
class Container:
    """One import container and the attributes that drive stacking and scheduling."""

    id: str
    arrival_date: date
    free_days: int
    weight_tons: float
    pickup_probability: float
    consignee_id: str
    owner_id: str
    destination: str
    cargo_type: str = "general"
    carrier_id: str | None = None
    carrier_visits_per_month: int = 0
    appointment_block: int | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("container id must be non-empty")
        if self.weight_tons <= 0:
            raise ValueError(f"{self.id}: weight_tons must be > 0, got {self.weight_tons}")
        if not 0.0 <= self.pickup_probability <= 1.0:
            raise ValueError(
                f"{self.id}: pickup_probability must be in [0, 1], got {self.pickup_probability}"
            )
        if self.free_days < 0:
            raise ValueError(f"{self.id}: free_days must be >= 0, got {self.free_days}")
        if self.carrier_visits_per_month < 0:
            raise ValueError(f"{self.id}: carrier_visits_per_month must be >= 0")

    def with_appointment(self, block: int) -> "Container":
        return replace(self, appointment_block=block)


@dataclass(frozen=True)
class TerminalParams:
    """Gate and handling parameters for one terminal.

    ``block_capacity`` is derived, not configured: it is the truck count at which
    gate departure time exactly equals the internal operation time, so the
    congestion rule and the per-block serviceable maximum stay consistent.
    """

    gate_lanes: int = 2          # trucks serviceable simultaneously at the clearance gate
    clear_minutes: float = 1.0   # single-truck gate clearance
    load_minutes: float = 25.0
    inspect_minutes: float = 5.0
    rehandle_minutes: float = 6.0  # evaluator penalty per extra container move at pickup
    max_waiting_trucks: int = 60   # planning bound on trucks able to wait in the yard
    blocks_per_day: int = 9
    block_minutes: int = 60
    max_tier: int = 4

    def __post_init__(self) -> None:
        if self.gate_lanes < 1:
            raise ValueError("gate_lanes must be >= 1")
        if self.clear_minutes <= 0:
            raise ValueError("clear_minutes must be > 0")
        if self.load_minutes <= 0:
            raise ValueError("load_minutes must be > 0")
        if self.inspect_minutes < 0 or self.rehandle_minutes < 0:
            raise ValueError("inspect_minutes and rehandle_minutes must be >= 0")
        if self.max_waiting_trucks < 1:
            raise ValueError("max_waiting_trucks must be >= 1")
        if self.blocks_per_day < 1:
            raise ValueError("blocks_per_day must be >= 1")
        if self.block_minutes <= 0:
            raise ValueError("block_minutes must be > 0")
        if self.max_tier < 1:
            raise ValueError("max_tier must be >= 1")
        if self.block_capacity < 1:
            raise ValueError(
                "derived block capacity must be >= 1; check gate_lanes/clear/load/inspect"
            )

    @property
    def io_minutes(self) -> float:
        """Internal operation time: loading plus inspection."""
        return self.load_minutes + self.inspect_minutes

    @property
    def block_capacity(self) -> int:
        """Largest per-block truck count that does not push departure time past IO."""
        return math.floor(self.io_minutes * self.gate_lanes / self.clear_minutes)


@dataclass(frozen=True, order=True)
class Slot:
    """A single stack position: bay/row locate the stack, tier the height (0 = ground)."""

    bay: int
    row: int
    tier: int
    segment_id: str = ""

    def __post_init__(self) -> None:
        if self.bay < 0 or self.row < 0 or self.tier < 0:
            raise ValueError(f"slot coordinates must be >= 0, got {self}")

    @property
    def stack(self) -> tuple[int, int]:
        return (self.bay, self.row)


@dataclass(frozen=True)
class YardLayout:
    """Rectangular yard grid with gate positions on the boundary."""

    bays: int
    rows: int
    entry_gate: tuple[int, int]
    exit_gate: tuple[int, int]
    expected_census: int = 0

    def __post_init__(self) -> None:
        if self.bays < 1 or self.rows < 1:
            raise ValueError("layout must have at least one bay and one row")
        if self.entry_gate == self.exit_gate:
            raise ValueError("entry and exit gates must differ")
        if self.expected_census < 0:
            raise ValueError("expected_census must be >= 0")

    def capacity(self, max_tier: int) -> int:
        return self.bays * self.rows * max_tier

    def stacks(self) -> Iterable[tuple[int, int]]:
        for bay in range(self.bays):
            for row in range(self.rows):
                yield (bay, row)


@dataclass(frozen=True)
class TruckVisit:
    """A booked pickup within one time block.

    ``booked_at`` is a monotonically increasing sequence number; rebalancing
    evicts latest-booked-first, so it fixes the eviction order deterministically.
    """

    container_id: str
    carrier_id: str | None
    booked_at: int
    origin: VisitOrigin = VisitOrigin.PRE_EXISTING


@dataclass
class TimeBlock:
    """One appointment window of the operational day."""

    index: int
    visits: list[TruckVisit] = field(default_factory=list)

    @property
    def truck_count(self) -> int:
        return len(self.visits)

    def copy(self) -> "TimeBlock":
        return TimeBlock(self.index, list(self.visits))


@dataclass(frozen=True)
class Violation:
    """One yard-state consistency failure reported by validate_yard."""

    kind: str
    detail: str


class YardState:
    """Immutable-by-convention occupancy snapshot of the yard.

    ``segment_map`` (bay -> segment label), when present, lets validation check
    that every slot's segment label matches the partition geometry.
    """

    def __init__(
        self,
        layout: YardLayout,
        params: TerminalParams,
        placement: Mapping[str, Slot] | None = None,
        segment_map: Mapping[int, str] | None = None,
    ) -> None:
        self.layout = layout
        self.params = params
        self.placement: dict[str, Slot] = dict(placement or {})
        self.segment_map = dict(segment_map) if segment_map is not None else None
        self._stacks: dict[tuple[int, int], dict[int, str]] = {}
        for cid, slot in self.placement.items():
            self._stacks.setdefault(slot.stack, {})[slot.tier] = cid

    @property
    def census(self) -> int:
        return len(self.placement)

    def slot_of(self, container_id: str) -> Slot:
        try:
            return self.placement[container_id]
        except KeyError:
            raise KeyError(f"container {container_id!r} is not placed in the yard") from None

    def stack_tiers(self, bay: int, row: int) -> dict[int, str]:
        return dict(self._stacks.get((bay, row), {}))

    def stack_height(self, bay: int, row: int) -> int:
        tiers = self._stacks.get((bay, row))
        return (max(tiers) + 1) if tiers else 0

    def occupied(self, slot: Slot) -> bool:
        return self._stacks.get(slot.stack, {}).get(slot.tier) is not None

    def containers_above(self, container_id: str) -> int:
        slot = self.slot_of(container_id)
        tiers = self._stacks.get(slot.stack, {})
        return sum(1 for tier in tiers if tier > slot.tier)

    def with_container(self, container_id: str, slot: Slot) -> "YardState":
        if container_id in self.placement:
            raise ValueError(f"container {container_id!r} is already placed")
        placement = dict(self.placement)
        placement[container_id] = slot
        return YardState(self.layout, self.params, placement, self.segment_map)

    def without_container(self, container_id: str) -> "YardState":
        placement = dict(self.placement)
        if container_id not in placement:
            raise KeyError(f"container {container_id!r} is not placed in the yard")
        del placement[container_id]
        return YardState(self.layout, self.params, placement, self.segment_map)

    def validate(self) -> list[Violation]:
        violations: list[Violation] = []
        seen: dict[tuple[int, int, int], str] = {}
        for cid in sorted(self.placement):
            slot = self.placement[cid]
            key = (slot.bay, slot.row, slot.tier)
            if key in seen:
                violations.append(
                    Violation(
                        "duplicate_occupancy",
                        f"{cid} and {seen[key]} both occupy bay {slot.bay} row {slot.row} tier {slot.tier}",
                    )
                )
            else:
                seen[key] = cid
            if slot.tier >= self.params.max_tier:
                violations.append(
                    Violation("tier_bound", f"{cid} at tier {slot.tier} >= max tier {self.params.max_tier}")
                )
            if slot.bay >= self.layout.bays or slot.row >= self.layout.rows:
                violations.append(
                    Violation("out_of_bounds", f"{cid} at bay {slot.bay} row {slot.row} is outside the yard")
                )
            if self.segment_map is not None:
                expected = self.segment_map.get(slot.bay)
                if slot.segment_id and expected is not None and slot.segment_id != expected:
                    violations.append(
                        Violation(
                            "segment_mismatch",
                            f"{cid} labelled {slot.segment_id} but bay {slot.bay} belongs to {expected}",
                        )
                    )
        for (bay, row), tiers in sorted(self._stacks.items()):
            for tier in sorted(tiers):
                if tier > 0 and (tier - 1) not in tiers:
                    violations.append(
                        Violation(
                            "gravity",
                            f"{tiers[tier]} floats at bay {bay} row {row} tier {tier} (tier below empty)",
                        )
                    )
        return violations


def containers_above(yard: YardState, container_id: str) -> int:
    """Number of occupied tiers strictly above a placed container."""
    return yard.containers_above(container_id)


def validate_yard(yard: YardState) -> list[Violation]:
    """All consistency violations in the snapshot; empty list means the yard is sound."""
    return yard.validate()
