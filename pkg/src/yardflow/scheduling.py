"""Gate-time model, congestion detection, and appointment rebalancing.

A block is congested when its truck count pushes gate departure time strictly
past the internal operation time. Rebalancing evicts the latest bookings from
congested blocks into the nearest block with slack, then slack filling offers
new appointments to unappointed containers; the recursive driver alternates
the two until the schedule stops changing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Callable, Mapping, Sequence

from .classify import Category, Classification, StackClass
from .model import Container, TerminalParams, TimeBlock, TruckVisit, VisitOrigin

_FILL_RANK = {StackClass.C3: 0, StackClass.C2: 1, StackClass.C1: 2}


@dataclass
class Schedule:
    """One operational day of appointment blocks."""

    day: date
    blocks: list[TimeBlock]
    params: TerminalParams

    def __post_init__(self) -> None:
        if len(self.blocks) != self.params.blocks_per_day:
            raise ValueError(
                f"expected {self.params.blocks_per_day} blocks, got {len(self.blocks)}"
            )
        for i, block in enumerate(self.blocks):
            if block.index != i:
                raise ValueError("block indices must be contiguous from 0")
        seen: set[str] = set()
        for block in self.blocks:
            for visit in block.visits:
                if visit.container_id in seen:
                    raise ValueError(f"{visit.container_id} appears in two blocks")
                seen.add(visit.container_id)

    @classmethod
    def empty(cls, day: date, params: TerminalParams) -> "Schedule":
        return cls(day, [TimeBlock(i) for i in range(params.blocks_per_day)], params)

    def copy(self) -> "Schedule":
        return Schedule(self.day, [b.copy() for b in self.blocks], self.params)

    @property
    def total_visits(self) -> int:
        return sum(b.truck_count for b in self.blocks)

    def counts(self) -> list[int]:
        return [b.truck_count for b in self.blocks]

    def block_of(self, container_id: str) -> int | None:
        for block in self.blocks:
            for visit in block.visits:
                if visit.container_id == container_id:
                    return block.index
        return None

    def next_booking_seq(self) -> int:
        top = -1
        for block in self.blocks:
            for visit in block.visits:
                top = max(top, visit.booked_at)
        return top + 1


@dataclass(frozen=True)
class Move:
    container_id: str
    from_block: int
    to_block: int
    reason: str


@dataclass(frozen=True)
class CreatedAppointment:
    container_id: str
    block: int


@dataclass
class RebalanceReport:
    moves: list[Move] = field(default_factory=list)
    created: list[CreatedAppointment] = field(default_factory=list)
    iterations: int = 0
    converged: bool = True

    def merge(self, other: "RebalanceReport") -> None:
        self.moves.extend(other.moves)
        self.created.extend(other.created)
        self.iterations += other.iterations
        self.converged = self.converged and other.converged


def internal_op_time(params: TerminalParams) -> float:
    """Minutes a truck spends being loaded and inspected."""
    return params.io_minutes


def departure_time(truck_count: int, params: TerminalParams) -> float:
    """Minutes for `truck_count` trucks to clear the exit gate.

    Callers pass the live block count for congestion checks and the yard's
    planning bound for capacity analysis.
    """
    if truck_count < 0:
        raise ValueError("truck count must be >= 0")
    return truck_count / params.gate_lanes * params.clear_minutes


def processing_time(truck_count: int, params: TerminalParams) -> float:
    """Departure time plus internal operation time."""
    return departure_time(truck_count, params) + internal_op_time(params)


def block_capacity(params: TerminalParams) -> int:
    """Largest per-block count whose departure time stays within IO."""
    return params.block_capacity


def detect_congestion(schedule: Schedule) -> list[tuple[int, int]]:
    """(block index, excess over capacity) for blocks where DT strictly exceeds IO.

    For integer counts, DT > IO is exactly count > block_capacity, so the check
    is integer-exact.
    """
    cap = schedule.params.block_capacity
    return [
        (block.index, block.truck_count - cap)
        for block in schedule.blocks
        if block.truck_count > cap
    ]


def deadline_block(container: Container, schedule: Schedule) -> int | None:
    """Last block the container may legally be booked into, or None if unbound.

    The deadline is the final block of the last free day; it only binds when the
    schedule's day IS that last day. Demurrage containers are already late and
    carry no deadline.
    """
    if container.free_days <= 0:
        return None
    last_free = container.arrival_date + timedelta(days=container.free_days - 1)
    if schedule.day == last_free:
        return schedule.params.blocks_per_day - 1
    return None


def rebalance(
    schedule: Schedule,
    containers: Mapping[str, Container],
) -> tuple[Schedule, RebalanceReport]:
    """Shift bookings out of congested blocks until none remain or nothing can move.

    Blocks are scanned chronologically; a congested block sheds its latest
    bookings first, each landing in the earliest later block with slack that
    respects the container's deadline, else the earliest earlier block with
    slack, else staying put as unresolvable.
    """
    out = schedule.copy()
    report = RebalanceReport()
    cap = out.params.block_capacity
    unresolved: set[str] = set()
    guard = max(out.total_visits, 1)
    for _ in range(guard):
        moved = False
        for block in out.blocks:
            attempts = block.truck_count - cap  # evict only the excess
            while block.truck_count > cap and attempts > 0:
                attempts -= 1
                movable = [v for v in block.visits if v.container_id not in unresolved]
                if not movable:
                    break
                victim = max(movable, key=lambda v: v.booked_at)
                limit = None
                container = containers.get(victim.container_id)
                if container is not None:
                    limit = deadline_block(container, out)
                target = None
                for later in out.blocks[block.index + 1 :]:
                    if later.truck_count < cap and (limit is None or later.index <= limit):
                        target = later
                        break
                if target is None:
                    for earlier in out.blocks[: block.index]:
                        if earlier.truck_count < cap:
                            target = earlier
                            break
                if target is None:
                    unresolved.add(victim.container_id)
                    report.moves.append(
                        Move(victim.container_id, block.index, block.index, "unresolvable")
                    )
                    continue
                block.visits.remove(victim)
                target.visits.append(victim)
                report.moves.append(
                    Move(victim.container_id, block.index, target.index, "congestion")
                )
                moved = True
        if not moved:
            break
        report.iterations += 1
    report.converged = True
    return out, report


def fill_slack(
    schedule: Schedule,
    candidates: Sequence[Container],
    classifications: Mapping[str, Classification],
) -> tuple[Schedule, RebalanceReport]:
    """Offer new appointments into under-capacity blocks, earliest block first.

    Demurrage containers go before in-free-period ones, then by stack class
    (C3 first), remaining free days, and id. Never lifts a block past capacity.
    """
    out = schedule.copy()
    report = RebalanceReport()
    cap = out.params.block_capacity
    seq = out.next_booking_seq()
    eligible = [c for c in candidates if c.appointment_block is None]
    eligible.sort(
        key=lambda c: (
            0 if classifications[c.id].category is Category.CAT3 else 1,
            _FILL_RANK[classifications[c.id].stack_class],
            classifications[c.id].remaining_free_days,
            c.id,
        )
    )
    for container in eligible:
        limit = deadline_block(container, out)
        target = None
        for block in out.blocks:
            if block.truck_count < cap and (limit is None or block.index <= limit):
                target = block
                break
        if target is None:
            break
        target.visits.append(
            TruckVisit(container.id, container.carrier_id, seq, VisitOrigin.IPS_CREATED)
        )
        seq += 1
        report.created.append(CreatedAppointment(container.id, target.index))
    return out, report


def run_recursive(
    schedule: Schedule,
    containers: Mapping[str, Container],
    classifications: Mapping[str, Classification],
    unappointed: Sequence[Container],
    on_created: Callable[[str, int], None] | None = None,
) -> tuple[Schedule, RebalanceReport]:
    """Alternate rebalance and slack filling until the schedule is a fixed point.

    Every created appointment is announced through ``on_created`` so the caller
    can re-place the container in the yard.
    """
    current = schedule
    total = RebalanceReport(iterations=0)
    pending = [c for c in unappointed if c.appointment_block is None]
    registry = dict(containers)
    guard = schedule.total_visits + len(pending) + 2
    for _ in range(guard):
        current, shift_report = rebalance(current, registry)
        current, fill_report = fill_slack(current, pending, classifications)
        for created in fill_report.created:
            if on_created is not None:
                on_created(created.container_id, created.block)
            booked = registry[created.container_id].with_appointment(created.block)
            registry[created.container_id] = booked
            pending = [c for c in pending if c.id != created.container_id]
        total.moves.extend(shift_report.moves)
        total.created.extend(fill_report.created)
        if not shift_report.moves and not fill_report.created:
            break
        total.iterations += 1
    total.converged = not detect_congestion(current)
    return current, total
