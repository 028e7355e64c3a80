"""Yard segmentation and slot assignment.

The assignment search positions containers within their category's segment to
minimize a weighted objective: expected rehandles at pickup, relocations of
already-placed containers, and stack-order violations (a container stacked
above one that leaves earlier). The batch solver is an exact best-first
branch-and-bound for small instances and degrades to its best incumbent under
a node budget; the greedy solver is the fast fallback and the warm start.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .classify import Category, Classification, StackClass
from .model import Container, Slot, TerminalParams, YardLayout, YardState

PickupKey = tuple[int, int, int, str]

_CLASS_RANK = {StackClass.C3: 0, StackClass.C2: 1, StackClass.C1: 2}

_SEGMENT_FOR_CATEGORY = {
    Category.CAT1: "S1",
    Category.CAT2: "S2",
    Category.CAT3: "S3",
}


class PlacementError(Exception):
    """Base class for solver failures."""


class InfeasibleModelError(PlacementError):
    """Containers cannot all fit the slots open to them."""

    def __init__(self, message: str, deficits: dict[str, int] | None = None) -> None:
        super().__init__(message)
        self.deficits = deficits or {}


class SegmentFullError(PlacementError):
    """No feasible slot remains in the container's segment."""


class SegmentSizingError(Exception):
    """A segment partition cannot hold its category's census."""

    def __init__(self, message: str, deficits: dict[str, int] | None = None) -> None:
        super().__init__(message)
        self.deficits = deficits or {}


class Optimality(str, Enum):
    PROVEN_OPTIMAL = "proven_optimal"
    HEURISTIC = "heuristic"


@dataclass(frozen=True)
class ObjectiveWeights:
    """Relative cost of a rehandle, a relocation, and a stack-order violation."""

    rehandle: float = 1.0
    relocation: float = 2.0
    zorder: float = 1.0


@dataclass(frozen=True)
class Segment:
    id: str
    bay_start: int
    bay_stop: int  # exclusive
    capacity: int

    @property
    def bay_count(self) -> int:
        return self.bay_stop - self.bay_start


@dataclass(frozen=True)
class SegmentPlan:
    """Three contiguous bay ranges, one per operational category."""

    segments: tuple[Segment, Segment, Segment]

    def segment(self, seg_id: str) -> Segment:
        for seg in self.segments:
            if seg.id == seg_id:
                return seg
        raise KeyError(seg_id)

    def segment_of_bay(self, bay: int) -> str:
        for seg in self.segments:
            if seg.bay_start <= bay < seg.bay_stop:
                return seg.id
        raise KeyError(f"bay {bay} is outside every segment")

    def bay_map(self) -> dict[int, str]:
        return {
            bay: seg.id for seg in self.segments for bay in range(seg.bay_start, seg.bay_stop)
        }

    @staticmethod
    def segment_for_category(category: Category) -> str:
        return _SEGMENT_FOR_CATEGORY[category]


def partition_segments(
    layout: YardLayout,
    category_census: Mapping[Category, int],
    params: TerminalParams,
) -> SegmentPlan:
    """Split the bays into S1/S2/S3 proportionally to the category census.

    S1 sits nearest the exit gate and S3 nearest the entry gate. Each segment
    gets at least one bay; bays move from slack segments to deficient ones when
    proportional rounding leaves a category short.
    """
    census = [
        int(category_census.get(Category.CAT1, 0)),
        int(category_census.get(Category.CAT2, 0)),
        int(category_census.get(Category.CAT3, 0)),
    ]
    if any(n < 0 for n in census):
        raise ValueError("census counts must be >= 0")
    total = sum(census)
    per_bay = layout.rows * params.max_tier
    if total > layout.capacity(params.max_tier):
        raise SegmentSizingError(
            f"census {total} exceeds yard capacity {layout.capacity(params.max_tier)}",
            deficits={"yard": total - layout.capacity(params.max_tier)},
        )
    if layout.bays < 3:
        raise SegmentSizingError("need at least three bays to give each segment one")

    counts = _largest_remainder(census, layout.bays)

    # Repair rounding/minimum-bay shortfalls by pulling bays from slack segments.
    while True:
        deficits = {
            i: census[i] - counts[i] * per_bay
            for i in range(3)
            if counts[i] * per_bay < census[i]
        }
        if not deficits:
            break
        donors = [
            j
            for j in range(3)
            if counts[j] > 1 and (counts[j] - 1) * per_bay >= census[j]
        ]
        if not donors:
            raise SegmentSizingError(
                "segment capacities cannot cover the census",
                deficits={f"S{i + 1}": gap for i, gap in sorted(deficits.items())},
            )
        needy = max(deficits, key=lambda i: (deficits[i], -i))
        donor = max(donors, key=lambda j: ((counts[j] - 1) * per_bay - census[j], -j))
        counts[donor] -= 1
        counts[needy] += 1

    # Orientation: S1 takes the bay end closer to the exit gate.
    exit_low = layout.exit_gate[0] <= layout.entry_gate[0]
    ordered = counts if exit_low else list(reversed(counts))
    names = ("S1", "S2", "S3") if exit_low else ("S3", "S2", "S1")
    segments: list[Segment] = []
    start = 0
    for name, n in zip(names, ordered):
        segments.append(Segment(name, start, start + n, n * per_bay))
        start += n
    segments.sort(key=lambda seg: seg.id)
    return SegmentPlan(segments=tuple(segments))  # type: ignore[arg-type]


def _largest_remainder(weights: Sequence[int], units: int) -> list[int]:
    w = list(weights) if sum(weights) > 0 else [1] * len(weights)
    total = sum(w)
    quotas = [x / total * units for x in w]
    counts = [int(q) for q in quotas]
    leftover = units - sum(counts)
    by_frac = sorted(range(len(w)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in by_frac[:leftover]:
        counts[i] += 1
    # Guarantee one bay per segment.
    for i in range(len(counts)):
        while counts[i] == 0:
            donor = max(range(len(counts)), key=lambda j: (counts[j], -j))
            if counts[donor] <= 1:
                raise SegmentSizingError("not enough bays for one per segment")
            counts[donor] -= 1
            counts[i] += 1
    return counts


def pickup_key(container: Container, classification: Classification) -> PickupKey:
    """Sort key for expected pickup order.

    Appointed containers leave in block order; the rest leave by stack class
    (C3 soonest), with remaining free days and id as deterministic ties.
    """
    rem = classification.remaining_free_days
    if container.appointment_block is not None:
        return (0, container.appointment_block, rem, container.id)
    return (1, _CLASS_RANK[classification.stack_class], rem, container.id)


def pickup_keys(
    containers: Iterable[Container],
    classifications: Mapping[str, Classification],
) -> dict[str, PickupKey]:
    return {c.id: pickup_key(c, classifications[c.id]) for c in containers}


def retrieval_order(keys: Mapping[str, PickupKey]) -> list[str]:
    return sorted(keys, key=keys.__getitem__)


class StackGrid:
    """Mutable working copy of the yard used by the solvers and the evaluator."""

    __slots__ = ("max_tier", "stacks", "segment_of", "loc", "_keys_sorted")

    def __init__(
        self,
        stack_keys: Sequence[tuple[int, int]],
        segment_of: Mapping[tuple[int, int], str],
        max_tier: int,
    ) -> None:
        self.max_tier = max_tier
        self.stacks: dict[tuple[int, int], list[str]] = {k: [] for k in stack_keys}
        self.segment_of = dict(segment_of)
        self.loc: dict[str, tuple[int, int]] = {}
        self._keys_sorted = sorted(self.stacks)

    @classmethod
    def from_yard(cls, yard: YardState, plan: SegmentPlan | None = None) -> "StackGrid":
        seg_map: dict[tuple[int, int], str] = {}
        bay_map = plan.bay_map() if plan is not None else (yard.segment_map or {})
        keys = list(yard.layout.stacks())
        for k in keys:
            seg_map[k] = bay_map.get(k[0], "")
        grid = cls(keys, seg_map, yard.params.max_tier)
        for (bay, row) in keys:
            tiers = yard.stack_tiers(bay, row)
            for tier in sorted(tiers):
                cid = tiers[tier]
                grid.stacks[(bay, row)].append(cid)
                grid.loc[cid] = (bay, row)
        return grid

    def clone(self) -> "StackGrid":
        other = StackGrid.__new__(StackGrid)
        other.max_tier = self.max_tier
        other.stacks = {k: list(v) for k, v in self.stacks.items()}
        other.segment_of = self.segment_of
        other.loc = dict(self.loc)
        other._keys_sorted = self._keys_sorted
        return other

    def push(self, cid: str, stack: tuple[int, int]) -> None:
        contents = self.stacks[stack]
        if len(contents) >= self.max_tier:
            raise PlacementError(f"stack {stack} is full")
        contents.append(cid)
        self.loc[cid] = stack

    def remove(self, cid: str) -> None:
        stack = self.loc.pop(cid)
        self.stacks[stack].remove(cid)

    def _drop_target(self, origin: tuple[int, int]) -> tuple[int, int] | None:
        segment = self.segment_of.get(origin, "")
        for key in self._keys_sorted:
            if key == origin or len(self.stacks[key]) >= self.max_tier:
                continue
            if self.segment_of.get(key, "") == segment:
                return key
        for key in self._keys_sorted:
            if key != origin and len(self.stacks[key]) < self.max_tier:
                return key
        return None

    def retrieve(self, cid: str) -> int:
        """Pull a container, relocating blockers above it; returns the move count.

        Blockers drop onto the first same-segment stack with space (lowest bay,
        then row), falling back to any stack, then back onto the origin stack
        once the target is out.
        """
        origin = self.loc[cid]
        stack = self.stacks[origin]
        idx = stack.index(cid)
        blockers = stack[idx + 1 :]
        del stack[idx:]
        del self.loc[cid]
        held: list[str] = []
        for blocker in reversed(blockers):  # top blocker moves first
            target = self._drop_target(origin)
            if target is None:
                held.append(blocker)
            else:
                self.stacks[target].append(blocker)
                self.loc[blocker] = target
        for blocker in reversed(held):  # restore original order minus the target
            stack.append(blocker)
            self.loc[blocker] = origin
        return len(blockers)

    def zorder_violations(self, keys: Mapping[str, PickupKey]) -> int:
        count = 0
        for contents in self.stacks.values():
            for i in range(len(contents)):
                below = keys[contents[i]]
                for j in range(i + 1, len(contents)):
                    if keys[contents[j]] > below:
                        count += 1
        return count

    def simulate_rehandles(self, order: Sequence[str]) -> int:
        sim = self.clone()
        total = 0
        for cid in order:
            if cid in sim.loc:
                total += sim.retrieve(cid)
        return total

    def objective(
        self,
        keys: Mapping[str, PickupKey],
        weights: ObjectiveWeights,
        relocations: int = 0,
    ) -> float:
        order = sorted(self.loc, key=keys.__getitem__)
        return (
            weights.rehandle * self.simulate_rehandles(order)
            + weights.relocation * relocations
            + weights.zorder * self.zorder_violations(keys)
        )


def zorder_violations(yard: YardState, keys: Mapping[str, PickupKey]) -> int:
    """Pairs (a above b, same stack) where a is expected to leave after b."""
    return StackGrid.from_yard(yard).zorder_violations(keys)


def expected_rehandles(yard: YardState, order: Sequence[str]) -> int:
    """Total blocker moves when retrieving every container in pickup order."""
    return StackGrid.from_yard(yard).simulate_rehandles(order)


@dataclass
class PlacementModel:
    """Instance data for the assignment solvers.

    ``containers`` are the ones to place; anything already in ``base`` stays
    fixed underneath them. ``registry`` must resolve every placed id so pickup
    keys can be computed for the whole yard.
    """

    layout: YardLayout
    params: TerminalParams
    containers: Sequence[Container]
    classifications: Mapping[str, Classification]
    plan: SegmentPlan | None = None
    base: YardState | None = None
    registry: Mapping[str, Container] = field(default_factory=dict)
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)

    def all_keys(self) -> dict[str, PickupKey]:
        keys = pickup_keys(self.containers, self.classifications)
        if self.base is not None:
            for cid in self.base.placement:
                if cid not in keys:
                    keys[cid] = pickup_key(self.registry[cid], self.classifications[cid])
        return keys

    def allowed_segment(self, container: Container) -> str | None:
        if self.plan is None:
            return None
        return SegmentPlan.segment_for_category(self.classifications[container.id].category)


@dataclass
class PlacementPlan:
    """Solved assignment: slots for new containers plus any relocations."""

    assignment: dict[str, Slot]
    relocations: list[tuple[str, Slot, Slot]]
    objective_value: float
    optimality: Optimality


def _base_grid(model: PlacementModel) -> StackGrid:
    if model.base is not None:
        return StackGrid.from_yard(model.base, model.plan)
    bay_map = model.plan.bay_map() if model.plan is not None else {}
    keys = list(model.layout.stacks())
    seg_of = {k: bay_map.get(k[0], "") for k in keys}
    return StackGrid(keys, seg_of, model.params.max_tier)


def _allowed_stacks(model: PlacementModel, grid: StackGrid) -> dict[str, list[tuple[int, int]]]:
    allowed: dict[str, list[tuple[int, int]]] = {}
    for c in model.containers:
        seg = model.allowed_segment(c)
        if seg is None:
            allowed[c.id] = list(grid._keys_sorted)
        else:
            allowed[c.id] = [k for k in grid._keys_sorted if grid.segment_of.get(k) == seg]
    return allowed


def _check_feasible(model: PlacementModel, grid: StackGrid, allowed: Mapping[str, list]) -> None:
    ids = [c.id for c in model.containers]
    if len(set(ids)) != len(ids):
        raise InfeasibleModelError("duplicate container ids in model")
    demand: dict[str, int] = {}
    for c in model.containers:
        seg = model.allowed_segment(c) or ""
        demand[seg] = demand.get(seg, 0) + 1
        if not allowed[c.id]:
            raise InfeasibleModelError(f"{c.id} has no stack available in its segment")
    deficits: dict[str, int] = {}
    for seg, need in sorted(demand.items()):
        stacks = [
            k for k in grid._keys_sorted if seg == "" or grid.segment_of.get(k) == seg
        ]
        free = sum(grid.max_tier - len(grid.stacks[k]) for k in stacks)
        if need > free:
            deficits[seg or "yard"] = need - free
    if deficits:
        raise InfeasibleModelError(f"segment capacity short: {deficits}", deficits=deficits)


def _slot_for(grid: StackGrid, stack: tuple[int, int], tier: int) -> Slot:
    return Slot(stack[0], stack[1], tier, grid.segment_of.get(stack, ""))


def _assignment_from_grid(grid: StackGrid, new_ids: set[str]) -> dict[str, Slot]:
    result: dict[str, Slot] = {}
    for stack, contents in grid.stacks.items():
        for tier, cid in enumerate(contents):
            if cid in new_ids:
                result[cid] = _slot_for(grid, stack, tier)
    return result


def solve_greedy(model: PlacementModel) -> PlacementPlan:
    """Urgency-ordered construction: each container takes the cheapest open slot.

    Demurrage containers place first, then earlier pickups; slot ties break by
    bay, row, tier. Always reported as heuristic.
    """
    grid = _base_grid(model)
    allowed = _allowed_stacks(model, grid)
    _check_feasible(model, grid, allowed)
    keys = model.all_keys()
    order = sorted(
        model.containers,
        key=lambda c: (
            0 if model.classifications[c.id].category is Category.CAT3 else 1,
            keys[c.id],
            c.id,
        ),
    )
    new_ids = {c.id for c in model.containers}
    placed_keys: dict[str, PickupKey] = {cid: keys[cid] for cid in grid.loc}
    for c in order:
        candidates = [k for k in allowed[c.id] if len(grid.stacks[k]) < grid.max_tier]
        if not candidates:
            raise InfeasibleModelError(f"no open slot for {c.id}")
        placed_keys[c.id] = keys[c.id]
        best: tuple[float, tuple[int, int, int]] | None = None
        best_stack: tuple[int, int] | None = None
        for stack in candidates:
            tier = len(grid.stacks[stack])
            grid.push(c.id, stack)
            cost = grid.objective(placed_keys, model.weights)
            grid.remove(c.id)
            rank = (cost, (stack[0], stack[1], tier))
            if best is None or rank < best:
                best = rank
                best_stack = stack
        assert best_stack is not None
        grid.push(c.id, best_stack)
    objective = grid.objective(keys, model.weights)
    assignment = _assignment_from_grid(grid, new_ids)
    return PlacementPlan(assignment, [], objective, Optimality.HEURISTIC)


def solve_batch(model: PlacementModel, budget: int = 20000) -> PlacementPlan:
    """Best-first branch-and-bound over stack insertions.

    The bound counts only stack-order violations already forced by the partial
    assignment (rehandles and violations never decrease as containers are
    added), so the search is exact when it closes within ``budget`` node
    expansions; otherwise the best incumbent is returned marked heuristic.
    """
    if budget <= 0:
        raise ValueError("budget must be a positive node count")
    grid0 = _base_grid(model)
    allowed = _allowed_stacks(model, grid0)
    _check_feasible(model, grid0, allowed)
    keys = model.all_keys()
    new_ids = {c.id for c in model.containers}

    incumbent = solve_greedy(model)
    best_obj = incumbent.objective_value
    best_assignment = incumbent.assignment
    if not model.containers:
        return PlacementPlan({}, [], grid0.objective(keys, model.weights), Optimality.PROVEN_OPTIMAL)

    # Place latest pickups first so cheap completions surface early.
    order = sorted(model.containers, key=lambda c: keys[c.id], reverse=True)
    stack_index = {k: i for i, k in enumerate(grid0._keys_sorted)}
    index_stack = grid0._keys_sorted
    base_heights = {k: len(grid0.stacks[k]) for k in grid0._keys_sorted}
    gamma = model.weights.zorder

    def rebuild(path: bytes) -> StackGrid:
        grid = grid0.clone()
        for depth in range(0, len(path), 2):
            c = order[depth // 2]
            stack = index_stack[path[depth]]
            pos = base_heights[stack] + path[depth + 1]
            grid.stacks[stack].insert(pos, c.id)
            grid.loc[c.id] = stack
        return grid

    heap: list[tuple[float, bytes]] = [(gamma * grid0.zorder_violations(keys), b"")]
    expansions = 0
    dropped = False
    heap_cap = 250_000
    while heap:
        bound, path = heapq.heappop(heap)
        if bound >= best_obj:
            continue  # the incumbent already achieves this bound
        if expansions >= budget:
            dropped = True
            break
        expansions += 1
        depth = len(path) // 2
        grid = rebuild(path)
        if depth == len(order):
            obj = grid.objective(keys, model.weights)
            if obj < best_obj:
                best_obj = obj
                best_assignment = _assignment_from_grid(grid, new_ids)
            continue
        c = order[depth]
        key_c = keys[c.id]
        for stack in allowed[c.id]:
            contents = grid.stacks[stack]
            if len(contents) >= grid.max_tier:
                continue
            fixed = base_heights[stack]
            for pos in range(fixed, len(contents) + 1):
                added = 0
                for i, other in enumerate(contents):
                    if i < pos and key_c > keys[other]:
                        added += 1
                    elif i >= pos and keys[other] > key_c:
                        added += 1
                child_bound = bound + gamma * added
                if child_bound >= best_obj:
                    continue
                child = path + bytes((stack_index[stack], pos - fixed))
                heapq.heappush(heap, (child_bound, child))
        if len(heap) > heap_cap:
            heap.sort()
            del heap[heap_cap // 2 :]
            heapq.heapify(heap)
            dropped = True

    optimality = Optimality.HEURISTIC if (dropped or heap) else Optimality.PROVEN_OPTIMAL
    return PlacementPlan(dict(best_assignment), [], best_obj, optimality)


def apply_plan(yard: YardState, plan: PlacementPlan) -> YardState:
    """Fold a solved plan into a yard snapshot."""
    state = yard
    for cid, old, new in plan.relocations:
        state = state.without_container(cid).with_container(cid, new)
    for cid, slot in sorted(plan.assignment.items()):
        if cid in state.placement:
            if state.placement[cid] != slot:
                state = state.without_container(cid).with_container(cid, slot)
        else:
            state = state.with_container(cid, slot)
    return state


def _exit_distance(layout: YardLayout, stack: tuple[int, int]) -> int:
    gate = layout.exit_gate
    return abs(stack[0] - gate[0]) + abs(stack[1] - gate[1])


def place_incremental(
    yard: YardState,
    container: Container,
    classification: Classification,
    keys: Mapping[str, PickupKey],
    plan: SegmentPlan | None = None,
    weights: ObjectiveWeights = ObjectiveWeights(),
    allow_relocations: bool = True,
    segment_id: str | None = None,
) -> PlacementPlan:
    """Slot one new container into a live yard with minimal disruption.

    All relocation-free slots are scored first; a single relocation of a
    stack-top container is accepted only when it beats the relocation-free
    optimum by more than the relocation weight.
    """
    grid = StackGrid.from_yard(yard, plan)
    seg = segment_id
    if seg is None and plan is not None:
        seg = SegmentPlan.segment_for_category(classification.category)
    all_keys = dict(keys)
    all_keys[container.id] = pickup_key(container, classification)

    def open_stacks(g: StackGrid, segment: str | None) -> list[tuple[int, int]]:
        return [
            k
            for k in g._keys_sorted
            if len(g.stacks[k]) < g.max_tier
            and (segment is None or g.segment_of.get(k) == segment)
        ]

    def best_placement(g: StackGrid) -> tuple[float, tuple[int, int]] | None:
        best: tuple[float, tuple[int, int, int, int]] | None = None
        best_stack: tuple[int, int] | None = None
        for stack in open_stacks(g, seg):
            tier = len(g.stacks[stack])
            g.push(container.id, stack)
            cost = g.objective(all_keys, weights)
            g.remove(container.id)
            rank = (cost, (_exit_distance(yard.layout, stack), stack[0], stack[1], tier))
            if best is None or rank < best:
                best = rank
                best_stack = stack
        if best_stack is None:
            return None
        return best[0], best_stack

    free = best_placement(grid)
    if free is None:
        raise SegmentFullError(
            f"no open slot in segment {seg or 'yard'} for {container.id}"
        )
    free_cost, free_stack = free

    best_reloc: tuple[float, tuple[str, int, int], tuple[str, Slot, Slot], tuple[int, int]] | None = None
    if allow_relocations:
        movers = [
            contents[-1]
            for k, contents in sorted(grid.stacks.items())
            if contents and (seg is None or grid.segment_of.get(k) == seg)
        ]
        for mover in movers:
            origin = grid.loc[mover]
            mover_seg = grid.segment_of.get(origin)
            for target in open_stacks(grid, mover_seg):
                if target == origin:
                    continue
                trial = grid.clone()
                old_tier = len(trial.stacks[origin]) - 1
                trial.stacks[origin].pop()
                del trial.loc[mover]
                trial.push(mover, target)
                placed = best_placement(trial)
                if placed is None:
                    continue
                total = placed[0] + weights.relocation
                tie = (mover, target[0], target[1])
                move = (
                    mover,
                    _slot_for(grid, origin, old_tier),
                    _slot_for(trial, target, len(trial.stacks[target]) - 1),
                )
                if best_reloc is None or (total, tie) < best_reloc[:2]:
                    best_reloc = (total, tie, move, placed[1])

    relocations: list[tuple[str, Slot, Slot]] = []
    assignment: dict[str, Slot] = {}
    final = grid.clone()
    chosen_cost, chosen_stack = free_cost, free_stack
    if best_reloc is not None and free_cost > best_reloc[0]:
        chosen_cost, chosen_stack = best_reloc[0], best_reloc[3]
        mover, old_slot, new_slot = best_reloc[2]
        final.stacks[(old_slot.bay, old_slot.row)].pop()
        del final.loc[mover]
        final.push(mover, (new_slot.bay, new_slot.row))
        relocations.append(best_reloc[2])
        assignment[mover] = new_slot
    tier = len(final.stacks[chosen_stack])
    assignment[container.id] = _slot_for(final, chosen_stack, tier)
    return PlacementPlan(assignment, relocations, chosen_cost, Optimality.HEURISTIC)


def reposition(
    yard: YardState,
    container: Container,
    classification: Classification,
    keys: Mapping[str, PickupKey],
    plan: SegmentPlan | None = None,
    weights: ObjectiveWeights = ObjectiveWeights(),
) -> PlacementPlan:
    """Re-place an already-stored container after its pickup key changed.

    The container stays in the segment it occupies (new appointments do not
    promote it out of its section). Keeping the current slot costs nothing and
    moving costs the relocation weight, so it only moves when that pays off.
    Buried containers stay put: digging them out would itself create the moves
    the objective exists to avoid.
    """
    current = yard.slot_of(container.id)
    seg = current.segment_id or None
    all_keys = dict(keys)
    all_keys[container.id] = pickup_key(container, classification)
    full = StackGrid.from_yard(yard, plan)
    stay_cost = full.objective(all_keys, weights)
    origin = current.stack
    if full.stacks[origin][-1] != container.id:
        return PlacementPlan({container.id: current}, [], stay_cost, Optimality.HEURISTIC)

    grid = full.clone()
    grid.remove(container.id)
    best: tuple[float, tuple[int, int, int]] = (stay_cost, (-1, -1, -1))
    best_stack: tuple[int, int] | None = None
    for stack in grid._keys_sorted:
        if seg is not None and grid.segment_of.get(stack) != seg:
            continue
        if len(grid.stacks[stack]) >= grid.max_tier:
            continue
        if stack == origin:
            continue  # pushing back onto the origin is the stay case
        tier = len(grid.stacks[stack])
        grid.push(container.id, stack)
        cost = grid.objective(all_keys, weights) + weights.relocation
        grid.remove(container.id)
        rank = (cost, (stack[0], stack[1], tier))
        if rank < best:
            best = rank
            best_stack = stack
    if best_stack is None:
        return PlacementPlan({container.id: current}, [], stay_cost, Optimality.HEURISTIC)
    tier = len(grid.stacks[best_stack])
    slot = _slot_for(grid, best_stack, tier)
    return PlacementPlan(
        {container.id: slot}, [(container.id, current, slot)], best[0], Optimality.HEURISTIC
    )
