from __future__ import annotations

from datetime import date

import pytest

from yardflow.model import Container, Slot, TerminalParams, YardLayout, YardState


def make_container(cid: str = "C0001", **overrides) -> Container:
    fields = dict(
        id=cid,
        arrival_date=date(2024, 3, 10),
        free_days=5,
        weight_tons=20.0,
        pickup_probability=0.8,
        consignee_id="CONS-A",
        owner_id="OWN-A",
        destination="Chicago",
        cargo_type="general",
        carrier_id="CARR-A",
        carrier_visits_per_month=6,
        appointment_block=None,
    )
    fields.update(overrides)
    return Container(**fields)


@pytest.fixture
def params() -> TerminalParams:
    # gate: 2 lanes, 1 min clearance, IO = 30 -> per-block capacity 60
    return TerminalParams()


@pytest.fixture
def small_params() -> TerminalParams:
    # 6-minute clearance over 2 lanes, IO = 30 -> per-block capacity 10
    return TerminalParams(clear_minutes=6.0, max_tier=3)


@pytest.fixture
def layout() -> YardLayout:
    return YardLayout(bays=6, rows=2, entry_gate=(5, 1), exit_gate=(0, 0))


def yard_with(
    layout: YardLayout,
    params: TerminalParams,
    placements: dict[str, tuple[int, int, int]],
    segment_map: dict[int, str] | None = None,
) -> YardState:
    seg = segment_map or {}
    placement = {
        cid: Slot(b, r, t, seg.get(b, "")) for cid, (b, r, t) in placements.items()
    }
    return YardState(layout, params, placement, segment_map=segment_map)
