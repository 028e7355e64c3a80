#!/usr/bin/env python3
"""Generate the bundled 63-container demonstration manifest and its config.

Deterministic: re-running reproduces the committed files byte for byte.
The day is sized so the gate can service 45 trucks (9 blocks of 5) against
37 pre-booked appointments bunched into three congested blocks.
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from yardflow.metrics import Lcg64  # noqa: E402

OUT_CSV = ROOT / "src" / "yardflow" / "data" / "fixture_63.csv"
OUT_CONFIG = ROOT / "src" / "yardflow" / "data" / "fixture_config.json"

HEADER = (
    "container_id,arrival_date,free_days,weight_tons,cargo_type,pickup_probability,"
    "consignee_id,carrier_id,carrier_visits_per_month,owner_id,appointment_block,destination"
)

OWNERS = ["OWN-ALTA", "OWN-BOREA", "OWN-CREST", "OWN-DELTA", "OWN-EBB", "OWN-FJORD"]
CONSIGNEES = ["CONS-01", "CONS-02", "CONS-03", "CONS-04", "CONS-05", "CONS-06", "CONS-07", "CONS-08"]
CARRIERS = ["CARR-N", "CARR-E", "CARR-S", "CARR-W"]
DESTS = ["Chicago", "Columbus", "Memphis", "Atlanta", "Dallas", "Kansas City"]
CARGO = ["perishable", "retail", "electronics", "machinery", "general", "raw_materials"]

# Demand per hourly block: three congested spikes against a capacity of 5.
BLOCK_DEMAND = [9, 2, 1, 8, 3, 2, 7, 3, 2]  # 37 appointments

CURRENT = "2024-03-18"


def march(day: int) -> str:
    return f"2024-03-{day:02d}"


def main() -> None:
    rng = Lcg64(20240318)
    rows = []
    serial = 0

    def pick(seq):
        return seq[rng.below(len(seq))]

    def spread_weight(kind: int, free_days: int) -> tuple[float, float]:
        """(weight, probability) steering weight x prob x free_days into a class band."""
        if kind == 0:
            target = 0.5 + rng.below(28) / 10.0  # cargo value below ~3.6 -> C1
        elif kind == 1:
            target = 4.2 + rng.below(33) / 10.0  # ~4.2..7.5 -> C2
        else:
            target = 10.0 + rng.below(400) / 10.0  # 10..50 -> C3
        weight = 2.0 + rng.below(380) / 10.0
        prob = target / (weight * max(free_days, 1))
        while prob > 1.0:
            weight = min(weight * 2.0, 40.0)
            prob = target / (weight * max(free_days, 1))
        return weight, max(round(prob, 2), 0.01)

    def add_row(free_days: int, arrival_day: int, block: int | None, kind: int) -> None:
        nonlocal serial
        serial += 1
        cid = f"MSCU{serial:04d}"
        weight, prob = spread_weight(kind, free_days)
        cargo_value = weight * prob * max(free_days, 1)
        carrier = pick(CARRIERS) if block is not None or rng.below(3) > 0 else ""
        visits = 2 + rng.below(7) if carrier else 0
        rows.append(
            ",".join(
                [
                    cid,
                    march(arrival_day),
                    str(free_days),
                    f"{weight:.1f}",
                    CARGO[int(cargo_value) % len(CARGO)],
                    f"{prob:.2f}",
                    pick(CONSIGNEES),
                    carrier,
                    str(visits),
                    pick(OWNERS),
                    "" if block is None else str(block),
                    pick(DESTS),
                ]
            )
        )

    # 37 appointed, in the free period (category 1), bunched per BLOCK_DEMAND.
    for block, demand in enumerate(BLOCK_DEMAND):
        for _ in range(demand):
            free = 5 + rng.below(5)  # 5..9
            arrival = 18 - rng.below(4)  # 0..3 days ago
            add_row(free, arrival, block, kind=rng.below(3))

    # 16 unappointed, still in the free period (category 2).
    for _ in range(16):
        free = 5 + rng.below(5)
        arrival = 18 - rng.below(4)
        add_row(free, arrival, None, kind=rng.below(3))

    # 10 unappointed past their free days (category 3, demurrage).
    for _ in range(10):
        free = 1 + rng.below(4)  # 1..4
        arrival = 18 - free - 2 - rng.below(5)  # free days exhausted days ago
        add_row(free, arrival, None, kind=rng.below(3))

    OUT_CSV.write_text(HEADER + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {OUT_CSV} ({len(rows)} rows)")

    config = """{
  "terminal": {
    "gate_lanes": 2,
    "clear_minutes": 12.0,
    "load_minutes": 25.0,
    "inspect_minutes": 5.0,
    "rehandle_minutes": 6.0,
    "max_waiting_trucks": 5,
    "blocks_per_day": 9,
    "block_minutes": 60,
    "max_tier": 3
  },
  "yard": {
    "bays": 8,
    "rows": 4,
    "entry_gate": [7, 3],
    "exit_gate": [0, 0]
  },
  "weights": {
    "rehandle": 1.0,
    "relocation": 2.0,
    "zorder": 1.0
  },
  "solver_budget": 4000,
  "seed": 7,
  "current_date": "2024-03-18",
  "manifest": null
}
"""
    OUT_CONFIG.write_text(config, encoding="utf-8")
    print(f"wrote {OUT_CONFIG}")


if __name__ == "__main__":
    main()
