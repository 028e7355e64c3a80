#!/usr/bin/env python3
"""Freeze the four-scenario ladder outputs for the bundled manifest.

Writes tests/data/golden_scenarios.json. Values are produced by the
evaluate_day replay (block-by-block retrieval simulation) over the committed
fixture with the committed seed; the acceptance suite re-runs the ladder and
compares against this file exactly.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from yardflow.config import EngineConfig  # noqa: E402
from yardflow.manifest import fixture_config_path, fixture_path, parse_manifest  # noqa: E402
from yardflow.metrics import Scenario, run_ladder  # noqa: E402

OUT = ROOT / "tests" / "data" / "golden_scenarios.json"
SEED = 7


def main() -> None:
    containers = parse_manifest(fixture_path().read_bytes()).containers
    config = EngineConfig.from_file(fixture_config_path())
    results = run_ladder(containers, config, seed=SEED)
    payload = {
        "provenance": (
            "derived: generated by scripts/make_golden.py via the evaluate_day "
            "retrieval replay over data/fixture_63.csv"
        ),
        "seed": SEED,
        "manifest": "src/yardflow/data/fixture_63.csv",
        "config": "src/yardflow/data/fixture_config.json",
        "scenarios": {
            str(int(s)): {
                "pt": results[s].pt,
                "m": results[s].m,
                "rehandles": results[s].rehandles,
                "histogram": [
                    [row.index, row.demand, row.serviced, row.capacity]
                    for row in results[s].histogram
                ],
            }
            for s in Scenario
        },
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")
    for s in Scenario:
        print(f"  scenario {int(s)}: pt={results[s].pt:.4f} m={results[s].m}")


if __name__ == "__main__":
    main()
