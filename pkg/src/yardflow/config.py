"""Engine configuration: terminal parameters, yard geometry, solver knobs.

Configs are plain JSON so they round-trip losslessly; `IPS_CONFIG` overrides
the default path when no explicit file is given.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Any

from .classify import ClassCoefficients, DiscriminantCoefficients
from .model import TerminalParams, YardLayout
from .placement import ObjectiveWeights

ENV_CONFIG_PATH = "IPS_CONFIG"


@dataclass
class EngineConfig:
    params: TerminalParams = field(default_factory=TerminalParams)
    bays: int = 8
    rows: int = 4
    entry_gate: tuple[int, int] = (7, 3)
    exit_gate: tuple[int, int] = (0, 0)
    coefficients: DiscriminantCoefficients = field(default_factory=DiscriminantCoefficients)
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    solver_budget: int = 20000
    seed: int = 1
    current_date: date | None = None
    manifest: str | None = None

    def layout(self, expected_census: int = 0) -> YardLayout:
        return YardLayout(
            bays=self.bays,
            rows=self.rows,
            entry_gate=tuple(self.entry_gate),  # type: ignore[arg-type]
            exit_gate=tuple(self.exit_gate),  # type: ignore[arg-type]
            expected_census=expected_census,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "terminal": {
                "gate_lanes": self.params.gate_lanes,
                "clear_minutes": self.params.clear_minutes,
                "load_minutes": self.params.load_minutes,
                "inspect_minutes": self.params.inspect_minutes,
                "rehandle_minutes": self.params.rehandle_minutes,
                "max_waiting_trucks": self.params.max_waiting_trucks,
                "blocks_per_day": self.params.blocks_per_day,
                "block_minutes": self.params.block_minutes,
                "max_tier": self.params.max_tier,
            },
            "yard": {
                "bays": self.bays,
                "rows": self.rows,
                "entry_gate": list(self.entry_gate),
                "exit_gate": list(self.exit_gate),
            },
            "coefficients": {
                "c1": _coeff_row(self.coefficients.c1),
                "c2": _coeff_row(self.coefficients.c2),
                "c3": _coeff_row(self.coefficients.c3),
            },
            "weights": {
                "rehandle": self.weights.rehandle,
                "relocation": self.weights.relocation,
                "zorder": self.weights.zorder,
            },
            "solver_budget": self.solver_budget,
            "seed": self.seed,
            "current_date": self.current_date.isoformat() if self.current_date else None,
            "manifest": self.manifest,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EngineConfig":
        cfg = cls()
        terminal = data.get("terminal", {})
        cfg.params = TerminalParams(
            gate_lanes=int(terminal.get("gate_lanes", 2)),
            clear_minutes=float(terminal.get("clear_minutes", 1.0)),
            load_minutes=float(terminal.get("load_minutes", 25.0)),
            inspect_minutes=float(terminal.get("inspect_minutes", 5.0)),
            rehandle_minutes=float(terminal.get("rehandle_minutes", 6.0)),
            max_waiting_trucks=int(terminal.get("max_waiting_trucks", 60)),
            blocks_per_day=int(terminal.get("blocks_per_day", 9)),
            block_minutes=int(terminal.get("block_minutes", 60)),
            max_tier=int(terminal.get("max_tier", 4)),
        )
        yard = data.get("yard", {})
        cfg.bays = int(yard.get("bays", 8))
        cfg.rows = int(yard.get("rows", 4))
        cfg.entry_gate = tuple(yard.get("entry_gate", (7, 3)))  # type: ignore[assignment]
        cfg.exit_gate = tuple(yard.get("exit_gate", (0, 0)))  # type: ignore[assignment]
        coeffs = data.get("coefficients")
        if coeffs:
            cfg.coefficients = DiscriminantCoefficients(
                c1=_coeff_from(coeffs["c1"]),
                c2=_coeff_from(coeffs["c2"]),
                c3=_coeff_from(coeffs["c3"]),
            )
        weights = data.get("weights")
        if weights:
            cfg.weights = ObjectiveWeights(
                rehandle=float(weights.get("rehandle", 1.0)),
                relocation=float(weights.get("relocation", 2.0)),
                zorder=float(weights.get("zorder", 1.0)),
            )
        cfg.solver_budget = int(data.get("solver_budget", 20000))
        cfg.seed = int(data.get("seed", 1))
        raw_date = data.get("current_date")
        cfg.current_date = date.fromisoformat(raw_date) if raw_date else None
        cfg.manifest = data.get("manifest")
        return cfg

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def from_file(cls, path: str | Path) -> "EngineConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        try:
            return cls.from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"config file {path} is invalid: {exc}") from None

    @classmethod
    def resolve(cls, path: str | Path | None = None) -> "EngineConfig":
        """Load from an explicit path, else $IPS_CONFIG, else built-in defaults."""
        if path is not None:
            return cls.from_file(path)
        env = os.environ.get(ENV_CONFIG_PATH)
        if env:
            return cls.from_file(env)
        return cls()


class ConfigError(Exception):
    """A configuration file is missing or malformed."""


def _coeff_row(row: ClassCoefficients) -> list[float]:
    return [row.intercept, row.consignee_weight, row.cargo_weight]


def _coeff_from(raw: list[float]) -> ClassCoefficients:
    return ClassCoefficients(float(raw[0]), float(raw[1]), float(raw[2]))
