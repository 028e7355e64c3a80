"""Manifest ingestion: the CSV feed standing in for a terminal operating system.

Rows are validated independently: good rows become containers, bad rows are
reported with their line number and reason. A feed with no usable rows is an
error. The replay source re-emits a recorded arrival sequence for demos.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path
from typing import Iterable, Iterator, Protocol

from .model import Container

MANIFEST_HEADER = (
    "container_id,arrival_date,free_days,weight_tons,cargo_type,pickup_probability,"
    "consignee_id,carrier_id,carrier_visits_per_month,owner_id,appointment_block,destination"
)
_FIELDS = MANIFEST_HEADER.split(",")

# Pickup likelihood by cargo type, used when the feed leaves the column blank.
# These are operational defaults shipped with the tool, not measured values.
DEFAULT_PICKUP_PROBABILITY = {
    "perishable": 0.9,
    "retail": 0.7,
    "electronics": 0.7,
    "machinery": 0.5,
    "general": 0.5,
    "raw_materials": 0.3,
}
FALLBACK_PICKUP_PROBABILITY = 0.5


class ManifestError(Exception):
    """The manifest as a whole is unusable (bad header, no valid rows)."""


@dataclass(frozen=True)
class RowError:
    line: int  # 1-based physical line in the file
    message: str


@dataclass
class ManifestResult:
    containers: list[Container]
    errors: list[RowError]


def parse_manifest(data: bytes | str) -> ManifestResult:
    """Parse a CSV feed; collects per-row errors instead of failing fast."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ManifestError("manifest is empty: missing header row") from None
    if header != _FIELDS:
        raise ManifestError(
            f"manifest header mismatch: expected {MANIFEST_HEADER!r}, got {','.join(header)!r}"
        )
    containers: list[Container] = []
    errors: list[RowError] = []
    seen: set[str] = set()
    for line, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            container = _parse_row(row)
        except ValueError as exc:
            errors.append(RowError(line, str(exc)))
            continue
        if container.id in seen:
            errors.append(RowError(line, f"duplicate container_id {container.id!r}"))
            continue
        seen.add(container.id)
        containers.append(container)
    if not containers:
        raise ManifestError("manifest contains no valid rows")
    return ManifestResult(containers, errors)


def _parse_row(row: list[str]) -> Container:
    if len(row) != len(_FIELDS):
        raise ValueError(f"expected {len(_FIELDS)} fields, got {len(row)}")
    raw = dict(zip(_FIELDS, (cell.strip() for cell in row)))
    if not raw["container_id"]:
        raise ValueError("container_id is empty")
    cargo_type = raw["cargo_type"] or "general"
    if raw["pickup_probability"]:
        probability = _parse_float(raw["pickup_probability"], "pickup_probability")
    else:
        probability = DEFAULT_PICKUP_PROBABILITY.get(cargo_type, FALLBACK_PICKUP_PROBABILITY)
    if not 0.0 <= probability <= 1.0:
        raise ValueError(f"pickup_probability {probability} outside [0, 1]")
    appointment = None
    if raw["appointment_block"]:
        appointment = _parse_int(raw["appointment_block"], "appointment_block")
        if appointment < 0:
            raise ValueError(f"appointment_block {appointment} must be >= 0")
    weight = _parse_float(raw["weight_tons"], "weight_tons")
    if weight <= 0:
        raise ValueError(f"weight_tons {weight} must be > 0")
    free_days = _parse_int(raw["free_days"], "free_days")
    if free_days < 0:
        raise ValueError(f"free_days {free_days} must be >= 0")
    visits = _parse_int(raw["carrier_visits_per_month"] or "0", "carrier_visits_per_month")
    if visits < 0:
        raise ValueError(f"carrier_visits_per_month {visits} must be >= 0")
    return Container(
        id=raw["container_id"],
        arrival_date=_parse_date(raw["arrival_date"]),
        free_days=free_days,
        weight_tons=weight,
        pickup_probability=probability,
        consignee_id=raw["consignee_id"],
        owner_id=raw["owner_id"],
        destination=raw["destination"],
        cargo_type=cargo_type,
        carrier_id=raw["carrier_id"] or None,
        carrier_visits_per_month=visits,
        appointment_block=appointment,
    )


def _parse_date(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise ValueError(f"arrival_date {value!r} is not an ISO date") from None


def _parse_int(value: str, name: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{name} {value!r} is not an integer") from None


def _parse_float(value: str, name: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ValueError(f"{name} {value!r} is not a number") from None


def parse_row_fields(fields: "dict[str, object]") -> Container:
    """Build a container from a manifest-row-shaped mapping (service bodies)."""
    row = []
    for name in _FIELDS:
        value = fields.get(name)
        row.append("" if value is None else str(value))
    return _parse_row(row)


def serialize_manifest(containers: Iterable[Container]) -> str:
    """Inverse of parse_manifest: emits a feed that parses back to equal containers."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_FIELDS)
    for c in containers:
        writer.writerow(
            [
                c.id,
                c.arrival_date.isoformat(),
                c.free_days,
                repr(c.weight_tons),
                c.cargo_type,
                repr(c.pickup_probability),
                c.consignee_id,
                c.carrier_id or "",
                c.carrier_visits_per_month,
                c.owner_id,
                "" if c.appointment_block is None else c.appointment_block,
                c.destination,
            ]
        )
    return out.getvalue()


class ContainerSource(Protocol):
    """Uniform pull interface over arrival feeds."""

    def containers(self) -> Iterator[Container]: ...


class CsvSource:
    """Arrivals from a manifest file."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def containers(self) -> Iterator[Container]:
        result = parse_manifest(self.path.read_bytes())
        return iter(result.containers)


class ReplaySource:
    """Arrivals from a recorded sequence of timestamped manifest rows."""

    def __init__(self, events: list[tuple[datetime, Container]]) -> None:
        self.events = sorted(events, key=lambda e: e[0])

    @classmethod
    def from_file(cls, path: str | Path) -> "ReplaySource":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        events = []
        for entry in raw:
            at = datetime.fromisoformat(entry["at"])
            events.append((at, _parse_row([str(entry["row"].get(f, "")) for f in _FIELDS])))
        return cls(events)

    def containers(self) -> Iterator[Container]:
        return iter(c for _, c in self.events)


def source_adapter(kind: str, **options: object) -> ContainerSource:
    """Factory over the supported feed kinds: ``csv`` and ``replay``."""
    if kind == "csv":
        return CsvSource(options["path"])  # type: ignore[arg-type]
    if kind == "replay":
        if "path" in options:
            return ReplaySource.from_file(options["path"])  # type: ignore[arg-type]
        return ReplaySource(options.get("events", []))  # type: ignore[arg-type]
    raise ValueError(f"unknown source kind {kind!r}")


def fixture_path() -> Path:
    """Location of the bundled demonstration manifest."""
    return Path(__file__).parent / "data" / "fixture_63.csv"


def fixture_config_path() -> Path:
    """Location of the configuration tuned for the bundled manifest."""
    return Path(__file__).parent / "data" / "fixture_config.json"
