"""Discriminant scoring: cargo/consignee variables, class scores, and categories.

All functions are pure. Degenerate denominators (zero free days, unknown
carrier cadence) clamp to 1 so every container gets a finite score; the raw
signed remaining-free-days value still drives demurrage categorization.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum
from typing import Iterable

from .model import Container


class StackClass(str, Enum):
    """Discriminant class controlling a container's place within a stack."""

    C1 = "C1"
    C2 = "C2"
    C3 = "C3"


class Category(str, Enum):
    """Operational category: free-period/appointment status."""

    CAT1 = "cat1"  # within free days, pickup appointment booked
    CAT2 = "cat2"  # within free days, no appointment
    CAT3 = "cat3"  # past free days (demurrage)


@dataclass(frozen=True)
class ClassCoefficients:
    intercept: float
    consignee_weight: float
    cargo_weight: float


@dataclass(frozen=True)
class DiscriminantCoefficients:
    """Per-class linear coefficients; defaults are the published discriminants."""

    c1: ClassCoefficients = ClassCoefficients(-0.985, 0.032, 1.281)
    c2: ClassCoefficients = ClassCoefficients(-13.239, 0.116, 4.698)
    c3: ClassCoefficients = ClassCoefficients(-37.387, 0.344, 7.688)

    def as_rows(self) -> tuple[ClassCoefficients, ClassCoefficients, ClassCoefficients]:
        return (self.c1, self.c2, self.c3)


DEFAULT_COEFFICIENTS = DiscriminantCoefficients()

# Tie-break order for equal scores: lower class wins (shorter expected dwell).
_CLASS_ORDER = (StackClass.C1, StackClass.C2, StackClass.C3)


@dataclass(frozen=True)
class Classification:
    """Scoring record for one container, with all intermediate values kept."""

    container_id: str
    cargo_value: float
    consignee_value: float
    scores: tuple[float, float, float]
    stack_class: StackClass
    category: Category
    days_passed: int
    remaining_free_days: int


def cargo_variable(container: Container) -> float:
    """Weight x pickup probability x free-day allowance (allowance clamped to >= 1)."""
    if container.weight_tons <= 0:
        raise ValueError(f"{container.id}: weight must be positive")
    return container.weight_tons * container.pickup_probability * max(container.free_days, 1)


def days_passed(container: Container, current_date: date) -> int:
    """Whole days since the container arrived."""
    delta = (current_date - container.arrival_date).days
    if delta < 0:
        raise ValueError(
            f"{container.id}: current date {current_date} precedes arrival {container.arrival_date}"
        )
    return delta


def remaining_free_days(container: Container, current_date: date) -> int:
    """Free days left; negative once the container is in demurrage."""
    return container.free_days - days_passed(container, current_date)


def consignee_variable(container: Container, current_date: date, owner_census: int) -> float:
    """Remaining-entitlement fraction scaled by carrier cadence.

    Containers without an appointment (or with an unknown carrier cadence) use
    the count of same-owner unappointed arrivals this month instead of the
    carrier's monthly visits.
    """
    rem = max(remaining_free_days(container, current_date), 0)
    allowance = max(container.free_days, 1)
    if container.appointment_block is not None and container.carrier_visits_per_month >= 1:
        cadence = container.carrier_visits_per_month
    else:
        cadence = max(owner_census, 1)
    # single division keeps exact cases exact: (1/d * rem) / visits == rem / (d * visits)
    return rem / (allowance * cadence)


def discriminant_scores(
    consignee_value: float,
    cargo_value: float,
    coeffs: DiscriminantCoefficients = DEFAULT_COEFFICIENTS,
) -> tuple[float, float, float]:
    """Evaluate the three class discriminants at (consignee, cargo)."""
    return tuple(
        row.intercept + row.consignee_weight * consignee_value + row.cargo_weight * cargo_value
        for row in coeffs.as_rows()
    )  # type: ignore[return-value]


def operational_category(container: Container, current_date: date) -> Category:
    """Free-period/appointment bucket.

    Demurrage containers land in CAT3 whether or not an appointment exists;
    a demurrage appointment is treated as system-created downstream.
    """
    rem = remaining_free_days(container, current_date)
    if rem > 0:
        return Category.CAT1 if container.appointment_block is not None else Category.CAT2
    return Category.CAT3


def classify(
    container: Container,
    current_date: date,
    owner_census: int,
    coeffs: DiscriminantCoefficients = DEFAULT_COEFFICIENTS,
) -> Classification:
    """Full scoring record: variables, scores, argmax class, and category."""
    cargo = cargo_variable(container)
    consignee = consignee_variable(container, current_date, owner_census)
    scores = discriminant_scores(consignee, cargo, coeffs)
    best = max(range(3), key=lambda k: (scores[k], -k))  # ties prefer C1 > C2 > C3
    return Classification(
        container_id=container.id,
        cargo_value=cargo,
        consignee_value=consignee,
        scores=scores,
        stack_class=_CLASS_ORDER[best],
        category=operational_category(container, current_date),
        days_passed=days_passed(container, current_date),
        remaining_free_days=remaining_free_days(container, current_date),
    )


def owner_census_map(containers: Iterable[Container], current_date: date) -> dict[str, int]:
    """Per-owner count of unappointed arrivals in the current calendar month."""
    counts: dict[str, int] = {}
    for c in containers:
        if c.appointment_block is not None:
            continue
        if (c.arrival_date.year, c.arrival_date.month) != (current_date.year, current_date.month):
            continue
        counts[c.owner_id] = counts.get(c.owner_id, 0) + 1
    return counts


def classify_all(
    containers: Iterable[Container],
    current_date: date,
    coeffs: DiscriminantCoefficients = DEFAULT_COEFFICIENTS,
) -> dict[str, Classification]:
    """Classify a manifest, computing owner censuses from the manifest itself."""
    containers = list(containers)
    census = owner_census_map(containers, current_date)
    return {
        c.id: classify(c, current_date, census.get(c.owner_id, 0), coeffs) for c in containers
    }
