"""HTTP service fronting the engine for the planner console.

One engine owns the mutable state; every mutation runs under its lock and
bumps a monotonically increasing version, which every response carries.
Dry-run requests compute the same proposal a commit would apply but leave the
state (and version) untouched; commits can pin the version they were proposed
against and fail with 409 when it moved.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import asdict
from datetime import date
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from .classify import Category, Classification, classify, classify_all, owner_census_map
from .config import EngineConfig
from .manifest import parse_manifest, parse_row_fields
from .metrics import Scenario, ScenarioResult, histogram, run_scenario
from .model import Container, TerminalParams, TruckVisit, VisitOrigin, YardState
from .placement import (
    PickupKey,
    PlacementModel,
    SegmentFullError,
    SegmentPlan,
    apply_plan,
    partition_segments,
    pickup_key,
    pickup_keys,
    place_incremental,
    reposition,
    solve_batch,
)
from .scheduling import Schedule, detect_congestion, run_recursive

log = logging.getLogger(__name__)


class Engine:
    """Single-writer state holder behind the HTTP endpoints."""

    def __init__(self, config: EngineConfig, containers: list[Container] | None = None):
        self.config = config
        self.params: TerminalParams = config.params
        self.lock = threading.RLock()
        self.version = 0
        self.current_date: date = config.current_date or date.today()
        self.containers: dict[str, Container] = {}
        self.classifications: dict[str, Classification] = {}
        self.keys: dict[str, PickupKey] = {}
        self.layout = config.layout()
        self.plan: SegmentPlan = partition_segments(self.layout, {}, self.params)
        self.yard: YardState = YardState(
            self.layout, self.params, {}, segment_map=self.plan.bay_map()
        )
        self.schedule: Schedule = Schedule.empty(self.current_date, self.params)
        self.previous_schedule: Schedule = self.schedule
        self.jobs: dict[str, dict[str, Any]] = {}
        self.scenario_results: dict[int, dict[str, Any]] = {}
        self._job_counter = 0
        if containers:
            self._load(containers)

    # -- bootstrap ---------------------------------------------------------

    def _load(self, containers: list[Container]) -> None:
        self.containers = {c.id: c for c in containers}
        self.classifications = classify_all(containers, self.current_date, self.config.coefficients)
        census: dict[Category, int] = {}
        for cls in self.classifications.values():
            census[cls.category] = census.get(cls.category, 0) + 1
        self.layout = self.config.layout(len(containers))
        self.plan = partition_segments(self.layout, census, self.params)
        model = PlacementModel(
            layout=self.layout,
            params=self.params,
            containers=containers,
            classifications=self.classifications,
            plan=self.plan,
            weights=self.config.weights,
        )
        solved = solve_batch(model, self.config.solver_budget)
        self.yard = YardState(self.layout, self.params, {}, segment_map=self.plan.bay_map())
        self.yard = apply_plan(self.yard, solved)
        self.keys = pickup_keys(containers, self.classifications)
        self.schedule = Schedule.empty(self.current_date, self.params)
        seq = 0
        for c in containers:
            if c.appointment_block is not None:
                if not 0 <= c.appointment_block < self.params.blocks_per_day:
                    raise ValueError(f"{c.id}: appointment block outside the day")
                self.schedule.blocks[c.appointment_block].visits.append(
                    TruckVisit(c.id, c.carrier_id, seq, VisitOrigin.PRE_EXISTING)
                )
                seq += 1
        self.previous_schedule = self.schedule

    # -- snapshots ----------------------------------------------------------

    def yard_payload(self) -> dict[str, Any]:
        with self.lock:
            occupants = []
            visit_origin = {
                v.container_id: v.origin.value
                for b in self.schedule.blocks
                for v in b.visits
            }
            for cid in sorted(self.yard.placement):
                slot = self.yard.placement[cid]
                cls = self.classifications.get(cid)
                container = self.containers.get(cid)
                occupants.append(
                    {
                        "container_id": cid,
                        "bay": slot.bay,
                        "row": slot.row,
                        "tier": slot.tier,
                        "segment": slot.segment_id,
                        "category": cls.category.value if cls else None,
                        "stack_class": cls.stack_class.value if cls else None,
                        "scores": list(cls.scores) if cls else None,
                        "remaining_free_days": cls.remaining_free_days if cls else None,
                        "appointment_block": container.appointment_block if container else None,
                        "appointment_origin": visit_origin.get(cid),
                        "demurrage_rebooked": (
                            cls is not None
                            and cls.category is Category.CAT3
                            and visit_origin.get(cid) == VisitOrigin.IPS_CREATED.value
                        ),
                    }
                )
            return {
                "version": self.version,
                "bays": self.layout.bays,
                "rows": self.layout.rows,
                "max_tier": self.params.max_tier,
                "segments": [asdict(seg) for seg in self.plan.segments],
                "occupants": occupants,
            }

    def schedule_payload(self) -> dict[str, Any]:
        with self.lock:
            cap = self.params.block_capacity
            return {
                "version": self.version,
                "day": self.schedule.day.isoformat(),
                "block_capacity": cap,
                "blocks": [
                    {
                        "index": b.index,
                        "truck_count": b.truck_count,
                        "congested": b.truck_count > cap,
                        "visits": [
                            {
                                "container_id": v.container_id,
                                "carrier_id": v.carrier_id,
                                "booked_at": v.booked_at,
                                "origin": v.origin.value,
                            }
                            for v in sorted(b.visits, key=lambda v: v.booked_at)
                        ],
                    }
                    for b in self.schedule.blocks
                ],
            }

    def histogram_payload(self) -> dict[str, Any]:
        with self.lock:
            rows = histogram(self.previous_schedule, self.schedule, self.params)
            return {
                "version": self.version,
                "blocks": [
                    {
                        "index": r.index,
                        "before": r.before,
                        "after": r.after,
                        "capacity": r.capacity,
                    }
                    for r in rows
                ],
            }

    def metrics_payload(self) -> dict[str, Any]:
        with self.lock:
            payload: dict[str, Any] = {
                "version": self.version,
                "io_minutes": self.params.io_minutes,
                "block_capacity": self.params.block_capacity,
                "congested_blocks": [
                    {"index": i, "excess": e} for i, e in detect_congestion(self.schedule)
                ],
                "scenarios": dict(sorted(self.scenario_results.items())),
                "gains": None,
            }
            have = self.scenario_results
            if {1, 3, 4} <= set(have) and all(have[k]["pt"] is not None for k in (1, 3, 4)):
                payload["gains"] = {
                    "throughput_gain": (have[4]["m"] - have[1]["m"]) / have[1]["m"],
                    "pt_improvement": (
                        abs(have[3]["pt"] - have[4]["pt"]) - (have[3]["pt"] - have[1]["pt"])
                    )
                    / have[3]["pt"],
                }
            return payload

    # -- mutations ----------------------------------------------------------

    def register_container(self, fields: dict[str, Any]) -> dict[str, Any]:
        with self.lock:
            try:
                container = parse_row_fields(fields)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
            if container.id in self.containers:
                raise HTTPException(status_code=400, detail=f"{container.id} already registered")
            census = owner_census_map(
                list(self.containers.values()) + [container], self.current_date
            )
            try:
                cls = classify(
                    container,
                    self.current_date,
                    census.get(container.owner_id, 0),
                    self.config.coefficients,
                )
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
            try:
                plan = place_incremental(
                    self.yard, container, cls, self.keys, self.plan, self.config.weights
                )
            except SegmentFullError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from None
            self.yard = apply_plan(self.yard, plan)
            self.containers[container.id] = container
            self.classifications[container.id] = cls
            self.keys[container.id] = pickup_key(container, cls)
            if container.appointment_block is not None:
                if not 0 <= container.appointment_block < self.params.blocks_per_day:
                    raise HTTPException(status_code=400, detail="appointment block outside the day")
                self.schedule.blocks[container.appointment_block].visits.append(
                    TruckVisit(
                        container.id,
                        container.carrier_id,
                        self.schedule.next_booking_seq(),
                        VisitOrigin.PRE_EXISTING,
                    )
                )
            self.version += 1
            slot = self.yard.placement[container.id]
            return {
                "version": self.version,
                "container_id": container.id,
                "category": cls.category.value,
                "stack_class": cls.stack_class.value,
                "scores": list(cls.scores),
                "slot": {
                    "bay": slot.bay,
                    "row": slot.row,
                    "tier": slot.tier,
                    "segment": slot.segment_id,
                },
                "relocations": [
                    {"container_id": cid, "from": asdict(old), "to": asdict(new)}
                    for cid, old, new in plan.relocations
                ],
            }

    def _booking_block(self, container: Container, requested: int) -> int:
        """Requested block if it has slack, else the nearest legal block with slack.

        Later blocks are preferred (earliest first) within the container's
        free-day deadline, then earlier blocks; a day with no slack at all is a
        conflict.
        """
        from .scheduling import deadline_block

        cap = self.params.block_capacity
        counts = self.schedule.counts()
        if counts[requested] < cap:
            return requested
        limit = deadline_block(container, self.schedule)
        for index in range(requested + 1, self.params.blocks_per_day):
            if counts[index] < cap and (limit is None or index <= limit):
                return index
        for index in range(0, requested):
            if counts[index] < cap:
                return index
        raise HTTPException(status_code=409, detail="no block with slack remains today")

    def book_appointment(
        self,
        container_id: str,
        block: int,
        dry_run: bool,
        expected_version: int | None,
    ) -> dict[str, Any]:
        with self.lock:
            container = self.containers.get(container_id)
            if container is None:
                raise HTTPException(status_code=404, detail=f"unknown container {container_id}")
            if not 0 <= block < self.params.blocks_per_day:
                raise HTTPException(status_code=400, detail="block outside the day")
            if self.schedule.block_of(container_id) is not None:
                raise HTTPException(status_code=400, detail=f"{container_id} already booked")
            if not dry_run and expected_version is not None and expected_version != self.version:
                raise HTTPException(
                    status_code=409,
                    detail=f"version conflict: expected {expected_version}, now {self.version}",
                )

            final_block = self._booking_block(container, block)
            trial = self.schedule.copy()
            visit = TruckVisit(
                container_id, container.carrier_id, trial.next_booking_seq(), VisitOrigin.IPS_CREATED
            )
            trial.blocks[final_block].visits.append(visit)
            moves = []
            if final_block != block:
                moves.append(
                    {
                        "container_id": container_id,
                        "from_block": block,
                        "to_block": final_block,
                        "reason": "congestion",
                    }
                )

            booked = container.with_appointment(final_block)
            cls = self.classifications[container_id]
            trial_keys = dict(self.keys)
            trial_keys[container_id] = pickup_key(booked, cls)
            move_plan = reposition(
                self.yard, booked, cls, trial_keys, self.plan, self.config.weights
            )
            slot = move_plan.assignment[container_id]
            proposal = {
                "version": self.version,
                "requested_block": block,
                "proposed_block": final_block,
                "moves": moves,
                "placement": {
                    "bay": slot.bay,
                    "row": slot.row,
                    "tier": slot.tier,
                    "segment": slot.segment_id,
                },
                "committed": False,
            }
            if dry_run:
                return proposal

            self.previous_schedule = self.schedule
            self.schedule = trial
            self.containers[container_id] = booked
            self.keys[container_id] = trial_keys[container_id]
            self.yard = apply_plan(self.yard, move_plan)
            self.version += 1
            proposal["version"] = self.version
            proposal["committed"] = True
            return proposal

    def rebalance_now(self) -> dict[str, Any]:
        with self.lock:
            unappointed = [
                c for c in self.containers.values() if self.schedule.block_of(c.id) is None
            ]

            def on_created(cid: str, block: int) -> None:
                booked = self.containers[cid].with_appointment(block)
                self.containers[cid] = booked
                self.keys[cid] = pickup_key(booked, self.classifications[cid])
                try:
                    plan = reposition(
                        self.yard, booked, self.classifications[cid], self.keys,
                        self.plan, self.config.weights,
                    )
                except SegmentFullError:
                    return
                self.yard = apply_plan(self.yard, plan)

            before = self.schedule
            schedule, report = run_recursive(
                self.schedule, self.containers, self.classifications, unappointed, on_created
            )
            self.previous_schedule = before
            self.schedule = schedule
            self.version += 1
            return {
                "version": self.version,
                "moves": [asdict(m) for m in report.moves],
                "created": [asdict(c) for c in report.created],
                "iterations": report.iterations,
                "converged": report.converged,
            }

    # -- jobs ----------------------------------------------------------------

    def start_optimize(self, scenario: int, seed: int | None) -> str:
        with self.lock:
            try:
                which = Scenario(scenario)
            except ValueError:
                raise HTTPException(status_code=400, detail=f"unknown scenario {scenario}") from None
            self._job_counter += 1
            job_id = f"job-{self._job_counter}"
            snapshot = list(self.containers.values())
            self.jobs[job_id] = {"status": "running", "scenario": scenario}

        def work() -> None:
            try:
                result = run_scenario(snapshot, which, self.config, seed)
                payload = _scenario_payload(result)
                with self.lock:
                    self.jobs[job_id] = {"status": "done", "scenario": scenario, "result": payload}
                    self.scenario_results[scenario] = {
                        "pt": result.pt,
                        "m": result.m,
                        "seed": result.seed,
                    }
            except Exception as exc:  # surfaced through the job card
                log.exception("optimize job %s failed", job_id)
                with self.lock:
                    self.jobs[job_id] = {"status": "failed", "scenario": scenario, "error": str(exc)}

        threading.Thread(target=work, name=job_id, daemon=True).start()
        return job_id

    def job_payload(self, job_id: str) -> dict[str, Any]:
        with self.lock:
            job = self.jobs.get(job_id)
            if job is None:
                raise HTTPException(status_code=404, detail=f"unknown job {job_id}")
            return {"version": self.version, "job_id": job_id, **job}


def _scenario_payload(result: ScenarioResult) -> dict[str, Any]:
    payload = {
        "scenario": int(result.scenario),
        "pt": result.pt,
        "m": result.m,
        "seed": result.seed,
        "rehandles": result.rehandles,
        "histogram": [
            {
                "index": row.index,
                "demand": row.demand,
                "serviced": row.serviced,
                "capacity": row.capacity,
            }
            for row in result.histogram
        ],
    }
    if result.rebalance_report is not None:
        payload["moves"] = len(result.rebalance_report.moves)
        payload["created"] = len(result.rebalance_report.created)
    return payload


def create_app(engine: Engine, console_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="yardflow", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/yard")
    def get_yard() -> dict:
        return engine.yard_payload()

    @app.get("/schedule")
    def get_schedule() -> dict:
        return engine.schedule_payload()

    @app.get("/metrics")
    def get_metrics() -> dict:
        return engine.metrics_payload()

    @app.get("/histogram")
    def get_histogram() -> dict:
        return engine.histogram_payload()

    @app.post("/containers", status_code=201)
    def post_containers(payload: dict = Body(...)) -> dict:
        return engine.register_container(payload)

    @app.post("/appointments")
    def post_appointments(payload: dict = Body(...)) -> dict:
        container_id = payload.get("container_id")
        block = payload.get("block")
        if not isinstance(container_id, str) or not isinstance(block, int):
            raise HTTPException(status_code=400, detail="container_id and block are required")
        dry_run = bool(payload.get("dry_run", False))
        expected = payload.get("expected_version")
        if expected is not None and not isinstance(expected, int):
            raise HTTPException(status_code=400, detail="expected_version must be an integer")
        return engine.book_appointment(container_id, block, dry_run, expected)

    @app.post("/optimize", status_code=202)
    def post_optimize(payload: dict = Body(default={})) -> dict:
        scenario = payload.get("scenario")
        if not isinstance(scenario, int):
            raise HTTPException(status_code=400, detail="scenario (1..4) is required")
        seed = payload.get("seed")
        if seed is not None and not isinstance(seed, int):
            raise HTTPException(status_code=400, detail="seed must be an integer")
        job_id = engine.start_optimize(scenario, seed)
        return {"version": engine.version, "job_id": job_id}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str) -> dict:
        return engine.job_payload(job_id)

    @app.post("/rebalance")
    def post_rebalance() -> dict:
        return engine.rebalance_now()

    if console_dir and Path(console_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/console", StaticFiles(directory=str(console_dir), html=True), name="console")

    return app


def engine_from_config(config: EngineConfig, manifest_path: str | Path | None = None) -> Engine:
    """Engine preloaded from the configured (or given) manifest, if any."""
    path = manifest_path or config.manifest
    containers = None
    if path:
        containers = parse_manifest(Path(path).read_bytes()).containers
    return Engine(config, containers)


def serve(
    config: EngineConfig,
    port: int = 8000,
    host: str = "127.0.0.1",
    manifest_path: str | Path | None = None,
    console_dir: str | Path | None = None,
) -> None:
    """Run the HTTP service until interrupted."""
    import uvicorn

    engine = engine_from_config(config, manifest_path)
    app = create_app(engine, console_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
