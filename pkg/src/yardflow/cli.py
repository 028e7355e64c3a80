"""Command-line interface: ingest, classify, optimize, schedule, report, serve.

Exit codes: 0 success, 1 validation failure, 2 infeasibility, 64 usage errors.
Without --csv the bundled demonstration manifest is used; without --config the
bundled config (or $IPS_CONFIG) applies.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .classify import classify_all
from .config import ConfigError, ENV_CONFIG_PATH, EngineConfig
from .manifest import (
    ManifestError,
    fixture_config_path,
    fixture_path,
    parse_manifest,
)
from .metrics import (
    Scenario,
    format_report_csv,
    format_report_text,
    histogram,
    run_ladder,
    run_scenario,
)
from .placement import InfeasibleModelError, SegmentSizingError
from .scheduling import run_recursive

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits 64 on usage errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> _Parser:
    parser = _Parser(prog="yardflow", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--csv", help="manifest file (default: bundled fixture)")
        p.add_argument("--config", help="config file (default: $IPS_CONFIG or bundled)")

    p_ingest = sub.add_parser("ingest", help="validate a manifest feed")
    p_ingest.add_argument("--csv", required=True, help="manifest file")

    p_classify = sub.add_parser("classify", help="score and categorize every container")
    common(p_classify)

    p_opt = sub.add_parser("optimize", help="run one yard scenario end to end")
    p_opt.add_argument("--scenario", type=int, choices=[1, 2, 3, 4], required=True)
    p_opt.add_argument("--seed", type=int, default=None)
    common(p_opt)

    p_sched = sub.add_parser("schedule", help="inspect or rebalance the appointment day")
    p_sched.add_argument("--rebalance", action="store_true", help="apply the recursive rebalancer")
    common(p_sched)

    p_report = sub.add_parser("report", help="run all four scenarios and summarize")
    p_report.add_argument("--format", choices=["text", "csv"], default="text")
    p_report.add_argument("--seed", type=int, default=None)
    common(p_report)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--console", help="static console build to mount at /console")
    common(p_serve)
    return parser


def _load_config(args: argparse.Namespace) -> EngineConfig:
    explicit = getattr(args, "config", None)
    if explicit:
        return EngineConfig.from_file(explicit)
    env = os.environ.get(ENV_CONFIG_PATH)
    if env:
        return EngineConfig.from_file(env)
    if getattr(args, "csv", None):
        return EngineConfig()  # generic defaults for a user-supplied manifest
    return EngineConfig.from_file(fixture_config_path())


def _load_containers(args: argparse.Namespace, config: EngineConfig):
    path = getattr(args, "csv", None) or config.manifest or fixture_path()
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from None
    return parse_manifest(data)


def cmd_ingest(args: argparse.Namespace) -> int:
    try:
        data = Path(args.csv).read_bytes()
    except OSError as exc:
        print(f"error: cannot read {args.csv}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    result = parse_manifest(data)
    print(f"containers: {len(result.containers)}")
    for err in result.errors:
        print(f"line {err.line}: {err.message}", file=sys.stderr)
    if result.errors:
        print(f"invalid rows: {len(result.errors)}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    config = _load_config(args)
    result = _load_containers(args, config)
    current = config.current_date or max(c.arrival_date for c in result.containers)
    classifications = classify_all(result.containers, current, config.coefficients)
    print("container_id,c1,c2,c3,stack_class,category,remaining_free_days")
    for cid in sorted(classifications):
        cls = classifications[cid]
        scores = ",".join(f"{s:.4f}" for s in cls.scores)
        print(
            f"{cid},{scores},{cls.stack_class.value},{cls.category.value},{cls.remaining_free_days}"
        )
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    config = _load_config(args)
    result = _load_containers(args, config)
    scenario = Scenario(args.scenario)
    outcome = run_scenario(result.containers, scenario, config, args.seed)
    print(format_report_text({scenario: outcome}), end="")
    return EXIT_OK


def cmd_schedule(args: argparse.Namespace) -> int:
    from .metrics import build_schedule

    config = _load_config(args)
    result = _load_containers(args, config)
    containers = result.containers
    current = config.current_date or max(c.arrival_date for c in containers)
    schedule = build_schedule(containers, config.params, current)
    cap = config.params.block_capacity
    if not args.rebalance:
        print(f"day: {schedule.day.isoformat()}")
        print(f"block_capacity: {cap}")
        for block in schedule.blocks:
            flag = " congested" if block.truck_count > cap else ""
            print(f"block.{block.index}: trucks={block.truck_count}{flag}")
        return EXIT_OK
    classifications = classify_all(containers, current, config.coefficients)
    registry = {c.id: c for c in containers}
    unappointed = [c for c in containers if c.appointment_block is None]
    after, report = run_recursive(schedule, registry, classifications, unappointed)
    print(f"moves: {len(report.moves)}")
    print(f"created: {len(report.created)}")
    print(f"converged: {str(report.converged).lower()}")
    for row in histogram(schedule, after, config.params):
        print(
            f"block.{row.index}: before={row.before} after={row.after} capacity={row.capacity}"
        )
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    config = _load_config(args)
    result = _load_containers(args, config)
    results = run_ladder(result.containers, config, args.seed)
    if args.format == "csv":
        print(format_report_csv(results), end="")
    else:
        print(format_report_text(results), end="")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    config = _load_config(args)
    manifest = getattr(args, "csv", None) or config.manifest or fixture_path()
    serve(config, port=args.port, host=args.host, manifest_path=manifest, console_dir=args.console)
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "classify": cmd_classify,
    "optimize": cmd_optimize,
    "schedule": cmd_schedule,
    "report": cmd_report,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (ManifestError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SegmentSizingError, InfeasibleModelError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
