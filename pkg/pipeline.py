"""Orchestration: build → order → verify → net → free-space report, then exports."""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from checks.context import VerificationContext
from checks.registry import SuiteResult
from checks.runner import run_suites
from construction.basis_assembly import build_construction
from construction.bd_system import build_system
from construction.errors import CapExceededError, ConsistencyError, GridExhaustedError
import exports
from result_store import ResultStore
from run_config import RunConfig, canonical_json, run_id

logger = logging.getLogger(__name__)

COMMANDS = ("build", "order", "verify", "net", "export", "run")

EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_CONFIG_ERROR = 2


@dataclass
class PipelineOutcome:
    exit_status: int
    artifacts: list[Path] = field(default_factory=list)
    results: list[SuiteResult] = field(default_factory=list)
    context: Optional[VerificationContext] = None


def _groups_for(command: str, config: RunConfig) -> tuple[str, ...]:
    if command in ("verify", "run"):
        return config.selected_groups
    if command == "net":
        return ("net",)
    return ()


def _tables_for(command: str, groups: tuple[str, ...]) -> tuple[str, ...]:
    if command == "run" and not groups:
        return ("blocks",)
    return {
        "build": ("blocks",),
        "order": ("blocks", "order", "fine", "retractions"),
        "verify": ("blocks", "lipschitz", "free"),
        "net": ("net",),
        "export": ("blocks", "order", "fine", "retractions", "net"),
        "run": ("blocks", "order", "fine", "retractions", "lipschitz", "net", "free"),
    }[command]


def _write_tables(context: VerificationContext, tables: tuple[str, ...], output_dir: Path, decimals: bool) -> list[Path]:
    artifacts = []
    writers = {
        "blocks": lambda: [exports.write_blocks(context, output_dir)],
        "order": lambda: [exports.write_order(context, output_dir)],
        "fine": lambda: exports.write_fine_indices(context, output_dir),
        "retractions": lambda: [exports.write_retractions(context, output_dir)],
        "lipschitz": lambda: [exports.write_lipschitz(context, output_dir, decimals)] if context.computed("constants") else [],
        "net": lambda: [exports.write_net(context, output_dir)],
        "free": lambda: [
            exports.write_projection_report(getattr(context, name), output_dir / f"{name}.csv", decimals)
            for name in ("free_report", "net_report")
            if context.computed(name)
        ],
    }
    for table in tables:
        try:
            artifacts.extend(writers[table]())
        except (CapExceededError, GridExhaustedError) as e:
            logger.warning(f"⚠ {table} export skipped: {e}")
    return artifacts


def run_pipeline(config: RunConfig, command: str = "run", store: Optional[ResultStore] = None) -> PipelineOutcome:
    """Build the construction, run the suites the command selects and write the artifacts.

    Args:
        config: validated run configuration
        command: one of COMMANDS
        store: optional Redis mirror

    Returns:
        PipelineOutcome with exit status 0 when every selected suite passes, 1 when one
        fails and 2 when the system or the construction cannot be built
    """
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    output_dir = Path(config.output_dir)
    config_data = json.loads(canonical_json(config))
    run = run_id(config)
    logger.info(f"Run {run}: command {command}, depth {config.depth}, output {output_dir}")

    try:
        system = build_system(config.system)
        construction = build_construction(system, config.depth, config.caps.max_block, config.caps.max_shell)
    except (ValueError, ConsistencyError) as e:
        logger.error(f"Build failed: {e}")
        document = exports.summary_document(run, config_data, None, [], EXIT_CONFIG_ERROR, str(e))
        artifacts = [exports.write_summary(document, output_dir)]
        if store is not None:
            store.save_run(document, artifacts)
        return PipelineOutcome(EXIT_CONFIG_ERROR, artifacts)

    context = VerificationContext(config, system, construction)
    groups = _groups_for(command, config)
    results = run_suites(context, groups)
    failed = [r.name for r in results if r.status == "fail"]
    exit_status = EXIT_SUITE_FAILURE if failed else EXIT_OK

    artifacts = _write_tables(context, _tables_for(command, groups), output_dir, config.decimal_columns)
    document = exports.summary_document(run, config_data, context, results, exit_status)
    artifacts.append(exports.write_summary(document, output_dir))
    if store is not None:
        store.save_run(document, artifacts)

    if failed:
        logger.error(f"{len(failed)} suites failed: {', '.join(failed)}")
    else:
        passed = sum(r.status == "pass" for r in results)
        logger.info(f"✓ {passed} suites passed, {len(results) - passed} skipped")
    return PipelineOutcome(exit_status, artifacts, results, context)
