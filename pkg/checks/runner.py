"""Run the selected suite groups; every catalogued suite appears in the results exactly once."""
import logging
from typing import Optional, Sequence

# Importing the suite modules registers their suites in catalogue order.
from checks import basis_suites, block_suites, core_suites, fine_suites, free_suites, net_suites, system_suites  # noqa: F401
from checks.context import VerificationContext
from checks.registry import CATALOGUE, Suite, SuiteResult
from construction.errors import CapExceededError, GridExhaustedError

logger = logging.getLogger(__name__)


def _grid_result(entry: Suite, error: GridExhaustedError, root: Optional[str]) -> SuiteResult:
    """The first suite needing μ carries the grid limit; later ones point back to it."""
    if root is None:
        logger.error(f"{entry.name}: perturbation grid exhausted, {error}")
        return SuiteResult(
            entry.name,
            entry.group,
            entry.claim,
            str(error.available),
            str(error.needed),
            False,
            f"cluster {error.cluster}",
            f"GridExhaustedError: {error}",
        )
    logger.warning(f"⚠ {entry.name}: not evaluated, the perturbation μ is unavailable (see {root})")
    return SuiteResult(
        entry.name, entry.group, entry.claim, None, None, False, "", f"dependent failure: perturbation μ unavailable, see {root}"
    )


def run_suites(context: VerificationContext, groups: Sequence[str]) -> list[SuiteResult]:
    results = []
    grid_root: Optional[str] = None
    for entry in CATALOGUE:
        if entry.group not in groups:
            results.append(entry.result(None, "group not selected"))
            continue
        try:
            result = entry.result(entry.check(context))
        except CapExceededError as e:
            logger.warning(f"⚠ {entry.name}: skipped, {e}")
            results.append(entry.result(None, str(e)))
            continue
        except GridExhaustedError as e:
            results.append(_grid_result(entry, e, grid_root))
            grid_root = grid_root or entry.name
            continue
        except Exception as e:
            logger.error(f"{entry.name}: {type(e).__name__}: {e}")
            result = SuiteResult(
                entry.name, entry.group, entry.claim, None, None, False, "", f"{type(e).__name__}: {e}"
            )
        if result.passed:
            logger.info(f"✓ {entry.name}: worst {result.worst} (bound {result.bound})")
        else:
            logger.error(f"{entry.name} FAILED: worst {result.worst} (bound {result.bound}) {result.witness}")
        results.append(result)
    return results
