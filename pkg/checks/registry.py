"""Suite registration and result records."""
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Callable, Optional, Sequence

from checks import SUITE_GROUPS

if TYPE_CHECKING:
    from checks.context import VerificationContext

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Finding:
    """What a suite observed: its verdict, the bound it checked and the worst value seen."""

    passed: bool
    bound: Any = None
    worst: Any = None
    witness: str = ""
    detail: str = ""


@dataclass(frozen=True)
class SuiteResult:
    name: str
    group: str
    claim: str
    bound: Optional[str]
    worst: Optional[str]
    passed: Optional[bool]
    witness: str = ""
    detail: str = ""

    @property
    def status(self) -> str:
        if self.passed is None:
            return "skipped"
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "group": self.group,
            "claim": self.claim,
            "bound": self.bound,
            "worst": self.worst,
            "status": self.status,
            "witness": self.witness,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class Suite:
    name: str
    group: str
    claim: str
    check: Callable[["VerificationContext"], Finding]

    def result(self, finding: Optional[Finding], detail: str = "") -> SuiteResult:
        if finding is None:
            return SuiteResult(self.name, self.group, self.claim, None, None, None, "", detail)
        return SuiteResult(
            self.name,
            self.group,
            self.claim,
            None if finding.bound is None else str(finding.bound),
            None if finding.worst is None else str(finding.worst),
            finding.passed,
            finding.witness,
            finding.detail,
        )


CATALOGUE: list[Suite] = []


def suite(name: str, group: str, claim: str):
    """Register a check under a unique name in one of the suite groups."""
    if group not in SUITE_GROUPS:
        raise ValueError(f"unknown suite group {group!r}")

    def register(check: Callable[["VerificationContext"], Finding]):
        if any(s.name == name for s in CATALOGUE):
            raise ValueError(f"suite {name!r} is registered twice")
        CATALOGUE.append(Suite(name, group, claim, check))
        return check

    return register


def at_most(worst: Any, bound: Any, witness: str = "", detail: str = "") -> Finding:
    return Finding(worst <= bound, bound, worst, witness, detail)


def no_failures(failures: Sequence[Any], checked: int, what: str) -> Finding:
    """Exact-equality suites: the worst value is the number of failing cases."""
    return Finding(
        not failures,
        0,
        len(failures),
        str(failures[0]) if failures else "",
        f"{checked} {what} checked",
    )
