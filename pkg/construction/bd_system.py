"""Finite-stage Bourgain-Delbaen systems.

A system is a stage chain plus one extension step per stage: the step from
Γ_n to Γ_{n+1} keeps the old coordinates and defines every γ ∈ Δ_{n+1} by a
rational coefficient row over Γ_n. Composing the steps gives the operators
i_n: ℓ∞(Γ_n) → ℓ∞(Γ_{N_max}); past N_max the chain is frozen and i_n is the
identity.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Mapping, Sequence, Union

from construction.errors import ConsistencyError, ExtensionPropertyError, LambdaBoundError, StageError
from construction.linf_core import QVec, Rational, StageChain, as_fraction, predicted_ball_size

if TYPE_CHECKING:
    from run_config import SystemConfig

logger = logging.getLogger(__name__)

PRESETS = ("zero", "affine")

Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True, eq=False)
class OneStepExtension:
    """The step j_n: ℓ∞(Γ_n) → ℓ∞(Γ_{n+1}); rows[γ] is the coefficient row of γ ∈ Δ_{n+1}."""

    stage: int
    rows: Mapping[int, tuple[Fraction, ...]]

    def matrix(self, chain: StageChain) -> Matrix:
        """Rows for every γ ∈ Γ_{n+1}: identity on Γ_n, then the new rows."""
        width = chain.size(self.stage)
        identity = tuple(
            tuple(Fraction(1) if c == r else Fraction(0) for c in range(width)) for r in range(width)
        )
        return identity + tuple(self.rows[gamma] for gamma in chain.delta(self.stage + 1))


def step_norm(step: OneStepExtension) -> Fraction:
    """ℓ∞ operator norm of one extension step."""
    return max([Fraction(1)] + [sum(abs(c) for c in row) for row in step.rows.values()])


def _preset_rows(preset: str, chain: StageChain, n: int, coefficient: Fraction) -> dict[int, tuple[Fraction, ...]]:
    width = chain.size(n)
    if preset == "zero":
        return {gamma: (Fraction(0),) * width for gamma in chain.delta(n + 1)}
    if preset == "affine":
        row = (Fraction(0),) * (width - 1) + (coefficient,)
        return {gamma: row for gamma in chain.delta(n + 1)}
    raise ValueError(f"unknown extension preset {preset!r}; expected one of {', '.join(PRESETS)}")


def _explicit_rows(
    chain: StageChain, n: int, supplied: Mapping[int, Sequence[Rational]]
) -> dict[int, tuple[Fraction, ...]]:
    width = chain.size(n)
    rows = {}
    for gamma, row in supplied.items():
        gamma = int(gamma)
        if gamma < width:
            raise ExtensionPropertyError(
                f"step {n}->{n + 1}: row for γ={gamma} redefines a coordinate of Γ_{n} "
                f"(extension operators must keep the old coordinates)"
            )
        if gamma not in chain.delta(n + 1):
            raise ValueError(f"step {n}->{n + 1}: γ={gamma} is not in Δ_{n + 1}={list(chain.delta(n + 1))}")
        if len(row) != width:
            raise ValueError(f"step {n}->{n + 1}: row for γ={gamma} has {len(row)} entries, expected |Γ_{n}|={width}")
        rows[gamma] = tuple(as_fraction(c) for c in row)
    missing = [gamma for gamma in chain.delta(n + 1) if gamma not in rows]
    if missing:
        raise ValueError(f"step {n}->{n + 1}: no coefficient row for γ in {missing}")
    return rows


def _compose(chain: StageChain, steps: Sequence[OneStepExtension]) -> tuple[Matrix, ...]:
    """composed[n-1] holds the matrix of i_n: rows over Γ_{N_max}, columns over Γ_n."""
    size = chain.dimension
    current: Matrix = tuple(
        tuple(Fraction(1) if c == r else Fraction(0) for c in range(size)) for r in range(size)
    )
    composed = [current]
    for step in reversed(steps):
        jump = step.matrix(chain)
        width = chain.size(step.stage)
        current = tuple(
            tuple(sum(row[k] * jump[k][c] for k in range(len(jump))) for c in range(width)) for row in current
        )
        composed.append(current)
    return tuple(reversed(composed))


@dataclass(frozen=True, eq=False)
class BDSystem:
    chain: StageChain
    steps: tuple[OneStepExtension, ...]
    lambda_bar: int
    composed: tuple[Matrix, ...]
    name: str = "custom"

    def __post_init__(self):
        # nonzero coefficients per composed row, for fast matrix-vector products
        sparse = tuple(
            tuple(tuple((c, coef) for c, coef in enumerate(row) if coef) for row in matrix)
            for matrix in self.composed
        )
        object.__setattr__(self, "_sparse", sparse)

    @property
    def n_max(self) -> int:
        return self.chain.n_max

    def s(self, n: int) -> int:
        """The radius s_n = λ̄ⁿ."""
        return self.lambda_bar**n

    def matrix(self, n: int) -> Matrix:
        if n < 1:
            raise StageError(f"stage index must be >= 1, got {n}")
        return self.composed[min(n, self.n_max) - 1]

    def operator_norm(self, n: int) -> Fraction:
        return max(sum(abs(c) for c in row) for row in self.matrix(n))

    def extend_values(self, n: int, values: Sequence[Rational]) -> tuple[Fraction, ...]:
        """i_n applied to a coordinate sequence over Γ_n."""
        if n < 1:
            raise StageError(f"stage index must be >= 1, got {n}")
        width = self.chain.size(n)
        if len(values) != width:
            raise ValueError(f"expected {width} coordinates on Γ_{n}, got {len(values)}")
        rows = self._sparse[min(n, self.n_max) - 1]
        return tuple(sum((coef * values[c] for c, coef in row), Fraction(0)) for row in rows)


def build_system(config: "SystemConfig") -> BDSystem:
    """Build and validate a system from its configuration.

    Args:
        config: stage sizes, preset name or explicit rows, lambda_bar and N_max

    Returns:
        BDSystem with verified compatibility and lambda_bar bound
    """
    sizes = tuple(config.stages)
    n_max = config.n_max if config.n_max is not None else len(sizes)
    if not 1 <= n_max <= len(sizes):
        raise StageError(f"N_max={n_max} must lie in 1..{len(sizes)} (number of configured stages)")
    chain = StageChain(sizes[:n_max])
    if int(config.lambda_bar) != config.lambda_bar or config.lambda_bar < 1:
        raise ValueError(f"lambda_bar must be a positive integer, got {config.lambda_bar}")

    steps = []
    if isinstance(config.extension, str):
        name = config.extension
        for n in range(1, n_max):
            steps.append(OneStepExtension(n, _preset_rows(name, chain, n, as_fraction(config.coefficient))))
    else:
        name = "explicit"
        if len(config.extension) < n_max - 1:
            raise ValueError(f"expected {n_max - 1} explicit extension steps, got {len(config.extension)}")
        for n, supplied in enumerate(config.extension[: n_max - 1], start=1):
            steps.append(OneStepExtension(n, _explicit_rows(chain, n, supplied)))

    composed = _compose(chain, steps)
    system = BDSystem(chain, tuple(steps), int(config.lambda_bar), composed, name)

    worst = None
    for n in range(1, n_max + 1):
        for gamma, row in enumerate(system.matrix(n)):
            total = sum(abs(c) for c in row)
            if total > system.lambda_bar and (worst is None or total > worst[2]):
                worst = (n, gamma, total)
    if worst is not None:
        n, gamma, total = worst
        raise LambdaBoundError(
            f"lambda_bar={system.lambda_bar} is below the norm of i_{n}: "
            f"composed row γ={gamma} has absolute sum {total}"
        )

    _assert_compatible(system)
    logger.info(
        f"✓ Built {name} system: stages {list(chain.sizes)}, lambda_bar={system.lambda_bar}, "
        f"lambda={lambda_of(system)}"
    )
    return system


def _assert_compatible(system: BDSystem) -> None:
    """i_m ∘ r_m ∘ i_n = i_n as matrices for all n < m <= N_max."""
    for n in range(1, system.n_max + 1):
        inner = system.matrix(n)
        for m in range(n + 1, system.n_max + 1):
            outer = system.matrix(m)
            cut = inner[: system.chain.size(m)]
            product = tuple(
                tuple(sum(row[k] * cut[k][c] for k in range(len(cut))) for c in range(len(inner[0])))
                for row in outer
            )
            if product != inner:
                raise ConsistencyError(f"composed operators i_{n} and i_{m} are not compatible")


def extend(system: BDSystem, n: int, v: Union[QVec, Sequence[Rational]]) -> QVec:
    """i_n(v) as a vector on Γ_{N_max}."""
    width = system.chain.size(n)
    if not isinstance(v, QVec):
        v = QVec.from_point(v)
    outside = [i for i in v.support if i >= width]
    if outside:
        raise ValueError(f"vector is supported outside Γ_{n}: indices {outside}")
    return QVec.from_point(system.extend_values(n, [v[i] for i in range(width)]))


def lambda_of(system: BDSystem) -> Fraction:
    """max_n ‖i_n‖, exact."""
    return max(system.operator_norm(n) for n in range(1, system.n_max + 1))


def compatibility_samples(system: BDSystem, n: int, cap: int) -> list[QVec]:
    """The integer points of the s_n-ball of ℓ∞(Γ_n), first `cap` in lexicographic order."""
    width, radius = system.chain.size(n), system.s(n)
    total = predicted_ball_size(width, radius)
    if total > cap:
        logger.info(f"⚠ Compatibility sample at stage {n} capped at {cap} of {total} points")
    points = itertools.product(range(-radius, radius + 1), repeat=width)
    return [QVec.from_point(p) for p in itertools.islice(points, cap)]
