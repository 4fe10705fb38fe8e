"""Lipschitz-free space computations over a finite pointed metric space.

The norm of a molecule Σ a_x δ_x is the optimal value of the balanced
transport problem between its positive and negative parts, the base point
absorbing the imbalance; the transport potentials certify it by strong
duality. The Lipschitz-function dual LP is solved separately as a cross-check.
"""
import itertools
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Optional, Sequence, Union

import numpy as np

from construction.errors import ConsistencyError
from construction.exact_lp import DenseTableau, solve_transport
from construction.linf_core import distance_matrix, sup_distance

logger = logging.getLogger(__name__)

PointLike = tuple


@dataclass(frozen=True, eq=False)
class FiniteMetric:
    """Points with the sup metric; `base` is the distinguished point 0."""

    points: tuple[PointLike, ...]
    base: PointLike
    index: dict[PointLike, int] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "index", {p: k for k, p in enumerate(self.points)})
        if len(self.index) != len(self.points):
            raise ValueError("metric space points must be distinct")
        if self.base not in self.index:
            raise ValueError(f"base point {self.base} is not among the points")

    def __contains__(self, x: PointLike) -> bool:
        return x in self.index

    def distance(self, x: PointLike, y: PointLike) -> Fraction:
        return sup_distance(x, y)

    def validate(self) -> list[str]:
        """Exhaustive metric axioms; returns the violated ones."""
        dist, _ = distance_matrix(self.points)
        problems = []
        if np.any(np.diag(dist) != 0):
            problems.append("nonzero diagonal")
        off = ~np.eye(len(self.points), dtype=bool)
        if np.any(dist[off] <= 0):
            problems.append("coincident points")
        if np.any(dist != dist.T):
            problems.append("asymmetric distances")
        for k in range(len(self.points)):
            if np.any(dist > dist[:, k][:, None] + dist[k, :][None, :]):
                problems.append(f"triangle inequality fails through point {k}")
                break
        return problems


@dataclass(frozen=True)
class Molecule:
    """Σ a_x δ_x with δ_base = 0: terms sorted by point, nonzero coefficients, base point dropped."""

    base: PointLike
    terms: tuple[tuple[PointLike, Fraction], ...] = ()

    @classmethod
    def from_mapping(cls, coefficients: Mapping[PointLike, Any], base: PointLike) -> "Molecule":
        merged: dict[PointLike, Fraction] = {}
        for x, a in coefficients.items():
            merged[x] = merged.get(x, Fraction(0)) + Fraction(a)
        return cls(base, tuple(sorted((x, a) for x, a in merged.items() if a != 0 and x != base)))

    @classmethod
    def delta(cls, x: PointLike, base: PointLike) -> "Molecule":
        return cls.from_mapping({x: 1}, base)

    @property
    def support(self) -> tuple[PointLike, ...]:
        return tuple(x for x, _ in self.terms)

    def coefficients(self) -> dict[PointLike, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def scale(self, q: Any) -> "Molecule":
        return Molecule.from_mapping({x: Fraction(q) * a for x, a in self.terms}, self.base)

    def _merge(self, other: "Molecule", sign: int) -> "Molecule":
        if other.base != self.base:
            raise ValueError("molecules over different base points")
        merged = self.coefficients()
        for x, a in other.terms:
            merged[x] = merged.get(x, Fraction(0)) + sign * a
        return Molecule.from_mapping(merged, self.base)

    def __add__(self, other: "Molecule") -> "Molecule":
        return self._merge(other, 1)

    def __sub__(self, other: "Molecule") -> "Molecule":
        return self._merge(other, -1)


@dataclass(frozen=True)
class NormCertificate:
    value: Fraction
    dual_value: Fraction
    dual_feasible: bool
    pivots: int

    @property
    def strong_duality(self) -> bool:
        return self.dual_feasible and self.value == self.dual_value


def _check_support(metric: FiniteMetric, m: Molecule) -> None:
    if m.base != metric.base:
        raise ValueError(f"molecule base {m.base} differs from the metric base {metric.base}")
    for x in m.support:
        if x not in metric:
            raise ValueError(f"molecule point {x} is not in the metric space")


def free_norm_certificate(metric: FiniteMetric, m: Molecule) -> NormCertificate:
    """‖m‖ as a min-cost transport value, with its dual potentials checked."""
    _check_support(metric, m)
    if m.is_zero():
        return NormCertificate(Fraction(0), Fraction(0), True, 0)
    sources = [(x, a) for x, a in m.terms if a > 0]
    sinks = [(x, -a) for x, a in m.terms if a < 0]
    balance = sum(a for _, a in m.terms)
    if balance > 0:
        sinks.append((metric.base, balance))
    elif balance < 0:
        sources.append((metric.base, -balance))
    cost = [[metric.distance(x, y) for y, _ in sinks] for x, _ in sources]
    solution = solve_transport([a for _, a in sources], [b for _, b in sinks], cost)
    return NormCertificate(solution.cost, solution.dual_value, solution.dual_feasible, solution.pivots)


def free_norm(metric: FiniteMetric, m: Molecule) -> Fraction:
    certificate = free_norm_certificate(metric, m)
    if not certificate.strong_duality:
        raise ConsistencyError(f"transport value {certificate.value} is not certified by its potentials")
    return certificate.value


def dual_lp_norm(metric: FiniteMetric, m: Molecule) -> Fraction:
    """max Σ a_x u(x) over 1-Lipschitz u with u(base) = 0, by the tableau simplex.

    Solved in w(x) = u(x) + d(x, base) >= 0, so every right-hand side is nonnegative.
    """
    _check_support(metric, m)
    if m.is_zero():
        return Fraction(0)
    support = m.support
    radius = [metric.distance(x, metric.base) for x in support]
    size = len(support)
    A, b = [], []
    for p, q in itertools.permutations(range(size), 2):
        row = [Fraction(0)] * size
        row[p], row[q] = Fraction(1), Fraction(-1)
        A.append(row)
        b.append(metric.distance(support[p], support[q]) + radius[p] - radius[q])
    for p in range(size):
        row = [Fraction(0)] * size
        row[p] = Fraction(1)
        A.append(row)
        b.append(2 * radius[p])
    coefficients = [a for _, a in m.terms]
    tableau = DenseTableau(A, b, coefficients)
    status = tableau.solve()
    if status != "optimal":
        raise ConsistencyError(f"dual LP finished with status {status}")
    return tableau.value - sum(a * r for a, r in zip(coefficients, radius))


def pushforward(
    map_table: Union[Mapping[PointLike, PointLike], Callable[[PointLike], PointLike]],
    m: Molecule,
) -> Molecule:
    """Σ a_x δ_{T(x)}, coefficients merged; T must fix the base point."""
    if isinstance(map_table, Mapping):

        def image(x: PointLike) -> PointLike:
            if x not in map_table:
                raise ValueError(f"map is undefined at {x}")
            return map_table[x]

        moved = map_table.get(m.base, m.base)
    else:
        image = map_table
        moved = image(m.base)
    if moved != m.base:
        raise ValueError(f"base point moved by the map: {m.base} -> {moved}")
    merged: dict[PointLike, Fraction] = {}
    for x, a in m.terms:
        y = image(x)
        merged[y] = merged.get(y, Fraction(0)) + a
    return Molecule.from_mapping(merged, m.base)


@dataclass(frozen=True)
class SampleMolecule:
    label: str
    molecule: Molecule


def sample_molecules(
    points: Sequence[PointLike],
    base: PointLike,
    elementary: int,
    pairs: int,
    random_count: int,
    seed: int,
    max_support: int = 4,
) -> list[SampleMolecule]:
    """Elementary δ_x on a prefix, differences δ_x - δ_y on sampled pairs, seeded random combinations.

    Labels refer to 1-based positions in `points`.
    """
    rng = random.Random(seed)
    candidates = [(k, x) for k, x in enumerate(points, start=1) if x != base]
    samples = [SampleMolecule(f"delta:{k}", Molecule.delta(x, base)) for k, x in candidates[:elementary]]

    all_pairs = list(itertools.combinations(candidates, 2))
    for (k, x), (l, y) in rng.sample(all_pairs, min(pairs, len(all_pairs))):
        samples.append(SampleMolecule(f"diff:{k}-{l}", Molecule.from_mapping({x: 1, y: -1}, base)))

    for r in range(random_count):
        size = rng.randint(2, max(2, min(max_support, len(candidates))))
        chosen = rng.sample(candidates, min(size, len(candidates)))
        coefficients = {}
        for _, x in chosen:
            numerator = rng.choice([n for n in range(-9, 10) if n != 0])
            coefficients[x] = Fraction(numerator, rng.randint(1, 4))
        samples.append(SampleMolecule(f"random:{r}", Molecule.from_mapping(coefficients, base)))
    return samples


@dataclass(frozen=True)
class ProjectionRow:
    label: str
    index: int
    norm: Fraction
    projected_norm: Fraction
    residual: Fraction

    @property
    def ratio(self) -> Fraction:
        return self.projected_norm / self.norm if self.norm else Fraction(0)


@dataclass
class BasisReport:
    rows: list[ProjectionRow] = field(default_factory=list)
    bound_violations: list[ProjectionRow] = field(default_factory=list)
    lipschitz_violations: list[ProjectionRow] = field(default_factory=list)
    commutation_failures: list[tuple[str, int, int]] = field(default_factory=list)
    final_residual_failures: list[str] = field(default_factory=list)
    duality_failures: int = 0
    crosscheck_failures: list[str] = field(default_factory=list)
    crosschecks: int = 0
    solves: int = 0
    monotone: dict[str, bool] = field(default_factory=dict)

    @property
    def worst_ratio(self) -> Fraction:
        return max((row.ratio for row in self.rows), default=Fraction(0))

    @property
    def passed(self) -> bool:
        return not (
            self.bound_violations
            or self.lipschitz_violations
            or self.commutation_failures
            or self.final_residual_failures
            or self.duality_failures
            or self.crosscheck_failures
        )


def _check_sample(
    metric: FiniteMetric,
    projectors: dict[int, Callable[[PointLike], PointLike]],
    sample: SampleMolecule,
    total: int,
    bound: Fraction,
    constants: Optional[Sequence[Fraction]],
    crosscheck_support: int,
) -> BasisReport:
    report = BasisReport()

    def norm(m: Molecule) -> Fraction:
        certificate = free_norm_certificate(metric, m)
        report.solves += 1
        if not certificate.strong_duality:
            report.duality_failures += 1
        return certificate.value

    m = sample.molecule
    norm_m = norm(m)
    if 0 < len(m.support) <= crosscheck_support:
        report.crosschecks += 1
        if dual_lp_norm(metric, m) != norm_m:
            report.crosscheck_failures.append(sample.label)

    projections, residuals = {}, []
    for i, projector in projectors.items():
        projected = pushforward(projector, m)
        projections[i] = projected
        row = ProjectionRow(sample.label, i, norm_m, norm(projected), norm(projected - m))
        report.rows.append(row)
        residuals.append(row.residual)
        if row.projected_norm > bound * norm_m:
            report.bound_violations.append(row)
        if constants is not None and row.projected_norm > constants[i - 1] * norm_m:
            report.lipschitz_violations.append(row)
    report.monotone[sample.label] = all(a >= b for a, b in zip(residuals, residuals[1:]))
    if total in projections and residuals[-1] != 0:
        report.final_residual_failures.append(sample.label)

    for i1, i2 in itertools.combinations(projectors, 2):
        low = projections[i1]
        if pushforward(projectors[i1], projections[i2]) != low or pushforward(projectors[i2], low) != low:
            report.commutation_failures.append((sample.label, i1, i2))
    return report


def basis_check(
    metric: FiniteMetric,
    ordered_points: Sequence[PointLike],
    tables: np.ndarray,
    indices: Sequence[int],
    samples: Sequence[SampleMolecule],
    bound: Fraction,
    constants: Optional[Sequence[Fraction]] = None,
    crosscheck_support: int = 0,
    workers: int = 1,
) -> BasisReport:
    """Linearized retractions P_i = pushforward under φ_i, checked on sample molecules.

    Args:
        metric: the pointed metric space
        ordered_points: points in the order the tables index them
        tables: tables[i-1, k] is the position of φ_i(ordered_points[k])
        indices: prefix indices i to project onto (include len(ordered_points) for the final residual)
        samples: labelled molecules
        bound: the basis constant K
        constants: Lipschitz constant of each φ_i, for the per-map bound
        crosscheck_support: molecules with at most this many support points are also solved by the dual LP
        workers: molecules are independent and may be checked on a thread pool

    Returns:
        BasisReport with one row per (molecule, index) in sample order
    """
    position = {x: k for k, x in enumerate(ordered_points)}

    def projector(i: int) -> Callable[[PointLike], PointLike]:
        row = tables[i - 1]
        return lambda x: ordered_points[row[position[x]]]

    projectors = {i: projector(i) for i in sorted(set(indices))}

    def check(sample: SampleMolecule) -> BasisReport:
        return _check_sample(metric, projectors, sample, len(ordered_points), bound, constants, crosscheck_support)

    if workers > 1 and len(samples) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(check, samples))
    else:
        parts = [check(sample) for sample in samples]

    report = BasisReport()
    for part in parts:
        report.rows.extend(part.rows)
        report.bound_violations.extend(part.bound_violations)
        report.lipschitz_violations.extend(part.lipschitz_violations)
        report.commutation_failures.extend(part.commutation_failures)
        report.final_residual_failures.extend(part.final_residual_failures)
        report.crosscheck_failures.extend(part.crosscheck_failures)
        report.duality_failures += part.duality_failures
        report.crosschecks += part.crosschecks
        report.solves += part.solves
        report.monotone.update(part.monotone)

    logger.info(
        f"✓ Basis check: {len(samples)} molecules x {len(projectors)} indices, {report.solves} transport solves, "
        f"worst ratio {report.worst_ratio}"
    )
    return report


def prefix_indices(size: int, count: int) -> list[int]:
    """`count` indices spread evenly over 1..size, always including 1 and size."""
    if size < 1:
        return []
    count = max(2, min(count, size))
    return sorted({1 + (size - 1) * k // (count - 1) for k in range(count)})
