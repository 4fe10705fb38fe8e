"""The global order I on M, the retractional basis φ_i and its transfer to a net N."""
import bisect
import itertools
import logging
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from construction.bd_system import BDSystem
from construction.errors import CapExceededError, ConsistencyError, GridExhaustedError, NotRealizedError
from construction.fine_retractions import (
    DEFAULT_SHELL_CAP,
    EIndex,
    GIndex,
    build_e_index,
    build_g_index,
    phi_intermediate,
    psi_intermediate,
)
from construction.linf_core import (
    Point,
    QVec,
    Rational,
    as_fraction,
    lipschitz_constant_points,
    lipschitz_constants_of_tables,
    scaled_integer_array,
)
from construction.net_blocks import DEFAULT_BLOCK_CAP, BlockChain, build_chain, phi, psi

logger = logging.getLogger(__name__)

DEFAULT_TABLE_CAP = 10**7
GRID_VALUES = (Fraction(-3, 4), Fraction(0), Fraction(3, 4))

RationalPoint = tuple[Fraction, ...]


def k_global(lambda_bar: Rational) -> Fraction:
    """Uniform Lipschitz bound of the global retractions."""
    lam = as_fraction(lambda_bar)
    return max(
        (2 * lam**2 + 4 * lam + 4) * (lam**2 + 2 * lam + 2) * (3 * lam + 2),
        (3 * lam + 2) ** 2 * (3 * lam**2 + 6 * lam + 11),
        lam**2,
    )


@dataclass(frozen=True)
class Segment:
    """A run of consecutive global indices: "M1" for M_1, "C" for C_n, "E" for M_n \\ D_{n-1}."""

    kind: str
    stage: int
    start: int
    end: int

    @property
    def offset(self) -> int:
        return self.start - 1


@dataclass(frozen=True, eq=False)
class GlobalOrder:
    points: tuple[Point, ...]
    index: dict[Point, int] = field(repr=False)
    segments: tuple[Segment, ...]
    boundaries: dict[str, int]

    def __len__(self) -> int:
        return len(self.points)

    def point(self, i: int) -> Point:
        """I⁻¹(i)."""
        if not 1 <= i <= len(self.points):
            raise ValueError(f"index {i} out of range 1..{len(self.points)}")
        return self.points[i - 1]

    def index_of(self, x: Point) -> int:
        """I(x)."""
        if x not in self.index:
            raise NotRealizedError(f"{x} is not a realized point")
        return self.index[x]

    def segment_of(self, i: int) -> Segment:
        if not 1 <= i <= len(self.points):
            raise ValueError(f"index {i} out of range 1..{len(self.points)}")
        starts = [s.start for s in self.segments]
        return self.segments[bisect.bisect_right(starts, i) - 1]

    def prefix(self, i: int) -> tuple[Point, ...]:
        """M^i = I⁻¹({1, ..., i})."""
        return self.points[:i]


@dataclass(frozen=True, eq=False)
class Construction:
    """Everything realized through a given depth."""

    system: BDSystem
    chain: BlockChain
    e_indices: dict[int, EIndex]
    g_indices: dict[int, GIndex]
    order: GlobalOrder

    @property
    def origin(self) -> Point:
        return (0,) * self.system.chain.dimension


def global_index(chain: BlockChain, e_indices: dict[int, EIndex], g_indices: dict[int, GIndex]) -> GlobalOrder:
    """I: M_1 (origin first), then C_1, M_2 \\ D_1, C_2, ... in the orders of G(n) and E(n)."""
    origin = (0,) * chain.system.chain.dimension
    first = chain.stage(1).m_points
    if origin not in first:
        raise ConsistencyError("the origin is not in M_1")
    points = [origin] + [x for x in first if x != origin]
    segments = [Segment("M1", 1, 1, len(points))]
    boundaries = {"#M_1": len(points)}
    for n in range(1, chain.depth):
        for kind, stage, block in (("C", n, g_indices[n].points), ("E", n + 1, e_indices[n + 1].points)):
            if block:
                segments.append(Segment(kind, stage, len(points) + 1, len(points) + len(block)))
                points.extend(block)
            boundaries[f"#D_{n}" if kind == "C" else f"#M_{n + 1}"] = len(points)

    expected = chain.cardinalities()
    for name, value in boundaries.items():
        if expected[name] != value:
            raise ConsistencyError(f"segment boundary {name}={value} disagrees with block size {expected[name]}")
    if len(set(points)) != len(points) or set(points) != set(chain.points):
        raise ConsistencyError("global order is not a bijection onto the realized points")
    index = {x: i for i, x in enumerate(points, start=1)}
    logger.info(f"✓ Global order: #M={len(points)}, boundaries {boundaries}")
    return GlobalOrder(tuple(points), index, tuple(segments), boundaries)


def build_construction(
    system: BDSystem,
    depth: int,
    block_cap: int = DEFAULT_BLOCK_CAP,
    shell_cap: int = DEFAULT_SHELL_CAP,
) -> Construction:
    chain = build_chain(system, depth, block_cap)
    g_indices = {n: build_g_index(chain, n) for n in range(1, depth)}
    e_indices = {n: build_e_index(chain, n, shell_cap) for n in range(2, depth + 1)}
    return Construction(system, chain, e_indices, g_indices, global_index(chain, e_indices, g_indices))


def varphi(construction: Construction, i: int, x: Point) -> Point:
    """The global retraction φ_i of M onto M^i.

    On the first segment φ_i retracts through φ_1 and then sends what falls
    outside M^i to the origin.
    """
    order, chain = construction.order, construction.chain
    segment = order.segment_of(i)
    if order.index_of(x) <= i:
        return x
    local = i - segment.offset
    if segment.kind == "M1":
        y = phi(chain, 1, x)
        return y if order.index[y] <= i else construction.origin
    if segment.kind == "C":
        n = segment.stage
        y = psi(chain, n + 1, phi(chain, n + 1, x))
        return phi_intermediate(construction.g_indices[n], local, y)
    n = segment.stage
    return psi_intermediate(construction.e_indices[n], local, phi(chain, n, x))


def retraction_tables(construction: Construction, cap: int = DEFAULT_TABLE_CAP) -> np.ndarray:
    """tables[i-1, k] = I(φ_i(I⁻¹(k+1))) - 1."""
    order = construction.order
    size = len(order)
    if size * size > cap:
        raise CapExceededError("global retraction tables", size * size, cap)
    tables = np.empty((size, size), dtype=np.intp)
    for i in range(1, size + 1):
        tables[i - 1] = [order.index[varphi(construction, i, x)] - 1 for x in order.points]
    return tables


def commutation_failures(tables: np.ndarray) -> list[tuple[int, int, int]]:
    """(i1, i2, k) with φ_{i1}∘φ_{i2} ≠ φ_{min} at column k; i1, i2 are 1-based, k is 0-based."""
    failures = []
    size = tables.shape[0]
    for a in range(size):
        composed = tables[a][tables[a:]]
        bad = np.argwhere(composed != tables[a][None, :])
        failures.extend((a + 1, a + 1 + int(r), int(k)) for r, k in bad[:5])
        later = tables[a + 1:]
        reverse = np.take_along_axis(later, tables[a][None, :].repeat(later.shape[0], axis=0), axis=1)
        bad = np.argwhere(reverse != tables[a][None, :])
        failures.extend((a + 2 + int(r), a + 1, int(k)) for r, k in bad[:5])
        if len(failures) >= 10:
            break
    return failures


def project_rho(construction: Construction, m: Point) -> QVec:
    """ρ(m) = i_{n(m)}(r_{n(m)}(m))."""
    chain = construction.chain
    if not chain.contains(m):
        raise NotRealizedError(f"{m} is not a realized point")
    n = chain.birth_stage[m]
    width = construction.system.chain.size(n)
    return QVec.from_point(construction.system.extend_values(n, m[:width]))


@dataclass(frozen=True, eq=False)
class NetEquivalence:
    """Greedy clusters of ρ(M) and, once perturbed, the bijection μ: M → N."""

    a: Fraction
    rho: dict[Point, RationalPoint] = field(repr=False)
    representatives: tuple[RationalPoint, ...]
    clusters: tuple[tuple[RationalPoint, ...], ...]
    grid: tuple[RationalPoint, ...] = ()
    mu: Optional[dict[Point, RationalPoint]] = field(default=None, repr=False)
    forward: Optional[Fraction] = None
    backward: Optional[Fraction] = None

    @property
    def distortion(self) -> Optional[Fraction]:
        if self.forward is None or self.backward is None:
            return None
        return self.forward * self.backward

    def b(self, lambda_bar: int) -> Fraction:
        return self.a + 2 * lambda_bar + 3


def extract_net(construction: Construction, a: Rational) -> NetEquivalence:
    """Greedy (a, a)-net of ρ(M), scanning ρ(M) in the lexicographic order of the points of M."""
    a = as_fraction(a)
    if a <= 1:
        raise ValueError(f"the net parameter a must exceed 1, got {a}")
    rho = {m: tuple(project_rho(construction, m).values) for m in construction.chain.points}
    values = list(dict.fromkeys(rho[m] for m in construction.chain.points))
    array, denominator = scaled_integer_array(values)

    remaining = np.arange(len(values))
    representatives, clusters = [], []
    while remaining.size:
        head = remaining[0]
        dist = np.abs(array[remaining] - array[head]).max(axis=1)
        inside = dist * a.denominator <= a.numerator * denominator
        representatives.append(values[head])
        clusters.append(tuple(values[k] for k in remaining[inside]))
        remaining = remaining[~inside]
    logger.info(f"✓ Greedy net with a={a}: {len(representatives)} clusters over {len(values)} ρ-points")
    return NetEquivalence(a, rho, tuple(representatives), tuple(clusters))


def perturbation_grid(dimension: int) -> tuple[RationalPoint, ...]:
    """{-3/4, 0, 3/4}^Γ with the origin first, the rest lexicographic."""
    zero = (Fraction(0),) * dimension
    rest = [p for p in itertools.product(GRID_VALUES, repeat=dimension) if p != zero]
    return (zero,) + tuple(rest)


def perturb(construction: Construction, equiv: NetEquivalence, workers: int = 1) -> NetEquivalence:
    """μ(m) = m̃_k + (a/2)·x_l for the l-th point m of M with ρ(m) in cluster k."""
    grid = perturbation_grid(construction.system.chain.dimension)
    cluster_of = {v: k for k, cluster in enumerate(equiv.clusters) for v in cluster}
    preimages: list[list[Point]] = [[] for _ in equiv.clusters]
    for m in construction.chain.points:
        preimages[cluster_of[equiv.rho[m]]].append(m)

    half = equiv.a / 2
    mu = {}
    for k, members in enumerate(preimages):
        if len(members) > len(grid):
            raise GridExhaustedError(k, len(members), len(grid))
        rep = equiv.representatives[k]
        for m, x in zip(members, grid):
            mu[m] = tuple(r + half * c for r, c in zip(rep, x))
    if len(set(mu.values())) != len(mu):
        raise ConsistencyError("μ is not injective")

    domain = list(construction.chain.points)
    image = [mu[m] for m in domain]
    forward = lipschitz_constant_points(domain, image, workers)
    backward = lipschitz_constant_points(image, domain, workers)
    logger.info(f"✓ Perturbation μ: Lip(μ)={forward}, Lip(μ⁻¹)={backward}, distortion={forward * backward}")
    return replace(equiv, grid=grid, mu=mu, forward=forward, backward=backward)


@dataclass(frozen=True, eq=False)
class TransferredBasis:
    """μ∘φ_i∘μ⁻¹ on N, listed in the order μ(I⁻¹(1)), μ(I⁻¹(2)), ..."""

    points: tuple[RationalPoint, ...]
    tables: np.ndarray = field(repr=False)
    constants: tuple[Fraction, ...]
    constant_on_m: Fraction
    distortion: Fraction

    @property
    def bound(self) -> Fraction:
        return self.distortion * self.constant_on_m

    def prefix(self, i: int) -> tuple[RationalPoint, ...]:
        """μ(M^i)."""
        return self.points[:i]


def transfer_basis(
    construction: Construction,
    equiv: NetEquivalence,
    tables: np.ndarray,
    constants_on_m: Sequence[Fraction],
    workers: int = 1,
) -> TransferredBasis:
    if equiv.mu is None or equiv.distortion is None:
        raise ValueError("transfer_basis needs a perturbed net equivalence")
    points = tuple(equiv.mu[x] for x in construction.order.points)
    constants = lipschitz_constants_of_tables(points, tables, workers)
    return TransferredBasis(points, tables, tuple(constants), max(constants_on_m, default=Fraction(0)), equiv.distortion)


def ambient_sample(construction: Construction, cap: int, seed: int) -> list[RationalPoint]:
    """i_depth(w) for w on the half-integer grid of the s_depth-ball of ℓ∞(Γ_depth)."""
    system = construction.system
    depth = construction.chain.depth
    width = system.chain.size(depth)
    radius = system.s(depth)
    steps = [Fraction(k, 2) for k in range(-2 * radius, 2 * radius + 1)]
    total = len(steps) ** width
    if total <= cap:
        chosen = range(total)
    else:
        chosen = sorted(random.Random(seed).sample(range(total), cap))
        logger.info(f"⚠ Ambient sample reduced to {cap} of {total} grid points (seed {seed})")

    sample = []
    for code in chosen:
        digits = []
        for _ in range(width):
            code, digit = divmod(code, len(steps))
            digits.append(steps[digit])
        sample.append(system.extend_values(depth, tuple(reversed(digits))))
    return sample
