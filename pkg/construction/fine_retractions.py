"""One-point-at-a-time refinement of the coarse retractions.

Between D_{n-1} and M_n the points x^n_i are peeled off one by one through the
index set E(n); between M_n and D_n the points c^n_i through G(n). Each local
retraction sends a single point to a point of smaller index, so the global
intermediate retractions Ψ_{n,i} and φ_{n,i} are walks along these parent
links until the index drops to i or below.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

from construction.bd_system import BDSystem
from construction.errors import CapExceededError, ConsistencyError, NotRealizedError, StageError
from construction.linf_core import Point, integer_shell, point_norm, predicted_ball_size, truncate_point
from construction.net_blocks import BlockChain

logger = logging.getLogger(__name__)

DEFAULT_SHELL_CAP = 10**6


@dataclass(frozen=True, eq=False)
class ShellOrder:
    """y^n_0 = 0, y^n_1, ... over Δ_n, shell by shell, lexicographic inside a shell."""

    stage: int
    width: int
    max_shell: int
    points: tuple[Point, ...]
    norms: tuple[int, ...]
    index: dict[Point, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.points)

    def step(self, j: int) -> int:
        """Index of T^n_j(y^n_j) = T_{‖y_j‖-1}(y^n_j)."""
        if not 1 <= j < len(self.points):
            raise ValueError(f"T^n_j is defined for 1 <= j < {len(self.points)}, got {j}")
        return self.index[truncate_point(self.points[j], self.norms[j] - 1)]

    def local_truncation(self, j: int, k: int) -> int:
        """T^n_j applied to y^n_k, as an index: only y^n_j moves."""
        return self.step(j) if k == j else k


def shell_enumeration(system: BDSystem, n: int, max_shell: int, cap: int = DEFAULT_SHELL_CAP) -> ShellOrder:
    if n < 2:
        raise StageError(f"shell orders live on Δ_n for n >= 2, got n={n}")
    if max_shell < 0:
        raise ValueError(f"max_shell must be nonnegative, got {max_shell}")
    width = len(system.chain.delta(n))
    if width == 0:
        raise StageError(f"Δ_{n} is empty")
    predicted = predicted_ball_size(width, max_shell)
    if predicted > cap:
        raise CapExceededError(f"shell enumeration over Δ_{n}", predicted, cap)
    points = []
    for m in range(max_shell + 1):
        points.extend(integer_shell(width, m))
    norms = tuple(point_norm(p) for p in points)
    return ShellOrder(n, width, max_shell, tuple(points), norms, {p: j for j, p in enumerate(points)})


def m_value(order: ShellOrder, j1: int, j2: int) -> int:
    """The m with T^n_{j1+1} ∘ ... ∘ T^n_{j2}(y^n_{j2}) = T_m(y^n_{j2})."""
    if j1 >= j2:
        raise ValueError(f"m_value needs j1 < j2, got j1={j1}, j2={j2}")
    if j2 >= len(order):
        raise ValueError(f"j2={j2} is beyond the enumerated shells")
    current = j2
    while current > j1:
        current = order.step(current)
    m = order.norms[current]
    if truncate_point(order.points[j2], m) != order.points[current]:
        raise ConsistencyError(f"composition of T^n_j from j2={j2} down to j1={j1} is not a truncation")
    return m


@dataclass(frozen=True, eq=False)
class EIndex:
    """E(n): the pairs e^n_i = (j, k), 1-based in i, and the points x^n_i they address."""

    stage: int
    lower_width: int
    order: ShellOrder
    d_points: tuple[Point, ...]
    d_delta: tuple[Point, ...]
    k_sets: dict[int, tuple[int, ...]] = field(repr=False)
    entries: tuple[tuple[int, int], ...]
    points: tuple[Point, ...]
    steps: tuple[Point, ...] = field(repr=False)
    index: dict[Point, int] = field(repr=False)

    @property
    def size(self) -> int:
        """i(n)."""
        return len(self.entries)

    @property
    def j_set(self) -> tuple[int, ...]:
        """J(n)."""
        return tuple(sorted(j for j, ks in self.k_sets.items() if ks and j >= 1))

    def entry(self, i: int) -> tuple[int, int]:
        if not 1 <= i <= self.size:
            raise ValueError(f"index {i} out of range 1..{self.size}")
        return self.entries[i - 1]

    def point(self, i: int) -> Point:
        """x^n_i; index 0 stands for D_{n-1}."""
        if not 1 <= i <= self.size:
            raise ValueError(f"index {i} out of range 1..{self.size}")
        return self.points[i - 1]

    def index_of(self, x: Point) -> int:
        """i with x = x^n_i, 0 for points of D_{n-1}."""
        if x not in self.index:
            raise NotRealizedError(f"{x} is not in M_{self.stage}")
        return self.index[x]


def build_e_index(chain: BlockChain, n: int, cap: int = DEFAULT_SHELL_CAP) -> EIndex:
    """E(n) with the lexicographic order on (j, k) and the bijection i ↦ x^n_i."""
    if n < 2:
        raise StageError(f"E(n) needs n >= 2, got {n}")
    system = chain.system
    blocks, lower = chain.stage(n), chain.stage(n - 1)
    radius = system.s(n)
    lower_width = lower.width

    d_points = lower.d_points
    d_delta = tuple(d[lower_width: blocks.width] for d in d_points)
    # ‖d|Δ + y‖ <= s_n forces ‖y‖ <= s_n + max ‖d|Δ‖
    reach = radius + max((point_norm(p) for p in d_delta), default=0)
    order = shell_enumeration(system, n, reach, cap)

    k_sets: dict[int, tuple[int, ...]] = {}
    entries, points = [], []
    for j, y in enumerate(order.points):
        ks = tuple(
            k for k, dd in enumerate(d_delta, start=1)
            if point_norm(tuple(a + b for a, b in zip(dd, y))) <= radius
        )
        k_sets[j] = ks
        if j == 0:
            continue
        for k in ks:
            key = d_points[k - 1][:lower_width] + tuple(a + b for a, b in zip(d_delta[k - 1], y))
            x = blocks.m_table.get(key)
            if x is None:
                raise ConsistencyError(f"E({n}) entry (j={j}, k={k}) has no point in M_{n}")
            entries.append((j, k))
            points.append(x)

    if len(k_sets[0]) != len(d_points):
        raise ConsistencyError(f"K(0,{n}) is not all of 1..k({n})")
    outside = blocks.m_set - lower.d_set
    if len(set(points)) != len(points) or set(points) != outside:
        raise ConsistencyError(f"i -> x^{n}_i is not a bijection onto M_{n} minus D_{n - 1}")

    index = {d: 0 for d in lower.d_points}
    index.update({x: i for i, x in enumerate(points, start=1)})
    steps = []
    for i, ((j, k), x) in enumerate(zip(entries, points), start=1):
        lowered = truncate_point(order.points[j], order.norms[j] - 1)
        key = d_points[k - 1][:lower_width] + tuple(a + b for a, b in zip(d_delta[k - 1], lowered))
        target = blocks.m_table[key]
        if index.get(target, i) >= i:
            raise ConsistencyError(f"ψ_{n},{i} does not move x^{n}_{i} to an earlier point")
        steps.append(target)

    logger.info(f"✓ E({n}): i({n})={len(entries)}, k({n})={len(d_points)}, max shell {reach}")
    return EIndex(n, lower_width, order, d_points, d_delta, k_sets, tuple(entries), tuple(points), tuple(steps), index)


def local_psi(e_index: EIndex, i: int, x: Point) -> Point:
    """ψ_{n,i}: moves x^n_i one shell inward, fixes everything else."""
    if not 1 <= i <= e_index.size:
        raise ValueError(f"ψ_{e_index.stage},i needs 1 <= i <= {e_index.size}, got {i}")
    return e_index.steps[i - 1] if e_index.index_of(x) == i else x


def psi_intermediate(e_index: EIndex, i: int, x: Point) -> Point:
    """Ψ_{n,i} = ψ_{n,i+1} ∘ ... ∘ ψ_{n,i(n)}, a retraction of M_n onto D_{n-1} ∪ {x^n_l : l <= i}.

    Only the factor indexed by the current point acts, so the composition is a
    walk along the ψ links until the index is at most i.
    """
    if not 0 <= i <= e_index.size:
        raise ValueError(f"Ψ_{e_index.stage},i needs 0 <= i <= {e_index.size}, got {i}")
    current = e_index.index_of(x)
    while current > i:
        x = e_index.steps[current - 1]
        current = e_index.index[x]
    return x


def compose_locals_psi(e_index: EIndex, i: int, x: Point) -> Point:
    """Ψ_{n,i} by applying ψ_{n,i(n)}, ..., ψ_{n,i+1} one after another."""
    for l in range(e_index.size, i, -1):
        x = local_psi(e_index, l, x)
    return x


def big_m(e_index: EIndex, i1: int, i2: int) -> int:
    """The truncation radius M(i1, i2) with Ψ_{n,i1}(x^n_{i2}) built from T_M(y^n_{j2})."""
    if i1 >= i2:
        raise ValueError(f"big_m needs i1 < i2, got i1={i1}, i2={i2}")
    j1, k1 = e_index.entry(i1)
    j2, k2 = e_index.entry(i2)
    if k2 <= k1:
        return m_value(e_index.order, j1, j2)
    return m_value(e_index.order, j1 - 1, j2)


def psi_closed_form(chain: BlockChain, e_index: EIndex, i1: int, i2: int) -> Point:
    """(r_n|M_n)⁻¹(r_{n-1}(d_{k2}) ⊕ (d_{k2}|Δ_n + T_M(y_{j2}))) with M = big_m(i1, i2)."""
    j2, k2 = e_index.entry(i2)
    radius = big_m(e_index, i1, i2)
    lowered = truncate_point(e_index.order.points[j2], radius)
    d = e_index.d_points[k2 - 1]
    key = d[: e_index.lower_width] + tuple(a + b for a, b in zip(e_index.d_delta[k2 - 1], lowered))
    return chain.stage(e_index.stage).m_table[key]


@dataclass(frozen=True, eq=False)
class GIndex:
    """G(n): shells s_n+1 .. s_{n+1} of integer vectors over Γ_n, addressing c^n_i ∈ C_n."""

    stage: int
    shells: tuple[Point, ...]
    norms: tuple[int, ...]
    points: tuple[Point, ...]
    steps: tuple[Point, ...] = field(repr=False)
    index: dict[Point, int] = field(repr=False)

    @property
    def size(self) -> int:
        """c(n)."""
        return len(self.points)

    def point(self, i: int) -> Point:
        if not 1 <= i <= self.size:
            raise ValueError(f"index {i} out of range 1..{self.size}")
        return self.points[i - 1]

    def index_of(self, x: Point) -> int:
        """i with x = c^n_i, 0 for points of M_n."""
        if x not in self.index:
            raise NotRealizedError(f"{x} is not in D_{self.stage}")
        return self.index[x]


def build_g_index(chain: BlockChain, n: int) -> GIndex:
    system = chain.system
    blocks = chain.stage(n)
    low, high = system.s(n), system.s(n + 1)
    shells = []
    for m in range(low + 1, high + 1):
        shells.extend(integer_shell(blocks.width, m))
    points = tuple(blocks.d_table[z] for z in shells)
    if set(points) != set(blocks.c_points) or len(points) != len(blocks.c_points):
        raise ConsistencyError(f"G({n}) is not a bijection onto C_{n}")
    index = {x: 0 for x in blocks.m_points}
    index.update({c: i for i, c in enumerate(points, start=1)})
    steps = tuple(blocks.d_table[truncate_point(z, point_norm(z) - 1)] for z in shells)
    logger.info(f"✓ G({n}): c({n})={len(points)}")
    return GIndex(n, tuple(shells), tuple(point_norm(z) for z in shells), points, steps, index)


def local_truncation(g_index: GIndex, i: int, x: Point) -> Point:
    """T_{n,i}: moves c^n_i to (r_n|D_n)⁻¹(T_{‖z_i‖-1}(z_i)), fixes everything else."""
    if not 1 <= i <= g_index.size:
        raise ValueError(f"T_{g_index.stage},i needs 1 <= i <= {g_index.size}, got {i}")
    return g_index.steps[i - 1] if g_index.index_of(x) == i else x


def phi_intermediate(g_index: GIndex, i: int, x: Point) -> Point:
    """φ_{n,i} = T_{n,i+1} ∘ ... ∘ T_{n,c(n)}, a retraction of D_n onto M_n ∪ {c^n_l : l <= i}."""
    if not 0 <= i <= g_index.size:
        raise ValueError(f"φ_{g_index.stage},i needs 0 <= i <= {g_index.size}, got {i}")
    current = g_index.index_of(x)
    while current > i:
        x = g_index.steps[current - 1]
        current = g_index.index[x]
    return x


def compose_locals_phi(g_index: GIndex, i: int, x: Point) -> Point:
    for l in range(g_index.size, i, -1):
        x = local_truncation(g_index, l, x)
    return x


def phi_closed_form(chain: BlockChain, g_index: GIndex, i: int, x: Point) -> Point:
    """(r_n|D_n)⁻¹(T_t(r_n x)) with t = ‖r_n φ_{n,i}(x)‖."""
    blocks = chain.stage(g_index.stage)
    image = phi_intermediate(g_index, i, x)
    radius = point_norm(image[: blocks.width])
    return blocks.d_table[truncate_point(x[: blocks.width], radius)]


def shell_norm(g_index: GIndex, i: int) -> Optional[int]:
    """‖z^n_i‖, None for i = 0."""
    return g_index.norms[i - 1] if i >= 1 else None
