"""Quantized blocks M_n, C_n, D_n and the coarse retractions φ_n, Ψ_n.

Points are integer tuples over Γ_{N_max}. Every block is kept in ascending
lexicographic order together with its r_n identification table, a dict from
the restriction r_n(x) to x.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

from construction.bd_system import BDSystem
from construction.errors import CapExceededError, ConsistencyError, NotRealizedError, StageError
from construction.linf_core import Point, QVec, integer_ball, predicted_ball_size, truncate_point

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_CAP = 10**6


def _quantized_extension(system: BDSystem, n: int, values: Sequence) -> Point:
    """f(i_n(values)) as an integer point on Γ_{N_max}."""
    return tuple(math.trunc(x) for x in system.extend_values(n, values))


@dataclass(frozen=True, eq=False)
class StageBlocks:
    """M_n, C_n and D_n = M_n ∪ C_n for one stage."""

    stage: int
    width: int
    m_points: tuple[Point, ...]
    c_points: tuple[Point, ...]
    m_table: dict[Point, Point] = field(repr=False)
    d_table: dict[Point, Point] = field(repr=False)

    @property
    def d_points(self) -> tuple[Point, ...]:
        return tuple(sorted(self.m_points + self.c_points))

    @property
    def m_set(self) -> frozenset:
        return frozenset(self.m_table.values())

    @property
    def d_set(self) -> frozenset:
        return frozenset(self.d_table.values())


@dataclass(frozen=True, eq=False)
class BlockChain:
    system: BDSystem
    depth: int
    stages: dict[int, StageBlocks]
    birth_stage: dict[Point, int] = field(repr=False)

    def stage(self, n: int) -> StageBlocks:
        if n not in self.stages:
            raise StageError(f"stage {n} is not realized (depth {self.depth})")
        return self.stages[n]

    @property
    def points(self) -> tuple[Point, ...]:
        """The realized metric space M = M_depth, lexicographic."""
        return self.stages[self.depth].m_points

    def contains(self, x: Point) -> bool:
        return x in self.birth_stage

    def cardinalities(self) -> dict[str, int]:
        sizes = {}
        for n, blocks in self.stages.items():
            sizes[f"#M_{n}"] = len(blocks.m_points)
            sizes[f"#C_{n}"] = len(blocks.c_points)
            sizes[f"#D_{n}"] = len(blocks.m_points) + len(blocks.c_points)
        return sizes


def build_blocks(system: BDSystem, n: int, previous: Union[StageBlocks, None], cap: int = DEFAULT_BLOCK_CAP) -> StageBlocks:
    """Materialize M_n, C_n, D_n from M_{n-1}.

    Args:
        system: the BD system
        n: stage, 1 <= n <= N_max
        previous: blocks of stage n-1 (None for n = 1)
        cap: largest enumeration allowed

    Returns:
        StageBlocks with bijective identification tables
    """
    chain = system.chain
    if not 1 <= n <= system.n_max:
        raise StageError(f"stage {n} is out of range 1..{system.n_max}")
    if (previous is None) != (n == 1):
        raise StageError(f"stage {n} needs the blocks of stage {n - 1}")
    width = chain.size(n)
    radius, outer = system.s(n), system.s(n + 1)

    for what, r in (("M", radius), ("D", outer)):
        predicted = predicted_ball_size(width, r)
        if predicted > cap:
            raise CapExceededError(f"{what}_{n} enumeration", predicted, cap)

    ball = integer_ball(width, radius)
    old_m = previous.m_points if previous else ()
    old_keys = {x[:width] for x in old_m}
    new_points = [_quantized_extension(system, n, w) for w in ball if w not in old_keys]
    m_points = tuple(sorted(set(old_m) | set(new_points)))
    if len(m_points) != len(old_m) + len(new_points):
        raise ConsistencyError(f"M_{n}: new points collide with M_{n - 1}")

    m_table = {x[:width]: x for x in m_points}
    if len(m_table) != len(m_points) or set(m_table) != set(ball):
        raise ConsistencyError(f"r_{n} restricted to M_{n} is not a bijection onto the s_{n}-ball")

    # C_n = f∘i_{n+1}∘f∘T_{s_{n+1}}∘r_{n+1}∘i_n over the shell s_n < ‖w‖ <= s_{n+1}
    following = min(n + 1, system.n_max)
    following_width = chain.size(following)
    c_points = []
    for w in integer_ball(width, outer):
        if max((abs(c) for c in w), default=0) <= radius:
            continue
        lifted = system.extend_values(n, w)[:following_width]
        clipped = tuple(math.trunc(max(-outer, min(outer, c))) for c in lifted)
        c_points.append(_quantized_extension(system, following, clipped) if n < system.n_max else clipped)
    c_points = tuple(sorted(c_points))

    d_table = dict(m_table)
    for c in c_points:
        if c[:width] in d_table:
            raise ConsistencyError(f"C_{n} point {c} collides with D_{n} under r_{n}")
        d_table[c[:width]] = c
    if len(d_table) != predicted_ball_size(width, outer):
        raise ConsistencyError(f"r_{n} restricted to D_{n} is not a bijection onto the s_{n + 1}-ball")

    logger.info(f"✓ Stage {n}: #M_{n}={len(m_points)}, #C_{n}={len(c_points)}, #D_{n}={len(d_table)}")
    return StageBlocks(n, width, m_points, c_points, m_table, d_table)


def build_chain(system: BDSystem, depth: int, cap: int = DEFAULT_BLOCK_CAP) -> BlockChain:
    """Blocks for stages 1..depth."""
    if not 1 <= depth <= system.n_max:
        raise StageError(f"depth {depth} is out of range 1..{system.n_max}")
    stages: dict[int, StageBlocks] = {}
    birth: dict[Point, int] = {}
    previous = None
    for n in range(1, depth + 1):
        previous = build_blocks(system, n, previous, cap)
        stages[n] = previous
        for x in previous.m_points:
            birth.setdefault(x, n)
    return BlockChain(system, depth, stages, birth)


def _key(w: Union[QVec, Sequence[int]]) -> Point:
    if isinstance(w, QVec):
        return w.to_point()
    return tuple(int(c) for c in w)


def inverse_restriction(blocks: StageBlocks, w: Union[QVec, Sequence[int]], block: str = "M") -> Point:
    """The unique x in M_n (block="M") or D_n (block="D") with r_n(x) = w."""
    table = {"M": blocks.m_table, "D": blocks.d_table}.get(block)
    if table is None:
        raise ValueError(f"block must be 'M' or 'D', got {block!r}")
    key = _key(w)
    if key not in table:
        raise NotRealizedError(f"{key} is not in r_{blocks.stage}({block}_{blocks.stage})")
    return table[key]


def _require_realized(chain: BlockChain, x: Point) -> None:
    if not chain.contains(x):
        raise NotRealizedError(f"{x} is not a realized point of M_{chain.depth}")


def phi(chain: BlockChain, n: int, x: Point) -> Point:
    """φ_n = (r_n|M_n)⁻¹ ∘ T_{s_n} ∘ r_n; the identity on realized points past N_max."""
    _require_realized(chain, x)
    if n > chain.system.n_max:
        return x
    blocks = chain.stage(n)
    return blocks.m_table[truncate_point(x[: blocks.width], chain.system.s(n))]


def psi(chain: BlockChain, n: int, x: Point) -> Point:
    """Ψ_n = (r_{n-1}|D_{n-1})⁻¹ ∘ r_{n-1} on M_n."""
    if n < 2:
        raise StageError(f"Ψ_n needs n >= 2, got {n}")
    blocks = chain.stage(n)
    if blocks.m_table.get(x[: blocks.width]) != x:
        raise NotRealizedError(f"{x} is not in M_{n}")
    lower = chain.stage(n - 1)
    return lower.d_table[x[: lower.width]]
