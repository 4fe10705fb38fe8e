"""Exact sup-norm vectors over finite index sets.

Holds the stage chain Γ_1 ⊂ ... ⊂ Γ_N, rational vectors with finite support,
the pointwise operators used throughout the construction (entire part,
truncation, restriction, join), integer lattice enumeration and exhaustive
Lipschitz-constant evaluation. Every comparison is made on exact rationals or
on integer arrays scaled to a common denominator.
"""
import bisect
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from construction.errors import StageError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]
Point = tuple[int, ...]

# Scaled coordinates below this bound keep every product of two distances inside int64.
_INT64_SAFE = 2**30
# Upper bound on the number of entries of one distance block held in memory.
_BLOCK_ELEMENTS = 4_000_000


def as_fraction(value: Any) -> Fraction:
    """Convert an int, Fraction or "p/q" string to a Fraction. Floats are refused."""
    if isinstance(value, bool):
        raise TypeError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not an exact rational: {value!r}") from e
    raise TypeError(f"not an exact rational: {value!r} ({type(value).__name__})")


@dataclass(frozen=True)
class StageChain:
    """Nested index sets Γ_n = {0, ..., sizes[n-1] - 1}.

    Γ is frozen at the last stage: for n > n_max, Γ_n = Γ_{n_max} and Δ_n is empty.
    """

    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes:
            raise ValueError("a stage chain needs at least one stage")
        if self.sizes[0] < 1:
            raise ValueError(f"Γ_1 must be non-empty, got size {self.sizes[0]}")
        for n, (prev, nxt) in enumerate(zip(self.sizes, self.sizes[1:]), start=1):
            if nxt <= prev:
                raise ValueError(
                    f"stage sizes must be strictly increasing, got |Γ_{n}|={prev} and |Γ_{n + 1}|={nxt}"
                )

    @property
    def n_max(self) -> int:
        return len(self.sizes)

    @property
    def dimension(self) -> int:
        """|Γ_{n_max}|, the length of every realized point."""
        return self.sizes[-1]

    def size(self, n: int) -> int:
        if n < 1:
            raise StageError(f"stage index must be >= 1, got {n}")
        return self.sizes[min(n, self.n_max) - 1]

    def gamma(self, n: int) -> range:
        return range(self.size(n))

    def delta(self, n: int) -> range:
        if n > self.n_max:
            return range(0)
        start = self.size(n - 1) if n > 1 else 0
        return range(start, self.size(n))

    def stage_of(self, index: int) -> int:
        """The unique n with index ∈ Δ_n."""
        if not 0 <= index < self.dimension:
            raise ValueError(f"index {index} is not in Γ (size {self.dimension})")
        return bisect.bisect_right(self.sizes, index) + 1


@dataclass(frozen=True)
class QVec:
    """A rational vector with finite support; coordinates off the support read as 0."""

    support: tuple[int, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        support = tuple(int(i) for i in self.support)
        values = tuple(as_fraction(v) for v in self.values)
        if len(support) != len(values):
            raise ValueError(f"support has {len(support)} indices but {len(values)} values were given")
        if len(set(support)) != len(support):
            raise ValueError(f"duplicate index in support {support}")
        if any(a > b for a, b in zip(support, support[1:])):
            pairs = sorted(zip(support, values))
            support = tuple(i for i, _ in pairs)
            values = tuple(v for _, v in pairs)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @classmethod
    def on(cls, support: Iterable[int], values: Iterable[Any]) -> "QVec":
        return cls(tuple(support), tuple(values))

    @classmethod
    def from_mapping(cls, coords: Mapping[int, Any]) -> "QVec":
        items = sorted(coords.items())
        return cls(tuple(i for i, _ in items), tuple(v for _, v in items))

    @classmethod
    def from_point(cls, point: Sequence[Any]) -> "QVec":
        """Vector supported on {0, ..., len(point) - 1}."""
        return cls(tuple(range(len(point))), tuple(point))

    @cached_property
    def _lookup(self) -> dict[int, Fraction]:
        return dict(zip(self.support, self.values))

    def __getitem__(self, index: int) -> Fraction:
        return self._lookup.get(index, Fraction(0))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self._lookup)

    def sup_norm(self) -> Fraction:
        return max((abs(v) for v in self.values), default=Fraction(0))

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.values)

    def to_point(self) -> Point:
        """Integer coordinates in support order."""
        if not self.is_integral():
            raise ValueError(f"vector {self} is not integral")
        return tuple(int(v) for v in self.values)

    def _combine(self, other: "QVec", op: Callable[[Fraction, Fraction], Fraction]) -> "QVec":
        support = sorted(set(self.support) | set(other.support))
        return QVec.on(support, (op(self[i], other[i]) for i in support))

    def __add__(self, other: "QVec") -> "QVec":
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: "QVec") -> "QVec":
        return self._combine(other, lambda a, b: a - b)

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.values) + ")"


def entire_part(r: Rational) -> int:
    """[r]: the integer part of r, rounded toward zero."""
    return math.trunc(as_fraction(r))


def quantize(v: QVec) -> QVec:
    return QVec.on(v.support, (entire_part(x) for x in v.values))


def clamp(r: Fraction, s: Rational) -> Fraction:
    return max(-s, min(s, r))


def truncate(v: QVec, s: Rational) -> QVec:
    """T_s: clamp every coordinate to [-s, s]."""
    s = as_fraction(s)
    if s < 0:
        raise ValueError(f"truncation radius must be nonnegative, got {s}")
    return QVec.on(v.support, (clamp(x, s) for x in v.values))


def restrict(v: QVec, n: int, chain: StageChain) -> QVec:
    """r_n: keep the coordinates in Γ_n."""
    if not 1 <= n <= chain.n_max:
        raise StageError(f"stage {n} is out of range 1..{chain.n_max}")
    limit = chain.size(n)
    kept = [(i, x) for i, x in zip(v.support, v.values) if i < limit]
    return QVec.on((i for i, _ in kept), (x for _, x in kept))


def join(x: QVec, y: QVec) -> QVec:
    """x ⊕ y for vectors with disjoint supports."""
    overlap = set(x.support) & set(y.support)
    if overlap:
        raise ValueError(f"cannot join vectors with overlapping supports {sorted(overlap)}")
    return QVec.from_mapping({**x.as_dict(), **y.as_dict()})


def sup_norm(v: Union[QVec, Sequence[Rational]]) -> Fraction:
    if isinstance(v, QVec):
        return v.sup_norm()
    return max((abs(as_fraction(c)) for c in v), default=Fraction(0))


def sup_distance(a: Union[QVec, Sequence[Rational]], b: Union[QVec, Sequence[Rational]]) -> Fraction:
    if isinstance(a, QVec) or isinstance(b, QVec):
        a = a if isinstance(a, QVec) else QVec.from_point(a)
        b = b if isinstance(b, QVec) else QVec.from_point(b)
        return (a - b).sup_norm()
    if len(a) != len(b):
        raise ValueError(f"points of different lengths {len(a)} and {len(b)}")
    return max((abs(as_fraction(p) - as_fraction(q)) for p, q in zip(a, b)), default=Fraction(0))


# Integer points

def point_norm(point: Point) -> int:
    return max((abs(c) for c in point), default=0)


def truncate_point(point: Point, s: int) -> Point:
    return tuple(max(-s, min(s, c)) for c in point)


def predicted_ball_size(width: int, radius: int) -> int:
    return (2 * radius + 1) ** width


def integer_ball(width: int, radius: int) -> list[Point]:
    """Integer vectors of sup-norm <= radius, ascending lexicographic."""
    if radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    return list(itertools.product(range(-radius, radius + 1), repeat=width))


def integer_shell(width: int, m: int) -> list[Point]:
    """Integer vectors of sup-norm exactly m, ascending lexicographic."""
    return [p for p in integer_ball(width, m) if point_norm(p) == m]


# Lipschitz constants

def lipschitz_constant(
    map_table: Sequence[tuple[Any, Any]],
    d_domain: Optional[Callable[[Any, Any], Fraction]] = None,
    d_range: Optional[Callable[[Any, Any], Fraction]] = None,
    workers: int = 1,
) -> Fraction:
    """Max of d_range(Tx, Ty) / d_domain(x, y) over all pairs of the table.

    Args:
        map_table: (point, image) pairs with pairwise distinct points
        d_domain: metric on the points (sup distance by default)
        d_range: metric on the images (sup distance by default)
        workers: number of threads the pair rows are split across

    Returns:
        The exact Lipschitz constant; 0 for fewer than two points.
    """
    d_domain = d_domain or sup_distance
    d_range = d_range or sup_distance
    table = list(map_table)

    def row_max(row: int) -> Fraction:
        x, tx = table[row]
        best = Fraction(0)
        for y, ty in table[row + 1:]:
            dist = d_domain(x, y)
            if dist == 0:
                raise ValueError(f"coincident domain points {x} and {y}")
            best = max(best, Fraction(d_range(tx, ty)) / dist)
        return best

    rows = range(len(table))
    if workers > 1 and len(table) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return max(pool.map(row_max, rows), default=Fraction(0))
    return max(map(row_max, rows), default=Fraction(0))


def scaled_integer_array(points: Sequence[Sequence[Any]]) -> tuple[np.ndarray, int]:
    """Coordinates multiplied by the common denominator L, as an integer array, and L."""
    rows = [tuple(as_fraction(c) for c in p) for p in points]
    width = len(rows[0]) if rows else 0
    denominator = math.lcm(1, *{c.denominator for row in rows for c in row})
    ints = [[c.numerator * (denominator // c.denominator) for c in row] for row in rows]
    bound = max((abs(c) for row in ints for c in row), default=0)
    dtype = np.int64 if bound < _INT64_SAFE else object
    return np.array(ints, dtype=dtype).reshape(len(rows), width), denominator


def _sup_distances(rows: np.ndarray, columns: np.ndarray) -> np.ndarray:
    return np.abs(rows[:, None, :] - columns[None, :, :]).max(axis=2)


def _row_blocks(rows: int, columns: int, width: int) -> list[tuple[int, int]]:
    step = max(1, _BLOCK_ELEMENTS // max(1, columns * max(1, width)))
    return [(start, min(rows, start + step)) for start in range(0, rows, step)]


def _exact_max_ratio(num: np.ndarray, den: np.ndarray) -> tuple[int, int]:
    """(p, q) with p/q = max num/den.

    The float argmax only picks a starting candidate; the loop replaces it
    while some pair beats it by exact cross-multiplication, so near-ties that
    floats cannot separate still resolve exactly.
    """
    ratios = num.astype(float) / den.astype(float)
    k = int(np.argmax(ratios))
    p, q = int(num[k]), int(den[k])
    while True:
        better = np.flatnonzero(num * q > den * p)
        if better.size == 0:
            return p, q
        k = int(better[np.argmax(ratios[better])])
        p, q = int(num[k]), int(den[k])


def _map_blocks(func: Callable[[tuple[int, int]], Any], blocks: list[tuple[int, int]], workers: int) -> list:
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, blocks))
    return [func(block) for block in blocks]


def lipschitz_constant_points(
    domain: Sequence[Sequence[Any]],
    image: Sequence[Sequence[Any]],
    workers: int = 1,
) -> Fraction:
    """Lipschitz constant of domain[k] ↦ image[k] for the sup metric on both sides."""
    if len(domain) != len(image):
        raise ValueError(f"domain has {len(domain)} points but image has {len(image)}")
    if len(domain) < 2:
        return Fraction(0)
    dom, dom_den = scaled_integer_array(domain)
    img, img_den = scaled_integer_array(image)
    count = dom.shape[0]

    def block_max(block: tuple[int, int]) -> Optional[Fraction]:
        start, stop = block
        dd = _sup_distances(dom[start:stop], dom)
        di = _sup_distances(img[start:stop], img)
        mask = np.arange(count)[None, :] > np.arange(start, stop)[:, None]
        den = dd[mask]
        if den.size == 0:
            return None
        if np.any(den == 0):
            raise ValueError("coincident domain points")
        p, q = _exact_max_ratio(di[mask], den)
        return Fraction(p * dom_den, q * img_den)

    results = _map_blocks(block_max, _row_blocks(count, count, dom.shape[1]), workers)
    return max((r for r in results if r is not None), default=Fraction(0))


def distance_matrix(points: Sequence[Sequence[Any]]) -> tuple[np.ndarray, int]:
    """Pairwise sup distances scaled by the common denominator L, and L."""
    array, denominator = scaled_integer_array(points)
    count = array.shape[0]
    blocks = [_sup_distances(array[start:stop], array) for start, stop in _row_blocks(count, count, array.shape[1])]
    if not blocks:
        return np.zeros((0, 0), dtype=np.int64), denominator
    return np.vstack(blocks), denominator


def lipschitz_constants_of_tables(
    points: Sequence[Sequence[Any]],
    tables: Iterable[Sequence[int]],
    workers: int = 1,
) -> list[Fraction]:
    """Lipschitz constants of self-maps of a point set given as index tables.

    Each table lists, for every point position k, the position of its image.
    """
    dist, _ = distance_matrix(points)
    count = dist.shape[0]
    upper = np.triu_indices(count, 1)
    base = dist[upper]
    if np.any(base == 0):
        raise ValueError("coincident domain points")

    def constant(table: Sequence[int]) -> Fraction:
        positions = np.asarray(table, dtype=np.intp)
        if count < 2:
            return Fraction(0)
        image = dist[np.ix_(positions, positions)][upper]
        p, q = _exact_max_ratio(image, base)
        return Fraction(p, q)

    tables = list(tables)
    if workers > 1 and len(tables) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(constant, tables))
    return [constant(t) for t in tables]


def min_pairwise_distance(points: Sequence[Sequence[Any]]) -> Optional[Fraction]:
    """Smallest distance between two distinct positions; None for fewer than two points."""
    array, denominator = scaled_integer_array(points)
    count = array.shape[0]
    best = None
    for start, stop in _row_blocks(count, count, array.shape[1]):
        block = _sup_distances(array[start:stop], array)
        mask = np.arange(count)[None, :] > np.arange(start, stop)[:, None]
        values = block[mask]
        if values.size:
            low = int(values.min())
            best = low if best is None else min(best, low)
    return None if best is None else Fraction(best, denominator)


def covering_radius(samples: Sequence[Sequence[Any]], centers: Sequence[Sequence[Any]]) -> tuple[Fraction, int]:
    """max over samples of the distance to the nearest center, with the worst sample position."""
    if not centers:
        raise ValueError("covering radius needs at least one center")
    if not samples:
        return Fraction(0), -1
    array, denominator = scaled_integer_array(list(samples) + list(centers))
    sample_part, center_part = array[: len(samples)], array[len(samples):]
    worst, worst_at = -1, -1
    for start, stop in _row_blocks(len(samples), len(centers), array.shape[1]):
        nearest = _sup_distances(sample_part[start:stop], center_part).min(axis=1)
        k = int(np.argmax(nearest))
        if int(nearest[k]) > worst:
            worst, worst_at = int(nearest[k]), start + k
    return Fraction(worst, denominator), worst_at
