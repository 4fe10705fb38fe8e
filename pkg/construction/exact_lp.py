"""Exact rational linear programming for the free-space norms.

Two independent solvers:

- `solve_transport`: transportation simplex (northwest-corner start, u-v
  potentials, Bland's rule) for the balanced min-cost flow between the
  positive and negative parts of a molecule;
- `DenseTableau`: a single-phase tableau simplex for max c·x subject to
  A x <= b, x >= 0 with b >= 0, so the slack basis is feasible at the start.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from construction.errors import ConsistencyError

logger = logging.getLogger(__name__)

MAX_PIVOTS = 100_000

Cell = tuple[int, int]


@dataclass(frozen=True)
class TransportSolution:
    cost: Fraction
    flows: dict[Cell, Fraction]
    row_potentials: tuple[Fraction, ...]
    column_potentials: tuple[Fraction, ...]
    dual_value: Fraction
    dual_feasible: bool
    pivots: int


def _northwest_corner(supply: list[Fraction], demand: list[Fraction]) -> dict[Cell, Fraction]:
    """A spanning-tree basis of m+n-1 cells, degenerate cells carrying zero flow."""
    rows, cols = len(supply), len(demand)
    left, right = list(supply), list(demand)
    flows: dict[Cell, Fraction] = {}
    i = j = 0
    while True:
        amount = min(left[i], right[j])
        flows[(i, j)] = amount
        left[i] -= amount
        right[j] -= amount
        if i == rows - 1 and j == cols - 1:
            return flows
        if left[i] == 0 and i < rows - 1:
            i += 1
        else:
            j += 1


def _potentials(rows: int, cols: int, cells: Sequence[Cell], cost: Sequence[Sequence[Fraction]]):
    u: list = [None] * rows
    v: list = [None] * cols
    by_row, by_col = defaultdict(list), defaultdict(list)
    for i, j in cells:
        by_row[i].append(j)
        by_col[j].append(i)
    u[0] = Fraction(0)
    stack = [("row", 0)]
    while stack:
        kind, k = stack.pop()
        if kind == "row":
            for j in by_row[k]:
                if v[j] is None:
                    v[j] = cost[k][j] - u[k]
                    stack.append(("col", j))
        else:
            for i in by_col[k]:
                if u[i] is None:
                    u[i] = cost[i][k] - v[k]
                    stack.append(("row", i))
    if any(x is None for x in u) or any(x is None for x in v):
        raise ConsistencyError("transport basis is not a spanning tree")
    return u, v


def _cycle(cells: Sequence[Cell], entering: Cell) -> list[Cell]:
    """The entering cell followed by the tree path closing it into a cycle, alternating signs."""
    adjacency = defaultdict(list)
    for i, j in cells:
        adjacency[("row", i)].append(("col", j))
        adjacency[("col", j)].append(("row", i))
    start, goal = ("row", entering[0]), ("col", entering[1])
    parent = {start: None}
    frontier = [start]
    while frontier and goal not in parent:
        node = frontier.pop()
        for nxt in adjacency[node]:
            if nxt not in parent:
                parent[nxt] = node
                frontier.append(nxt)
    if goal not in parent:
        raise ConsistencyError(f"no cycle closes cell {entering}")
    cycle = [entering]
    node = goal
    while parent[node] is not None:
        prev = parent[node]
        row, col = (node, prev) if node[0] == "row" else (prev, node)
        cycle.append((row[1], col[1]))
        node = prev
    return cycle


def solve_transport(
    supply: Sequence[Fraction],
    demand: Sequence[Fraction],
    cost: Sequence[Sequence[Fraction]],
) -> TransportSolution:
    """Minimize Σ cost[i][j]·f[i][j] with row sums = supply and column sums = demand.

    Args:
        supply: positive source masses
        demand: positive sink masses, same total as supply
        cost: cost[i][j] for source i and sink j

    Returns:
        TransportSolution with the optimal flows and the u-v potentials certifying optimality
    """
    supply = [Fraction(s) for s in supply]
    demand = [Fraction(d) for d in demand]
    if not supply or not demand:
        raise ValueError("transport needs at least one source and one sink")
    if any(s <= 0 for s in supply) or any(d <= 0 for d in demand):
        raise ValueError("supplies and demands must be positive")
    if sum(supply) != sum(demand):
        raise ValueError(f"unbalanced transport: supply {sum(supply)} != demand {sum(demand)}")
    rows, cols = len(supply), len(demand)

    flows = _northwest_corner(supply, demand)
    for pivots in range(MAX_PIVOTS):
        u, v = _potentials(rows, cols, list(flows), cost)
        entering = next(
            ((i, j) for i in range(rows) for j in range(cols)
             if (i, j) not in flows and cost[i][j] - u[i] - v[j] < 0),
            None,
        )
        if entering is None:
            break
        cycle = _cycle(list(flows), entering)
        losing = cycle[1::2]
        theta = min(flows[c] for c in losing)
        leaving = min(c for c in losing if flows[c] == theta)
        for k, c in enumerate(cycle):
            flows[c] = flows.get(c, Fraction(0)) + (theta if k % 2 == 0 else -theta)
        del flows[leaving]
    else:
        raise ConsistencyError(f"transport simplex did not terminate within {MAX_PIVOTS} pivots")

    primal = sum((cost[i][j] * f for (i, j), f in flows.items()), Fraction(0))
    dual = sum((s * x for s, x in zip(supply, u)), Fraction(0)) + sum((d * y for d, y in zip(demand, v)), Fraction(0))
    feasible = all(u[i] + v[j] <= cost[i][j] for i in range(rows) for j in range(cols))
    return TransportSolution(primal, dict(flows), tuple(u), tuple(v), dual, feasible, pivots)


class DenseTableau:
    """max c·x subject to A x <= b, x >= 0, with b >= 0.

    Variables 0..n-1 are the structural ones, n..n+m-1 the slacks. The
    reduced costs in `c` are relative to the current basis; Bland's rule picks
    the entering and leaving variables.
    """

    def __init__(self, A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], c: Sequence[Fraction]):
        self.m = len(A)
        self.n = len(c)
        if len(b) != self.m or any(len(row) != self.n for row in A):
            raise ValueError("tableau dimensions do not match")
        if any(Fraction(x) < 0 for x in b):
            raise ValueError("single-phase tableau needs b >= 0")
        self.A = [[Fraction(x) for x in row] for row in A]
        self.b = [Fraction(x) for x in b]
        self.c = [Fraction(x) for x in c]
        self.nb_vars = list(range(self.n))
        self.b_vars = list(range(self.n, self.n + self.m))
        self.value = Fraction(0)
        self.pivots = 0

    def pivot(self, i: int, j: int) -> None:
        piv = self.A[i][j]
        delta = self.c[j] / piv
        self.value += self.c[j] * self.b[i] / piv
        for l in range(self.n):
            self.c[l] -= delta * self.A[i][l]
        self.c[j] = -delta
        self.A[i] = [1 / piv if l == j else self.A[i][l] / piv for l in range(self.n)]
        self.b[i] /= piv
        for k in range(self.m):
            if k != i:
                f = self.A[k][j]
                if f:
                    self.A[k] = [-f / piv if l == j else self.A[k][l] - f * self.A[i][l] for l in range(self.n)]
                    self.b[k] -= f * self.b[i]
        self.nb_vars[j], self.b_vars[i] = self.b_vars[i], self.nb_vars[j]
        self.pivots += 1

    def primal_step(self) -> str:
        candidates = [(var, j) for j, var in enumerate(self.nb_vars) if self.c[j] > 0]
        if not candidates:
            return "optimal"
        _, j = min(candidates)
        rows = [(self.b[i] / self.A[i][j], self.b_vars[i], i) for i in range(self.m) if self.A[i][j] > 0]
        if not rows:
            return "unbounded"
        _, _, i = min(rows)
        self.pivot(i, j)
        return "go_on"

    def solve(self) -> str:
        while self.pivots < MAX_PIVOTS:
            status = self.primal_step()
            if status != "go_on":
                return status
        raise ConsistencyError(f"tableau simplex did not terminate within {MAX_PIVOTS} pivots")

    def solution(self) -> list[Fraction]:
        x = [Fraction(0)] * self.n
        for var, value in zip(self.b_vars, self.b):
            if var < self.n:
                x[var] = value
        return x
