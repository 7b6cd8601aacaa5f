"""Partitions, the one-box tensor rule and the Bratteli graph of QP_k(n).

Irreducible QP_k(n) modules are indexed by partitions λ with |λ| ≤ k (the
first row of the barred partition is left implicit). Dimensions are
counted three ways: paths in the Bratteli graph, Kronecker tableaux and a
closed sum over associated Stirling numbers.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

Cell = Tuple[int, int]


class RepTheoryError(ValueError):
    """Raised for malformed partitions or chains."""


@dataclass(frozen=True)
class IntPartition:
    """Weakly decreasing positive parts; the empty tuple is ∅."""

    parts: Tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(self.parts)
        if any(p <= 0 for p in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise RepTheoryError(f"not a partition: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def cells(self) -> List[Cell]:
        return [(r, c) for r, p in enumerate(self.parts) for c in range(p)]

    def corners(self) -> List[Cell]:
        """Removable cells, top row first."""
        out = []
        for r, p in enumerate(self.parts):
            if r + 1 == len(self.parts) or self.parts[r + 1] < p:
                out.append((r, p - 1))
        return out

    def addable(self) -> List[Cell]:
        out = []
        for r, p in enumerate(self.parts):
            if r == 0 or self.parts[r - 1] > p:
                out.append((r, p))
        out.append((len(self.parts), 0))
        return out

    def add(self, cell: Cell) -> "IntPartition":
        if cell not in self.addable():
            raise RepTheoryError(f"cell {cell} is not addable to {self}")
        r, _ = cell
        parts = list(self.parts) + ([0] if r == len(self.parts) else [])
        parts[r] += 1
        return IntPartition(tuple(parts))

    def remove(self, cell: Cell) -> "IntPartition":
        if cell not in self.corners():
            raise RepTheoryError(f"cell {cell} is not a corner of {self}")
        r, _ = cell
        parts = list(self.parts)
        parts[r] -= 1
        return IntPartition(tuple(p for p in parts if p))

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return (self.size, tuple(-p for p in self.parts))

    def __str__(self) -> str:
        if not self.parts:
            return "∅"
        return "(" + ",".join(str(p) for p in self.parts) + ")"


EMPTY = IntPartition(())


def partition(*parts: int) -> IntPartition:
    return IntPartition(tuple(parts))


def partitions_of(m: int, largest: Optional[int] = None) -> Iterator[IntPartition]:
    """Partitions of m, parts in decreasing lexicographic order."""
    largest = m if largest is None else largest
    if m == 0:
        yield EMPTY
        return
    for first in range(min(m, largest), 0, -1):
        for rest in partitions_of(m - first, first):
            yield IntPartition((first,) + rest.parts)


def partitions_up_to(k: int) -> List[IntPartition]:
    return [p for m in range(k + 1) for p in partitions_of(m)]


def barred(lam: IntPartition, n: int) -> IntPartition:
    """(n - |λ|, λ_1, λ_2, ...), the partition of n labelling the S_n module."""
    first = n - lam.size
    if lam.parts and first < lam.parts[0]:
        raise RepTheoryError(f"n={n} is too small for {lam}: first row {first} < {lam.parts[0]}")
    return IntPartition((first,) + lam.parts)


# ---------- Counting ----------


@lru_cache(maxsize=None)
def _bell_row(m: int) -> Tuple[int, ...]:
    if m == 0:
        return (1,)
    prev = _bell_row(m - 1)
    row = [prev[-1]]
    for x in prev:
        row.append(row[-1] + x)
    return tuple(row)


def bell(m: int) -> int:
    """Bell number B(m) from the Bell triangle."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return _bell_row(m)[0]


def no_singleton_count_alternating(m: int) -> int:
    """Σ_{j=1}^{m} (-1)^{j-1} B(m-j) + (-1)^m."""
    return sum((-1) ** (j - 1) * bell(m - j) for j in range(1, m + 1)) + (-1) ** m


def no_singleton_count_recurrence(m: int) -> int:
    """a(0) = 1 and a(r+1) = B(r) - a(r)."""
    a = 1
    for r in range(m):
        a = bell(r) - a
    return a


def no_singleton_count(m: int) -> int:
    """Set partitions of an m-set without singletons, by two independent routes."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    a = no_singleton_count_alternating(m)
    b = no_singleton_count_recurrence(m)
    if a != b:
        raise ArithmeticError(f"singleton-free counts disagree at m={m}: {a} vs {b}")
    return a


def partition_count(m: int) -> int:
    return sum(1 for _ in partitions_of(m))


@lru_cache(maxsize=None)
def sp2(a: int, b: int) -> int:
    """Set partitions of an a-set into b blocks, each of size at least 2."""
    if a < 0 or b < 0:
        return 0
    if a == 0 and b == 0:
        return 1
    if a == 0 or b == 0:
        return 0
    return b * sp2(a - 1, b) + (a - 1) * sp2(a - 2, b - 1)


def hook_dim(lam: IntPartition) -> int:
    """Standard Young tableaux of shape λ, by the hook length formula."""
    conjugate = [sum(1 for p in lam.parts if p > c) for c in range(lam.parts[0])] if lam.parts else []
    hooks = 1
    for r, c in lam.cells():
        hooks *= (lam.parts[r] - c - 1) + (conjugate[c] - r - 1) + 1
    return math.factorial(lam.size) // hooks


def irrep_dim_formula(lam: IntPartition, k: int) -> int:
    """Closed dimension of the QP_k module indexed by λ (stable range)."""
    size = lam.size
    total = 0
    for m1 in range(size + 1):
        inner = 0
        for m2 in range(size - m1, (k - m1) // 2 + 1):
            inner += math.comb(m2, size - m1) * sp2(k - m1, m2)
        total += math.comb(k, m1) * inner
    return hook_dim(lam) * total


# ---------- One-box rule and the Bratteli graph ----------


def alpha_pm(lam: IntPartition) -> List[IntPartition]:
    """Partitions other than λ reached by adding, removing or moving one corner box."""
    found = {lam.add(cell) for cell in lam.addable()}
    for corner in lam.corners():
        smaller = lam.remove(corner)
        found.add(smaller)
        found.update(smaller.add(cell) for cell in smaller.addable())
    found.discard(lam)
    return sorted(found, key=IntPartition.sort_key)


def one_box_decomposition(lam: IntPartition) -> Dict[IntPartition, int]:
    """Multiplicities of the one-box tensor rule: c(λ) copies of λ, one of each α±."""
    out = {mu: 1 for mu in alpha_pm(lam)}
    if lam.corners():
        out[lam] = len(lam.corners())
    return dict(sorted(out.items(), key=lambda item: item[0].sort_key()))


def level_nodes(k: int) -> List[IntPartition]:
    if k == 0:
        return [EMPTY]
    if k == 1:
        return [partition(1)]
    return sorted(partitions_up_to(k), key=IntPartition.sort_key)


@dataclass
class BratteliGraph:
    levels: List[List[IntPartition]]
    edges: Dict[Tuple[int, IntPartition, IntPartition], int]

    def edges_from(self, level: int, lam: IntPartition) -> List[Tuple[IntPartition, int]]:
        return [(mu, m) for (lv, a, mu), m in self.edges.items() if lv == level and a == lam]

    def to_dot(self) -> str:
        def node(level: int, lam: IntPartition) -> str:
            return f'"{level}:{lam}"'

        lines = ["digraph bratteli {", "  rankdir=TB;"]
        for level, nodes in enumerate(self.levels):
            names = " ".join(node(level, lam) for lam in nodes)
            lines.append(f"  {{ rank=same; {names} }}")
            for lam in nodes:
                lines.append(f'  {node(level, lam)} [label="{lam}"];')
        for (level, lam, mu), mult in self.edges.items():
            lines.append(f'  {node(level, lam)} -> {node(level + 1, mu)} [label="{mult}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> Dict[str, object]:
        return {
            "levels": [[list(lam.parts) for lam in nodes] for nodes in self.levels],
            "edges": [
                {"level": level, "from": list(lam.parts), "to": list(mu.parts), "multiplicity": mult}
                for (level, lam, mu), mult in self.edges.items()
            ],
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def bratteli_graph(levels: int) -> BratteliGraph:
    """Levels 0..L; λ on level k joins μ on level k+1 per the one-box rule."""
    if levels < 0:
        raise RepTheoryError(f"levels must be nonnegative, got {levels}")
    nodes = [level_nodes(k) for k in range(levels + 1)]
    edges: Dict[Tuple[int, IntPartition, IntPartition], int] = {}
    for k in range(levels):
        upper = set(nodes[k + 1])
        for lam in nodes[k]:
            for mu, mult in one_box_decomposition(lam).items():
                if mu in upper:
                    edges[(k, lam, mu)] = mult
    return BratteliGraph(nodes, edges)


@dataclass(frozen=True)
class LevelStatistics:
    level: int
    nodes: int
    expected_nodes: int
    edges: int
    edge_multiplicity: int


def level_statistics(graph: BratteliGraph) -> List[LevelStatistics]:
    out = []
    for level, nodes in enumerate(graph.levels):
        expected = 1 if level < 2 else sum(partition_count(j) for j in range(level + 1))
        down = [(key, m) for key, m in graph.edges.items() if key[0] == level]
        out.append(LevelStatistics(level, len(nodes), expected, len(down), sum(m for _, m in down)))
    return out


@lru_cache(maxsize=None)
def _path_counts(k: int) -> Dict[IntPartition, int]:
    if k == 0:
        return {EMPTY: 1}
    below = _path_counts(k - 1)
    upper = set(level_nodes(k))
    out: Dict[IntPartition, int] = {}
    for lam, count in below.items():
        for mu, mult in one_box_decomposition(lam).items():
            if mu in upper:
                out[mu] = out.get(mu, 0) + count * mult
    return out


def path_count(lam: IntPartition, k: int) -> int:
    """Weighted paths from ∅ on level 0 to λ on level k."""
    if lam.size > k:
        return 0
    return _path_counts(k).get(lam, 0)


def dimensions(k: int) -> Dict[IntPartition, int]:
    return dict(sorted(_path_counts(k).items(), key=lambda item: item[0].sort_key()))


# ---------- Kronecker tableaux ----------


@dataclass(frozen=True)
class Step:
    """How one partition of a chain follows from the previous one."""

    kind: str  # add, remove, move or stay
    cells: Tuple[Cell, ...]


def classify_step(before: IntPartition, after: IntPartition) -> List[Step]:
    """Every legal step from ``before`` to ``after`` (several for a stay)."""
    out = []
    if after == before:
        out.extend(Step("stay", (c,)) for c in before.corners())
        return out
    for cell in before.addable():
        if before.add(cell) == after:
            out.append(Step("add", (cell,)))
    for corner in before.corners():
        smaller = before.remove(corner)
        if smaller == after:
            out.append(Step("remove", (corner,)))
        for cell in smaller.addable():
            if smaller.add(cell) == after:
                out.append(Step("move", (corner, cell)))
    return out


KroneckerTableau = Tuple[Tuple[IntPartition, Step], ...]


def is_kronecker_tableau(chain: Sequence[IntPartition], steps: Optional[Sequence[Step]] = None) -> bool:
    """Does the chain start at ∅ and follow legal steps (matching ``steps`` when given)?"""
    if not chain or chain[0] != EMPTY:
        return False
    for i in range(1, len(chain)):
        options = classify_step(chain[i - 1], chain[i])
        if not options:
            return False
        if steps is not None and steps[i - 1] not in options:
            return False
    return True


def kron_tableaux(lam: IntPartition, k: int) -> List[KroneckerTableau]:
    """All Kronecker tableaux of shape λ and length k."""
    if lam.size > k:
        return []
    out: List[KroneckerTableau] = []
    chain: List[Tuple[IntPartition, Step]] = []

    def walk(current: IntPartition, level: int) -> None:
        if abs(current.size - lam.size) > k - level:
            return
        if level == k:
            if current == lam:
                out.append(tuple(chain))
            return
        moves: List[Tuple[IntPartition, Step]] = []
        moves.extend((current.add(c), Step("add", (c,))) for c in current.addable())
        for corner in current.corners():
            smaller = current.remove(corner)
            moves.append((smaller, Step("remove", (corner,))))
            moves.extend(
                (smaller.add(c), Step("move", (corner, c)))
                for c in smaller.addable()
                if smaller.add(c) != current
            )
            moves.append((current, Step("stay", (corner,))))
        for nxt, step in moves:
            chain.append((nxt, step))
            walk(nxt, level + 1)
            chain.pop()

    walk(EMPTY, 0)
    return out
