"""Set-partition diagrams on {1..k, 1'..k'}.

Vertices are encoded as integers: top vertex ``i`` is ``i`` and bottom
vertex ``i'`` is ``k + i``. A ``Diagram`` stores its blocks as sorted
tuples of codes, and the blocks are sorted by least vertex. That single
canonical form realizes the equivalence class of graphs drawn for a set
partition, so equality and hashing are structural.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

TOP = "top"
BOTTOM = "bottom"

Block = Tuple[int, ...]
VertexLike = Union[int, str, "Vertex"]


class DiagramError(ValueError):
    """Raised for malformed diagrams, mismatched sizes or bad generator indices."""


@dataclass(frozen=True, order=True)
class Vertex:
    index: int
    row: str = TOP

    def code(self, k: int) -> int:
        if not 1 <= self.index <= k:
            raise DiagramError(f"vertex {self} out of range for k={k}")
        return self.index if self.row == TOP else k + self.index

    @classmethod
    def from_code(cls, code: int, k: int) -> "Vertex":
        if code <= k:
            return cls(code, TOP)
        return cls(code - k, BOTTOM)

    @classmethod
    def parse(cls, token: Union[int, str]) -> "Vertex":
        if isinstance(token, int):
            return cls(token, TOP)
        text = token.strip()
        match = re.fullmatch(r"(\d+)('?)", text)
        if not match:
            raise DiagramError(f"bad vertex label {token!r}")
        return cls(int(match.group(1)), BOTTOM if match.group(2) else TOP)

    def __str__(self) -> str:
        return f"{self.index}'" if self.row == BOTTOM else str(self.index)


@dataclass(frozen=True, order=True)
class Diagram:
    """A k-partition diagram in canonical form.

    Construct through ``canonicalize`` or ``Diagram.from_codes``; the raw
    constructor trusts that ``blocks`` is already canonical.
    """

    k: int
    blocks: Tuple[Block, ...]

    @classmethod
    def from_codes(cls, k: int, blocks: Iterable[Iterable[int]]) -> "Diagram":
        canon = sorted(tuple(sorted(b)) for b in blocks if b)
        return cls(k, tuple(canon))

    # ----- Views -----

    def vertex_labels(self, block: Block) -> List[str]:
        return [str(Vertex.from_code(c, self.k)) for c in block]

    def block_of(self) -> Dict[int, int]:
        """Map each vertex code to the position of its block."""
        return {v: pos for pos, b in enumerate(self.blocks) for v in b}

    def is_top(self, code: int) -> bool:
        return code <= self.k

    def __str__(self) -> str:
        return diagram_text(self)


@dataclass(frozen=True)
class ComposeResult:
    diagram: Diagram
    loops: int


# ---------- Construction ----------


def canonicalize(k: int, raw_blocks: Sequence[Iterable[VertexLike]]) -> Diagram:
    """Build the canonical diagram from blocks of vertex labels.

    Labels may be ``Vertex`` objects, integers (top row) or strings such as
    ``"3"`` and ``"3'"``.
    """
    if k < 0:
        raise DiagramError(f"k must be nonnegative, got {k}")
    seen: Dict[int, str] = {}
    blocks = []
    for raw in raw_blocks:
        block = []
        for item in raw:
            vertex = item if isinstance(item, Vertex) else Vertex.parse(item)
            code = vertex.code(k)
            if code in seen:
                raise DiagramError(f"vertex {vertex} appears more than once")
            seen[code] = str(vertex)
            block.append(code)
        if not block:
            raise DiagramError("empty block")
        blocks.append(block)
    for code in range(1, 2 * k + 1):
        if code not in seen:
            raise DiagramError(f"vertex {Vertex.from_code(code, k)} is missing")
    return Diagram.from_codes(k, blocks)


def identity_diagram(k: int) -> Diagram:
    return Diagram.from_codes(k, [(i, k + i) for i in range(1, k + 1)])


def permutation_diagram(perm: Sequence[int]) -> Diagram:
    """Diagram joining top ``perm[j-1]`` to bottom ``j'``.

    With this convention ``compose(permutation_diagram(a), permutation_diagram(b))``
    is the diagram of ``a`` after ``b``.
    """
    k = len(perm)
    if sorted(perm) != list(range(1, k + 1)):
        raise DiagramError(f"not a permutation of 1..{k}: {tuple(perm)}")
    return Diagram.from_codes(k, [(perm[j - 1], k + j) for j in range(1, k + 1)])


def _with_identity(k: int, blocks: List[Tuple[int, ...]]) -> Diagram:
    used = {v for b in blocks for v in b}
    rest = [(i, k + i) for i in range(1, k + 1) if i not in used and k + i not in used]
    return Diagram.from_codes(k, blocks + rest)


_GENERATOR_SPAN = {"s": 2, "e": 2, "b": 2, "p": 1, "t": 3, "h": 3}


def generator(name: str, i: int, k: int) -> Diagram:
    """The named generator diagram with identity blocks elsewhere.

    s_i transposes i and i+1; e_i = {i,i+1},{i',(i+1)'}; b_i joins i, i+1,
    i', (i+1)'; p_i isolates i and i'; t_i = {i,i+1,i'},{(i+1)',i+2,(i+2)'};
    h_i = {i,i+1,i+2},{i',(i+1)',(i+2)'}.
    """
    span = _GENERATOR_SPAN.get(name)
    if span is None:
        raise DiagramError(f"unknown generator {name!r}")
    if not 1 <= i <= k - span + 1:
        raise DiagramError(f"generator {name}{i} needs 1 <= i <= {k - span + 1} at k={k}")
    top = lambda j: j  # noqa: E731
    bot = lambda j: k + j  # noqa: E731
    if name == "s":
        blocks = [(top(i), bot(i + 1)), (top(i + 1), bot(i))]
    elif name == "e":
        blocks = [(top(i), top(i + 1)), (bot(i), bot(i + 1))]
    elif name == "b":
        blocks = [(top(i), top(i + 1), bot(i), bot(i + 1))]
    elif name == "p":
        blocks = [(top(i),), (bot(i),)]
    elif name == "t":
        blocks = [(top(i), top(i + 1), bot(i)), (bot(i + 1), top(i + 2), bot(i + 2))]
    else:
        blocks = [(top(i), top(i + 1), top(i + 2)), (bot(i), bot(i + 1), bot(i + 2))]
    return _with_identity(k, blocks)


def t_diagram(i1: int, i2: int, i3: int, k: int) -> Diagram:
    """{i1,i2,i1'},{i3,i2',i3'} with identity blocks elsewhere."""
    _distinct(k, i1, i2, i3)
    return _with_identity(k, [(i1, i2, k + i1), (i3, k + i2, k + i3)])


def h_diagram(i1: int, i2: int, i3: int, k: int) -> Diagram:
    """{i1,i2,i3},{i1',i2',i3'} with identity blocks elsewhere."""
    _distinct(k, i1, i2, i3)
    return _with_identity(k, [(i1, i2, i3), (k + i1, k + i2, k + i3)])


def join_diagram(i: int, j: int, k: int) -> Diagram:
    """{i,j,i',j'} with identity blocks elsewhere."""
    _distinct(k, i, j)
    return _with_identity(k, [(i, j, k + i, k + j)])


def _distinct(k: int, *indices: int) -> None:
    if len(set(indices)) != len(indices) or not all(1 <= i <= k for i in indices):
        raise DiagramError(f"indices {indices} must be distinct and within 1..{k}")


# ---------- Structure ----------


def block_split(block: Block, k: int) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """(B ∩ top row, B ∩ bottom row) as sets of codes."""
    return (frozenset(v for v in block if v <= k), frozenset(v for v in block if v > k))


def top_blocks(d: Diagram) -> List[Block]:
    """Blocks with no bottom vertex."""
    return [b for b in d.blocks if b[-1] <= d.k]


def bottom_blocks(d: Diagram) -> List[Block]:
    """Blocks with no top vertex."""
    return [b for b in d.blocks if b[0] > d.k]


def has_isolated(d: Diagram) -> bool:
    return any(len(b) == 1 for b in d.blocks)


def singleton_vertices(d: Diagram) -> FrozenSet[int]:
    return frozenset(b[0] for b in d.blocks if len(b) == 1)


def is_refinement(d: Diagram, d_coarse: Diagram) -> bool:
    """True when every block of ``d_coarse`` is a union of blocks of ``d``."""
    if d.k != d_coarse.k:
        raise DiagramError(f"mismatched k: {d.k} vs {d_coarse.k}")
    owner = d_coarse.block_of()
    return all(len({owner[v] for v in b}) == 1 for b in d.blocks)


def isolate(d: Diagram, vertices: Iterable[VertexLike]) -> Diagram:
    """Make every vertex of the given set a singleton block."""
    codes = _codes(d.k, vertices)
    if not codes:
        return d
    blocks: List[Tuple[int, ...]] = []
    for b in d.blocks:
        kept = tuple(v for v in b if v not in codes)
        if kept:
            blocks.append(kept)
        blocks.extend((v,) for v in b if v in codes)
    return Diagram.from_codes(d.k, blocks)


def _codes(k: int, vertices: Iterable[VertexLike]) -> FrozenSet[int]:
    out = set()
    for v in vertices:
        if isinstance(v, Vertex):
            out.add(v.code(k))
        elif isinstance(v, str):
            out.add(Vertex.parse(v).code(k))
        else:
            if not 1 <= v <= 2 * k:
                raise DiagramError(f"vertex code {v} out of range for k={k}")
            out.add(v)
    return frozenset(out)


def vertex_codes(k: int, vertices: Iterable[VertexLike]) -> FrozenSet[int]:
    """Normalize labels or codes to a set of vertex codes.

    Plain integers are read as codes (1..2k), strings as labels.
    """
    return _codes(k, vertices)


def flip(d: Diagram) -> Diagram:
    """Exchange the top and bottom rows."""
    k = d.k
    swap = lambda v: v + k if v <= k else v - k  # noqa: E731
    return Diagram.from_codes(k, [[swap(v) for v in b] for b in d.blocks])


def pad_diagram(d: Diagram, k: int) -> Diagram:
    """Embed d into a larger k by adding identity blocks on the new vertices."""
    if k < d.k:
        raise DiagramError(f"cannot shrink a k={d.k} diagram to k={k}")
    shift = k - d.k
    blocks = [[v if v <= d.k else v + shift for v in b] for b in d.blocks]
    blocks += [[i, k + i] for i in range(d.k + 1, k + 1)]
    return Diagram.from_codes(k, blocks)


# ---------- Composition ----------


@lru_cache(maxsize=1 << 17)
def compose(d1: Diagram, d2: Diagram) -> ComposeResult:
    """Stack d1 above d2 and read off the outer connectivity.

    Components meeting only the middle row are removed and counted as loops.
    """
    if d1.k != d2.k:
        raise DiagramError(f"cannot compose k={d1.k} with k={d2.k}")
    k = d1.k
    # nodes: outer top 0..k-1, middle k..2k-1, outer bottom 2k..3k-1
    parent = list(range(3 * k))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for b in d1.blocks:
        nodes = [v - 1 if v <= k else v - 1 for v in b]
        for x in nodes[1:]:
            union(nodes[0], x)
    for b in d2.blocks:
        nodes = [k + v - 1 if v <= k else k + v - 1 for v in b]
        for x in nodes[1:]:
            union(nodes[0], x)

    groups: Dict[int, List[int]] = {}
    for node in range(3 * k):
        groups.setdefault(find(node), []).append(node)
    blocks = []
    loops = 0
    for members in groups.values():
        outer = [m + 1 if m < k else m - k + 1 for m in members if m < k or m >= 2 * k]
        if outer:
            blocks.append(outer)
        else:
            loops += 1
    return ComposeResult(Diagram.from_codes(k, blocks), loops)


# ---------- Enumeration ----------


def enumerate_setpartitions(m: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """Set partitions of {0..m-1} in restricted-growth-string order."""
    if m < 0:
        raise DiagramError(f"m must be nonnegative, got {m}")
    if m == 0:
        yield ()
        return
    rgs = [0] * m

    def emit() -> Tuple[Tuple[int, ...], ...]:
        blocks: Dict[int, List[int]] = {}
        for pos, label in enumerate(rgs):
            blocks.setdefault(label, []).append(pos)
        return tuple(tuple(blocks[label]) for label in sorted(blocks))

    def walk(pos: int, top: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
        if pos == m:
            yield emit()
            return
        for label in range(top + 2):
            rgs[pos] = label
            yield from walk(pos + 1, max(top, label))

    rgs[0] = 0
    yield from walk(1, 0)


def enumerate_nosingleton_setpartitions(m: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """Set partitions of {0..m-1} without singleton blocks, in RGS order.

    Prunes a branch as soon as the open singleton blocks outnumber the
    elements still to place.
    """
    if m == 0:
        yield ()
        return
    if m == 1:
        return
    rgs = [0] * m
    sizes: List[int] = []

    def walk(pos: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
        lonely = sum(1 for s in sizes if s == 1)
        if lonely > m - pos:
            return
        if pos == m:
            blocks: Dict[int, List[int]] = {}
            for p, label in enumerate(rgs):
                blocks.setdefault(label, []).append(p)
            yield tuple(tuple(blocks[label]) for label in sorted(blocks))
            return
        for label in range(len(sizes) + 1):
            rgs[pos] = label
            if label == len(sizes):
                sizes.append(1)
                yield from walk(pos + 1)
                sizes.pop()
            else:
                sizes[label] += 1
                yield from walk(pos + 1)
                sizes[label] -= 1

    yield from walk(0)


def enumerate_basis_P(k: int) -> List[Diagram]:
    """All k-partition diagrams."""
    return [Diagram.from_codes(k, [[v + 1 for v in b] for b in sp]) for sp in enumerate_setpartitions(2 * k)]


_FILTER_LIMIT_K = 3


@lru_cache(maxsize=None)
def _basis_qp(k: int) -> Tuple[Diagram, ...]:
    if k <= _FILTER_LIMIT_K:
        return tuple(d for d in enumerate_basis_P(k) if not has_isolated(d))
    return tuple(
        Diagram.from_codes(k, [[v + 1 for v in b] for b in sp])
        for sp in enumerate_nosingleton_setpartitions(2 * k)
    )


def enumerate_basis_QP(k: int) -> List[Diagram]:
    """All k-partition diagrams with no singleton block."""
    return list(_basis_qp(k))


# ---------- Text and JSON ----------


def diagram_text(d: Diagram) -> str:
    return "{" + "|".join(",".join(d.vertex_labels(b)) for b in d.blocks) + "}"


def parse_diagram(text: str, k: Optional[int] = None) -> Diagram:
    """Parse ``{1,2,1'|3,2',3'}``; k defaults to the largest index seen."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise DiagramError(f"diagram text must be wrapped in braces: {text!r}")
    body = body[1:-1].strip()
    if not body:
        raise DiagramError("empty diagram text")
    raw = [[tok for tok in part.split(",")] for part in body.split("|")]
    vertices = [[Vertex.parse(tok) for tok in block] for block in raw]
    if k is None:
        k = max(v.index for block in vertices for v in block)
    return canonicalize(k, vertices)


def diagram_to_json(d: Diagram) -> Dict[str, Any]:
    return {"k": d.k, "blocks": [d.vertex_labels(b) for b in d.blocks]}


def diagram_from_json(data: Union[str, Dict[str, Any]]) -> Diagram:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        k = int(data["k"])
        blocks = data["blocks"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DiagramError(f"bad diagram JSON: {exc}") from exc
    return canonicalize(k, blocks)


def generating_letters(k: int) -> List[Tuple[str, int]]:
    """The letters s_1..s_{k-1}, e_1, b_1, t_1, h_1 that exist at this k."""
    letters = [("s", i) for i in range(1, k)]
    for name in ("e", "b", "t", "h"):
        if k >= _GENERATOR_SPAN[name]:
            letters.append((name, 1))
    return letters
