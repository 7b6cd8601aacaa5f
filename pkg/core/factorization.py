"""Words in the generators s_1..s_{k-1}, e_1, b_1, t_1, h_1.

``factor`` writes a singleton-free diagram as such a word. Pairs of odd
blocks are peeled off constructively (an h or t letter conjugated into
place, plus a join for long top blocks); the remaining even-block diagram
is found by breadth-first search over s, e and b. Every word returned has
the suffix property: each tail w_i ... w_l evaluates to a diagram without
singleton blocks.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from core.diagrams import (
    Diagram,
    DiagramError,
    ComposeResult,
    compose,
    diagram_text,
    enumerate_basis_QP,
    flip,
    generating_letters,
    generator,
    has_isolated,
    identity_diagram,
)
from core.settings import get_settings

logger = logging.getLogger(__name__)

Letter = Tuple[str, int]

EVEN_LETTERS = ("s", "e", "b")


class FactorizationError(RuntimeError):
    """Raised for invalid letters, parity violations and exhausted searches."""


@dataclass(frozen=True)
class GenWord:
    k: int
    letters: Tuple[Letter, ...] = ()

    def __post_init__(self):
        for name, i in self.letters:
            try:
                generator(name, i, self.k)
            except DiagramError as exc:
                raise FactorizationError(f"invalid letter {name}{i} at k={self.k}: {exc}") from exc

    @classmethod
    def parse(cls, text: str, k: int) -> "GenWord":
        letters = []
        for token in text.split():
            name, digits = token[0], token[1:]
            if not digits.isdigit():
                raise FactorizationError(f"bad letter {token!r}")
            letters.append((name, int(digits)))
        return cls(k, tuple(letters))

    def __add__(self, other: "GenWord") -> "GenWord":
        if self.k != other.k:
            raise FactorizationError(f"cannot join words for k={self.k} and k={other.k}")
        return GenWord(self.k, self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def names(self) -> List[str]:
        return sorted({name for name, _ in self.letters})

    def __str__(self) -> str:
        return " ".join(f"{name}{i}" for name, i in self.letters)


def generator_alphabet(k: int) -> List[Letter]:
    return generating_letters(k)


def evaluate_word(w: GenWord) -> ComposeResult:
    """Compose the letters left to right, counting closed loops."""
    diagram = identity_diagram(w.k)
    loops = 0
    for name, i in w.letters:
        result = compose(diagram, generator(name, i, w.k))
        diagram, loops = result.diagram, loops + result.loops
    return ComposeResult(diagram, loops)


def has_suffix_property(w: GenWord) -> bool:
    """Every tail of the word evaluates to a singleton-free diagram."""
    tail = identity_diagram(w.k)
    for name, i in reversed(w.letters):
        tail = compose(generator(name, i, w.k), tail).diagram
        if has_isolated(tail):
            return False
    return True


# ---------- Permutations and conjugates ----------


def perm_word(perm: Sequence[int]) -> GenWord:
    """A word in s-letters for ``permutation_diagram(perm)``.

    Bubble-sorting perm with adjacent swaps b_1, ..., b_m gives the word
    s_{b_m} ... s_{b_1}.
    """
    k = len(perm)
    work = list(perm)
    swaps = []
    for end in range(k - 1, 0, -1):
        for j in range(end):
            if work[j] > work[j + 1]:
                work[j], work[j + 1] = work[j + 1], work[j]
                swaps.append(j + 1)
    return GenWord(k, tuple(("s", b) for b in reversed(swaps)))


def _placing(k: int, *targets: int) -> List[int]:
    """A permutation sending 1, 2, ... to the targets, the rest in increasing order."""
    rest = [v for v in range(1, k + 1) if v not in targets]
    return list(targets) + rest


def _inverse(perm: Sequence[int]) -> List[int]:
    inv = [0] * len(perm)
    for j, image in enumerate(perm, start=1):
        inv[image - 1] = j
    return inv


def conjugate_word(letter: Letter, perm: Sequence[int]) -> GenWord:
    """perm · letter · perm^{-1}: the letter with both rows relabelled by perm."""
    k = len(perm)
    return perm_word(perm) + GenWord(k, (letter,)) + perm_word(_inverse(perm))


def t_word(i1: int, i2: int, i3: int, k: int) -> GenWord:
    """Word for {i1,i2,i1'},{i3,i2',i3'}."""
    return conjugate_word(("t", 1), _placing(k, i1, i2, i3))


def h_word(i1: int, i2: int, i3: int, k: int) -> GenWord:
    """Word for {i1,i2,i3},{i1',i2',i3'}."""
    return conjugate_word(("h", 1), _placing(k, i1, i2, i3))


def join_word(i: int, j: int, k: int) -> GenWord:
    """Word for {i,j,i',j'}."""
    return conjugate_word(("b", 1), _placing(k, i, j))


# ---------- Odd blocks ----------


@dataclass(frozen=True)
class OddBlockReduction:
    """d = prefix · rest · suffix as diagrams; rest has two fewer odd blocks."""

    prefix: GenWord
    rest: Diagram
    suffix: GenWord
    case: str


def _odd_blocks(d: Diagram) -> List[Tuple[int, ...]]:
    return [b for b in d.blocks if len(b) % 2]


def _replace(d: Diagram, old: Sequence[Tuple[int, ...]], new: Iterable[Sequence[int]]) -> Diagram:
    kept = [b for b in d.blocks if b not in old]
    return Diagram.from_codes(d.k, kept + [tuple(b) for b in new if b])


def _join_case(d: Diagram, I: Tuple[int, ...], J: Tuple[int, ...]) -> Tuple[GenWord, Diagram]:
    """I lies in the top row, J in the bottom row.

    d = [join(i1,i4)] h_{i1,i2,i3} d' where d' wires i1 to j1', i2 to j2'
    and hangs i3 on the rest of J.
    """
    k = d.k
    i1, i2, i3 = I[:3]
    j1, j2 = J[:2]
    rest = _replace(d, [I, J], [[i1, j1], [i2, j2], [i3, *J[2:]], I[3:]])
    prefix = h_word(i1, i2, i3, k)
    if len(I) > 3:
        prefix = join_word(i1, I[3], k) + prefix
    return prefix, rest


def _top_case(d: Diagram, I: Tuple[int, ...], J: Tuple[int, ...]) -> Optional[Tuple[Tuple[int, int, int], Diagram]]:
    """d = t_{j2,j1,i} d' when one block has two top vertices j1 < j2 and the other a top vertex i.

    d' moves j1 from the first block to the second.
    """
    k = d.k
    for donor, receiver in ((J, I), (I, J)):
        donor_tops = [v for v in donor if v <= k]
        receiver_tops = [v for v in receiver if v <= k]
        if len(donor_tops) >= 2 and receiver_tops:
            j1, j2 = donor_tops[:2]
            i = receiver_tops[0]
            rest = _replace(d, [donor, receiver], [[v for v in donor if v != j1], [*receiver, j1]])
            return (j2, j1, i), rest
    return None


def reduce_odd_blocks(d: Diagram) -> OddBlockReduction:
    """Remove the first pair of odd blocks of d.

    Raises:
        FactorizationError: d has a singleton or an odd number of odd blocks.
    """
    k = d.k
    if has_isolated(d):
        raise FactorizationError(f"{diagram_text(d)} has a singleton block")
    odd = _odd_blocks(d)
    if len(odd) % 2:
        raise FactorizationError(f"{diagram_text(d)} has an odd number of odd blocks")
    empty = GenWord(k)
    if not odd:
        return OddBlockReduction(empty, d, empty, "even")

    I, J = odd[0], odd[1]
    top_only = lambda b: b[-1] <= k  # noqa: E731
    bottom_only = lambda b: b[0] > k  # noqa: E731
    if top_only(I) and bottom_only(J):
        prefix, rest = _join_case(d, I, J)
        return OddBlockReduction(prefix, rest, empty, "join")
    if top_only(J) and bottom_only(I):
        prefix, rest = _join_case(d, J, I)
        return OddBlockReduction(prefix, rest, empty, "join")

    top = _top_case(d, I, J)
    if top is not None:
        (a, b, c), rest = top
        return OddBlockReduction(t_word(a, b, c, k), rest, empty, "top")

    # the transpose of t_{a,b,c} is t_{c,b,a}
    flipped = flip(d)
    fI, fJ = (tuple(sorted(v + k if v <= k else v - k for v in block)) for block in (I, J))
    mirrored = _top_case(flipped, fI, fJ)
    if mirrored is None:
        raise FactorizationError(f"no reduction applies to {diagram_text(d)}")
    (a, b, c), rest = mirrored
    return OddBlockReduction(empty, flip(rest), t_word(c, b, a, k), "bottom")


# ---------- Search ----------


def search_word(
    target: Diagram,
    start: Optional[Diagram] = None,
    letters: Optional[Sequence[Letter]] = None,
    max_depth: Optional[int] = None,
) -> GenWord:
    """Shortest word w with w · start = target whose tails stay singleton-free.

    Breadth-first over left multiplication: every state is letter · state'
    and states with singleton blocks are dropped, so the suffix property
    holds by construction.

    Raises:
        FactorizationError: target not reached within ``max_depth`` letters.
    """
    k = target.k
    start = identity_diagram(k) if start is None else start
    letters = generator_alphabet(k) if letters is None else list(letters)
    max_depth = get_settings().search_depth if max_depth is None else max_depth
    if has_isolated(start):
        raise FactorizationError(f"search start {diagram_text(start)} has a singleton block")

    parent: Dict[Diagram, Optional[Tuple[Letter, Diagram]]] = {start: None}
    frontier = deque([(start, 0)])
    found = target == start
    while frontier and not found:
        state, depth = frontier.popleft()
        if depth >= max_depth:
            continue
        for letter in letters:
            nxt = compose(generator(letter[0], letter[1], k), state).diagram
            if nxt in parent or has_isolated(nxt):
                continue
            parent[nxt] = (letter, state)
            if nxt == target:
                found = True
                break
            frontier.append((nxt, depth + 1))
    if not found:
        raise FactorizationError(
            f"no word reaches {diagram_text(target)} within {max_depth} letters "
            f"({len(parent)} states explored)"
        )
    word: List[Letter] = []
    node = target
    while parent[node] is not None:
        letter, node = parent[node]
        word.append(letter)
    return GenWord(k, tuple(word))


# ---------- Public API ----------


def factor(d: Diagram) -> GenWord:
    """A word over s_1..s_{k-1}, e_1, b_1, t_1, h_1 evaluating to d.

    Raises:
        FactorizationError: d has a singleton block, or no word was found.
    """
    if has_isolated(d):
        raise FactorizationError(f"{diagram_text(d)} has a singleton block")
    k = d.k
    prefix, suffix = GenWord(k), GenWord(k)
    current = d
    while True:
        step = reduce_odd_blocks(current)
        if step.case == "even":
            break
        prefix = prefix + step.prefix
        suffix = step.suffix + suffix
        current = step.rest

    start = evaluate_word(suffix).diagram
    target = compose(current, start).diagram
    even = [letter for letter in generator_alphabet(k) if letter[0] in EVEN_LETTERS]
    word: Optional[GenWord] = None
    try:
        word = prefix + search_word(target, start=start, letters=even) + suffix
    except FactorizationError as exc:
        logger.debug("even-block search failed for %s: %s", diagram_text(d), exc)
    if word is None or evaluate_word(word).diagram != d or not has_suffix_property(word):
        logger.warning("constructive factorization of %s failed; searching over all letters", diagram_text(d))
        word = search_word(d)
    return word


@dataclass
class ClosureReport:
    """Shortest word lengths for the singleton-free elements of the generated monoid."""

    k: int
    expected: int
    lengths: Dict[Diagram, int] = field(default_factory=dict)
    monoid_size: int = 0

    @property
    def reached(self) -> int:
        return len(self.lengths)

    @property
    def passed(self) -> bool:
        return self.reached == self.expected

    @property
    def max_length(self) -> int:
        return max(self.lengths.values(), default=0)


def closure_check(k: int, max_k: int = 4) -> ClosureReport:
    """Close the generators under composition and count the singleton-free diagrams reached."""
    if not 1 <= k <= max_k:
        raise FactorizationError(f"closure_check supports 1 <= k <= {max_k}, got {k}")
    gens = [generator(name, i, k) for name, i in generator_alphabet(k)]
    ident = identity_diagram(k)
    seen = {ident: 0}
    frontier = deque([ident])
    while frontier:
        state = frontier.popleft()
        for g in gens:
            nxt = compose(state, g).diagram
            if nxt not in seen:
                seen[nxt] = seen[state] + 1
                frontier.append(nxt)
    report = ClosureReport(k, expected=len(enumerate_basis_QP(k)), monoid_size=len(seen))
    report.lengths = {d: length for d, length in seen.items() if not has_isolated(d)}
    logger.info("closure at k=%d: %d of %d singleton-free diagrams", k, report.reached, report.expected)
    return report


H_WORD = "t2 e1 s2 s3 t2 s2 s3"


@dataclass(frozen=True)
class HWordCheck:
    word: GenWord
    diagram: Diagram
    h: Diagram

    @property
    def equal(self) -> bool:
        return self.diagram == self.h


def verify_h_word(k: int = 4) -> HWordCheck:
    """Evaluate the candidate expression of h_1 through t, e and s letters.

    It does not equal h_1, so h_1 stays in the generating set.
    """
    if k < 4:
        raise FactorizationError(f"the h-word needs k >= 4, got {k}")
    word = GenWord.parse(H_WORD, k)
    return HWordCheck(word, evaluate_word(word).diagram, generator("h", 1, k))


def uses_only(word: GenWord, names: Iterable[str]) -> bool:
    allowed = set(names)
    return all(name in allowed for name, _ in word.letters)
