"""Quasi-partition algebra QP_k(x) in the bar basis.

A bar element is the projection of a singleton-free diagram onto W^{⊗k}.
Each one expands into bracket operators [d_U] over isolations d_U of d;
products are taken in the bracket algebra (loop weight x-1) and read back
in the bar basis through the coefficients of singleton-free diagrams,
which the expansion keeps unitriangular.
"""
from __future__ import annotations

import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from core.diagrams import (
    Diagram,
    VertexLike,
    compose,
    diagram_from_json,
    diagram_text,
    diagram_to_json,
    enumerate_basis_QP,
    generating_letters,
    generator,
    has_isolated,
    is_refinement,
    isolate,
    pad_diagram,
    parse_diagram,
    singleton_vertices,
    top_blocks,
    vertex_codes,
)
from core.partition_algebra import (
    LOOP_X_MINUS_ONE,
    BasisTag,
    LinComb,
    LinCombError,
    identity,
    multiply_terms,
    p_multiply,
)
from core.ratfunc import ZERO, Poly, RatFunc, n_power, ratfunc_parse, ratfunc_sum
from core.settings import get_settings

logger = logging.getLogger(__name__)


class QuasiPartitionError(ValueError):
    """Raised for invalid QP basis elements, non-viable isolations or a bad table request."""


SINGLETON_BAR = "bar of singleton diagram is zero; not a basis element"


@dataclass(frozen=True)
class IsolationTerm:
    """One (X, Y) summand of a bar expansion."""

    X: frozenset
    Y: frozenset
    coeff: RatFunc

    @property
    def U(self) -> frozenset:
        return self.X | self.Y


def _require_basis(d: Diagram) -> None:
    if has_isolated(d):
        raise QuasiPartitionError(f"{diagram_text(d)} is not a QP basis element: it has a singleton block")


# ---------- Bar expansion ----------


def isolation_terms(d: Diagram) -> List[IsolationTerm]:
    """Every (X, Y) pair of the expansion of bar(d), uncollected.

    X runs over unions of blocks that reach the bottom row, Y over subsets
    of the remaining top vertices; the coefficient is
    (-1)^|U| n^-(|U ∩ top| - #top-only blocks inside Y).
    """
    k = d.k
    tops = [frozenset(b) for b in top_blocks(d)]
    vertical = [b for b in d.blocks if b[-1] > k]
    terms = []
    for r in range(len(vertical) + 1):
        for chosen in itertools.combinations(vertical, r):
            X = frozenset(v for b in chosen for v in b)
            free = [v for v in range(1, k + 1) if v not in X]
            for s in range(len(free) + 1):
                for picked in itertools.combinations(free, s):
                    Y = frozenset(picked)
                    U = X | Y
                    exponent = sum(1 for v in U if v <= k) - sum(1 for b in tops if b <= Y)
                    sign = -1 if len(U) % 2 else 1
                    terms.append(IsolationTerm(X, Y, sign * n_power(-exponent)))
    return terms


@lru_cache(maxsize=None)
def _bar_expand(d: Diagram) -> LinComb:
    partial: Dict[Diagram, List[Tuple[Poly, Poly]]] = {}
    for term in isolation_terms(d):
        partial.setdefault(isolate(d, term.U), []).append((term.coeff.num, term.coeff.den))
    return LinComb.from_mapping(d.k, BasisTag.BRACKET, {iso: ratfunc_sum(p) for iso, p in partial.items()})


def bar_expand(d: Diagram, allow_singletons: bool = False) -> LinComb:
    """Expand bar(d) in the bracket basis.

    Args:
        d: A diagram without singleton blocks.
        allow_singletons: Return the zero combination for a diagram with a
            singleton block (its projection vanishes) instead of raising.

    Raises:
        QuasiPartitionError: ``d`` has a singleton block and the flag is off.
    """
    if has_isolated(d):
        if allow_singletons:
            return LinComb.zero(d.k, BasisTag.BRACKET)
        raise QuasiPartitionError(SINGLETON_BAR)
    return _bar_expand(d)


def collected_coefficient(d: Diagram, U: Iterable[VertexLike]) -> RatFunc:
    """Closed form of the coefficient of [d_U] in bar(d).

    Independent of ``bar_expand``'s summation; the two must agree.

    Raises:
        QuasiPartitionError: ``d`` has a singleton, or U isolates a bottom
            vertex of a block that it does not isolate entirely.
    """
    _require_basis(d)
    k = d.k
    codes = vertex_codes(k, U)
    for b in d.blocks:
        members = set(b)
        if any(v > k for v in members & codes) and not members <= codes:
            raise QuasiPartitionError(
                f"non-viable isolation: block {{{','.join(d.vertex_labels(b))}}} is cut at the bottom row"
            )
    # every vertex left alone after isolating U counts as isolated
    star = singleton_vertices(isolate(d, codes))
    inside = [b for b in d.blocks if set(b) <= star]
    if any(sum(1 for v in b if v > k) == 1 for b in inside):
        return ZERO
    whole_tops = [b for b in inside if b[-1] <= k]
    exponent = sum(1 for v in star if v <= k) - len(whole_tops)
    value = -1 if len(star) % 2 else 1
    for b in whole_tops:
        value *= 1 - len(b)
    return value * n_power(-exponent)


# ---------- Products ----------


def bar_of(d: Diagram) -> LinComb:
    """bar(d) as a QP_bar combination: d itself, or zero when d has a singleton."""
    if has_isolated(d):
        return LinComb.zero(d.k, BasisTag.QP_BAR)
    return LinComb.of(d, BasisTag.QP_BAR)


def _bracket_product(d1: Diagram, d2: Diagram) -> Dict[Diagram, RatFunc]:
    return multiply_terms(_bar_expand(d1).items, _bar_expand(d2).items, LOOP_X_MINUS_ONE)


@lru_cache(maxsize=1 << 16)
def _qp_multiply(d1: Diagram, d2: Diagram) -> LinComb:
    raw = _bracket_product(d1, d2)
    return LinComb.from_mapping(
        d1.k, BasisTag.QP_BAR, {d: c for d, c in raw.items() if not has_isolated(d)}
    )


def qp_multiply(d1: Diagram, d2: Diagram, verify: bool = False) -> LinComb:
    """bar(d1) * bar(d2) in the bar basis.

    Args:
        d1: Left factor, singleton-free.
        d2: Right factor, singleton-free, same k.
        verify: Also check that the bracket product minus the expansion of
            the result vanishes.

    Raises:
        QuasiPartitionError: invalid basis element, mismatched k, or a
            non-zero residual under ``verify``.
    """
    if d1.k != d2.k:
        raise QuasiPartitionError(f"mismatched k: {d1.k} vs {d2.k}")
    _require_basis(d1)
    _require_basis(d2)
    result = _qp_multiply(d1, d2)
    if verify:
        residual = qp_residual(d1, d2)
        if not residual.is_zero():
            raise QuasiPartitionError(
                f"non-zero residual for {diagram_text(d1)} * {diagram_text(d2)}: {residual.text()}"
            )
    return result


def qp_residual(d1: Diagram, d2: Diagram) -> LinComb:
    """Bracket product of the two expansions minus the expansion of their bar product."""
    product = LinComb.from_mapping(d1.k, BasisTag.BRACKET, _bracket_product(d1, d2))
    for d, c in qp_multiply(d1, d2):
        product = product - bar_expand(d).scale(c)
    return product


def qp_product(a: LinComb, b: LinComb) -> LinComb:
    """Bilinear product of two QP_bar combinations."""
    for x in (a, b):
        if x.tag is not BasisTag.QP_BAR:
            raise LinCombError(f"qp_product needs QP_bar combinations, got {x.tag.value}")
    if a.k != b.k:
        raise LinCombError(f"mismatched k: {a.k} vs {b.k}")
    acc: Dict[Diagram, RatFunc] = {}
    for d1, c1 in a:
        for d2, c2 in b:
            weight = c1 * c2
            for d, c in _qp_multiply(d1, d2):
                acc[d] = acc.get(d, ZERO) + weight * c
    return LinComb.from_mapping(a.k, BasisTag.QP_BAR, acc)


def qp_word(*factors: LinComb) -> LinComb:
    """Left-to-right product of one or more QP_bar combinations."""
    result = factors[0]
    for f in factors[1:]:
        result = qp_product(result, f)
    return result


# ---------- Structure tables ----------


@dataclass
class StructureTable:
    """All products bar(d1) * bar(d2) over the QP basis at one k."""

    k: int
    entries: Dict[Tuple[Diagram, Diagram], LinComb] = field(default_factory=dict)

    def product(self, d1: Diagram, d2: Diagram) -> LinComb:
        try:
            return self.entries[(d1, d2)]
        except KeyError:
            raise QuasiPartitionError(f"({diagram_text(d1)}, {diagram_text(d2)}) is not in the k={self.k} table") from None

    def __len__(self) -> int:
        return len(self.entries)

    def pairs(self) -> List[Tuple[Diagram, Diagram]]:
        return sorted(self.entries)

    def specialize(self, n: int) -> Dict[Tuple[Diagram, Diagram], Dict[Diagram, Fraction]]:
        return {pair: self.entries[pair].specialize(n) for pair in self.pairs()}

    def problems(self) -> List[str]:
        """Entries whose support is not singleton-free refinements of the diagram product."""
        out = []
        for (d1, d2) in self.pairs():
            top = compose(d1, d2).diagram
            for d in self.entries[(d1, d2)].support():
                if has_isolated(d) or not is_refinement(d, top):
                    out.append(f"{diagram_text(d1)} * {diagram_text(d2)} -> {diagram_text(d)}")
        return out

    def to_json(self) -> List[Dict[str, Any]]:
        return [
            {"d1": diagram_to_json(d1), "d2": diagram_to_json(d2), "result": self.entries[(d1, d2)].to_json()}
            for d1, d2 in self.pairs()
        ]

    @classmethod
    def from_json(cls, data: Sequence[Dict[str, Any]]) -> "StructureTable":
        entries = {}
        k = None
        for row in data:
            d1 = diagram_from_json(row["d1"])
            d2 = diagram_from_json(row["d2"])
            k = d1.k
            entries[(d1, d2)] = LinComb.from_json(row["result"], BasisTag.QP_BAR, k)
        if k is None:
            raise QuasiPartitionError("empty structure table")
        return cls(k, entries)


def qp_structure_table(k: int, threads: Optional[int] = None, cache: Any = None, use_cache: Optional[bool] = None) -> StructureTable:
    """Build (or load from cache) the full structure table at k.

    Args:
        k: Diagram size, at most ``max_table_k``.
        threads: Worker count; defaults to the configured value.
        cache: A ``StructureCache``; defaults to the one in the configured
            cache directory when caching is enabled.
        use_cache: Force caching on or off.

    Raises:
        QuasiPartitionError: k is outside 1..max_table_k.
    """
    settings = get_settings()
    if not 1 <= k <= settings.max_table_k:
        raise QuasiPartitionError(f"structure tables are limited to 1 <= k <= {settings.max_table_k}, got k={k}")
    if use_cache is None:
        use_cache = settings.cache_enabled
    if use_cache and cache is None:
        from core.structure_cache import get_structure_cache

        cache = get_structure_cache(settings.cache_path)
    if not use_cache:
        cache = None
    if cache is not None:
        payload = cache.load(k)
        if payload is not None:
            return StructureTable.from_json(payload)

    basis = enumerate_basis_QP(k)
    pairs = [(d1, d2) for d1 in basis for d2 in basis]
    workers = threads if threads else settings.workers
    started = time.perf_counter()
    logger.info("building structure table k=%d: %d pairs on %d workers", k, len(pairs), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda pair: _qp_multiply(*pair), pairs))
    table = StructureTable(k, dict(zip(pairs, results)))
    logger.info("structure table k=%d built in %.2fs", k, time.perf_counter() - started)

    if cache is not None:
        from core.structure_cache import StructureCacheError

        try:
            cache.store(k, table.to_json())
        except StructureCacheError as exc:
            logger.warning("structure table k=%d not cached: %s", k, exc)
    return table


# ---------- Top terms ----------


def top_term_coefficient(g: Diagram, d: Diagram) -> RatFunc:
    """Coefficient of bar(g d) in bar(g) * bar(d); zero when g d has a singleton."""
    return qp_multiply(g, d).coefficient(compose(g, d).diagram)


def generator_set(k: int) -> List[Tuple[str, Diagram]]:
    return [(f"{name}{i}", generator(name, i, k)) for name, i in generating_letters(k)]


def is_documented_exception(g: Diagram, d: Diagram) -> bool:
    """bar(h_1) bar(d) vanishes although h_1 d is singleton-free.

    Happens when two of 1, 2, 3 form a block of d and the third vertex
    lies in a block of size at least three.
    """
    k = d.k
    if k < 3 or g != generator("h", 1, k):
        return False
    owner = {v: b for b in d.blocks for v in b}
    for a, b, c in ((1, 2, 3), (1, 3, 2), (2, 3, 1)):
        if owner[a] == (a, b) and len(owner[c]) >= 3:
            return True
    return False


@dataclass(frozen=True)
class DichotomyEntry:
    generator: str
    diagram: Diagram
    top: Diagram
    top_in_basis: bool
    coefficient: RatFunc
    product_is_zero: bool
    exception: bool

    @property
    def passed(self) -> bool:
        if self.exception:
            return self.top_in_basis and self.product_is_zero
        if self.top_in_basis:
            return not self.coefficient.is_zero()
        return self.product_is_zero


def dichotomy_report(k: int) -> List[DichotomyEntry]:
    """For each generator g and basis diagram d: a nonzero top term, or a zero product."""
    entries = []
    for name, g in generator_set(k):
        for d in enumerate_basis_QP(k):
            top = compose(g, d).diagram
            product = qp_multiply(g, d)
            entries.append(
                DichotomyEntry(
                    generator=name,
                    diagram=d,
                    top=top,
                    top_in_basis=not has_isolated(top),
                    coefficient=product.coefficient(top),
                    product_is_zero=product.is_zero(),
                    exception=is_documented_exception(g, d) and not has_isolated(top),
                )
            )
    return entries


@dataclass(frozen=True)
class CataloguedCase:
    """A representative diagram for one case of a generator's top-term analysis."""

    generator: str
    label: str
    representative: str
    expected: str
    min_k: int = 3

    def generator_diagram(self, k: int) -> Diagram:
        return generator(self.generator, 1, k)

    def diagram(self, k: int) -> Diagram:
        return pad_diagram(parse_diagram(self.representative, self.min_k), k)

    def expected_value(self) -> RatFunc:
        return ratfunc_parse(self.expected)


CATALOGUED_CASES: Tuple[CataloguedCase, ...] = (
    CataloguedCase("e", "1 and 2 in different blocks", "{1,1'|2,2'}", "1", 2),
    CataloguedCase("e", "{1,2} is a block", "{1,2|1',2'}", "n-1", 2),
    CataloguedCase("e", "1, 2 in a block {1,2,m'}", "{1,2,1'|3,2',3'}", "0"),
    CataloguedCase("e", "1, 2 in a block {1,2,m}", "{1,2,3|1',2',3'}", "0"),
    CataloguedCase("e", "1, 2 in a block of size at least 4", "{1,2,1',2'}", "(n-1)/n", 2),
    CataloguedCase("b", "1 and 2 in different blocks", "{1,1'|2,2'}", "1", 2),
    CataloguedCase("b", "{1,2} is a block", "{1,2|1',2'}", "(n-1)/n", 2),
    CataloguedCase("b", "1, 2 in a block {1,2,m'}", "{1,2,1'|3,2',3'}", "(n-2)/n"),
    CataloguedCase("b", "1, 2 in a block {1,2,m}", "{1,2,3|1',2',3'}", "(n-2)/n"),
    CataloguedCase("b", "1, 2 in a block of size at least 4", "{1,2,1',2'}", "(n-2)/n", 2),
    CataloguedCase("t", "2 and 3 in different blocks", "{1,1'|2,2'|3,3'}", "1"),
    CataloguedCase("t", "{2,3} is a block", "{1,1'|2,3|2',3'}", "0"),
    CataloguedCase("t", "2, 3 in a larger block", "{1,1'|2,3,2',3'}", "(n-2)/n"),
    CataloguedCase("h", "1, 2, 3 in different blocks", "{1,1'|2,2'|3,3'}", "1"),
    CataloguedCase("h", "{1,2} a block, 3 in a block of size 2", "{1,2|3,3'|1',2'}", "0"),
    CataloguedCase("h", "{1,2} a block, 3 in a larger block", "{1,2|3,1',2',3'}", "0"),
    CataloguedCase("h", "1, 2 together in a larger block, 3 apart", "{1,2,1',2'|3,3'}", "(n-2)/n"),
    CataloguedCase("h", "{1,2,3} is a block", "{1,2,3|1',2',3'}", "(n-1)*(n-2)/n"),
    CataloguedCase("h", "1, 2, 3 in a block {1,2,3,m'}", "{1,2,3,1'|2',3'}", "0"),
    CataloguedCase("h", "1, 2, 3 in a block of size at least 5", "{1,2,3,1',2',3'}", "(n-1)*(n-2)/n^2"),
)


def catalogued_cases(k: int) -> List[CataloguedCase]:
    return [case for case in CATALOGUED_CASES if case.min_k <= k]


@dataclass(frozen=True)
class CataloguedResult:
    case: CataloguedCase
    k: int
    coefficient: RatFunc

    @property
    def passed(self) -> bool:
        return self.coefficient == self.case.expected_value()


def catalogued_top_terms(k: int) -> List[CataloguedResult]:
    out = []
    for case in catalogued_cases(k):
        coefficient = top_term_coefficient(case.generator_diagram(k), case.diagram(k))
        out.append(CataloguedResult(case, k, coefficient))
    return out


# ---------- Relations ----------


@dataclass(frozen=True)
class RelationCheck:
    name: str
    passed: bool
    detail: str
    limit: str = ""


@dataclass
class RelationReport:
    k: int
    checks: List[RelationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[RelationCheck]:
        return [c for c in self.checks if not c.passed]


def _limit_text(x: LinComb) -> str:
    parts = []
    for d, value in x.limit_at_infinity().items():
        if value is None:
            parts.append(f"inf * {diagram_text(d)}")
        elif value:
            parts.append(f"{value} * {diagram_text(d)}")
    return " + ".join(parts) or "0"


def _check(name: str, lhs: LinComb, rhs: LinComb) -> RelationCheck:
    passed = lhs == rhs
    detail = lhs.text() if passed else f"lhs = {lhs.text()}; rhs = {rhs.text()}"
    return RelationCheck(name, passed, detail, _limit_text(lhs))


def _relation_list(k: int, tag: BasisTag, mul, b_square) -> List[RelationCheck]:
    def g(name: str, i: int) -> LinComb:
        return LinComb.of(generator(name, i, k), tag)

    def word(*xs: LinComb) -> LinComb:
        result = xs[0]
        for x in xs[1:]:
            result = mul(result, x)
        return result

    one = identity(k, tag)
    zero = LinComb.zero(k, tag)
    n_minus_1 = RatFunc.poly(Poly.of(-1, 1))
    checks = []
    for i in range(1, k):
        s, e, b = g("s", i), g("e", i), g("b", i)
        checks.append(_check(f"s{i}^2 = 1", word(s, s), one))
        checks.append(_check(f"e{i}^2 = (n-1) e{i}", word(e, e), e.scale(n_minus_1)))
        checks.append(_check(f"b{i}^2 = {b_square[0]}", word(b, b), b_square[1](b, e)))
        checks.append(_check(f"s{i} b{i} = b{i}", word(s, b), b))
        checks.append(_check(f"b{i} s{i} = b{i}", word(b, s), b))
        for j in range(i + 2, k):
            checks.append(_check(f"s{i} s{j} = s{j} s{i}", word(s, g("s", j)), word(g("s", j), s)))
    for i in range(1, k - 1):
        s, s_next = g("s", i), g("s", i + 1)
        e, e_next = g("e", i), g("e", i + 1)
        t = g("t", i)
        checks.append(_check(f"s{i} s{i+1} s{i} = s{i+1} s{i} s{i+1}", word(s, s_next, s), word(s_next, s, s_next)))
        checks.append(_check(f"e{i} e{i+1} e{i} = e{i}", word(e, e_next, e), e))
        checks.append(_check(f"e{i+1} e{i} e{i+1} = e{i+1}", word(e_next, e, e_next), e_next))
        checks.append(_check(f"s{i} t{i} = t{i}", word(s, t), t))
        checks.append(_check(f"t{i} s{i+1} = t{i}", word(t, s_next), t))
        if tag is BasisTag.QP_BAR:
            checks.append(_check(f"e{i} t{i} = 0", word(e, t), zero))
            checks.append(_check(f"t{i} e{i+1} = 0", word(t, e_next), zero))
    return checks


def _qp_b_square(b: LinComb, e: LinComb) -> LinComb:
    n = RatFunc.poly(Poly.of(0, 1))
    return b.scale((n - 2) / n) + e.scale(n_power(-2))


def verify_relations(k: int, include_classical: bool = True) -> RelationReport:
    """Check the generator relations of QP_k(x), and optionally their P_k(x-1) counterparts.

    Failures are recorded in the report, never raised.
    """
    if k < 2:
        raise QuasiPartitionError(f"relations need k >= 2, got k={k}")
    report = RelationReport(k)
    report.checks.extend(
        _relation_list(k, BasisTag.QP_BAR, qp_product, ("((n-2)/n) b + (1/n^2) e", _qp_b_square))
    )
    if include_classical:
        classical = _relation_list(
            k,
            BasisTag.P_DIAGRAM,
            lambda a, b: p_multiply(a, b, LOOP_X_MINUS_ONE),
            ("b", lambda b, e: b),
        )
        report.checks.extend(
            RelationCheck(f"P: {c.name}", c.passed, c.detail, c.limit) for c in classical
        )
    return report
