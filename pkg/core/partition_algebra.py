"""Linear combinations of diagrams and the partition algebra product.

One product routine serves both P_k(x) (loop parameter x) and the bracket
algebra, whose operators act in dimension n-1 and therefore close loops
with weight x-1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from core.diagrams import (
    Diagram,
    compose,
    diagram_from_json,
    diagram_text,
    diagram_to_json,
    has_isolated,
    identity_diagram,
)
from core.ratfunc import N, ONE, ZERO, Number, Poly, RatFunc, ratfunc_parse, ratfunc_sum


class LinCombError(ValueError):
    """Raised when combinations with different k or basis tags are mixed."""


class BasisTag(str, Enum):
    P_DIAGRAM = "P_diagram"
    BRACKET = "bracket"
    QP_BAR = "QP_bar"


Term = Tuple[Diagram, RatFunc]


@dataclass(frozen=True)
class LinComb:
    """A finite sum of diagrams with rational-function coefficients.

    ``items`` is sorted by diagram and never holds a zero coefficient, so
    two equal combinations compare equal and print identically.
    """

    k: int
    tag: BasisTag
    items: Tuple[Term, ...] = ()

    # ----- Construction -----

    @classmethod
    def from_mapping(
        cls,
        k: int,
        tag: Union[BasisTag, str],
        terms: Mapping[Diagram, Union[RatFunc, Number]],
    ) -> "LinComb":
        tag = BasisTag(tag)
        items = []
        for d, c in terms.items():
            if d.k != k:
                raise LinCombError(f"diagram {d} has k={d.k}, expected k={k}")
            c = c if isinstance(c, RatFunc) else RatFunc.const(c)
            if c.is_zero():
                continue
            if tag is BasisTag.QP_BAR and has_isolated(d):
                raise LinCombError(f"QP_bar term {d} has a singleton block")
            items.append((d, c))
        items.sort(key=lambda item: item[0])
        return cls(k, tag, tuple(items))

    @classmethod
    def zero(cls, k: int, tag: Union[BasisTag, str]) -> "LinComb":
        return cls(k, BasisTag(tag), ())

    @classmethod
    def of(cls, d: Diagram, tag: Union[BasisTag, str], coeff: Union[RatFunc, Number] = 1) -> "LinComb":
        return cls.from_mapping(d.k, tag, {d: coeff})

    # ----- Views -----

    @property
    def terms(self) -> Dict[Diagram, RatFunc]:
        return dict(self.items)

    def coefficient(self, d: Diagram) -> RatFunc:
        for diagram, c in self.items:
            if diagram == d:
                return c
        return ZERO

    def support(self) -> List[Diagram]:
        return [d for d, _ in self.items]

    def is_zero(self) -> bool:
        return not self.items

    def __iter__(self) -> Iterator[Term]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    # ----- Module structure -----

    def _check(self, other: "LinComb") -> None:
        if self.k != other.k:
            raise LinCombError(f"mismatched k: {self.k} vs {other.k}")
        if self.tag is not other.tag:
            raise LinCombError(f"mismatched basis tags: {self.tag.value} vs {other.tag.value}")

    def __add__(self, other: "LinComb") -> "LinComb":
        return lincomb_add(self, other)

    def __sub__(self, other: "LinComb") -> "LinComb":
        return lincomb_add(self, scale(-1, other))

    def __neg__(self) -> "LinComb":
        return scale(-1, self)

    def scale(self, factor: Union[RatFunc, Number]) -> "LinComb":
        return scale(factor, self)

    # ----- Specialization -----

    def specialize(self, n: Number) -> Dict[Diagram, Fraction]:
        """Coefficients evaluated at the integer n; zero values are dropped."""
        out = {}
        for d, c in self.items:
            value = c(n)
            if value:
                out[d] = value
        return out

    def limit_at_infinity(self) -> Dict[Diagram, Optional[Fraction]]:
        return {d: c.limit_at_infinity() for d, c in self.items}

    # ----- Text and JSON -----

    def text(self) -> str:
        if not self.items:
            return "0"
        return " + ".join(f"{c.compact()} * {diagram_text(d)}" for d, c in self.items)

    def __str__(self) -> str:
        return self.text()

    def to_json(self) -> List[Dict[str, Any]]:
        return [{"coeff": str(c), "diagram": diagram_to_json(d)} for d, c in self.items]

    @classmethod
    def from_json(
        cls,
        data: Union[str, Iterable[Dict[str, Any]]],
        tag: Union[BasisTag, str] = BasisTag.P_DIAGRAM,
        k: Optional[int] = None,
    ) -> "LinComb":
        if isinstance(data, str):
            data = json.loads(data)
        terms: Dict[Diagram, RatFunc] = {}
        for entry in data:
            try:
                d = diagram_from_json(entry["diagram"])
                c = ratfunc_parse(entry["coeff"])
            except (KeyError, TypeError) as exc:
                raise LinCombError(f"bad combination entry {entry!r}") from exc
            if k is None:
                k = d.k
            terms[d] = terms.get(d, ZERO) + c
        if k is None:
            raise LinCombError("cannot infer k from an empty combination")
        return cls.from_mapping(k, tag, terms)


@dataclass(frozen=True)
class LoopParam:
    """Weight of one closed loop: the indeterminate x or x - 1."""

    value: RatFunc
    name: str

    def __post_init__(self):
        if self.value not in (N, N - 1):
            raise LinCombError(f"loop parameter must be x or x-1, got {self.value}")

    def power(self, loops: int) -> Poly:
        return (self.value ** loops).num


LOOP_X = LoopParam(N, "x")
LOOP_X_MINUS_ONE = LoopParam(N - 1, "x-1")


# ---------- Public API ----------


def identity(k: int, tag: Union[BasisTag, str] = BasisTag.P_DIAGRAM) -> LinComb:
    return LinComb.of(identity_diagram(k), tag)


def lincomb_add(a: LinComb, b: LinComb) -> LinComb:
    a._check(b)
    terms: Dict[Diagram, RatFunc] = dict(a.items)
    for d, c in b.items:
        terms[d] = terms.get(d, ZERO) + c
    return LinComb.from_mapping(a.k, a.tag, terms)


def scale(factor: Union[RatFunc, Number], a: LinComb) -> LinComb:
    factor = factor if isinstance(factor, RatFunc) else RatFunc.const(factor)
    if factor.is_zero():
        return LinComb.zero(a.k, a.tag)
    if factor == ONE:
        return a
    return LinComb.from_mapping(a.k, a.tag, {d: c * factor for d, c in a.items})


def p_multiply(a: LinComb, b: LinComb, loop: LoopParam = LOOP_X) -> LinComb:
    """Bilinear extension of ``compose``; each closed loop contributes ``loop``.

    Args:
        a: Left factor (drawn on top).
        b: Right factor.
        loop: ``LOOP_X`` for P_k(x), ``LOOP_X_MINUS_ONE`` for brackets.

    Returns:
        The product with the tag shared by both factors.

    Raises:
        LinCombError: k or tags differ, or a factor is in the QP_bar basis.
    """
    a._check(b)
    if a.tag is BasisTag.QP_BAR:
        raise LinCombError("QP_bar combinations multiply through quasi_partition.qp_product")
    return LinComb.from_mapping(a.k, a.tag, multiply_terms(a.items, b.items, loop))


def multiply_terms(
    left: Iterable[Term], right: Iterable[Term], loop: LoopParam
) -> Dict[Diagram, RatFunc]:
    """Raw product of two term lists, coefficients kept unreduced until the end."""
    right = list(right)
    partial: Dict[Diagram, List[Tuple[Poly, Poly]]] = {}
    powers: Dict[int, Poly] = {}
    for d1, c1 in left:
        for d2, c2 in right:
            result = compose(d1, d2)
            weight = powers.get(result.loops)
            if weight is None:
                weight = powers[result.loops] = loop.power(result.loops)
            partial.setdefault(result.diagram, []).append(
                (c1.num * c2.num * weight, c1.den * c2.den)
            )
    return {d: ratfunc_sum(pairs) for d, pairs in partial.items()}
