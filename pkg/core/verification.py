"""Verification suites behind ``main.py verify``.

Each suite returns a ``SuiteReport`` of named entries; a failed identity is
recorded, never raised.
"""
from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from core.diagrams import (
    compose,
    diagram_text,
    enumerate_basis_P,
    enumerate_basis_QP,
    generator,
    singleton_vertices,
)
from core.factorization import closure_check, evaluate_word, factor, has_suffix_property, verify_h_word
from core.partition_algebra import BasisTag, LinComb
from core.quasi_partition import (
    catalogued_top_terms,
    bar_expand,
    collected_coefficient,
    dichotomy_report,
    qp_product,
    qp_residual,
    qp_structure_table,
    qp_word,
    verify_relations,
)
from core.rep_theory import (
    bell,
    dimensions,
    irrep_dim_formula,
    kron_tableaux,
    no_singleton_count_alternating,
    no_singleton_count_recurrence,
    partitions_up_to,
)
from core.settings import get_settings
from core.tensor_oracle import (
    bar_matrix,
    centralizer_check,
    certify_structure_constants,
    expansion_matrix,
    oracle_product,
)

logger = logging.getLogger(__name__)

SUITES = ("counts", "relations", "appendix", "oracle", "triangularity", "topterms", "generation", "irreps")


class VerificationError(ValueError):
    """Raised for an unknown suite name or unusable parameters."""


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    k: int
    entries: List[SuiteEntry] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> List[SuiteEntry]:
        return [e for e in self.entries if not e.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.entries.append(SuiteEntry(name, bool(passed), detail))


def default_n(k: int) -> int:
    """Smallest n at which the bar matrices are independent."""
    return 2 * k + 1


def _require_n(k: int, n: int) -> None:
    if n < default_n(k):
        raise VerificationError(f"oracle suites need n >= {default_n(k)} at k={k}, got n={n}")


# ---------- Suites ----------


def counts_suite(k: int, n: Optional[int] = None) -> SuiteReport:
    report = SuiteReport("counts", k)
    for m in range(1, k + 1):
        alternating = no_singleton_count_alternating(2 * m)
        recurrence = no_singleton_count_recurrence(2 * m)
        enumerated = len(enumerate_basis_QP(m))
        report.add(
            f"dim QP_{m}",
            alternating == recurrence == enumerated,
            f"alternating={alternating} recurrence={recurrence} enumeration={enumerated}",
        )
        if m <= 4:
            p_size = len(enumerate_basis_P(m))
            report.add(f"dim P_{m}", p_size == bell(2 * m), f"bell={bell(2 * m)} enumeration={p_size}")
    return report


def relations_suite(k: int, n: Optional[int] = None) -> SuiteReport:
    report = SuiteReport("relations", k)
    if k < 2:
        return report
    for check in verify_relations(k).checks:
        detail = check.detail if not check.limit else f"{check.detail}; n->inf: {check.limit}"
        report.add(check.name, check.passed, detail)
    return report


def appendix_suite(k: int, n: Optional[int] = None) -> SuiteReport:
    """Symbolic top-term coefficients, each confirmed by the oracle at two n."""
    n = default_n(k) if n is None else n
    _require_n(k, n)
    report = SuiteReport("appendix", k)
    for result in catalogued_top_terms(k):
        case = result.case
        name = f"{case.generator}1: {case.label}"
        report.add(name, result.passed, f"got {result.coefficient}, expected {case.expected}")
        g, d = case.generator_diagram(k), case.diagram(k)
        top = compose(g, d).diagram
        for at in (n, n + 1):
            observed = oracle_product(g, d, at).get(top, Fraction(0))
            expected = case.expected_value()(at)
            report.add(f"{name} [oracle n={at}]", observed == expected, f"oracle {observed}, expected {expected}")
    return report


def oracle_suite(k: int, n: Optional[int] = None, threads: Optional[int] = None) -> SuiteReport:
    """Structure constants, bracket expansions and commutation with S_n, all at integer n."""
    n = default_n(k) if n is None else n
    _require_n(k, n)
    report = SuiteReport("oracle", k)
    for at in (n, n + 1):
        cert = certify_structure_constants(k, at, threads)
        detail = f"{cert.checked} pairs" if cert.passed else "; ".join(cert.mismatches[:5])
        report.add(f"structure constants at n={at}", cert.passed, detail)
    for d in enumerate_basis_QP(k):
        terms = [(iso, c(n)) for iso, c in bar_expand(d)]
        report.add(f"bar expansion of {diagram_text(d)} at n={n}", expansion_matrix(terms, n, k) == bar_matrix(d, n, k))
    samples = centralizer_check(k, n, samples=20 if k <= 2 else 3)
    bad = [s for s in samples if not s.commutes]
    report.add(
        f"commutes with S_{n}",
        not bad,
        f"{len(samples)} samples" if not bad else f"{diagram_text(bad[0].diagram)} with {bad[0].sigma}",
    )
    return report


def triangularity_suite(k: int, n: Optional[int] = None, threads: Optional[int] = None) -> SuiteReport:
    """Support, residuals, associativity, and the closed form of the bar coefficients."""
    report = SuiteReport("triangularity", k)
    table = qp_structure_table(k, threads=threads)
    problems = table.problems()
    report.add("support is refinements of the diagram product", not problems, "; ".join(problems[:5]))
    nonzero = [(d1, d2) for d1, d2 in table.pairs() if not qp_residual(d1, d2).is_zero()]
    report.add(
        "bracket residual vanishes",
        not nonzero,
        "; ".join(f"{diagram_text(a)} * {diagram_text(b)}" for a, b in nonzero[:5]),
    )

    basis = enumerate_basis_QP(k)
    if k <= 2:
        triples = [(a, b, c) for a in basis for b in basis for c in basis]
    else:
        rng = random.Random(get_settings().random_seed)
        triples = [tuple(rng.choice(basis) for _ in range(3)) for _ in range(300)]
    broken = []
    for a, b, c in triples:
        x, y, z = (LinComb.of(d, BasisTag.QP_BAR) for d in (a, b, c))
        if qp_product(qp_product(x, y), z) != qp_product(x, qp_product(y, z)):
            broken.append(f"({diagram_text(a)}, {diagram_text(b)}, {diagram_text(c)})")
    report.add(f"associativity on {len(triples)} triples", not broken, "; ".join(broken[:5]))

    mismatched, growing = [], []
    for d in basis:
        for iso, c in bar_expand(d):
            U = singleton_vertices(iso)
            if collected_coefficient(d, U) != c:
                mismatched.append(f"{diagram_text(d)} -> {diagram_text(iso)}")
            if any(v <= k for v in U) and c.num.degree >= c.den.degree:
                growing.append(f"{diagram_text(d)} -> {diagram_text(iso)}: {c}")
    report.add("closed-form coefficients match the expansion", not mismatched, "; ".join(mismatched[:5]))
    report.add("isolating a top vertex gives a vanishing coefficient", not growing, "; ".join(growing[:5]))
    return report


def topterms_suite(k: int, n: Optional[int] = None) -> SuiteReport:
    report = SuiteReport("topterms", k)
    exceptions = 0
    for entry in dichotomy_report(k):
        exceptions += entry.exception
        if entry.passed:
            continue
        report.add(
            f"{entry.generator} * {diagram_text(entry.diagram)}",
            False,
            f"top {diagram_text(entry.top)} coefficient {entry.coefficient}, zero product: {entry.product_is_zero}",
        )
    report.add("nonvanishing or annihilation for every generator and diagram", not report.entries)
    report.add("known vanishing h1 products", True, f"{exceptions} cases")
    return report


def generation_suite(k: int, n: Optional[int] = None) -> SuiteReport:
    """Closure of the generators, factor on every basis diagram, and bar-generation."""
    report = SuiteReport("generation", k)
    if k <= 4:
        closure = closure_check(k)
        report.add(
            "generators reach every singleton-free diagram",
            closure.passed,
            f"{closure.reached}/{closure.expected}, longest shortest word {closure.max_length}",
        )
    failures, weak = [], []
    for d in enumerate_basis_QP(k):
        word = factor(d)
        if evaluate_word(word).diagram != d or not has_suffix_property(word):
            failures.append(f"{diagram_text(d)}: {word}")
            continue
        if word.letters:
            bars = [LinComb.of(generator(name, i, k), BasisTag.QP_BAR) for name, i in word.letters]
            if qp_word(*bars).coefficient(d).is_zero():
                weak.append(f"{diagram_text(d)}: {word}")
    report.add("factor with the suffix property", not failures, "; ".join(failures[:5]))
    report.add("bar products of the factor words have a nonzero top term", not weak, "; ".join(weak[:5]))
    if k >= 4:
        check = verify_h_word(k)
        report.add("h1 is not a word in t, e and s", not check.equal, f"{check.word} = {diagram_text(check.diagram)}")
    return report


def irreps_suite(k: int, n: Optional[int] = None) -> SuiteReport:
    report = SuiteReport("irreps", k)
    dims = dimensions(k)
    for lam in partitions_up_to(k):
        paths = dims.get(lam, 0)
        formula = irrep_dim_formula(lam, k)
        tableaux = len(kron_tableaux(lam, k))
        report.add(
            f"dim of {lam} at k={k}",
            paths == formula == tableaux,
            f"paths={paths} formula={formula} tableaux={tableaux}",
        )
    total = sum(v * v for v in dims.values())
    expected = no_singleton_count_alternating(2 * k)
    report.add("sum of squared dimensions", total == expected, f"{total} vs {expected}")
    return report


_SUITE_FUNCS: Dict[str, Callable[..., SuiteReport]] = {
    "counts": counts_suite,
    "relations": relations_suite,
    "appendix": appendix_suite,
    "oracle": oracle_suite,
    "triangularity": triangularity_suite,
    "topterms": topterms_suite,
    "generation": generation_suite,
    "irreps": irreps_suite,
}

_THREADED = {"oracle", "triangularity"}


# ---------- Public API ----------


def run_suite(name: str, k: int, n: Optional[int] = None, threads: Optional[int] = None) -> List[SuiteReport]:
    """Run one suite, or every suite for ``all``.

    Raises:
        VerificationError: unknown suite, k < 1, or n too small for the oracle.
    """
    if k < 1:
        raise VerificationError(f"k must be positive, got {k}")
    names = list(SUITES) if name == "all" else [name]
    reports = []
    for suite in names:
        func = _SUITE_FUNCS.get(suite)
        if func is None:
            raise VerificationError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all")
        logger.info("suite %s at k=%d started", suite, k)
        started = time.perf_counter()
        report = func(k, n, threads) if suite in _THREADED else func(k, n)
        report.elapsed = time.perf_counter() - started
        logger.info(
            "suite %s at k=%d finished in %.2fs: %d entries, %d failures",
            suite, k, report.elapsed, len(report.entries), len(report.failures()),
        )
        reports.append(report)
    return reports
