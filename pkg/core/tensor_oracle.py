"""Brute-force matrices on V^{⊗k} and W^{⊗k} for a concrete integer n.

Tensor indices are mixed-radix integers with the first factor most
significant. V has basis v_1..v_n (indices 0..n-1 here); W has basis
w_i = v_i - v_1 for i = 2..n, so W coordinates are the V coordinates
1..n-1 of a vector in W.
"""
from __future__ import annotations

import logging
import math
import random
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.diagrams import Diagram, diagram_text, enumerate_basis_QP, has_isolated
from core.exact_linalg import ExactMatrix, combine, gauss_jordan, invert
from core.settings import get_settings

logger = logging.getLogger(__name__)


class OracleError(RuntimeError):
    """Raised when an oracle computation is out of range or has no exact answer."""


# ---------- Diagram operators ----------


def diagram_matrix_V(d: Diagram, n: int, k: Optional[int] = None) -> ExactMatrix:
    """0/1 matrix of d acting on (C^n)^{⊗k}.

    Entry (i, j) is 1 exactly when every block sees one common value among
    the output labels i (top row) and input labels j (bottom row).

    Raises:
        OracleError: n < 1, k mismatch, or n^k above ``oracle_max_dim``.
    """
    k = d.k if k is None else k
    if k != d.k:
        raise OracleError(f"diagram has k={d.k}, asked for k={k}")
    if n < 1:
        raise OracleError(f"n must be positive, got {n}")
    dim = n ** k
    limit = get_settings().oracle_max_dim
    if dim > limit:
        raise OracleError(f"dimension n^k = {dim} exceeds oracle_max_dim = {limit}")
    nblocks = len(d.blocks)
    values = np.indices((n,) * nblocks).reshape(nblocks, -1) if nblocks else np.zeros((0, 1), dtype=np.int64)
    owner = d.block_of()
    rows = np.zeros(values.shape[1], dtype=np.int64)
    cols = np.zeros(values.shape[1], dtype=np.int64)
    for t in range(1, k + 1):
        rows = rows * n + values[owner[t]]
        cols = cols * n + values[owner[k + t]]
    num = np.zeros((dim, dim), dtype=np.int64)
    num[rows, cols] = 1
    return ExactMatrix(num, 1)


@dataclass(frozen=True)
class Projections:
    """The W embedding, its left inverse, and restrict_W · pi^{⊗k} built factorwise.

    pi = id - (1/n) J projects V onto W; the full pi^{⊗k} is only built on request.
    """

    n: int
    k: int
    embed_W: ExactMatrix
    restrict_W: ExactMatrix
    restricted_pi: ExactMatrix

    @property
    def pi_k(self) -> ExactMatrix:
        return _single_factor(self.n)[0].power_kron(self.k)


def _check_n(n: int) -> None:
    if n < 3:
        raise OracleError(f"n must be at least 3 so that W has dimension >= 2, got n={n}")


def _single_factor(n: int) -> Tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    pi = ExactMatrix.of(n * np.eye(n, dtype=np.int64) - np.ones((n, n), dtype=np.int64), n)
    embed = np.zeros((n, n - 1), dtype=np.int64)
    for c in range(n - 1):
        embed[c + 1, c] = 1
        embed[0, c] = -1
    restrict = np.zeros((n - 1, n), dtype=np.int64)
    for r in range(n - 1):
        restrict[r, r + 1] = 1
    return pi, ExactMatrix(embed, 1), ExactMatrix(restrict, 1)


@lru_cache(maxsize=32)
def projection_matrices(n: int, k: int) -> Projections:
    _check_n(n)
    if n ** k > get_settings().oracle_max_dim:
        raise OracleError(f"dimension n^k = {n ** k} exceeds oracle_max_dim")
    pi, embed, restrict = _single_factor(n)
    return Projections(n, k, embed.power_kron(k), restrict.power_kron(k), (restrict @ pi).power_kron(k))


def bracket_matrix_W(d: Diagram, n: int, k: Optional[int] = None) -> ExactMatrix:
    """[d] in the w-basis: d itself acting in dimension n-1."""
    _check_n(n)
    return diagram_matrix_V(d, n - 1, k)


@lru_cache(maxsize=4096)
def bar_matrix(d: Diagram, n: int, k: Optional[int] = None) -> ExactMatrix:
    """restrict_W · pi^{⊗k} · d · embed_W, the bar element as an operator on W^{⊗k}."""
    k = d.k if k is None else k
    proj = projection_matrices(n, k)
    return proj.restricted_pi @ diagram_matrix_V(d, n, k) @ proj.embed_W


def permutation_action_W(sigma: Sequence[int], n: int, k: int) -> ExactMatrix:
    """Diagonal action of a permutation of {0..n-1} on W^{⊗k}, in w-coordinates."""
    _check_n(n)
    if sorted(sigma) != list(range(n)):
        raise OracleError(f"not a permutation of 0..{n - 1}: {tuple(sigma)}")
    P = np.zeros((n, n), dtype=np.int64)
    for i, image in enumerate(sigma):
        P[image, i] = 1
    _, embed, restrict = _single_factor(n)
    single = restrict @ ExactMatrix(P, 1) @ embed
    return single.power_kron(k)


# ---------- Bar basis ----------


@dataclass
class BarBasis:
    """Vectorized bar matrices at (k, n) with an inverted pivot subsystem."""

    k: int
    n: int
    diagrams: List[Diagram]
    columns: np.ndarray
    den: int
    projector: np.ndarray
    projected: np.ndarray
    pivots: List[int]
    inverse: List[List[Fraction]]

    @property
    def rank(self) -> int:
        return len(self.pivots)


_RETRIES = 4
_basis_cache: Dict[Tuple[int, int], BarBasis] = {}
_basis_lock = threading.Lock()


def _obj(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def _build_basis(k: int, n: int) -> BarBasis:
    diagrams = enumerate_basis_QP(k)
    den = n ** k
    vectors = []
    for d in diagrams:
        m = bar_matrix(d, n, k)
        vectors.append(m.vector() * (den // m.den))
    columns = np.stack(vectors, axis=1)
    if columns.dtype != object and np.abs(columns).max() >= 1 << 40:
        columns = _obj(columns)
    size = len(diagrams)
    seed = get_settings().random_seed
    for attempt in range(_RETRIES):
        rng = np.random.default_rng(seed + attempt)
        projector = rng.integers(-2, 3, size=(size + 8, columns.shape[0]), dtype=np.int64)
        projected = _obj(projector) @ _obj(columns) if columns.dtype == object else projector @ columns
        _, pivots = gauss_jordan(projected.T.tolist())
        if len(pivots) == size:
            inverse = invert(projected[pivots, :].tolist())
            logger.info("bar basis ready for k=%d, n=%d (%d elements)", k, n, size)
            return BarBasis(k, n, diagrams, columns, den, projector, projected, pivots, inverse)
        logger.debug("projection attempt %d at k=%d, n=%d had rank %d", attempt, k, n, len(pivots))
    raise OracleError(f"basis not independent at this n (k={k}, n={n})")


def bar_basis(k: int, n: int) -> BarBasis:
    key = (k, n)
    with _basis_lock:
        basis = _basis_cache.get(key)
        if basis is None:
            basis = _basis_cache[key] = _build_basis(k, n)
    return basis


def express_in_bar_basis(M: ExactMatrix, k: int, n: int) -> Dict[Diagram, Fraction]:
    """Coefficients c_d with M = Σ c_d bar_matrix(d), zero coefficients dropped.

    Raises:
        OracleError: "matrix outside QP span" when no exact solution exists;
            "basis not independent at this n" when the bar matrices are
            linearly dependent.
    """
    basis = bar_basis(k, n)
    side = (n - 1) ** k
    if M.shape != (side, side):
        raise OracleError(f"expected a {side}x{side} matrix, got {M.shape}")
    target = M.vector()
    if target.dtype != object and basis.projector.dtype != object and np.abs(target).max(initial=0) < 1 << 40:
        projected_target = basis.projector @ target
    else:
        projected_target = _obj(basis.projector) @ _obj(target)
    # Σ c_d col_d / den = target / M.den  ⇔  projected @ c = den * projected_target / M.den
    rhs = [Fraction(int(x) * basis.den, M.den) for x in projected_target]
    coeffs = [sum(row[j] * rhs[basis.pivots[j]] for j in range(basis.rank)) for row in basis.inverse]
    for i, row in enumerate(basis.projected.tolist()):
        if sum(Fraction(int(a)) * c for a, c in zip(row, coeffs)) != rhs[i]:
            raise OracleError("matrix outside QP span")
    common = 1
    for c in coeffs:
        common = common * c.denominator // math.gcd(common, c.denominator)
    scaled = np.array([int(c * common) for c in coeffs], dtype=object)
    bound = max((abs(int(x)) for x in scaled), default=0) * len(scaled)
    if basis.columns.dtype != object and bound * int(np.abs(basis.columns).max(initial=0)) < 1 << 62:
        lhs = _obj(basis.columns @ scaled.astype(np.int64)) * M.den
    else:
        lhs = _obj(basis.columns) @ scaled * M.den
    rhs_full = _obj(target) * (basis.den * common)
    if not np.array_equal(lhs, rhs_full):
        raise OracleError("matrix outside QP span")
    return {d: c for d, c in zip(basis.diagrams, coeffs) if c}


# ---------- Checks ----------


def expansion_matrix(terms: Sequence[Tuple[Diagram, Fraction]], n: int, k: int) -> ExactMatrix:
    """Σ c · [d] for bracket terms with coefficients already evaluated at n."""
    return combine([c for _, c in terms], [bracket_matrix_W(d, n, k) for d, _ in terms])


@dataclass(frozen=True)
class CentralizerSample:
    diagram: Diagram
    sigma: Tuple[int, ...]
    commutes: bool


def centralizer_check(k: int, n: int, samples: int = 20, seed: Optional[int] = None) -> List[CentralizerSample]:
    """Does every bar matrix commute with random permutations of S_n acting on W^{⊗k}?"""
    rng = random.Random(get_settings().random_seed if seed is None else seed)
    out = []
    diagrams = enumerate_basis_QP(k)
    for _ in range(samples):
        sigma = list(range(n))
        rng.shuffle(sigma)
        S = permutation_action_W(sigma, n, k)
        for d in diagrams:
            B = bar_matrix(d, n, k)
            out.append(CentralizerSample(d, tuple(sigma), B @ S == S @ B))
    return out


@dataclass
class CertificationReport:
    k: int
    n: int
    checked: int = 0
    mismatches: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def certify_structure_constants(k: int, n: int, threads: Optional[int] = None) -> CertificationReport:
    """Compare every symbolic bar product at n with the oracle's exact answer."""
    from core.quasi_partition import qp_multiply

    diagrams = enumerate_basis_QP(k)
    bar_basis(k, n)
    pairs = [(d1, d2) for d1 in diagrams for d2 in diagrams]

    def one(pair: Tuple[Diagram, Diagram]) -> Optional[str]:
        d1, d2 = pair
        symbolic = qp_multiply(d1, d2).specialize(n)
        oracle = express_in_bar_basis(bar_matrix(d1, n, k) @ bar_matrix(d2, n, k), k, n)
        if symbolic != oracle:
            return f"{diagram_text(d1)} * {diagram_text(d2)} at n={n}: symbolic {symbolic} vs oracle {oracle}"
        return None

    workers = threads if threads else get_settings().workers
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(one, pairs))
    report = CertificationReport(k, n, checked=len(pairs))
    report.mismatches.extend(r for r in results if r is not None)
    logger.info("certified k=%d at n=%d: %d pairs, %d mismatches", k, n, len(pairs), len(report.mismatches))
    return report


def oracle_product(d1: Diagram, d2: Diagram, n: int) -> Dict[Diagram, Fraction]:
    """bar(d1) bar(d2) at n in the bar basis, read off the matrices.

    A factor with a singleton block has a zero bar matrix.
    """
    k = d1.k
    if has_isolated(d1) or has_isolated(d2):
        return {}
    return express_in_bar_basis(bar_matrix(d1, n, k) @ bar_matrix(d2, n, k), k, n)
