from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.diagrams import compose, enumerate_basis_P, enumerate_basis_QP, generator, identity_diagram
from core.exact_linalg import ExactMatrix
from core.tensor_oracle import (
    OracleError,
    bar_basis,
    bar_matrix,
    bracket_matrix_W,
    centralizer_check,
    certify_structure_constants,
    diagram_matrix_V,
    express_in_bar_basis,
    oracle_product,
    permutation_action_W,
    projection_matrices,
)


def test_b_is_the_diagonal():
    m = diagram_matrix_V(generator("b", 1, 2), 3)
    assert m.shape == (9, 9)
    assert m.nnz() == 3
    assert all(m.entry(i, i) == 1 for i in (0, 4, 8))


def test_singleton_pair_is_all_ones():
    m = diagram_matrix_V(generator("p", 1, 1), 3)
    assert m.to_fractions() == [[1] * 3] * 3


def test_s_swaps_factors():
    m = diagram_matrix_V(generator("s", 1, 2), 3)
    for a in range(3):
        for b in range(3):
            assert m.entry(a * 3 + b, b * 3 + a) == 1
    assert m.nnz() == 9


def test_projections():
    proj = projection_matrices(4, 1)
    ones = ExactMatrix.of(np.ones((4, 1), dtype=np.int64))
    assert (proj.pi_k @ ones).is_zero()
    assert proj.pi_k @ proj.embed_W == proj.embed_W
    assert proj.restrict_W @ proj.embed_W == ExactMatrix.identity(3)
    assert proj.pi_k @ proj.pi_k == proj.pi_k
    assert proj.restricted_pi == proj.restrict_W @ proj.pi_k


def test_bar_matrix_is_projected_diagram():
    proj = projection_matrices(5, 2)
    for d in (generator("e", 1, 2), generator("b", 1, 2), generator("s", 1, 2)):
        expected = proj.restrict_W @ proj.pi_k @ diagram_matrix_V(d, 5) @ proj.embed_W
        assert bar_matrix(d, 5) == expected


def test_bar_matrices():
    e = generator("e", 1, 2)
    bar_e = bar_matrix(e, 5)
    assert bar_e @ bar_e == bar_e.scale(4)
    assert bar_matrix(generator("p", 1, 2), 5).is_zero()
    assert bar_matrix(identity_diagram(1), 4) == ExactMatrix.identity(3)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(enumerate_basis_P(2)), st.sampled_from(enumerate_basis_P(2)))
def test_bracket_matrices_multiply_like_diagrams(d1, d2):
    n = 5
    product = compose(d1, d2)
    expected = bracket_matrix_W(product.diagram, n).scale((n - 1) ** product.loops)
    assert bracket_matrix_W(d1, n) @ bracket_matrix_W(d2, n) == expected


def test_bar_basis_is_independent():
    basis = bar_basis(2, 5)
    assert basis.rank == 4
    for d in enumerate_basis_QP(2):
        assert express_in_bar_basis(bar_matrix(d, 5), 2, 5) == {d: Fraction(1)}


def test_matrix_outside_span():
    with pytest.raises(OracleError, match="outside QP span"):
        express_in_bar_basis(ExactMatrix.of(np.ones((2, 2), dtype=np.int64)), 1, 3)
    with pytest.raises(OracleError):
        express_in_bar_basis(ExactMatrix.identity(3), 1, 3)


def test_oracle_product():
    e = generator("e", 1, 2)
    assert oracle_product(e, e, 5) == {e: Fraction(4)}
    assert oracle_product(generator("p", 1, 2), e, 5) == {}


@pytest.mark.parametrize("n", [5, 6, 7])
def test_certify_two(n):
    report = certify_structure_constants(2, n, threads=2)
    assert report.checked == 16
    assert report.passed, report.mismatches


@pytest.mark.slow
@pytest.mark.parametrize("n", [7, 8])
def test_certify_three(n):
    report = certify_structure_constants(3, n)
    assert report.checked == 41 * 41
    assert report.passed, report.mismatches[:3]


def test_bar_matrices_commute_with_symmetric_group():
    samples = centralizer_check(2, 5, samples=20, seed=3)
    assert len(samples) == 20 * 4
    assert all(s.commutes for s in samples)


def test_guards():
    with pytest.raises(OracleError):
        bar_matrix(generator("e", 1, 2), 2)
    with pytest.raises(OracleError, match="oracle_max_dim"):
        diagram_matrix_V(identity_diagram(5), 6)
    with pytest.raises(OracleError, match="10000 exceeds oracle_max_dim = 6561"):
        diagram_matrix_V(identity_diagram(4), 10)
    with pytest.raises(OracleError):
        diagram_matrix_V(identity_diagram(2), 3, k=3)
    with pytest.raises(OracleError):
        permutation_action_W((0, 0, 1), 3, 1)
