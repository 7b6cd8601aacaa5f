import itertools
import random

import pytest
from hypothesis import given, strategies as st

from core.diagrams import (
    Diagram,
    DiagramError,
    Vertex,
    block_split,
    bottom_blocks,
    canonicalize,
    compose,
    diagram_from_json,
    diagram_text,
    diagram_to_json,
    enumerate_basis_P,
    enumerate_basis_QP,
    enumerate_nosingleton_setpartitions,
    enumerate_setpartitions,
    flip,
    generating_letters,
    generator,
    h_diagram,
    has_isolated,
    identity_diagram,
    is_refinement,
    isolate,
    join_diagram,
    pad_diagram,
    parse_diagram,
    permutation_diagram,
    singleton_vertices,
    t_diagram,
    top_blocks,
)


@st.composite
def diagrams(draw, max_k=3, singleton_free=False):
    k = draw(st.integers(min_value=1, max_value=max_k))
    pool = enumerate_basis_QP(k) if singleton_free else enumerate_basis_P(k)
    return draw(st.sampled_from(pool))


@st.composite
def diagram_pairs(draw, max_k=3):
    k = draw(st.integers(min_value=1, max_value=max_k))
    pool = enumerate_basis_P(k)
    return draw(st.sampled_from(pool)), draw(st.sampled_from(pool))


def test_vertex_parse_and_codes():
    assert Vertex.parse("3'") == Vertex(3, "bottom")
    assert Vertex.parse(2).code(4) == 2
    assert Vertex.parse("2'").code(4) == 6
    with pytest.raises(DiagramError):
        Vertex.parse("x")
    with pytest.raises(DiagramError):
        Vertex(5).code(4)


def test_canonicalize_sorts_blocks():
    d = canonicalize(2, [["2'", "1'"], [2, 1]])
    assert d.blocks == ((1, 2), (3, 4))
    assert d == generator("e", 1, 2)


def test_canonicalize_rejects_bad_input():
    with pytest.raises(DiagramError, match="missing"):
        canonicalize(2, [[1, 2], ["1'"]])
    with pytest.raises(DiagramError, match="more than once"):
        canonicalize(1, [[1, "1'"], [1]])
    with pytest.raises(DiagramError):
        canonicalize(1, [[1, "1'", "2'"]])


def test_parse_and_text():
    d = parse_diagram("{1,2,1'|3,2',3'}")
    assert d.k == 3
    assert d == generator("t", 1, 3)
    assert diagram_text(d) == "{1,2,1'|3,2',3'}"
    assert parse_diagram(diagram_text(d), 3) == d
    with pytest.raises(DiagramError):
        parse_diagram("1,2|1',2'")


def test_json_form():
    d = generator("b", 1, 2)
    data = diagram_to_json(d)
    assert data == {"k": 2, "blocks": [["1", "2", "1'", "2'"]]}
    assert diagram_from_json(data) == d
    with pytest.raises(DiagramError):
        diagram_from_json({"blocks": []})


def test_generators():
    assert generator("s", 1, 2).blocks == ((1, 4), (2, 3))
    assert generator("p", 1, 1).blocks == ((1,), (2,))
    assert generator("h", 1, 3) == parse_diagram("{1,2,3|1',2',3'}")
    assert generator("e", 2, 3) == parse_diagram("{1,1'|2,3|2',3'}")
    with pytest.raises(DiagramError):
        generator("t", 2, 3)
    with pytest.raises(DiagramError):
        generator("q", 1, 3)


def test_generating_letters():
    assert generating_letters(1) == []
    assert generating_letters(2) == [("s", 1), ("e", 1), ("b", 1)]
    assert generating_letters(3) == [("s", 1), ("s", 2), ("e", 1), ("b", 1), ("t", 1), ("h", 1)]


def test_generic_diagrams_match_generators():
    assert t_diagram(1, 2, 3, 3) == generator("t", 1, 3)
    assert h_diagram(1, 2, 3, 3) == generator("h", 1, 3)
    assert join_diagram(1, 2, 2) == generator("b", 1, 2)
    assert join_diagram(1, 3, 3) == parse_diagram("{1,3,1',3'|2,2'}")
    with pytest.raises(DiagramError):
        t_diagram(1, 1, 2, 3)


def test_compose_counts_loops():
    e = generator("e", 1, 2)
    result = compose(e, e)
    assert result.diagram == e
    assert result.loops == 1
    with pytest.raises(DiagramError):
        compose(e, identity_diagram(3))


def test_compose_removes_singleton_chain():
    p = generator("p", 1, 1)
    result = compose(p, p)
    assert result.diagram == p
    assert result.loops == 1


def test_permutations_compose_as_functions():
    a, b = (2, 3, 1), (2, 1, 3)
    composed = tuple(a[b[j] - 1] for j in range(3))
    assert compose(permutation_diagram(a), permutation_diagram(b)).diagram == permutation_diagram(composed)
    with pytest.raises(DiagramError):
        permutation_diagram((1, 1, 2))


def test_block_views():
    t = generator("t", 1, 3)
    assert block_split((1, 2, 4), 3) == (frozenset({1, 2}), frozenset({4}))
    assert top_blocks(generator("e", 1, 2)) == [(1, 2)]
    assert bottom_blocks(generator("e", 1, 2)) == [(3, 4)]
    assert not has_isolated(t)
    assert has_isolated(generator("p", 1, 2))
    assert singleton_vertices(generator("p", 1, 2)) == frozenset({1, 3})


def test_isolate_and_refinement():
    b = generator("b", 1, 2)
    iso = isolate(b, ["1"])
    assert iso == parse_diagram("{1|2,1',2'}")
    assert is_refinement(iso, b)
    assert not is_refinement(b, iso)
    assert isolate(b, []) == b


def test_flip_and_pad():
    t = generator("t", 1, 3)
    assert flip(t) == t_diagram(3, 2, 1, 3)
    assert pad_diagram(generator("e", 1, 2), 3) == generator("e", 1, 3)
    with pytest.raises(DiagramError):
        pad_diagram(t, 2)


@pytest.mark.parametrize("m, count", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15), (6, 203)])
def test_setpartition_counts(m, count):
    assert sum(1 for _ in enumerate_setpartitions(m)) == count


@pytest.mark.parametrize("m, count", [(2, 1), (4, 4), (6, 41), (8, 715)])
def test_nosingleton_counts(m, count):
    parts = list(enumerate_nosingleton_setpartitions(m))
    assert len(parts) == count
    assert all(len(b) >= 2 for sp in parts for b in sp)


@pytest.mark.parametrize("k, p_count, qp_count", [(1, 2, 1), (2, 15, 4), (3, 203, 41)])
def test_basis_sizes(k, p_count, qp_count):
    assert len(enumerate_basis_P(k)) == p_count
    assert len(enumerate_basis_QP(k)) == qp_count


def test_qp_basis_at_four_uses_direct_enumeration():
    basis = enumerate_basis_QP(4)
    assert len(basis) == 715
    assert len(set(basis)) == 715
    assert not any(has_isolated(d) for d in basis)


@given(diagrams())
def test_identity_is_neutral(d):
    ident = identity_diagram(d.k)
    assert compose(ident, d).diagram == d
    assert compose(d, ident).diagram == d
    assert compose(d, ident).loops == 0


@given(diagram_pairs())
def test_flip_reverses_products(pair):
    a, b = pair
    assert flip(compose(a, b).diagram) == compose(flip(b), flip(a)).diagram
    assert flip(flip(a)) == a


@given(diagram_pairs())
def test_product_covers_every_vertex(pair):
    a, b = pair
    product = compose(a, b).diagram
    assert isinstance(product, Diagram)
    assert sorted(v for block in product.blocks for v in block) == list(range(1, 2 * a.k + 1))


def subsets(items):
    return itertools.chain.from_iterable(itertools.combinations(items, r) for r in range(len(items) + 1))


def test_two_drawings_of_one_partition():
    # drawn once with edges 1-1'-2 and 2'-3'-4'-4, once with 1'-1-2 and 4-3'-4'-4-2'
    first = canonicalize(4, [[1, "1'", 2], [3], ["2'", "3'", "4'", 4]])
    second = canonicalize(4, [[4, "3'", "4'", "2'"], ["1'", 1, 2], [3]])
    assert first == second
    assert diagram_text(first) == "{1,2,1'|3|4,2',3',4'}"
    assert canonicalize(4, [[Vertex.from_code(v, 4) for v in b] for b in first.blocks]) == first
    # the partition as printed lists 2' twice
    with pytest.raises(DiagramError, match="2' appears more than once"):
        canonicalize(4, [[1, 2, "2'"], [3], ["2'", "3'", "4'", 4]])


def test_canonical_forms_of_small_diagrams():
    assert canonicalize(1, [[1, "1'"]]) == identity_diagram(1)
    e = generator("e", 1, 2)
    for top in ([1, 2], [2, 1]):
        for bottom in (["1'", "2'"], ["2'", "1'"]):
            assert canonicalize(2, [bottom, top]) == e
            assert canonicalize(2, [top, bottom]) == e


def test_isolation_example():
    d = parse_diagram("{1,1',2'|2,3,4|3',4'}")
    expected = parse_diagram("{1,2'|1'|2,3,4|3'|4'}")
    assert isolate(d, ["1'", "4'"]) == expected
    assert isolate(d, ["1'", "3'", "4'"]) == expected
    assert isolate(d, []) == d


def test_block_split_example():
    d = parse_diagram("{1,2,1'|2',3',4'|3,4}")
    assert d.k == 4
    assert block_split((1, 2, 5), 4) == (frozenset({1, 2}), frozenset({5}))
    assert top_blocks(d) == [(3, 4)]
    assert bottom_blocks(d) == [(6, 7, 8)]
    assert not has_isolated(d)
    assert has_isolated(generator("p", 1, 1))
    assert not has_isolated(identity_diagram(3))


def test_refinement_examples():
    assert is_refinement(parse_diagram("{1,2|1',2'}"), parse_diagram("{1,2,1',2'}"))
    assert not is_refinement(parse_diagram("{1,1'|2,2'}"), parse_diagram("{1,2|1',2'}"))


def test_refinement_is_a_partial_order():
    basis = enumerate_basis_P(2)
    for a in basis:
        assert is_refinement(a, a)
        for b in basis:
            if a != b and is_refinement(a, b):
                assert not is_refinement(b, a)
            if not is_refinement(a, b):
                continue
            for c in basis:
                if is_refinement(b, c):
                    assert is_refinement(a, c)


@pytest.mark.parametrize("k", [2, 3])
def test_isolation_refines(k):
    vertices = range(1, 2 * k + 1)
    for d in enumerate_basis_QP(k):
        for chosen in subsets(vertices):
            assert is_refinement(isolate(d, chosen), d)


def test_products_of_isolations_refine_the_product():
    basis = enumerate_basis_QP(2)
    choices = list(subsets(range(1, 5)))
    for d1 in basis:
        for d2 in basis:
            product = compose(d1, d2).diagram
            for x1 in choices:
                iso1 = isolate(d1, x1)
                for x2 in choices:
                    assert is_refinement(compose(iso1, isolate(d2, x2)).diagram, product)


def assert_associative(a, b, c):
    left_inner = compose(a, b)
    left = compose(left_inner.diagram, c)
    right_inner = compose(b, c)
    right = compose(a, right_inner.diagram)
    assert left.diagram == right.diagram
    assert left_inner.loops + left.loops == right_inner.loops + right.loops


def test_compose_is_associative_at_two():
    basis = enumerate_basis_P(2)
    for a, b, c in itertools.product(basis, repeat=3):
        assert_associative(a, b, c)


def test_compose_is_associative_at_three():
    basis = enumerate_basis_P(3)
    rng = random.Random(2024)
    for _ in range(1000):
        assert_associative(rng.choice(basis), rng.choice(basis), rng.choice(basis))


def test_permutation_count():
    assert len({permutation_diagram(p) for p in itertools.permutations(range(1, 4))}) == 6
