import itertools

import pytest
from hypothesis import given, settings, strategies as st

from core.diagrams import (
    compose,
    diagram_text,
    enumerate_basis_QP,
    generator,
    h_diagram,
    identity_diagram,
    join_diagram,
    parse_diagram,
    permutation_diagram,
    t_diagram,
)
from core.factorization import (
    EVEN_LETTERS,
    H_WORD,
    FactorizationError,
    GenWord,
    closure_check,
    evaluate_word,
    factor,
    h_word,
    has_suffix_property,
    join_word,
    perm_word,
    reduce_odd_blocks,
    search_word,
    t_word,
    uses_only,
    verify_h_word,
)


def evaluates_to(word):
    return evaluate_word(word).diagram


def test_word_parsing():
    word = GenWord.parse("s1 e1 b1", 2)
    assert len(word) == 3
    assert str(word) == "s1 e1 b1"
    assert word.names() == ["b", "e", "s"]
    with pytest.raises(FactorizationError, match="invalid letter e2"):
        GenWord.parse("e2", 2)
    with pytest.raises(FactorizationError):
        GenWord.parse("s", 2)
    with pytest.raises(FactorizationError):
        GenWord(2) + GenWord(3)


def test_empty_word_is_identity():
    result = evaluate_word(GenWord(3))
    assert result.diagram == identity_diagram(3)
    assert result.loops == 0
    assert has_suffix_property(GenWord(3))


def test_evaluation_counts_loops():
    result = evaluate_word(GenWord.parse("e1 e1", 2))
    assert result.diagram == generator("e", 1, 2)
    assert result.loops == 1


def test_suffix_property():
    # e1 t1 has a singleton on the bottom row; t1 alone does not
    assert has_suffix_property(GenWord.parse("t1", 3))
    assert not has_suffix_property(GenWord.parse("e1 t1", 3))


@pytest.mark.parametrize("k", [3, 4])
def test_perm_words(k):
    for perm in itertools.permutations(range(1, k + 1)):
        word = perm_word(perm)
        assert uses_only(word, "s")
        assert evaluates_to(word) == permutation_diagram(perm)


def test_conjugated_words_match_diagrams():
    k = 4
    assert evaluates_to(t_word(2, 4, 1, k)) == t_diagram(2, 4, 1, k)
    assert evaluates_to(t_word(3, 1, 2, k)) == t_diagram(3, 1, 2, k)
    assert evaluates_to(h_word(1, 3, 4, k)) == h_diagram(1, 3, 4, k)
    assert evaluates_to(join_word(2, 4, k)) == join_diagram(2, 4, k)


def test_reduction_reassembles():
    for d in enumerate_basis_QP(3):
        step = reduce_odd_blocks(d)
        rebuilt = compose(compose(evaluates_to(step.prefix), step.rest).diagram, evaluates_to(step.suffix)).diagram
        assert rebuilt == d, (diagram_text(d), step.case)
        if step.case != "even":
            odd = [b for b in d.blocks if len(b) % 2]
            odd_rest = [b for b in step.rest.blocks if len(b) % 2]
            assert len(odd_rest) == len(odd) - 2


def test_reduction_cases():
    assert reduce_odd_blocks(generator("t", 1, 3)).case == "top"
    assert reduce_odd_blocks(generator("h", 1, 3)).case == "join"
    assert reduce_odd_blocks(parse_diagram("{1,1',2'|2,3',4'|3,4}")).case == "bottom"
    assert reduce_odd_blocks(generator("b", 1, 3)).case == "even"
    with pytest.raises(FactorizationError, match="singleton"):
        reduce_odd_blocks(generator("p", 1, 2))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_factor_every_basis_diagram(k):
    for d in enumerate_basis_QP(k):
        word = factor(d)
        assert evaluates_to(word) == d
        assert has_suffix_property(word)


def test_even_blocks_need_no_odd_letters():
    for d in enumerate_basis_QP(3):
        if all(len(b) % 2 == 0 for b in d.blocks):
            assert uses_only(factor(d), EVEN_LETTERS), diagram_text(d)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(enumerate_basis_QP(4)))
def test_factor_at_four(d):
    word = factor(d)
    assert evaluates_to(word) == d
    assert has_suffix_property(word)


def test_factor_identity_and_singletons():
    assert len(factor(identity_diagram(3))) == 0
    with pytest.raises(FactorizationError):
        factor(generator("p", 1, 2))


def test_search_limits():
    e = generator("e", 1, 2)
    assert len(search_word(e, max_depth=1)) == 1
    with pytest.raises(FactorizationError, match="within 0 letters"):
        search_word(e, max_depth=0)
    with pytest.raises(FactorizationError):
        search_word(e, start=generator("p", 1, 2))


@pytest.mark.parametrize("k, expected", [(1, 1), (2, 4), (3, 41)])
def test_closure(k, expected):
    report = closure_check(k)
    assert report.expected == expected
    assert report.passed
    assert report.reached == expected


def test_closure_bounds():
    with pytest.raises(FactorizationError):
        closure_check(5)


def test_h_word_is_not_h():
    check = verify_h_word(4)
    assert str(check.word) == H_WORD
    assert diagram_text(check.diagram) == "{1,2,3|4,3'|1',2',4'}"
    assert not check.equal
    with pytest.raises(FactorizationError):
        verify_h_word(3)
