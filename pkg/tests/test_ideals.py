import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subseq.automata import Alphabet, downward_close_nfa, enumerate_upto, nfa_inclusion, union_nfa
from subseq.ideals import (
    Ideal,
    IdealExpr,
    OptionalLetter,
    StarSet,
    canonical_word,
    decompose_downward_closed,
    expr_length,
    f_bound,
    ideal_in_nfa,
    ideal_inclusion,
    ideal_member,
    ideal_nfa,
    ideal_witness,
    length,
    maximal_ideals,
    normalize,
    ordered_dfa,
    parse_seq,
    small_alphabet_bound,
    verify_cycling,
)

from corpus import AB, ABSTAR, ideal, nfa, star_nfa, word_nfa
from gen import ABC, ideals, nfas
from oracles import all_words, ideal_contains

A1 = Alphabet(("a",))


def W(s):
    return tuple(s)


def test_normalize_examples():
    assert str(ideal("[a] a?")) == "[a]"
    empty = normalize(IdealExpr((), AB))
    assert empty.stars == (frozenset(),) and empty.length == 0 and str(empty) == "[]"
    I = ideal("a? b?")
    assert I.stars == (frozenset(),) * 3 and I.letters == ("a", "b") and I.length == 2


def test_adjacent_incomparable_stars_get_a_separator():
    I = ideal("[a] [b]")
    assert str(I) == "[a] b? [b]"
    assert str(ideal("[a] [a b]")) == "[a b]"


def test_absorbable_letters_are_rejected_by_the_constructor():
    with pytest.raises(ValueError):
        Ideal((frozenset("a"), frozenset()), ("a",), AB)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.one_of(st.frozensets(st.sampled_from("abc")).map(StarSet), st.sampled_from("abc").map(OptionalLetter)), max_size=6))
def test_normalize_preserves_language(atoms):
    e = IdealExpr(tuple(atoms), ABC)
    I = normalize(e)
    assert length(I) <= expr_length(e)
    # the same regex oracle evaluated on the raw expression and the normal form
    for w in all_words("abc", 4):
        assert ideal_member(I, w) == _expr_member(e, w)


def _expr_member(e, w):
    """Backtracking membership for an unnormalized expression."""

    def go(i, j):
        if i == len(e.atoms):
            return j == len(w)
        a = e.atoms[i]
        if isinstance(a, OptionalLetter):
            return go(i + 1, j) or (j < len(w) and w[j] == a.letter and go(i + 1, j + 1))
        k = j
        while True:
            if go(i + 1, k):
                return True
            if k < len(w) and w[k] in a.letters:
                k += 1
            else:
                return False

    return go(0, 0)


def test_length_examples():
    I = ideal("[a b]")
    assert I.length == 0 and expr_length(I.atoms()) == 1
    assert ideal("a? [b] c?", ABC).length == 2


@settings(max_examples=100, deadline=None)
@given(ideals(max_len=4, alphabet=ABC))
def test_length_sandwich(I):
    e = I.atoms()
    assert I.length <= expr_length(e) <= 2 * I.length + 1


def test_canonical_word_examples():
    assert canonical_word({"b", "a"}, AB) == W("ab")
    assert canonical_word(set(), AB) == ()
    assert canonical_word({"c"}, ABC) == W("c")


def test_ideal_witness_examples():
    assert ideal_witness(ideal("[a]"), 2) == W("aa")
    assert ideal_witness(ideal("[a] b?"), 2) == W("aab")
    assert ideal_witness(ideal("[a b] c? [a]", ABC), 3) == W("abababcaaa")
    with pytest.raises(ValueError):
        ideal_witness(ideal("[a]"), 0)


@settings(max_examples=100, deadline=None)
@given(ideals(max_len=3, alphabet=ABC), st.integers(1, 4))
def test_witness_is_member(I, m):
    assert ideal_member(I, ideal_witness(I, m))


def test_ordered_dfa_examples():
    D = ordered_dfa(normalize(parse_seq("[a]", A1)))
    assert len(D.states) == 2 and D.delta[(0, "a")] == 0
    D = ordered_dfa(ideal("a?"))
    assert len(D.states) == 3
    assert D.delta[(0, "a")] == 1 and D.delta[(0, "b")] == 2
    assert D.finals == {0, 1}


@settings(max_examples=100, deadline=None)
@given(ideals(max_len=3, alphabet=ABC))
def test_ordered_dfa_matches_regex(I):
    D = ordered_dfa(I)
    assert len(D.states) == I.length + 2
    assert D.order_is_valid()
    for w in all_words("abc", 4):
        expected = ideal_contains(I, w)
        assert D.accepts(w) == expected == ideal_member(I, w)


def test_member_examples():
    assert ideal_member(ideal("[a]"), W("aaa"))
    assert not ideal_member(ideal("a? b?"), W("ba"))
    assert not ideal_member(ideal("[a b] c?", ABC), W("abcab"))


def test_inclusion_examples():
    I = ideal("[a] b? [b]")
    assert ideal_inclusion(I, I)
    assert ideal_inclusion(ideal("[a]"), ideal("[a b]"))
    assert not ideal_inclusion(ideal("a? b?"), ideal("[a]"))


@settings(max_examples=150, deadline=None)
@given(ideals(max_len=3, alphabet=ABC), ideals(max_len=3, alphabet=ABC))
def test_inclusion_matches_automata(I, J):
    assert ideal_inclusion(I, J) == nfa_inclusion(ideal_nfa(I), ideal_nfa(J))


@settings(max_examples=100, deadline=None)
@given(ideals(max_len=3), nfas(max_states=3))
def test_ideal_in_nfa_matches_automata(I, A):
    B = downward_close_nfa(A)
    assert ideal_in_nfa(I, B) == nfa_inclusion(ideal_nfa(I), B)


def test_decompose_examples():
    assert [str(I) for I in decompose_downward_closed(downward_close_nfa(word_nfa("ab")))] == ["a? b?"]
    assert [str(I) for I in decompose_downward_closed(star_nfa("ab"))] == ["[a b]"]
    both = union_nfa([star_nfa("a"), star_nfa("b")], AB)
    assert [str(I) for I in decompose_downward_closed(both)] == ["[a]", "[b]"]
    assert decompose_downward_closed(nfa(set(), set())) == []


def test_decompose_rejects_non_closed_language():
    with pytest.raises(ValueError):
        decompose_downward_closed(word_nfa("ab"))


@settings(max_examples=80, deadline=None)
@given(nfas(max_states=4))
def test_decomposition_covers_exactly(A):
    B = downward_close_nfa(A)
    parts = decompose_downward_closed(B)
    for I in parts:
        assert ideal_in_nfa(I, B)
        assert I.length <= len(B.states)
    for I in parts:
        for J in parts:
            assert I == J or not ideal_inclusion(I, J)
    assert nfa_inclusion(B, union_nfa([ideal_nfa(I) for I in parts], AB))
    assert maximal_ideals(parts) == parts


def test_small_alphabet_bound_values():
    assert small_alphabet_bound(1, 1) == 2
    assert small_alphabet_bound(2, 1) == 8
    assert small_alphabet_bound(2, 3) == 32


def test_f_bound_values():
    for n in range(1, 8):
        assert f_bound(n, 1) == n - 1
    assert f_bound(3, 2) == 6
    for k in range(0, 8):
        assert f_bound(2, k) == k
    for n in range(1, 8):
        for k in range(0, 8):
            assert f_bound(n, k) <= k * (n - 1) ** k


def test_verify_cycling_examples():
    assert verify_cycling(W("aaa"), 2, A1) is not None
    assert verify_cycling(W("a"), 3, A1) is None
    with pytest.raises(ValueError):
        verify_cycling(W("ab"), 4, AB)


def test_verify_cycling_random_long_words():
    rng = random.Random(7)
    for _ in range(10):
        w = tuple(rng.choice("ab") for _ in range(9))
        assert verify_cycling(w, 2, AB) is not None


def test_parse_seq_syntax():
    e = parse_seq("[a b] c? [] a?", ABC)
    assert e.atoms == (StarSet(frozenset("ab")), OptionalLetter("c"), StarSet(frozenset()), OptionalLetter("a"))
    with pytest.raises(ValueError):
        parse_seq("[a b", ABC)


def test_downward_closure_of_abstar_is_everything():
    assert [str(I) for I in decompose_downward_closed(downward_close_nfa(ABSTAR))] == ["[a b]"]
    assert enumerate_upto(ideal_nfa(ideal("[a b]")), 2) == set(all_words("ab", 2))
