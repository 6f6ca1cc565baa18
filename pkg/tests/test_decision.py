import itertools
import random

import pytest

from subseq.automata import Alphabet, enumerate_upto, nfa_inclusion
from subseq.decision import (
    ClosureCache,
    DisagreementError,
    STRATEGIES,
    applicable_strategies,
    cross_validate,
    decide_equivalence,
    decide_inclusion,
    decompose,
    find_word_witness,
    member_closure,
    to_dc_nfa,
    verify_witness,
)
from subseq.errors import AlphabetMismatchError, UnsupportedModelError
from subseq.ideals import Ideal
from subseq.instances import SubsetSumInstance, gen_subset_sum, random_nfa, subset_sum_oracle

from corpus import (
    ABSTAR,
    ANBAN_BLIND,
    ANBN_BLIND,
    ANBN_CFG,
    AN_CFG,
    BALANCED_BLIND,
    DYCK_CFG,
    cross_corpus,
    ideal,
    star_nfa,
    word_nfa,
)
from oracles import all_words, nfa_closure_member

W = tuple


def test_to_dc_nfa_examples():
    D = to_dc_nfa(ideal("[a]"))
    assert len(D.states) == 2
    assert enumerate_upto(to_dc_nfa(word_nfa("ab")), 3) == {(), W("a"), W("b"), W("ab")}
    assert to_dc_nfa(ANBN_CFG) is None


def test_inclusion_examples():
    assert decide_inclusion(word_nfa("ab"), ideal("a? b?")).holds
    assert decide_inclusion(ANBN_CFG, star_nfa("ab")).holds
    assert decide_inclusion(ANBN_CFG, ABSTAR).holds
    v = decide_inclusion(star_nfa("ab"), AN_CFG)
    assert not v.holds and verify_witness(star_nfa("ab"), AN_CFG, v.witness)
    v = decide_inclusion(ANBN_CFG, ideal("[a]"))
    assert not v.holds and verify_witness(ANBN_CFG, ideal("[a]"), v.witness)


def test_equivalence_examples():
    assert decide_equivalence(word_nfa("ab"), ideal("a? b?")).holds
    v = decide_equivalence(star_nfa("a"), star_nfa("b"))
    assert not v.holds and v.direction == "forward" and v.witness == W("a")
    v = decide_equivalence(ideal("[a]"), ideal("[a b]"))
    assert not v.holds and v.direction == "backward"
    assert verify_witness(ideal("[a b]"), ideal("[a]"), v.witness)
    for _, m in cross_corpus()[:12]:
        assert decide_equivalence(m, m).holds


def test_subset_sum_examples():
    for (u, v, t), expected in [(((1,), (1,), 1), True), (((1,), (0,), 1), False), (((1, 2), (3, 0), 3), False)]:
        inst = SubsetSumInstance(u, v, t, 2)
        assert subset_sum_oracle(inst) == expected
        B, A = gen_subset_sum(inst)
        verdict = decide_inclusion(B, A)
        assert verdict.holds == expected
        if not expected:
            assert verify_witness(B, A, verdict.witness)


def test_find_word_witness_examples():
    assert find_word_witness(ideal("[a b]"), star_nfa("a")) == W("b")
    assert find_word_witness(word_nfa("ab"), ABSTAR) is None
    w = find_word_witness(star_nfa("ab"), AN_CFG)
    assert w == W("b")
    assert find_word_witness(AN_CFG, ANBN_CFG) is None


def test_alphabet_mismatch_is_rejected():
    other = star_nfa("a", Alphabet(("a", "c")))
    with pytest.raises(AlphabetMismatchError):
        decide_inclusion(star_nfa("a"), other)
    with pytest.raises(AlphabetMismatchError):
        cross_validate(star_nfa("a"), other)


def test_strategy_selection():
    assert decide_inclusion(word_nfa("ab"), ABSTAR, "short-witness").strategy == "short-witness"
    with pytest.raises(UnsupportedModelError):
        decide_inclusion(word_nfa("ab"), ABSTAR, "sup-route")
    with pytest.raises(ValueError):
        decide_inclusion(word_nfa("ab"), ABSTAR, "nonsense")
    assert applicable_strategies(ANBN_CFG, ANBN_CFG) == ["sup-route"]
    assert len(cross_validate(ANBN_CFG, DYCK_CFG)) == 1
    assert set(applicable_strategies(word_nfa("ab"), ABSTAR)) <= set(STRATEGIES)


@pytest.mark.parametrize("seed", range(25))
def test_nfa_pairs_agree_with_reference(seed):
    rng = random.Random(seed)
    K, L = random_nfa(rng, n=3), random_nfa(rng, n=3)
    expected = all(
        nfa_closure_member(L, w) for w in all_words("ab", len(L.states) + 1) if nfa_closure_member(K, w)
    )
    v = decide_inclusion(K, L)
    assert v.holds == expected == nfa_inclusion(to_dc_nfa(K), to_dc_nfa(L))
    assert (find_word_witness(K, L) is None) == expected
    if not expected:
        assert verify_witness(K, L, v.witness)


def test_equivalence_is_conjunction():
    models = [m for _, m in cross_corpus()[:12]]
    cache = ClosureCache()
    for K, L in itertools.product(models, repeat=2):
        eq = decide_equivalence(K, L, cache=cache).holds
        assert eq == (decide_inclusion(K, L, cache=cache).holds and decide_inclusion(L, K, cache=cache).holds)


def test_every_strategy_witness_verifies():
    pairs = [
        (ANBAN_BLIND, ANBN_BLIND),
        (BALANCED_BLIND, ANBN_CFG),
        (ANBN_CFG, ideal("[a] [b]")),
        (DYCK_CFG, ANBN_BLIND),
        (ideal("[a b]"), ANBAN_BLIND),
    ]
    for K, L in pairs:
        rows = cross_validate(K, L)
        assert rows
        for r in rows:
            if r.holds is False:
                assert verify_witness(K, L, r.witness), (r.strategy, r.witness)


def test_decompose_dispatch():
    assert [str(I) for I in decompose(ANBAN_BLIND)] == ["[a] b? [a]"]
    assert decompose(ideal("[a]")) == [ideal("[a]")]
    assert all(isinstance(I, Ideal) for I in decompose(DYCK_CFG))


def test_member_closure_dispatch():
    assert member_closure(ANBN_BLIND, W("ab"))
    assert not member_closure(ANBN_BLIND, W("ba"))
    assert member_closure(ANBN_CFG, W("bb"))
    assert member_closure(ideal("a? b?"), W("b"))
    assert not member_closure(word_nfa("ab"), W("ba"))


def test_disagreement_error_is_a_library_error():
    from subseq.errors import SubseqError

    assert issubclass(DisagreementError, SubseqError)
