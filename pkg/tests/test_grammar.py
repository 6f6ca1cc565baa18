import random

import pytest
from hypothesis import given, settings

from subseq.automata import Alphabet, determinize, downward_close_nfa
from subseq.errors import AlphabetMismatchError
from subseq.formats import parse_model
from subseq.grammar import (
    Cfg,
    CnfGrammar,
    bounded_dfa,
    cfg_ideal_decomposition,
    cfg_regular_counterexample,
    cfg_regular_inclusion,
    compute_pump_sets,
    cyk_accepts,
    downward_grammar,
    enumerate_cfg_upto,
    ideal_in_cfg,
    nfa_to_cfg,
    omega_grammar,
    omega_symbol,
    sentential_member,
    sup_decide,
    to_cnf,
)
from subseq.ideals import ideal_in_nfa, ideal_witness
from subseq.instances import random_cfg, random_ideal, random_nfa

from corpus import AB, ABSTAR, SUP_CASES, ANB_CFG, ANBN_CFG, AN_CFG, DYCK_CFG, PAL_CFG, ideal
from gen import nfas
from oracles import all_words, cfg_words, closure

ABC = Alphabet(("a", "b", "c"))
ABCD = Alphabet(("a", "b", "c", "d"))


def W(s):
    return tuple(s)


def cfg(text, terminals="a b"):
    return parse_model(f"@cfg\nterminals: {terminals}\nstart: S\n{text}")


EMPTY = cfg("prod: S -> a S")
AB_CFG = cfg("prod: S -> a b")


def test_to_cnf_examples():
    G = to_cnf(ANBN_CFG)
    assert isinstance(G, CnfGrammar)
    assert enumerate_cfg_upto(G, 4) == {(), W("ab"), W("aabb")}
    single = to_cnf(cfg("prod: S -> a"))
    assert single.productions == {("S", ("a",))}
    assert to_cnf(EMPTY).is_empty_language()


def test_cnf_shape_is_enforced():
    with pytest.raises(ValueError):
        CnfGrammar(frozenset({"S"}), AB, frozenset({("S", ("a", "b"))}), "S")
    with pytest.raises(ValueError):
        Cfg(frozenset({"S", "a"}), AB, frozenset(), "S")


def test_cyk_examples():
    G = to_cnf(cfg("prod: S -> a"))
    assert cyk_accepts(G, W("a")) and not cyk_accepts(G, W("aa"))
    assert cyk_accepts(to_cnf(ANBN_CFG), W("aabb"))
    with pytest.raises(AlphabetMismatchError):
        cyk_accepts(G, W("c"))


@pytest.mark.parametrize("G", [ANBN_CFG, AN_CFG, ANB_CFG, PAL_CFG, DYCK_CFG, EMPTY, AB_CFG])
def test_enumeration_and_cyk_match_reference(G):
    ref = cfg_words(G, 6)
    assert enumerate_cfg_upto(G, 6) == ref
    C = to_cnf(G)
    assert {w for w in all_words("ab", 6) if cyk_accepts(C, w)} == ref


@pytest.mark.parametrize("seed", range(15))
def test_random_grammars_match_reference(seed):
    G = random_cfg(random.Random(seed), nonterminals=3, productions=6)
    ref = cfg_words(G, 5)
    C = to_cnf(G)
    assert enumerate_cfg_upto(G, 5) == ref
    assert {w for w in all_words("ab", 5) if cyk_accepts(C, w)} == ref


def test_downward_grammar_examples():
    assert enumerate_cfg_upto(downward_grammar(to_cnf(AB_CFG)), 3) == {(), W("a"), W("b"), W("ab")}
    assert enumerate_cfg_upto(downward_grammar(to_cnf(EMPTY)), 3) == set()
    short = enumerate_cfg_upto(downward_grammar(to_cnf(ANBN_CFG)), 2)
    assert short == {(), W("a"), W("b"), W("aa"), W("ab"), W("bb")}


@pytest.mark.parametrize("G", [ANBN_CFG, AN_CFG, ANB_CFG, PAL_CFG, DYCK_CFG, AB_CFG])
def test_downward_grammar_is_closure(G):
    D = downward_grammar(to_cnf(G))
    expected = {w for w in closure(cfg_words(G, 10)) if len(w) <= 5}
    assert enumerate_cfg_upto(D, 5) == expected


def test_sentential_member_examples():
    G = to_cnf(ANBN_CFG)
    assert sentential_member(G, "S", ["S"])
    H = to_cnf(Cfg(frozenset({"S", "A", "B"}), AB, frozenset({("S", ("A", "B")), ("A", ("a",)), ("B", ("b",))}), "S"))
    assert sentential_member(H, "S", ["a", "B"])
    assert not sentential_member(to_cnf(cfg("prod: S -> a")), "S", ["b"])


def _cnf(rules, terminals=AB):
    nts = {A for A, _ in rules} | {s for _, b in rules for s in b if s not in terminals}
    return CnfGrammar(frozenset(nts), terminals, frozenset(rules), "S")


def test_pump_set_examples():
    T = _cnf({("S", ("A", "S")), ("A", ("a",)), ("S", ()), ("A", ())})
    L, R = compute_pump_sets(T)
    assert L["a"] == {"S"} and R["a"] == set()
    T = _cnf({("S", ("S", "A")), ("A", ("a",)), ("S", ()), ("A", ())})
    L, R = compute_pump_sets(T)
    assert R["a"] == {"S"} and L["a"] == set()
    flat = _cnf({("S", ("A", "B")), ("A", ("a",)), ("B", ("b",)), ("S", ()), ("A", ()), ("B", ())})
    L, R = compute_pump_sets(flat)
    assert all(not s for s in L.values()) and all(not s for s in R.values())


@pytest.mark.parametrize("G", [ANBN_CFG, AN_CFG, ANB_CFG, PAL_CFG, DYCK_CFG, AB_CFG])
def test_pump_sets_match_sentential_queries(G):
    Gp = downward_grammar(to_cnf(G))
    L, R = compute_pump_sets(Gp)
    for a in Gp.terminals:
        for A in Gp.nonterminals:
            assert (A in L[a]) == sentential_member(Gp, A, [a, A])
            assert (A in R[a]) == sentential_member(Gp, A, [A, a])


def test_omega_grammar_examples():
    Gp = _cnf({("S", ("A", "S")), ("A", ("a",)), ("S", ()), ("A", ())}, Alphabet(("a",)))
    Gw = omega_grammar(Gp, ["a"])
    assert ("S", (omega_symbol("a"), "S")) in Gw.productions
    assert not any(b == ("a",) for _, b in Gw.productions)
    flat = _cnf({("S", ("A", "A")), ("A", ("a",)), ("S", ()), ("A", ())}, Alphabet(("a",)))
    assert enumerate_cfg_upto(omega_grammar(flat, ["a"]), 3) == {()}
    Gw = to_cnf(omega_grammar(downward_grammar(to_cnf(ANBN_CFG)), ["a", "b"]))
    assert cyk_accepts(Gw, (omega_symbol("a"), omega_symbol("b")))


def test_bounded_dfa():
    D = bounded_dfa(["a", "b"], AB)
    for w in all_words("ab", 5):
        assert D.accepts(w) == ("ba" not in "".join(w))


@pytest.mark.parametrize("G,order,expected", SUP_CASES)
def test_sup_crafted(G, order, expected):
    assert sup_decide(to_cnf(G), list(order)) == expected
    Gp = downward_grammar(to_cnf(G))
    # a true verdict means every a1^m ... an^m is in the closure
    for m in range(1, 5):
        w = tuple(x for x in order for _ in range(m))
        if expected:
            assert cyk_accepts(Gp, w)


def test_sup_empty_and_precondition():
    assert not sup_decide(to_cnf(EMPTY), ["a", "b"])
    with pytest.raises(ValueError):
        sup_decide(to_cnf(DYCK_CFG), ["a", "b"])
    with pytest.raises(ValueError):
        sup_decide(to_cnf(ANBN_CFG), ["a", "a"])


def test_cfg_regular_inclusion_examples():
    ab_star = bounded_dfa(["a", "b"], AB)
    assert cfg_regular_inclusion(to_cnf(ANBN_CFG), ab_star)
    D = determinize(ABSTAR)
    assert not cfg_regular_inclusion(to_cnf(ANBN_CFG), D)
    w = cfg_regular_counterexample(to_cnf(ANBN_CFG), D)
    assert w is not None and cyk_accepts(to_cnf(ANBN_CFG), w) and not D.accepts(w)
    assert cfg_regular_inclusion(to_cnf(EMPTY), D)


@pytest.mark.parametrize("seed", range(10))
def test_cfg_regular_inclusion_matches_enumeration(seed):
    rng = random.Random(seed)
    G = to_cnf(random_cfg(rng, nonterminals=3, productions=6))
    D = determinize(random_nfa(rng, n=3))
    w = cfg_regular_counterexample(G, D)
    bad = {v for v in enumerate_cfg_upto(G, 6) if not D.accepts(v)}
    if w is None:
        assert not bad
    else:
        assert cyk_accepts(G, w) and not D.accepts(w)


def test_ideal_in_cfg_examples():
    assert ideal_in_cfg(ideal("a? b?"), to_cnf(AB_CFG))
    assert ideal_in_cfg(ideal("[a]"), to_cnf(ANBN_CFG))
    assert not ideal_in_cfg(ideal("[b] [a]"), to_cnf(ANBN_CFG))
    assert ideal_in_cfg(ideal("[a] [b]"), to_cnf(ANBN_CFG))
    assert not ideal_in_cfg(ideal("[a b]"), to_cnf(ANBN_CFG))
    assert ideal_in_cfg(ideal("[a b]"), to_cnf(DYCK_CFG))
    assert not ideal_in_cfg(ideal("[a]"), to_cnf(EMPTY))
    with pytest.raises(AlphabetMismatchError):
        ideal_in_cfg(ideal("[a]", ABC), to_cnf(ANBN_CFG))


@pytest.mark.parametrize("seed", range(30))
def test_ideal_in_cfg_matches_regular_route(seed):
    rng = random.Random(seed)
    A = random_nfa(rng, n=3)
    I = random_ideal(rng, length=rng.randint(0, 3))
    G = to_cnf(nfa_to_cfg(A))
    got = ideal_in_cfg(I, G)
    assert got == ideal_in_nfa(I, downward_close_nfa(A))
    if got:
        Gp = downward_grammar(G)
        assert all(cyk_accepts(Gp, ideal_witness(I, m)) for m in range(1, 4))


@settings(max_examples=40, deadline=None)
@given(nfas(max_states=3))
def test_nfa_to_cfg_preserves_language(A):
    from oracles import nfa_language

    assert enumerate_cfg_upto(nfa_to_cfg(A), 4) == nfa_language(A, 4)


def test_decomposition_examples():
    assert [str(I) for I in cfg_ideal_decomposition(to_cnf(ANBN_CFG))] == [str(ideal("[a] [b]"))]
    assert [str(I) for I in cfg_ideal_decomposition(to_cnf(AB_CFG))] == ["a? b?"]
    assert cfg_ideal_decomposition(to_cnf(EMPTY)) == []
    assert [str(I) for I in cfg_ideal_decomposition(to_cnf(DYCK_CFG))] == ["[a b]"]


@pytest.mark.parametrize("G", [ANB_CFG, PAL_CFG, AN_CFG])
def test_decomposition_is_exact(G):
    C = to_cnf(G)
    parts = cfg_ideal_decomposition(C)
    assert all(ideal_in_cfg(I, C) for I in parts)
    from subseq.ideals import cover_dfa

    assert cfg_regular_inclusion(downward_grammar(C), cover_dfa(parts, AB))
