"""Exact questions about blind counter automata, answered with an SMT solver.

A blind counter automaton has an accepting run iff its transition graph
carries an integer flow from the initial state to a final state that is
connected from the initial state and has total counter effect zero.  These
constraints are linear (plus a ranking for connectivity), which z3 solves
exactly.  Unboundedness of marked transitions is handled by also asking for
a zero-effect circulation through the same support.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Optional, Sequence

import z3

from .automata import EPS, Dfa, Nfa, Word, determinize, minimize, state_key, subset_reject_dfa
from .blind import BlindAutomaton, effect, zero
from .errors import AlphabetMismatchError, SubseqError

_SINK = ("__sink__",)


def _trim_blind(A: BlindAutomaton) -> BlindAutomaton:
    fwd = defaultdict(list)
    bwd = defaultdict(list)
    for p, _, _, q in A.transitions:
        fwd[p].append(q)
        bwd[q].append(p)

    def closure(start, adj):
        seen = set(start)
        stack = list(seen)
        while stack:
            p = stack.pop()
            for q in adj[p]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen

    keep = closure([A.initial], fwd) & closure(A.finals, bwd)
    keep.add(A.initial)
    trans = {t for t in A.transitions if t[0] in keep and t[3] in keep}
    return BlindAutomaton(keep, A.alphabet, A.k, trans, A.initial, A.finals & keep)


def find_accepting_walk(
    A: BlindAutomaton, groups: Optional[dict] = None, required: Optional[Iterable] = None
) -> Optional[list]:
    """An accepting walk of A (list of transitions), or None if L(A) is empty.

    With ``groups`` (transition -> group id), additionally require that the
    walk can be pumped so that every group in ``required`` (default: every
    group occurring in ``groups``) is taken arbitrarily often while staying
    accepting; the returned walk is then just one accepting run.
    """
    required = set(groups.values() if groups else ()) if required is None else set(required)
    if required and not groups:
        return None
    A = _trim_blind(A)
    if A.initial in A.finals and not required:
        return []
    edges = sorted(A.transitions, key=lambda t: (state_key(t[0]), t[1] or "", t[2], state_key(t[3])))
    edges += [(f, "__end__", zero(A.k), _SINK) for f in sorted(A.finals, key=state_key)]
    if not A.finals:
        return None
    nodes = set(A.states) | {_SINK}
    s = z3.Solver()
    x = [z3.Int(f"x{i}") for i in range(len(edges))]
    out_e = defaultdict(list)
    in_e = defaultdict(list)
    for i, (p, _, _, q) in enumerate(edges):
        out_e[p].append(i)
        in_e[q].append(i)
        s.add(x[i] >= 0)
    for v in nodes:
        balance = z3.Sum([x[i] for i in out_e[v]] + [z3.IntVal(0)]) - z3.Sum([x[i] for i in in_e[v]] + [z3.IntVal(0)])
        s.add(balance == (1 if v == A.initial else 0) - (1 if v == _SINK else 0))
    for j in range(A.k):
        s.add(z3.Sum([x[i] * edges[i][2][j] for i in range(len(edges)) if edges[i][2][j]] + [z3.IntVal(0)]) == 0)
    # every visited state is reached from the initial state through used edges
    rank = {v: z3.Int(f"r{n}") for n, v in enumerate(sorted(nodes, key=state_key))}
    used = {}
    for v in nodes:
        s.add(rank[v] >= 0)
        used[v] = z3.Sum([x[i] for i in in_e[v]] + [z3.IntVal(0)]) >= 1
        if v == A.initial:
            continue
        s.add(z3.Implies(used[v], z3.Or([z3.And(x[i] >= 1, rank[edges[i][0]] < rank[v]) for i in in_e[v]] or [z3.BoolVal(False)])))
    if required:
        y = [z3.Int(f"y{i}") for i in range(len(edges))]
        for i, (p, _, _, q) in enumerate(edges):
            s.add(y[i] >= 0)
            active = z3.BoolVal(True) if p == A.initial else used[p]
            s.add(z3.Implies(y[i] >= 1, active))
        for v in nodes:
            s.add(z3.Sum([y[i] for i in out_e[v]] + [z3.IntVal(0)]) == z3.Sum([y[i] for i in in_e[v]] + [z3.IntVal(0)]))
        for j in range(A.k):
            s.add(z3.Sum([y[i] * edges[i][2][j] for i in range(len(edges)) if edges[i][2][j]] + [z3.IntVal(0)]) == 0)
        members = defaultdict(list)
        for i, t in enumerate(edges[: len(A.transitions)]):
            g = groups.get(t)
            if g is not None:
                members[g].append(i)
        for g in required:
            s.add(z3.Sum([y[i] for i in members.get(g, [])] + [z3.IntVal(0)]) >= 1)
    res = s.check()
    if res == z3.unsat:
        return None
    if res != z3.sat:
        raise SubseqError("SMT solver returned unknown")
    model = s.model()
    counts = {i: model.eval(x[i], model_completion=True).as_long() for i in range(len(edges))}
    walk = _euler_walk(edges, counts, A.initial)
    walk = [t for t in walk if t[3] != _SINK]
    if effect(A, walk) != zero(A.k) or (walk and walk[-1][3] not in A.finals) or (not walk and A.initial not in A.finals):
        raise SubseqError("internal error: reconstructed walk is not accepting")
    return walk


def _euler_walk(edges: list, counts: dict, start) -> list:
    """Hierholzer's algorithm on the multigraph given by edge multiplicities."""
    adj = defaultdict(list)
    for i in sorted(counts, reverse=True):
        adj[edges[i][0]].extend([i] * counts[i])
    stack = [(start, None)]
    path = []
    while stack:
        v, via = stack[-1]
        if adj[v]:
            i = adj[v].pop()
            stack.append((edges[i][3], i))
        else:
            stack.pop()
            if via is not None:
                path.append(edges[via])
    path.reverse()
    if len(path) != sum(counts.values()):
        raise SubseqError("internal error: flow support is not connected")
    return path


def walk_word(walk: Sequence) -> Word:
    return tuple(t[1] for t in walk if t[1] is not EPS)


def blind_is_empty(A: BlindAutomaton) -> bool:
    return find_accepting_walk(A) is None


def blind_dfa_product(A: BlindAutomaton, D: Dfa) -> BlindAutomaton:
    """Blind automaton for L(A) ∩ L(D)."""
    if A.alphabet.symbols != D.alphabet.symbols:
        raise AlphabetMismatchError("automata over different alphabets")
    start = (A.initial, D.initial)
    seen = {start}
    stack = [start]
    trans = set()
    succ = defaultdict(list)
    for t in A.transitions:
        succ[t[0]].append(t)
    while stack:
        p, r = stack.pop()
        for _, x, d, q in succ[p]:
            r2 = r if x is EPS else D.delta[(r, x)]
            t = ((p, r), x, d, (q, r2))
            trans.add(t)
            if (q, r2) not in seen:
                seen.add((q, r2))
                stack.append((q, r2))
    finals = {s for s in seen if s[0] in A.finals and s[1] in D.finals}
    return BlindAutomaton(seen, A.alphabet, A.k, trans, start, finals)


def blind_nfa_product(A: BlindAutomaton, N: Nfa, marks: Optional[dict] = None):
    """Blind automaton for L(A) ∩ L(N); ``marks`` maps N-transitions to group
    ids, and the returned dict maps product transitions to those groups."""
    if A.alphabet.symbols != N.alphabet.symbols:
        raise AlphabetMismatchError("automata over different alphabets")
    marks = marks or {}
    succ = defaultdict(list)
    for t in A.transitions:
        succ[t[0]].append(t)
    start = (A.initial, N.initial)
    seen = {start}
    stack = [start]
    trans = set()
    groups = {}
    z = zero(A.k)
    while stack:
        p, r = stack.pop()
        moves = []
        for _, x, d, q in succ[p]:
            if x is EPS:
                moves.append((EPS, d, (q, r), None))
            else:
                moves.extend((x, d, (q, r2), marks.get((r, x, r2))) for y, r2 in N.succ[r] if y == x)
        moves.extend((EPS, z, (p, r2), marks.get((r, EPS, r2))) for y, r2 in N.succ[r] if y is EPS)
        for x, d, nxt, g in moves:
            t = ((p, r), x, d, nxt)
            trans.add(t)
            if g is not None:
                groups[t] = g
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    finals = {s for s in seen if s[0] in A.finals and s[1] in N.finals}
    return BlindAutomaton(seen, A.alphabet, A.k, trans, start, finals), groups


def superword_nfa(w: Sequence, alphabet) -> Nfa:
    """NFA accepting every word that has w as a subword."""
    n = len(w)
    trans = {(i, x, i) for i in range(n + 1) for x in alphabet}
    trans |= {(i, w[i], i + 1) for i in range(n)}
    return Nfa(frozenset(range(n + 1)), alphabet, trans, 0, {n})


def blind_member_closure(A: BlindAutomaton, w: Sequence) -> bool:
    """w ∈ ↓L(A), exactly."""
    w = A.alphabet.check_word(w)
    P, _ = blind_nfa_product(A, superword_nfa(w, A.alphabet))
    return find_accepting_walk(P) is not None


def _ideal_tracker(I):
    """NFA over superwords of witnesses of I, marking completed canonical words.

    State (i, j): inside block i, j letters of the canonical word of Y_i
    matched in the current repetition.  Any letter may be skipped; the
    optional letter x_{i+1} must be read to enter block i+1 and only between
    repetitions.  Completing a repetition of block i is marked with group i.
    """
    from .ideals import canonical_word

    amb = I.ambient
    words = [canonical_word(Y, amb) for Y in I.stars]
    states = {(i, j) for i, w in enumerate(words) for j in range(max(1, len(w)))}
    trans = set()
    marks = {}
    for (i, j) in states:
        for x in amb:
            trans.add(((i, j), x, (i, j)))
        w = words[i]
        if w:
            nxt = (i, (j + 1) % len(w))
            t = ((i, j), w[j], nxt)
            trans.add(t)
            if j + 1 == len(w):
                marks[t] = i
        if j == 0 and i < I.length:
            trans.add(((i, 0), I.letters[i], (i + 1, 0)))
    nfa = Nfa(states, amb, trans, (0, 0), {(I.length, 0)})
    return nfa, marks


def blind_ideal_included(A: BlindAutomaton, I) -> bool:
    """I ⊆ ↓L(A): every witness of I embeds into some accepted word, which
    amounts to an accepting run of the product where each nonempty block's
    canonical word can be repeated without bound."""
    if A.alphabet.symbols != I.ambient.symbols:
        raise AlphabetMismatchError("ideal and automaton use different alphabets")
    tracker, marks = _ideal_tracker(I)
    P, groups = blind_nfa_product(A, tracker, marks)
    return find_accepting_walk(P, groups, required=set(marks.values())) is not None


def blind_included_in_closure(A: BlindAutomaton, closure: Nfa) -> bool:
    """L(A) ⊆ L(closure) for a downward-closed L(closure)."""
    D = minimize(determinize(closure))
    rejecting = Dfa(D.states, D.alphabet, D.delta, D.initial, D.states - D.finals)
    return find_accepting_walk(blind_dfa_product(A, rejecting)) is None


def blind_counterexample(A: BlindAutomaton, L: Nfa) -> Optional[Word]:
    """A word of L(A) outside ↓L(L), or None when L(A) ⊆ ↓L(L)."""
    D = minimize(subset_reject_dfa(L))
    walk = find_accepting_walk(blind_dfa_product(A, D))
    return None if walk is None else walk_word(walk)



def blind_uncovered(A: BlindAutomaton, cover: Dfa) -> Optional[Word]:
    """A word of L(A) rejected by the DFA, or None."""
    rejecting = Dfa(cover.states, cover.alphabet, cover.delta, cover.initial, cover.states - cover.finals)
    walk = find_accepting_walk(blind_dfa_product(A, rejecting))
    return None if walk is None else walk_word(walk)


def blind_closure_ideals(A: BlindAutomaton, max_rounds: int = 500) -> list:
    """Ideal decomposition of the closure of L(A), found by refinement with
    exact emptiness and ideal-inclusion checks."""
    from .ideals import refine_ideals

    return refine_ideals(
        A.alphabet,
        lambda cover: blind_uncovered(A, cover),
        lambda I: blind_ideal_included(A, I),
        max_rounds,
    )
