"""Context-free grammars, their downward closures and the unboundedness test.

Grammars in normal form allow productions ``A -> B C``, ``A -> a`` and
``A -> ε``.  ``downward_grammar`` adds ``A -> ε`` for every nonterminal, which
yields the subword closure of a grammar without useless symbols.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .automata import EPS, Alphabet, Dfa, Nfa, Word, relabel
from .errors import AlphabetMismatchError, ResourceError, resource_cap
from .ideals import Ideal, canonical_word, ideal_witness, refine_ideals, strongly_connected_components


@dataclass(frozen=True)
class Cfg:
    nonterminals: frozenset
    terminals: Alphabet
    productions: frozenset
    start: str

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", frozenset(self.nonterminals))
        object.__setattr__(self, "productions", frozenset((A, tuple(b)) for A, b in self.productions))
        if self.start not in self.nonterminals:
            raise ValueError(f"start symbol {self.start!r} is not a nonterminal")
        clash = self.nonterminals & set(self.terminals.symbols)
        if clash:
            raise ValueError(f"symbols used as both terminal and nonterminal: {sorted(clash)}")
        for A, body in self.productions:
            if A not in self.nonterminals:
                raise ValueError(f"production for undeclared nonterminal {A!r}")
            for s in body:
                if s not in self.nonterminals and s not in self.terminals:
                    raise AlphabetMismatchError(f"undeclared symbol {s!r} in production for {A}")

    @property
    def alphabet(self) -> Alphabet:
        return self.terminals

    def sorted_productions(self) -> list:
        return sorted(self.productions)


class CnfGrammar(Cfg):
    """Grammar whose bodies are two nonterminals, one terminal, or empty."""

    def __post_init__(self):
        super().__post_init__()
        for A, body in self.productions:
            ok = (
                len(body) == 0
                or (len(body) == 1 and body[0] in self.terminals)
                or (len(body) == 2 and all(s in self.nonterminals for s in body))
            )
            if not ok:
                raise ValueError(f"production {A} -> {' '.join(body)} is not in normal form")

    @cached_property
    def binary(self) -> list:
        return sorted((A, b[0], b[1]) for A, b in self.productions if len(b) == 2)

    @cached_property
    def by_terminal(self) -> dict:
        out = defaultdict(set)
        for A, b in self.productions:
            if len(b) == 1:
                out[b[0]].add(A)
        return out

    @cached_property
    def nullable(self) -> frozenset:
        null = {A for A, b in self.productions if not b}
        changed = True
        while changed:
            changed = False
            for A, B, C in self.binary:
                if A not in null and B in null and C in null:
                    null.add(A)
                    changed = True
        return frozenset(null)

    def is_empty_language(self) -> bool:
        return not any(A == self.start for A, _ in self.productions)


def _fresh(base: str, used: set) -> str:
    name = base
    for i in itertools.count(1):
        if name not in used:
            used.add(name)
            return name
        name = f"{base}{i}"


def productive_symbols(G: Cfg) -> set:
    prod = set()
    changed = True
    while changed:
        changed = False
        for A, body in G.productions:
            if A not in prod and all(s in prod or s in G.terminals for s in body):
                prod.add(A)
                changed = True
    return prod


def reduce_grammar(G: Cfg) -> Cfg:
    """Drop unproductive, then unreachable nonterminals (start is kept)."""
    prod = productive_symbols(G)
    rules = {(A, b) for A, b in G.productions if A in prod and all(s in prod or s in G.terminals for s in b)}
    reach = {G.start}
    stack = [G.start]
    by_lhs = defaultdict(list)
    for A, b in rules:
        by_lhs[A].append(b)
    while stack:
        A = stack.pop()
        for b in by_lhs[A]:
            for s in b:
                if s in G.nonterminals and s not in reach:
                    reach.add(s)
                    stack.append(s)
    rules = {(A, b) for A, b in rules if A in reach}
    cls = type(G)
    return cls(frozenset(reach), G.terminals, frozenset(rules), G.start)


def to_cnf(G: Cfg) -> CnfGrammar:
    """Equivalent grammar in normal form (ε-productions are kept as they are).

    An empty language gives a grammar whose start symbol has no productions.
    """
    if isinstance(G, CnfGrammar):
        return reduce_grammar(G)
    used = set(G.nonterminals) | set(G.terminals.symbols)
    nts = set(G.nonterminals)
    rules = set()
    term_nt = {}

    def nt_for(a):
        if a not in term_nt:
            term_nt[a] = _fresh(f"T_{a}", used)
            nts.add(term_nt[a])
            rules.add((term_nt[a], (a,)))
        return term_nt[a]

    for A, body in sorted(G.productions):
        if len(body) >= 2:
            body = tuple(nt_for(s) if s in G.terminals else s for s in body)
        while len(body) > 2:
            X = _fresh(f"{A}_", used)
            nts.add(X)
            rules.add((X, body[-2:]))
            body = body[:-2] + (X,)
        rules.add((A, body))
    # unit productions
    units = defaultdict(set)
    for A, b in rules:
        if len(b) == 1 and b[0] in nts:
            units[A].add(b[0])
    reach = {}
    for A in nts:
        seen = {A}
        stack = [A]
        while stack:
            B = stack.pop()
            for C in units[B]:
                if C not in seen:
                    seen.add(C)
                    stack.append(C)
        reach[A] = seen
    proper = [(A, b) for A, b in rules if not (len(b) == 1 and b[0] in nts)]
    by_lhs = defaultdict(list)
    for A, b in proper:
        by_lhs[A].append(b)
    final = {(A, b) for A in nts for B in reach[A] for b in by_lhs[B]}
    return reduce_grammar(CnfGrammar(frozenset(nts), G.terminals, frozenset(final), G.start))


def cyk_accepts(G: CnfGrammar, w: Sequence) -> bool:
    """Membership in L(G) for a normal-form grammar with ε-productions."""
    w = G.terminals.check_word(w)
    n = len(w)
    if n == 0:
        return G.start in G.nullable
    null = G.nullable
    table = {}
    for length in range(1, n + 1):
        for i in range(n - length + 1):
            cell = set(G.by_terminal.get(w[i], ())) if length == 1 else set()
            changed = True
            while changed:
                changed = False
                for A, B, C in G.binary:
                    if A in cell:
                        continue
                    for s in range(length + 1):
                        left = null if s == 0 else (cell if s == length else table[(i, s)])
                        right = null if s == length else (cell if s == 0 else table[(i + s, length - s)])
                        if B in left and C in right:
                            cell.add(A)
                            changed = True
                            break
            table[(i, length)] = cell
    return G.start in table[(0, n)]


def enumerate_cfg_upto(G: Cfg, maxlen: int, cap: Optional[int] = None) -> set:
    """L(G) restricted to words of length at most maxlen (bottom-up fixpoint)."""
    cap = resource_cap() if cap is None else cap
    G = to_cnf(G)
    words = defaultdict(set)
    changed = True
    while changed:
        changed = False
        for A, b in G.sorted_productions():
            if not b:
                new = {()}
            elif len(b) == 1:
                new = {(b[0],)} if maxlen >= 1 else set()
            else:
                new = {u + v for u in words[b[0]] for v in words[b[1]] if len(u) + len(v) <= maxlen}
            if not new <= words[A]:
                words[A] |= new
                changed = True
                if len(words[A]) > cap:
                    raise ResourceError(f"grammar enumeration exceeded {cap} words")
    return set(words[G.start])


def downward_grammar(G: CnfGrammar) -> CnfGrammar:
    G = to_cnf(G)
    if G.is_empty_language():
        return G
    rules = G.productions | {(A, ()) for A in G.nonterminals}
    return CnfGrammar(G.nonterminals, G.terminals, rules, G.start)


def sentential_grammar(G: CnfGrammar) -> tuple:
    """Grammar over N ∪ T whose start-independent copies derive sentential forms.

    Returns (grammar, mirror) where mirror maps each nonterminal A to the fresh
    nonterminal generating {s : A ⇒* s}.
    """
    used = set(G.nonterminals) | set(G.terminals.symbols)
    mirror = {A: _fresh(f"{A}'", used) for A in sorted(G.nonterminals)}
    alphabet = Alphabet(tuple(G.terminals.symbols) + tuple(sorted(G.nonterminals)))
    rules = set()
    for A, b in G.productions:
        rules.add((mirror[A], tuple(mirror[s] for s in b) if len(b) == 2 else b))
    for A in G.nonterminals:
        rules.add((mirror[A], (A,)))
    return mirror, alphabet, rules


def sentential_member(G: CnfGrammar, A: str, s: Sequence) -> bool:
    """A ⇒* s, for s a sequence over nonterminals and terminals."""
    if A not in G.nonterminals:
        raise ValueError(f"unknown nonterminal {A!r}")
    mirror, alphabet, rules = sentential_grammar(G)
    H = CnfGrammar(frozenset(mirror.values()), alphabet, frozenset(rules), mirror[A])
    return cyk_accepts(H, tuple(s))


def producible_letters(G: CnfGrammar) -> dict:
    """Terminals occurring in some word derivable from each nonterminal."""
    out = {A: set() for A in G.nonterminals}
    changed = True
    while changed:
        changed = False
        for A, b in G.productions:
            new = set()
            for s in b:
                new |= {s} if s in G.terminals else out[s]
            if not new <= out[A]:
                out[A] |= new
                changed = True
    return out


def compute_pump_sets(G: CnfGrammar) -> tuple:
    """Sets L[a] = {A : A ⇒* aA} and R[a] = {A : A ⇒* Aa}.

    For grammars in which every nonterminal is nullable, A ⇒* aA holds iff
    the component of A in the parent-to-child graph contains a production
    X -> Y Z with X, Z in that component and Y able to produce a (mirrored
    for R).
    """
    if not G.nonterminals <= G.nullable:
        raise ValueError("pump sets are computed for grammars where every nonterminal is nullable")
    comp = strongly_connected_components(
        G.nonterminals,
        lambda A: sorted({s for B, b in G.productions if B == A and len(b) == 2 for s in b}),
    )
    prod = producible_letters(G)
    left = defaultdict(set)
    right = defaultdict(set)
    for A, B, C in G.binary:
        if comp[A] == comp[C]:
            for a in prod[B]:
                left[a].add(comp[A])
        if comp[A] == comp[B]:
            for a in prod[C]:
                right[a].add(comp[A])
    L = {a: {A for A in G.nonterminals if comp[A] in left[a]} for a in G.terminals}
    R = {a: {A for A in G.nonterminals if comp[A] in right[a]} for a in G.terminals}
    return L, R


def omega_symbol(a: str) -> str:
    return f"{a}^w"


def omega_grammar(G: CnfGrammar, order: Sequence) -> Cfg:
    """Replace terminal productions by markers ``a^w`` that record pumpability."""
    order = tuple(order)
    L, R = compute_pump_sets(G)
    marks = {a: omega_symbol(a) for a in order}
    rules = {(A, b) for A, b in G.productions if not (len(b) == 1 and b[0] in G.terminals)}
    for a in order:
        rules |= {(A, (marks[a], A)) for A in L[a]}
        rules |= {(A, (A, marks[a])) for A in R[a]}
    return Cfg(G.nonterminals, Alphabet(tuple(marks[a] for a in order)), frozenset(rules), G.start)


def bounded_dfa(order: Sequence, alphabet: Alphabet) -> Dfa:
    """DFA for a_1* ... a_n* over the given alphabet (state n+1 is the sink)."""
    n = len(order)
    delta = {}
    for i in range(n + 2):
        for x in alphabet:
            j = next((j for j in range(max(i, 1), n + 1) if i <= n and order[j - 1] == x), n + 1)
            delta[(i, x)] = j
    return Dfa(frozenset(range(n + 2)), alphabet, delta, 0, frozenset(range(n + 1)))


def sup_decide(G: CnfGrammar, order: Sequence, check: bool = True) -> bool:
    """Whether the closure of L(G) is all of a_1* ... a_n*, for L(G) inside that set."""
    order = tuple(order)
    if len(set(order)) != len(order):
        raise ValueError("the letters of the bounded expression must be distinct")
    for a in order:
        if a not in G.terminals:
            raise AlphabetMismatchError(f"letter {a!r} is not a terminal")
    G = to_cnf(G)
    if check and not cfg_regular_inclusion(G, bounded_dfa(order, G.terminals)):
        raise ValueError("the grammar's language is not contained in the bounded expression")
    if G.is_empty_language():
        return False
    Gp = downward_grammar(G)
    Gw = to_cnf(omega_grammar(Gp, order))
    return cyk_accepts(Gw, tuple(omega_symbol(a) for a in order))


# ---------------------------------------------------------------------------
# grammars against finite automata


def _productive_triples(G: CnfGrammar, delta, states: Iterable) -> dict:
    """All (p, A, q) with A ⇒* w and δ(p, w) = q, each with a derivation note."""
    states = list(states)
    found = {}
    queue = deque()

    def add(t, why):
        if t not in found:
            found[t] = why
            queue.append(t)

    for A, b in G.sorted_productions():
        if not b:
            for p in states:
                add((p, A, p), ("eps",))
        elif len(b) == 1:
            for p in states:
                for q in delta(p, b[0]):
                    add((p, A, q), ("letter", b[0]))
    as_left = defaultdict(list)
    as_right = defaultdict(list)
    for A, B, C in G.binary:
        as_left[B].append((A, C))
        as_right[C].append((A, B))
    ends_at = defaultdict(set)
    starts_at = defaultdict(set)
    while queue:
        p, B, q = queue.popleft()
        starts_at[(p, B)].add(q)
        ends_at[(B, q)].add(p)
        for A, C in as_left[B]:
            for r in list(starts_at[(q, C)]):
                add((p, A, r), ("pair", q, B, C))
        for A, C in as_right[B]:
            for o in list(ends_at[(C, p)]):
                add((o, A, q), ("pair", p, C, B))
    return found


def _triple_word(found: dict, t) -> Word:
    out = []
    stack = [t]
    while stack:
        p, A, q = stack.pop()
        why = found[(p, A, q)]
        if why[0] == "letter":
            out.append(why[1])
        elif why[0] == "pair":
            _, mid, B, C = why
            stack.append((mid, C, q))
            stack.append((p, B, mid))
    return tuple(out)


def cfg_regular_counterexample(G: CnfGrammar, D: Dfa) -> Optional[Word]:
    """A word of L(G) rejected by D, or None when L(G) ⊆ L(D)."""
    if G.terminals.symbols != D.alphabet.symbols:
        raise AlphabetMismatchError("grammar and automaton use different alphabets")
    G = to_cnf(G)
    found = _productive_triples(G, lambda p, a: (D.delta[(p, a)],), D.states)
    bad = sorted(
        (t for t in found if t[0] == D.initial and t[1] == G.start and t[2] not in D.finals),
        key=lambda t: repr(t),
    )
    if not bad:
        return None
    return min((_triple_word(found, t) for t in bad), key=lambda w: (len(w), w))


def cfg_regular_inclusion(G: CnfGrammar, D: Dfa) -> bool:
    return cfg_regular_counterexample(G, D) is None


def cfg_nfa_product(G: CnfGrammar, N: Nfa, out_alphabet: Alphabet, output) -> CnfGrammar:
    """Grammar for the image of L(G) under a transducer.

    ``N`` reads the terminals of G; ``output(transition)`` gives the emitted
    symbol (or None).  N must have no ε-transitions.
    """
    G = to_cnf(G)
    trans = defaultdict(list)
    for t in N.transitions:
        if t[1] is EPS:
            raise ValueError("transducer must not have ε-transitions")
        trans[(t[0], t[1])].append(t)
    found = _productive_triples(G, lambda p, a: [t[2] for t in trans.get((p, a), ())], N.states)
    names = {}
    used = set(out_alphabet.symbols)

    def name(t):
        if t not in names:
            names[t] = _fresh(f"[{t[0]}|{t[1]}|{t[2]}]".replace(" ", ""), used)
        return names[t]

    by_lhs = defaultdict(list)
    for B, b in G.productions:
        by_lhs[B].append(b)
    pairs = defaultdict(list)
    onward = defaultdict(list)
    rules = set()
    for (p, A, q) in found:
        pairs[A].append((p, q))
        onward[(A, p)].append(q)
        for b in by_lhs[A]:
            if not b and p == q:
                rules.add((name((p, A, q)), ()))
            elif len(b) == 1:
                for t in trans.get((p, b[0]), ()):
                    if t[2] == q:
                        out = output(t)
                        rules.add((name((p, A, q)), () if out is None else (out,)))
    for A, B, C in G.binary:
        for p, r in pairs[B]:
            for q in onward[(C, r)]:
                rules.add((name((p, A, q)), (name((p, B, r)), name((r, C, q)))))
    start = _fresh("S*", used)
    for f in N.finals:
        if (N.initial, G.start, f) in found:
            rules.add((start, (name((N.initial, G.start, f)),)))
    nts = set(names.values()) | {start}
    return to_cnf(Cfg(frozenset(nts), out_alphabet, frozenset(rules), start))


def _block_transducer(I: Ideal):
    """Transducer reading words of I's closure and emitting one block marker per
    completed canonical word; the mandatory optional letters separate blocks."""
    amb = I.ambient
    words = [canonical_word(Y, amb) for Y in I.stars]
    states = {(i, j) for i, w in enumerate(words) for j in range(max(1, len(w)))}
    trans = set()
    emit = {}
    for (i, j) in states:
        w = words[i]
        for x in amb:
            if w and x == w[j]:
                t = ((i, j), x, (i, (j + 1) % len(w)))
                trans.add(t)
                if j + 1 == len(w):
                    emit[t] = f"b{i}"
            else:
                trans.add(((i, j), x, (i, j)))
        if j == 0 and i < I.length:
            trans.add(((i, 0), I.letters[i], (i + 1, 0)))
    nfa = Nfa(states, amb, trans, (0, 0), {(I.length, 0)})
    return nfa, emit, [f"b{i}" for i, w in enumerate(words) if w]


def ideal_in_cfg(I: Ideal, G: CnfGrammar) -> bool:
    """I ⊆ ↓L(G), via the unboundedness test on block markers."""
    if I.ambient.symbols != G.terminals.symbols:
        raise AlphabetMismatchError("ideal and grammar use different alphabets")
    Gp = downward_grammar(G)
    if Gp.is_empty_language():
        return False
    T, emit, order = _block_transducer(I)
    if not order:
        return cyk_accepts(Gp, ideal_witness(I, 1))
    H = cfg_nfa_product(Gp, T, Alphabet(tuple(order)), emit.get)
    return sup_decide(H, order, check=False)


def nfa_to_cfg(A: Nfa) -> Cfg:
    """Right-linear grammar for L(A)."""
    A = relabel(A)
    nt = {q: f"Q{q}" for q in A.states}
    rules = set()
    for p, x, q in A.transitions:
        rules.add((nt[p], (nt[q],) if x is EPS else (x, nt[q])))
    for f in A.finals:
        rules.add((nt[f], ()))
    return Cfg(frozenset(nt.values()), A.alphabet, frozenset(rules), nt[A.initial])


def cfg_ideal_decomposition(G: CnfGrammar, max_rounds: int = 200) -> list:
    """Maximal ideals whose union is ↓L(G).

    Repeatedly takes a word of ↓L(G) not yet covered, turns it into the ideal
    of its subwords and grows that ideal's star sets greedily; stops when the
    union of the ideals found covers ↓L(G).
    """
    Gp = downward_grammar(G)
    if Gp.is_empty_language():
        return []
    return refine_ideals(
        G.terminals,
        lambda cover: cfg_regular_counterexample(Gp, cover),
        lambda I: ideal_in_cfg(I, G),
        max_rounds,
    )
