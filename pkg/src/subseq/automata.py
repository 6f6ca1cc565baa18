"""Finite automata over ordered alphabets and the subword order.

States may be any hashable values.  Transitions are triples ``(p, label, q)``
where ``label`` is a symbol of the alphabet or :data:`EPS`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Optional, Sequence

from .errors import AlphabetMismatchError, ResourceError, resource_cap

EPS = None
ENUMERATION_CAP = 10**7

Word = tuple


def as_word(w) -> Word:
    """Coerce a string or sequence into a word (tuple of symbols).

    A string containing whitespace is split on it; any other string is read
    one character per symbol.
    """
    if isinstance(w, str):
        return tuple(w.split()) if any(c.isspace() for c in w) else tuple(w)
    return tuple(w)


def state_key(q) -> str:
    return repr(q)


@dataclass(frozen=True)
class Alphabet:
    """Finite, linearly ordered set of symbols."""

    symbols: tuple

    def __post_init__(self):
        syms = tuple(self.symbols)
        object.__setattr__(self, "symbols", syms)
        if len(set(syms)) != len(syms):
            raise ValueError(f"duplicate symbols in alphabet {syms}")
        for s in syms:
            if not isinstance(s, str) or not s or any(c.isspace() for c in s):
                raise ValueError(f"invalid symbol {s!r}")
            if s == "eps":
                raise ValueError("'eps' is reserved for the empty word")

    @cached_property
    def _rank(self) -> dict:
        return {s: i for i, s in enumerate(self.symbols)}

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, s):
        return s in self._rank

    def index(self, s) -> int:
        return self._rank[s]

    def ordered(self, letters: Iterable) -> tuple:
        """The given letters in alphabet order, without repetitions."""
        return tuple(sorted(set(letters), key=self._rank.__getitem__))

    def check_word(self, w: Sequence) -> Word:
        w = tuple(w)
        for s in w:
            if s not in self:
                raise AlphabetMismatchError(f"symbol {s!r} not in alphabet {self.symbols}")
        return w

    def __str__(self):
        return " ".join(self.symbols)


def same_alphabet(a: Alphabet, b: Alphabet) -> Alphabet:
    if a.symbols != b.symbols:
        raise AlphabetMismatchError(f"alphabet mismatch: {a.symbols} vs {b.symbols}")
    return a


def is_subword(u: Sequence, w: Sequence) -> bool:
    """True iff u can be obtained from w by deleting letters (greedy embedding)."""
    it = iter(w)
    return all(any(x == y for y in it) for x in u)


@dataclass(frozen=True)
class Nfa:
    states: frozenset
    alphabet: Alphabet
    transitions: frozenset
    initial: Hashable
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "transitions", frozenset(tuple(t) for t in self.transitions))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if not self.states:
            raise ValueError("an automaton needs at least one state")
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} is not declared")
        if not self.finals <= self.states:
            raise ValueError("final states must be declared states")
        for p, x, q in self.transitions:
            if p not in self.states or q not in self.states:
                raise ValueError(f"transition {(p, x, q)!r} uses undeclared states")
            if x is not EPS and x not in self.alphabet:
                raise AlphabetMismatchError(f"transition label {x!r} not in alphabet")

    @cached_property
    def succ(self) -> dict:
        out = {q: [] for q in self.states}
        for p, x, q in self.transitions:
            out[p].append((x, q))
        for q in out:
            out[q].sort(key=lambda e: (e[0] is not EPS, e[0] or "", state_key(e[1])))
        return out

    @cached_property
    def letter_succ(self) -> dict:
        out = {}
        for p, x, q in self.transitions:
            if x is not EPS:
                out.setdefault((p, x), set()).add(q)
        return out

    def eps_closure(self, qs: Iterable) -> frozenset:
        seen = set(qs)
        stack = list(seen)
        while stack:
            p = stack.pop()
            for x, q in self.succ[p]:
                if x is EPS and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return frozenset(seen)

    def step(self, qs: Iterable, x) -> frozenset:
        nxt = set()
        for p in qs:
            nxt |= self.letter_succ.get((p, x), set())
        return self.eps_closure(nxt)

    def __len__(self):
        return len(self.states)


@dataclass(frozen=True, eq=False)
class Dfa:
    """Total deterministic automaton; ``order`` optionally ranks the states so
    that every transition goes from a state to one of equal or higher rank."""

    states: frozenset
    alphabet: Alphabet
    delta: dict
    initial: Hashable
    finals: frozenset
    order: Optional[dict] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if self.initial not in self.states or not self.finals <= self.states:
            raise ValueError("initial/final states must be declared")
        for p in self.states:
            for x in self.alphabet:
                q = self.delta.get((p, x))
                if q is None or q not in self.states:
                    raise ValueError(f"transition function not total at {(p, x)!r}")
        if self.order is not None and not self.order_is_valid():
            raise ValueError("order witness is violated by a transition")

    def order_is_valid(self) -> bool:
        if self.order is None or set(self.order) != set(self.states):
            return False
        return all(self.order[p] <= self.order[q] for (p, _), q in self.delta.items())

    def run(self, w: Sequence):
        q = self.initial
        for x in w:
            q = self.delta[(q, x)]
        return q

    def accepts(self, w: Sequence) -> bool:
        return self.run(self.alphabet.check_word(w)) in self.finals

    def to_nfa(self) -> Nfa:
        trans = {(p, x, q) for (p, x), q in self.delta.items()}
        return Nfa(self.states, self.alphabet, trans, self.initial, self.finals)

    def __len__(self):
        return len(self.states)


# ---------------------------------------------------------------------------
# basic operations


def accepts(A: Nfa, w: Sequence) -> bool:
    w = A.alphabet.check_word(w)
    cur = A.eps_closure([A.initial])
    for x in w:
        cur = A.step(cur, x)
        if not cur:
            return False
    return bool(cur & A.finals)


def downward_close_nfa(A: Nfa) -> Nfa:
    """NFA for the subword closure: every letter transition may be skipped."""
    extra = {(p, EPS, q) for p, x, q in A.transitions if x is not EPS}
    return Nfa(A.states, A.alphabet, A.transitions | extra, A.initial, A.finals)


def determinize(A: Nfa) -> Dfa:
    start = A.eps_closure([A.initial])
    index = {start: 0}
    queue = deque([start])
    delta = {}
    while queue:
        S = queue.popleft()
        for x in A.alphabet:
            T = A.step(S, x)
            if T not in index:
                index[T] = len(index)
                queue.append(T)
            delta[(index[S], x)] = index[T]
    finals = {i for S, i in index.items() if S & A.finals}
    return Dfa(frozenset(index.values()), A.alphabet, delta, 0, finals)


def minimize(D: Dfa) -> Dfa:
    """Minimal DFA by partition refinement over the reachable states."""
    seen = {D.initial}
    queue = deque([D.initial])
    while queue:
        p = queue.popleft()
        for x in D.alphabet:
            q = D.delta[(p, x)]
            if q not in seen:
                seen.add(q)
                queue.append(q)
    block = {q: int(q in D.finals) for q in seen}
    count = len(set(block.values()))
    while True:
        sig = {q: (block[q],) + tuple(block[D.delta[(q, x)]] for x in D.alphabet) for q in seen}
        ids = {}
        for q in sorted(seen, key=state_key):
            ids.setdefault(sig[q], len(ids))
        block = {q: ids[sig[q]] for q in seen}
        if len(ids) == count:
            break
        count = len(ids)
    delta = {(block[q], x): block[D.delta[(q, x)]] for q in seen for x in D.alphabet}
    finals = {block[q] for q in seen if q in D.finals}
    return Dfa(frozenset(block.values()), D.alphabet, delta, block[D.initial], finals)


def complement(D: Dfa) -> Dfa:
    return Dfa(D.states, D.alphabet, D.delta, D.initial, D.states - D.finals)


def intersect(A: Nfa, B: Nfa) -> Nfa:
    alphabet = same_alphabet(A.alphabet, B.alphabet)
    start = (A.initial, B.initial)
    seen = {start}
    queue = deque([start])
    trans = set()
    while queue:
        p, q = queue.popleft()
        moves = []
        for x, p2 in A.succ[p]:
            if x is EPS:
                moves.append((EPS, (p2, q)))
            else:
                moves.extend((x, (p2, q2)) for y, q2 in B.succ[q] if y == x)
        moves.extend((EPS, (p, q2)) for y, q2 in B.succ[q] if y is EPS)
        for x, r in moves:
            trans.add(((p, q), x, r))
            if r not in seen:
                seen.add(r)
                queue.append(r)
    finals = {s for s in seen if s[0] in A.finals and s[1] in B.finals}
    return Nfa(seen, alphabet, trans, start, finals)


def reachable(A: Nfa, sources: Iterable) -> set:
    seen = set(sources)
    stack = list(seen)
    while stack:
        p = stack.pop()
        for _, q in A.succ[p]:
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return seen


def coreachable(A: Nfa, targets: Iterable) -> set:
    pred = {q: [] for q in A.states}
    for p, _, q in A.transitions:
        pred[q].append(p)
    seen = set(targets)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in pred[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def is_empty(A: Nfa) -> bool:
    return not (reachable(A, [A.initial]) & A.finals)


def trim(A: Nfa) -> Nfa:
    """Restrict to states that are reachable and co-reachable (initial kept)."""
    keep = reachable(A, [A.initial]) & coreachable(A, A.finals)
    keep.add(A.initial)
    trans = {t for t in A.transitions if t[0] in keep and t[2] in keep}
    return Nfa(keep, A.alphabet, trans, A.initial, A.finals & keep)


def compact(A: Nfa) -> Nfa:
    """Trimmed minimal DFA of L(A), as an NFA with states 0, 1, ..."""
    return relabel(trim(minimize(determinize(A)).to_nfa()))


def inclusion_counterexample(A: Nfa, B: Nfa) -> Optional[Word]:
    """A shortest word of L(A) outside L(B), or None when L(A) ⊆ L(B).

    Explores A × det(B) on the fly; agrees with the explicit product of A
    and the complement of the subset construction.
    """
    same_alphabet(A.alphabet, B.alphabet)
    start = (A.initial, B.eps_closure([B.initial]))
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        p, S = node
        if p in A.finals and not (S & B.finals):
            out = []
            while parent[node] is not None:
                node, x = parent[node]
                if x is not EPS:
                    out.append(x)
            return tuple(reversed(out))
        for x, p2 in A.succ[p]:
            nxt = (p2, S) if x is EPS else (p2, B.step(S, x))
            if nxt not in parent:
                parent[nxt] = (node, x)
                if x is EPS:
                    queue.appendleft(nxt)
                else:
                    queue.append(nxt)
    return None


def nfa_inclusion(A: Nfa, B: Nfa) -> bool:
    return inclusion_counterexample(A, B) is None


def nfa_inclusion_reference(A: Nfa, B: Nfa) -> bool:
    """L(A) ⊆ L(B) via emptiness of A × complement(determinize(B))."""
    return is_empty(intersect(A, complement(determinize(B)).to_nfa()))


def enumerate_upto(A: Nfa, maxlen: int, cap: int = ENUMERATION_CAP) -> set:
    """All words of L(A) of length at most maxlen."""
    live = coreachable(A, A.finals)
    start = A.eps_closure([A.initial]) & live
    out = set()
    layer = [((), start)] if start else []
    visited = 0
    for length in range(maxlen + 1):
        nxt = []
        for w, S in layer:
            visited += 1
            if visited > cap:
                raise ResourceError(f"enumeration exceeded {cap} words")
            if S & A.finals:
                out.add(w)
            if length < maxlen:
                for x in A.alphabet:
                    T = A.step(S, x) & live
                    if T:
                        nxt.append((w + (x,), T))
        layer = nxt
    return out


def union_nfa(nfas: Sequence[Nfa], alphabet: Alphabet) -> Nfa:
    """NFA for the union; an empty list gives the empty language."""
    init = ("union", "init")
    states = {init}
    trans = set()
    finals = set()
    for i, A in enumerate(nfas):
        same_alphabet(alphabet, A.alphabet)
        states |= {(i, q) for q in A.states}
        trans |= {((i, p), x, (i, q)) for p, x, q in A.transitions}
        trans.add((init, EPS, (i, A.initial)))
        finals |= {(i, q) for q in A.finals}
    return Nfa(states, alphabet, trans, init, finals)


def relabel(A: Nfa, prefix: str = "q") -> Nfa:
    """Rename states to prefix0, prefix1, ... in deterministic BFS order."""
    order = {A.initial: 0}
    queue = deque([A.initial])
    while queue:
        p = queue.popleft()
        for _, q in sorted(A.succ[p], key=lambda t: (t[0] is not EPS, t[0] or "", state_key(t[1]))):
            if q not in order:
                order[q] = len(order)
                queue.append(q)
    for q in sorted(A.states - set(order), key=state_key):
        order[q] = len(order)
    name = {q: f"{prefix}{i}" for q, i in order.items()}
    return Nfa(
        set(name.values()),
        A.alphabet,
        {(name[p], x, name[q]) for p, x, q in A.transitions},
        name[A.initial],
        {name[q] for q in A.finals},
    )


def nfa_from_words(words: Iterable[Sequence], alphabet: Alphabet) -> Nfa:
    """Trie automaton accepting exactly the given finite set of words."""
    states = {()}
    trans = set()
    finals = set()
    for w in words:
        w = alphabet.check_word(w)
        for i in range(len(w)):
            states.add(w[: i + 1])
            trans.add((w[:i], w[i], w[: i + 1]))
        finals.add(w)
    return Nfa(states, alphabet, trans, (), finals)


def universal_nfa(alphabet: Alphabet) -> Nfa:
    return Nfa({0}, alphabet, {(0, x, 0) for x in alphabet}, 0, {0})


# ---------------------------------------------------------------------------
# short witnesses


class SubsetRejecter:
    """Lazy DFA for X* minus the subword closure of L(A).

    A state is a set P of states of A, closed under reachability.  Reading x
    moves to everything reachable from P along a path on which x occurs.  The
    start state is the set of states reachable from the initial state, and a
    set is accepting when it contains no final state of A.
    """

    def __init__(self, A: Nfa):
        self.nfa = A
        self.start = frozenset(reachable(A, [A.initial]))
        self._cache = {}

    def step(self, P: frozenset, x) -> frozenset:
        key = (P, x)
        res = self._cache.get(key)
        if res is None:
            hits = set()
            for p in P:
                hits |= self.nfa.letter_succ.get((p, x), set())
            res = frozenset(reachable(self.nfa, hits))
            self._cache[key] = res
        return res

    def rejects(self, P: frozenset) -> bool:
        return not (P & self.nfa.finals)

    def run(self, w: Sequence) -> frozenset:
        P = self.start
        for x in w:
            P = self.step(P, x)
        return P


def subset_reject_dfa(A: Nfa) -> Dfa:
    """Explicit DFA accepting exactly X* minus the subword closure of L(A)."""
    R = SubsetRejecter(A)
    seen = {R.start}
    queue = deque([R.start])
    delta = {}
    while queue:
        P = queue.popleft()
        for x in A.alphabet:
            Q = R.step(P, x)
            delta[(P, x)] = Q
            if Q not in seen:
                seen.add(Q)
                queue.append(Q)
    finals = {P for P in seen if R.rejects(P)}
    return Dfa(seen, A.alphabet, delta, R.start, finals)


def find_short_witness(
    member_K: Callable[[Word], bool],
    A: Nfa,
    alphabet: Alphabet,
    cap: Optional[int] = None,
) -> Optional[Word]:
    """First word (length-lexicographic) in the closure of K but outside the
    closure of L(A), searching lengths up to |A|+1.

    ``member_K`` must decide membership in the downward closure of K; since
    that set is downward closed, words failing it are never extended.
    """
    same_alphabet(alphabet, A.alphabet)
    cap = resource_cap() if cap is None else cap
    R = SubsetRejecter(A)
    bound = len(A.states) + 1
    layer = [((), R.start)]
    visited = 0
    for length in range(bound + 1):
        nxt = []
        for w, P in layer:
            visited += 1
            if visited > cap:
                raise ResourceError(f"witness search exceeded {cap} words")
            if not member_K(w):
                continue
            if R.rejects(P):
                return w
            if length < bound:
                nxt.extend((w + (x,), R.step(P, x)) for x in alphabet)
        layer = nxt
    return None
