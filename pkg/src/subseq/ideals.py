"""Ideals of the subword order.

An ideal is a product ``Y0* {x1,ε} Y1* ... {xn,ε} Yn*``.  The stored form
keeps this alternation and never contains an optional letter that could be
absorbed into its neighbours: ``x_i`` is absorbable when it lies in
``Y_{i-1} ∪ Y_i`` and one of the two star sets contains the other.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

from .automata import (
    EPS,
    Alphabet,
    Dfa,
    Nfa,
    Word,
    determinize,
    downward_close_nfa,
    minimize,
    nfa_inclusion,
    trim,
    union_nfa,
)
from .errors import AlphabetMismatchError, ResourceError


@dataclass(frozen=True)
class StarSet:
    letters: frozenset

    def __post_init__(self):
        object.__setattr__(self, "letters", frozenset(self.letters))


@dataclass(frozen=True)
class OptionalLetter:
    letter: str


Atom = Union[StarSet, OptionalLetter]


@dataclass(frozen=True)
class IdealExpr:
    atoms: tuple
    ambient: Alphabet

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        for a in self.atoms:
            letters = a.letters if isinstance(a, StarSet) else {a.letter}
            for x in letters:
                if x not in self.ambient:
                    raise AlphabetMismatchError(f"letter {x!r} not in ambient alphabet")

    def __str__(self):
        return " ".join(_atom_str(a, self.ambient) for a in self.atoms) or "[]"


def _atom_str(a: Atom, ambient: Alphabet) -> str:
    if isinstance(a, StarSet):
        return "[" + " ".join(ambient.ordered(a.letters)) + "]"
    return f"{a.letter}?"


def _absorbable(left: frozenset, x: str, right: frozenset) -> bool:
    return (x in left or x in right) and (left <= right or right <= left)


@dataclass(frozen=True)
class Ideal:
    stars: tuple
    letters: tuple
    ambient: Alphabet

    def __post_init__(self):
        stars = tuple(frozenset(s) for s in self.stars)
        letters = tuple(self.letters)
        object.__setattr__(self, "stars", stars)
        object.__setattr__(self, "letters", letters)
        if len(stars) != len(letters) + 1:
            raise ValueError("an ideal needs exactly one more star set than optional letters")
        for Y in stars:
            if not Y <= set(self.ambient.symbols):
                raise AlphabetMismatchError(f"star set {sorted(Y)} leaves the ambient alphabet")
        for i, x in enumerate(letters):
            if x not in self.ambient:
                raise AlphabetMismatchError(f"letter {x!r} not in ambient alphabet")
            if _absorbable(stars[i], x, stars[i + 1]):
                raise ValueError(f"optional letter {x!r} at position {i + 1} is absorbable")

    @property
    def length(self) -> int:
        return len(self.letters)

    def atoms(self) -> IdealExpr:
        out = []
        for i, Y in enumerate(self.stars):
            if i:
                out.append(OptionalLetter(self.letters[i - 1]))
            if Y:
                out.append(StarSet(Y))
        if not out:
            out.append(StarSet(frozenset()))
        return IdealExpr(tuple(out), self.ambient)

    @cached_property
    def _sort_key(self) -> str:
        return str(self)

    def is_finite(self) -> bool:
        return not any(self.stars)

    def __str__(self):
        return str(self.atoms())


def length(I: Ideal) -> int:
    return I.length


def expr_length(e: IdealExpr) -> int:
    return len(e.atoms)


def normalize(e: IdealExpr) -> Ideal:
    """Alternating, absorption-free form of an ideal expression.

    Adjacent star sets are merged only when one contains the other; otherwise
    a separating optional letter taken from the right-hand set is inserted
    (``Y* Z* = Y* {z,ε} Z*`` for ``z ∈ Z``).
    """
    amb = e.ambient
    stars = [frozenset()]
    letters = []
    for a in e.atoms:
        if isinstance(a, OptionalLetter):
            letters.append(a.letter)
            stars.append(frozenset())
            continue
        Z = a.letters
        cur = stars[-1]
        if not Z:
            continue
        if not cur or Z <= cur or cur <= Z:
            stars[-1] = cur | Z
        else:
            letters.append(amb.ordered(Z)[0])
            stars.append(Z)
    changed = True
    while changed:
        changed = False
        for i, x in enumerate(letters):
            if _absorbable(stars[i], x, stars[i + 1]):
                stars[i : i + 2] = [stars[i] | stars[i + 1]]
                del letters[i]
                changed = True
                break
    return Ideal(tuple(stars), tuple(letters), amb)


def concat(parts: Iterable[Union[Ideal, IdealExpr, Atom]], ambient: Alphabet) -> IdealExpr:
    atoms = []
    for p in parts:
        if isinstance(p, Ideal):
            atoms.extend(p.atoms().atoms)
        elif isinstance(p, IdealExpr):
            atoms.extend(p.atoms)
        else:
            atoms.append(p)
    return IdealExpr(tuple(atoms), ambient)


def canonical_word(Y: Iterable, ambient: Alphabet) -> Word:
    return ambient.ordered(Y)


def ideal_witness(I: Ideal, m: int) -> Word:
    if m < 1:
        raise ValueError("witness exponent must be at least 1")
    out = list(canonical_word(I.stars[0], I.ambient) * m)
    for x, Y in zip(I.letters, I.stars[1:]):
        out.append(x)
        out.extend(canonical_word(Y, I.ambient) * m)
    return tuple(out)


def _next_block(I: Ideal, i: int, a) -> int:
    """Smallest j >= i such that the single letter a fits between blocks i and j,
    or len(letters)+1 when there is none."""
    if a in I.stars[i]:
        return i
    for j in range(i + 1, I.length + 1):
        if a == I.letters[j - 1] or a in I.stars[j]:
            return j
    return I.length + 1


def ideal_member(I: Ideal, w: Sequence) -> bool:
    w = I.ambient.check_word(w)
    i = 0
    for a in w:
        i = _next_block(I, i, a)
        if i > I.length:
            return False
    return True


def ordered_dfa(I: Ideal) -> Dfa:
    """Ordered DFA with states 0..n+1 (n+1 is the sink) accepting I."""
    n = I.length
    delta = {}
    for i in range(n + 1):
        for a in I.ambient:
            delta[(i, a)] = _next_block(I, i, a)
    for a in I.ambient:
        delta[(n + 1, a)] = n + 1
    states = frozenset(range(n + 2))
    return Dfa(states, I.ambient, delta, 0, frozenset(range(n + 1)), {q: q for q in states})


def ideal_nfa(I: Ideal) -> Nfa:
    return ordered_dfa(I).to_nfa()


def ideal_inclusion(I: Ideal, J: Ideal) -> bool:
    if I.ambient.symbols != J.ambient.symbols:
        raise AlphabetMismatchError("ideals over different alphabets")
    return ideal_member(J, ideal_witness(I, J.length + 1))


def maximal_ideals(ideals: Iterable[Ideal]) -> list:
    """Inclusion-maximal representatives, one per language, sorted by text."""
    pool = sorted(set(ideals), key=lambda I: (I.length, I._sort_key))
    kept = []
    for I in pool:
        if any(ideal_inclusion(I, J) for J in kept):
            continue
        kept = [J for J in kept if not ideal_inclusion(J, I)]
        kept.append(I)
    return sorted(kept, key=lambda I: I._sort_key)


def ideal_in_nfa(I: Ideal, A: Nfa) -> bool:
    """I ⊆ ↓L(A), read off the strongly connected components of A.

    Holds iff some path visits components C0, ..., Cn in order, the i-th
    transition between them reading x_i, with Y_i among the letters inside C_i.
    """
    if I.ambient.symbols != A.alphabet.symbols:
        raise AlphabetMismatchError("ideal and automaton use different alphabets")
    D = trim(downward_close_nfa(A))
    comp, inner = _scc_letters(D)
    reach = _reachability(D)
    frontier = {q for q in reach[D.initial] if I.stars[0] <= inner[comp[q]]}
    for x, Y in zip(I.letters, I.stars[1:]):
        hit = {q for p in frontier for r in reach[p] for q in D.letter_succ.get((r, x), ())}
        after = {s for q in hit for s in reach[q] if Y <= inner[comp[s]]}
        frontier = after
        if not frontier:
            return False
    return any(reach[p] & D.finals for p in frontier)


def _reachability(A: Nfa) -> dict:
    from .automata import reachable

    return {q: reachable(A, [q]) for q in A.states}


def _scc_letters(A: Nfa):
    comp = strongly_connected_components(A.states, lambda p: [q for _, q in A.succ[p]])
    inner = {}
    for p, x, q in A.transitions:
        c = comp[p]
        inner.setdefault(c, set())
        if x is not EPS and comp[q] == c:
            inner[c].add(x)
    for c in set(comp.values()):
        inner[c] = frozenset(inner.get(c, ()))
    return comp, inner


def strongly_connected_components(nodes, successors) -> dict:
    """Map node -> component id (ids are in reverse topological order)."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comp = {}
    counter = 0
    ncomp = 0
    for root in sorted(nodes, key=repr):
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


def is_downward_closed(A: Nfa) -> bool:
    return nfa_inclusion(downward_close_nfa(A), A)


def decompose_downward_closed(A: Nfa, check: bool = True) -> list:
    """Maximal ideals whose union is L(A), for a downward-closed L(A).

    Every accepting run moves through a chain of strongly connected components;
    the letters inside a component form a star set and the letters on the
    connecting transitions become optional letters.  Suffix ideals are
    computed per component and pruned to maximal ones as they are combined.
    """
    if check and not is_downward_closed(A):
        raise ValueError("the automaton's language is not downward closed")
    D = trim(A)
    if not (D.finals and _co_live(D)):
        return []
    comp, inner = _scc_letters(D)
    members = {}
    for q, c in comp.items():
        members.setdefault(c, []).append(q)
    amb = A.alphabet
    suffixes = {}
    # component ids come out in reverse topological order
    for c in sorted(members):
        star = StarSet(inner[c])
        cands = []
        if any(q in D.finals for q in members[c]):
            cands.append(normalize(IdealExpr((star,), amb)))
        exits = {
            (x, comp[q])
            for p in members[c]
            for x, q in D.succ[p]
            if comp[q] != c
        }
        for x, c2 in sorted(exits, key=lambda e: (e[0] or "", e[1])):
            head = [star] if x is EPS else [star, OptionalLetter(x)]
            for s in suffixes[c2]:
                cands.append(normalize(concat(head + [s], amb)))
        suffixes[c] = maximal_ideals(cands)
    return suffixes[comp[D.initial]]


def _co_live(D: Nfa) -> bool:
    from .automata import coreachable

    return D.initial in coreachable(D, D.finals)


def small_alphabet_bound(alpha_size: int, ideal_len_bound: int) -> int:
    return alpha_size * (ideal_len_bound + 1) ** alpha_size


def f_bound(n: int, k: int) -> int:
    return sum((n - 1) ** i for i in range(1, k + 1))


def verify_cycling(w: Sequence, n: int, alphabet: Optional[Alphabet] = None) -> Optional[int]:
    """A position of w read by a loop in every ordered n-state DFA, if any.

    Exhaustive over all total ordered DFAs with states 0..n-1 (numeric order)
    and every initial state; restricted to n <= 3 and at most two letters.
    """
    w = tuple(w)
    letters = tuple(alphabet.symbols) if alphabet is not None else tuple(sorted(set(w)))
    if not 1 <= n <= 3 or len(letters) > 2:
        raise ValueError("verify_cycling supports 1 <= n <= 3 and at most two letters")
    if any(x not in letters for x in w):
        raise AlphabetMismatchError("word uses letters outside the alphabet")
    candidates = set(range(len(w)))
    keys = [(i, x) for i in range(n) for x in letters]
    for targets in itertools.product(*[range(i, n) for i, _ in keys]):
        delta = dict(zip(keys, targets))
        for q in range(n):
            loops = set()
            for pos, x in enumerate(w):
                nxt = delta[(q, x)]
                if nxt == q:
                    loops.add(pos)
                q = nxt
            candidates &= loops
            if not candidates:
                return None
    return min(candidates) if candidates else None


_TOKEN = re.compile(r"\[[^\]]*\]|\S+")


def parse_seq(text: str, ambient: Alphabet) -> IdealExpr:
    """Parse the ``[a b] c? []`` atom syntax."""
    atoms = []
    for tok in _TOKEN.findall(text):
        if tok.startswith("["):
            if not tok.endswith("]"):
                raise ValueError(f"unterminated star set {tok!r}")
            atoms.append(StarSet(frozenset(tok[1:-1].split())))
        elif tok.endswith("?") and len(tok) > 1:
            atoms.append(OptionalLetter(tok[:-1]))
        else:
            raise ValueError(f"unexpected token {tok!r} in ideal expression")
    return IdealExpr(tuple(atoms), ambient)


def grow_stars(I: Ideal, included) -> Ideal:
    """Add letters to star sets one at a time while ``included`` holds."""
    amb = I.ambient
    changed = True
    while changed:
        changed = False
        for i, Y in enumerate(I.stars):
            for a in amb:
                if a in Y:
                    continue
                stars = list(I.stars)
                stars[i] = Y | {a}
                atoms = [StarSet(stars[0])]
                for x, Z in zip(I.letters, stars[1:]):
                    atoms += [OptionalLetter(x), StarSet(Z)]
                cand = normalize(IdealExpr(tuple(atoms), amb))
                if included(cand):
                    I = cand
                    changed = True
                    break
            if changed:
                break
    return I


def cover_dfa(ideals: Sequence[Ideal], ambient: Alphabet) -> Dfa:
    """Minimal DFA for the union of the given ideals."""
    if not ideals:
        return Dfa(frozenset({0}), ambient, {(0, x): 0 for x in ambient}, 0, frozenset())
    return minimize(determinize(union_nfa([ideal_nfa(I) for I in ideals], ambient)))


def refine_ideals(ambient: Alphabet, uncovered, included, max_rounds: int = 200) -> list:
    """Ideal decomposition of a downward-closed language D by refinement.

    ``uncovered(dfa)`` returns a word of D outside L(dfa) or None, and
    ``included(I)`` tells whether I lies inside D.  Each uncovered word is
    turned into the ideal of its subwords, whose star sets are then grown
    greedily.  The covered set grows strictly every round, so the loop
    terminates; ``max_rounds`` only guards the running time.
    """
    ideals = []
    for _ in range(max_rounds):
        w = uncovered(cover_dfa(ideals, ambient))
        if w is None:
            return maximal_ideals(ideals)
        start = normalize(IdealExpr(tuple(OptionalLetter(x) for x in w), ambient))
        ideals = maximal_ideals(ideals + [grow_stars(start, included)])
    raise ResourceError(f"ideal refinement did not converge within {max_rounds} rounds")
