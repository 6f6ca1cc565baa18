"""Brute-force reference implementations, written independently of the package."""

from __future__ import annotations

import itertools
import re
from fractions import Fraction

import z3


def all_words(symbols, maxlen):
    for n in range(maxlen + 1):
        yield from itertools.product(symbols, repeat=n)


def subword_by_positions(u, w) -> bool:
    """u embeds into w, checked by trying every choice of positions."""
    return any(tuple(w[i] for i in idx) == tuple(u) for idx in itertools.combinations(range(len(w)), len(u)))


def subwords(w) -> set:
    return {tuple(w[i] for i in idx) for n in range(len(w) + 1) for idx in itertools.combinations(range(len(w)), n)}


def closure(words) -> set:
    out = set()
    for w in words:
        out |= subwords(w)
    return out


def nfa_words(states, transitions, initial, finals, symbols, maxlen) -> set:
    """Words of length <= maxlen spelled by paths from the initial state to a
    final state of an NFA given as raw tuples; None is ε."""
    out = set()
    seen = {(initial, ())}
    todo = [(initial, ())]
    while todo:
        q, w = todo.pop()
        if q in finals:
            out.add(w)
        for p, x, r in transitions:
            if p != q:
                continue
            w2 = w if x is None else w + (x,)
            if len(w2) <= maxlen and (r, w2) not in seen:
                seen.add((r, w2))
                todo.append((r, w2))
    return out


def nfa_closure_member(A, w) -> bool:
    """w is a subword of some word accepted by the NFA: search over
    (state, number of letters of w matched so far)."""
    start = (A.initial, 0)
    seen = {start}
    todo = [start]
    while todo:
        q, i = todo.pop()
        if i == len(w) and q in A.finals:
            return True
        for p, x, r in A.transitions:
            if p != q:
                continue
            nxt = [(r, i)]
            if x is not None and i < len(w) and w[i] == x:
                nxt.append((r, i + 1))
            for node in nxt:
                if node not in seen:
                    seen.add(node)
                    todo.append(node)
    return False


def nfa_language(A, maxlen) -> set:
    return nfa_words(A.states, A.transitions, A.initial, A.finals, A.alphabet.symbols, maxlen)


def ideal_regex(I) -> re.Pattern:
    """Regex over one character per symbol for the ideal's language."""
    code = {s: chr(0x4E00 + i) for i, s in enumerate(I.ambient.symbols)}
    parts = ["[" + "".join(code[y] for y in sorted(I.stars[0])) + "]*" if I.stars[0] else ""]
    for x, Y in zip(I.letters, I.stars[1:]):
        parts.append(re.escape(code[x]) + "?")
        if Y:
            parts.append("[" + "".join(code[y] for y in sorted(Y)) + "]*")
    pat = re.compile("".join(parts))
    return pat, code


def ideal_contains(I, w) -> bool:
    pat, code = ideal_regex(I)
    return pat.fullmatch("".join(code[x] for x in w)) is not None


def blind_words(A, maxlen, cbound, ebound) -> set:
    """Accepted words of length <= maxlen over runs whose counters stay within
    [-cbound, cbound] and which take at most ebound ε-steps in a row."""
    k = A.k
    zero = (0,) * k
    start = (A.initial, 0, zero, 0)
    seen = {start}
    todo = [(start, ())]
    out = set()
    by_src = {}
    for t in A.transitions:
        by_src.setdefault(t[0], []).append(t)
    while todo:
        (q, n, v, e), w = todo.pop()
        if q in A.finals and v == zero:
            out.add(w)
        for _, x, d, r in by_src.get(q, []):
            v2 = tuple(a + b for a, b in zip(v, d))
            if any(abs(c) > cbound for c in v2):
                continue
            if x is None:
                if e + 1 > ebound:
                    continue
                cfg, w2 = (r, n, v2, e + 1), w
            else:
                if n + 1 > maxlen:
                    continue
                cfg, w2 = (r, n + 1, v2, 0), w + (x,)
            key = (cfg, w2)
            if key not in seen:
                seen.add(key)
                todo.append((cfg, w2))
    return out


def cfg_words(G, maxlen) -> set:
    """Words of length <= maxlen derivable in G, by a fixpoint over the
    original productions (no normal form involved)."""
    words = {A: set() for A in G.nonterminals}
    changed = True
    while changed:
        changed = False
        for A, body in G.productions:
            acc = {()}
            for s in body:
                opts = words[s] if s in G.nonterminals else {(s,)}
                acc = {u + v for u in acc for v in opts if len(u) + len(v) <= maxlen}
                if not acc:
                    break
            if not acc <= words[A]:
                words[A] |= acc
                changed = True
    return words[G.start]


def lp_cancellable(S, T) -> bool:
    """Exact rational feasibility of sum x_i s_i + sum y_j t_j = 0 with
    x_i >= 1 and y_j >= 0 (equivalent to positive integer solutions by scaling)."""
    S, T = list(S), list(T)
    if not S:
        return True
    k = len(S[0])
    xs = [z3.Real(f"x{i}") for i in range(len(S))]
    ys = [z3.Real(f"y{j}") for j in range(len(T))]
    solver = z3.Solver()
    solver.add(*[x >= 1 for x in xs], *[y >= 0 for y in ys])
    for i in range(k):
        terms = [c * v[i] for c, v in zip(xs, S)] + [c * v[i] for c, v in zip(ys, T)]
        solver.add(z3.Sum(terms) == 0)
    return solver.check() == z3.sat


def rank_fraction(rows) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def accepting_walks(A, max_steps, cbound, limit=2000) -> list:
    """Accepting walks of a blind automaton with at most max_steps transitions
    whose counters stay within [-cbound, cbound], in breadth-first order."""
    zero = (0,) * A.k
    by_src = {}
    for t in sorted(A.transitions, key=repr):
        by_src.setdefault(t[0], []).append(t)
    out = []
    layer = [(A.initial, zero, ())]
    for _ in range(max_steps + 1):
        nxt = []
        for q, v, walk in layer:
            if q in A.finals and v == zero and walk:
                out.append(walk)
                if len(out) >= limit:
                    return out
            for t in by_src.get(q, []):
                v2 = tuple(a + b for a, b in zip(v, t[2]))
                if all(abs(c) <= cbound for c in v2):
                    nxt.append((t[3], v2, walk + (t,)))
        layer = nxt
    return out


def sample_accepting_walks(A, rng, tries=400, max_steps=10) -> list:
    """Distinct accepting walks found by seeded random walks from the initial state."""
    by_src = {}
    for t in sorted(A.transitions, key=repr):
        by_src.setdefault(t[0], []).append(t)
    zero = (0,) * A.k
    found = []
    for _ in range(tries):
        q, v, walk = A.initial, zero, []
        for _ in range(rng.randint(1, max_steps)):
            options = by_src.get(q)
            if not options:
                break
            t = rng.choice(options)
            walk.append(t)
            q = t[3]
            v = tuple(a + b for a, b in zip(v, t[2]))
            if q in A.finals and v == zero and tuple(walk) not in found:
                found.append(tuple(walk))
    return found
