"""Blind counter automata and their downward closures.

A blind k-counter automaton is an NFA whose transitions also add a vector in
{-1,0,1}^k to the counters; a run accepts when it ends in a final state with
every counter back at zero.  Counters are never tested along the way.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Hashable, Iterable, Optional, Sequence

from .automata import EPS, Alphabet, Nfa, compact, downward_close_nfa, state_key, trim
from .errors import AlphabetMismatchError, ResourceError, resource_cap

IntVec = tuple


@dataclass(frozen=True)
class BlindAutomaton:
    states: frozenset
    alphabet: Alphabet
    k: int
    transitions: frozenset
    initial: Hashable
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(
            self, "transitions", frozenset((p, x, tuple(d), q) for p, x, d, q in self.transitions)
        )
        object.__setattr__(self, "finals", frozenset(self.finals))
        if self.k < 0:
            raise ValueError("counter count must be a natural number")
        if not self.states:
            raise ValueError("an automaton needs at least one state")
        if self.initial not in self.states or not self.finals <= self.states:
            raise ValueError("initial/final states must be declared")
        for p, x, d, q in self.transitions:
            if p not in self.states or q not in self.states:
                raise ValueError(f"transition {(p, x, d, q)!r} uses undeclared states")
            if x is not EPS and x not in self.alphabet:
                raise AlphabetMismatchError(f"transition label {x!r} not in alphabet")
            if len(d) != self.k or any(c not in (-1, 0, 1) for c in d):
                raise ValueError(f"counter update {d!r} must lie in {{-1,0,1}}^{self.k}")

    @cached_property
    def succ(self) -> dict:
        out = {q: [] for q in self.states}
        for t in sorted(self.transitions, key=lambda t: (state_key(t[0]), t[1] or "", t[2], state_key(t[3]))):
            out[t[0]].append(t)
        return out

    def __len__(self):
        return len(self.states)

    def underlying_nfa(self) -> Nfa:
        """The automaton with its counters forgotten."""
        trans = {(p, x, q) for p, x, _, q in self.transitions}
        return Nfa(self.states, self.alphabet, trans, self.initial, self.finals)


def zero(k: int) -> IntVec:
    return (0,) * k


def vadd(u: IntVec, v: IntVec) -> IntVec:
    return tuple(a + b for a, b in zip(u, v))


def norm_inf(v: IntVec) -> int:
    return max((abs(c) for c in v), default=0)


def effect(A: BlindAutomaton, walk: Sequence) -> IntVec:
    total = zero(A.k)
    prev = None
    for t in walk:
        p, _, d, q = t
        if prev is not None and prev != p:
            raise ValueError("walk transitions do not chain")
        total = vadd(total, d)
        prev = q
    return total


def _bounded_closure(A: BlindAutomaton, configs: Iterable, cbound: int, ebound: int) -> set:
    seen = set(configs)
    frontier = list(seen)
    for _ in range(ebound):
        nxt = []
        for q, v in frontier:
            for _, x, d, r in A.succ[q]:
                if x is not EPS:
                    continue
                v2 = vadd(v, d)
                if norm_inf(v2) <= cbound and (r, v2) not in seen:
                    seen.add((r, v2))
                    nxt.append((r, v2))
        if not nxt:
            break
        frontier = nxt
    return seen


def _bounded_step(A: BlindAutomaton, configs: Iterable, a, cbound: int, ebound: int) -> set:
    nxt = set()
    for q, v in configs:
        for _, x, d, r in A.succ[q]:
            if x == a:
                v2 = vadd(v, d)
                if norm_inf(v2) <= cbound:
                    nxt.add((r, v2))
    return _bounded_closure(A, nxt, cbound, ebound)


def _bounded_accepting(A: BlindAutomaton, configs: Iterable) -> bool:
    z = zero(A.k)
    return any(q in A.finals and v == z for q, v in configs)


def accepts_bounded(A: BlindAutomaton, w: Sequence, cbound: int, ebound: int) -> bool:
    """Search for an accepting run on w keeping every counter within
    [-cbound, cbound] and taking at most ebound consecutive ε-steps.

    True is always correct; False only means no run respects the bounds.
    """
    w = A.alphabet.check_word(w)
    cur = _bounded_closure(A, [(A.initial, zero(A.k))], cbound, ebound)
    for a in w:
        cur = _bounded_step(A, cur, a, cbound, ebound)
        if not cur:
            return False
    return _bounded_accepting(A, cur)


def enumerate_bounded(A: BlindAutomaton, maxlen: int, cbound: int, ebound: int, cap: Optional[int] = None) -> set:
    cap = resource_cap() if cap is None else cap
    out = set()
    layer = [((), frozenset(_bounded_closure(A, [(A.initial, zero(A.k))], cbound, ebound)))]
    visited = 0
    for length in range(maxlen + 1):
        nxt = []
        for w, configs in layer:
            visited += 1
            if visited > cap:
                raise ResourceError(f"bounded enumeration exceeded {cap} words")
            if _bounded_accepting(A, configs):
                out.add(w)
            if length < maxlen:
                for a in A.alphabet:
                    c2 = _bounded_step(A, configs, a, cbound, ebound)
                    if c2:
                        nxt.append((w + (a,), frozenset(c2)))
        layer = nxt
    return out


# ---------------------------------------------------------------------------
# linear algebra and cancellable pairs


def pottier_bound(norm1inf: int, r: int) -> int:
    return (1 + norm1inf) ** r


def norm_1_inf(M: Sequence[Sequence[int]]) -> int:
    """Largest row sum of absolute values."""
    return max((sum(abs(a) for a in row) for row in M), default=0)


def rank(rows: Sequence[Sequence]) -> int:
    """Rank over the rationals (exact elimination)."""
    mat = [[Fraction(a) for a in row] for row in rows]
    if not mat:
        return 0
    r = 0
    ncols = len(mat[0])
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c] / mat[r][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        r += 1
        if r == len(mat):
            break
    return r


def is_independent(vectors: Iterable[IntVec]) -> bool:
    vs = list(vectors)
    return rank(vs) == len(vs)


def reduce_span(S: Iterable[IntVec], u: IntVec) -> frozenset:
    """Keep S and add u only when it is independent of S."""
    S = frozenset(S)
    if u in S or not is_independent(list(S) + [u]):
        return S
    return S | {u}


def _columns_to_rows(cols: Sequence[IntVec], k: int) -> list:
    return [[c[i] for c in cols] for i in range(k)]


def hilbert_basis_bruteforce(M: Sequence[Sequence[int]], cap: Optional[int] = None) -> set:
    """Minimal nonzero x in N^m with Mx = 0, by enumerating every x up to the
    norm bound (1 + ||M||_{1,inf})^rank(M)."""
    M = [list(row) for row in M]
    m = len(M[0]) if M else 0
    radius = pottier_bound(norm_1_inf(M), rank(M))
    cap = resource_cap() if cap is None else cap
    from math import comb

    if comb(radius + m, m) > cap:
        raise ResourceError(f"Hilbert basis enumeration over radius {radius} exceeds budget {cap}")
    basis = []
    for total in range(1, radius + 1):
        for x in _compositions(total, m):
            if any(all(b[i] <= x[i] for i in range(m)) for b in basis):
                continue
            if all(sum(a * xi for a, xi in zip(row, x)) == 0 for row in M):
                basis.append(x)
    return set(basis)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=1 << 16)
def _cancellable(S: tuple, T: tuple) -> bool:
    if not S:
        return True
    steps = list(S) + list(T)
    k = len(S[0])
    bound = k * max(norm_inf(v) for v in steps)
    full = (1 << len(S)) - 1
    origin = (zero(k), 0)
    seen = set()
    queue = deque([origin])
    while queue:
        pos, used = queue.popleft()
        for i, v in enumerate(steps):
            p2 = vadd(pos, v)
            if norm_inf(p2) > bound:
                continue
            u2 = used | (1 << i) if i < len(S) else used
            if u2 == full and not any(p2):
                return True
            node = (p2, u2)
            if node not in seen:
                seen.add(node)
                queue.append(node)
    return False


def is_cancellable(S: Iterable[IntVec], T: Iterable[IntVec]) -> bool:
    """Whether positive multiples of every vector of S plus nonnegative
    multiples of vectors of T can sum to zero.

    A zero-sum multiset of vectors of sup-norm at most D in dimension k can be
    ordered so that every partial sum has sup-norm at most k*D, so a search
    over partial sums inside that box, tracking which vectors of S were used,
    decides the question exactly.
    """
    S = tuple(sorted(set(map(tuple, S))))
    T = tuple(sorted(set(map(tuple, T)) - set(S)))
    dims = {len(v) for v in S + T}
    if len(dims) > 1:
        raise ValueError("vectors of different dimensions")
    return _cancellable(S, T)


# ---------------------------------------------------------------------------
# the downward-closure automaton


def capacity_bound(n: int, k: int) -> int:
    return n + n * (3 * n) ** ((k + 1) ** 2)


def state_bound(n: int, k: int) -> int:
    return (3 * n) ** (5 * n * k + 7 * k**3)


@dataclass
class DcConstruction:
    nfa: Nfa
    reachable: int
    capacity: int
    stack_height: int
    certified: bool
    method: str = "automaton"


# state budget for one round of the automaton construction under method="auto"
AUTO_ROUND_BUDGET = 50_000


class _DcBuilder:
    def __init__(self, A: BlindAutomaton, capacity: int, height: int, mode: str, cap: int):
        if mode not in ("B1", "B2", "B3"):
            raise ValueError(f"unknown construction mode {mode!r}")
        self.A = A
        self.c = capacity
        self.h = height
        self.mode = mode
        self.cap = cap
        self.n = len(A.states)

    def _t_options(self, T: frozenset, u: IntVec) -> list:
        if self.mode != "B3":
            return [T | {u}]
        opts = [T]
        if u not in T and is_independent(list(T) + [u]):
            opts.append(T | {u})
        return opts

    def _s_after(self, S: frozenset, u: IntVec) -> frozenset:
        if self.mode == "B1":
            return S | {u}
        return reduce_span(S, u)

    def successors(self, state):
        q, stack, v, S, T = state
        A = self.A
        out = []
        if not stack:
            for _, x, d, r in A.succ[q]:
                v2 = vadd(v, d)
                if norm_inf(v2) <= self.c:
                    out.append((x, (r, stack, v2, S, T)))
        else:
            top_state, u = stack[-1]
            for _, x, d, r in A.succ[q]:
                u2 = vadd(u, d)
                if norm_inf(u2) <= self.n:
                    out.append((x, (r, stack[:-1] + ((top_state, u2),), v, S, T)))
            if top_state == q:
                rest = stack[:-1]
                v2 = vadd(v, u)
                for T2 in self._t_options(T, u):
                    if norm_inf(v2) <= self.c:
                        out.append((EPS, (q, rest, v2, S, T2)))
                    out.append((EPS, (q, rest, v, self._s_after(S, u), T2)))
        if len(stack) < self.h:
            out.append((EPS, (q, stack + ((q, zero(A.k)),), v, S, T)))
        return out

    def is_final(self, state) -> bool:
        q, stack, v, S, T = state
        return q in self.A.finals and not stack and not any(v) and is_cancellable(S, T)

    def build(self) -> tuple:
        A = self.A
        start = (A.initial, (), zero(A.k), frozenset(), frozenset())
        index = {start: 0}
        queue = deque([start])
        trans = set()
        while queue:
            s = queue.popleft()
            for x, t in self.successors(s):
                if t not in index:
                    if len(index) >= self.cap:
                        raise ResourceError(f"closure construction exceeded {self.cap} states")
                    index[t] = len(index)
                    queue.append(t)
                trans.add((index[s], x, index[t]))
        finals = {i for s, i in index.items() if self.is_final(s)}
        nfa = Nfa(frozenset(index.values()), A.alphabet, trans, 0, finals)
        return trim(nfa), len(index)


def dc_construct(
    A: BlindAutomaton,
    capacity: Optional[int] = None,
    mode: str = "B3",
    stack_height: Optional[int] = None,
    cap: Optional[int] = None,
    method: str = "auto",
) -> DcConstruction:
    """Build the closure automaton and report how it was obtained.

    ``method="automaton"`` runs the counter/stack construction.  With an
    explicit capacity it is run once with that precise counter capacity.
    Without one, capacity and stack height grow in rounds (capacity 1, 2, 4,
    ... up to the theoretical bound, height up to |Q|) and a round is
    accepted as soon as an exact check confirms L(A) is contained in the
    closure of the automaton built so far.  Every round yields a subset of
    the closure of L(A), so the certified round is exactly that closure.

    ``method="refine"`` computes the ideal decomposition of the closure with
    exact SMT queries and returns the DFA of its union.  ``method="auto"``
    tries the automaton with a per-round budget of AUTO_ROUND_BUDGET states
    and falls back to refinement when that is exceeded, unless the overall
    cap is itself no larger than that budget.
    """
    if method not in ("auto", "automaton", "refine"):
        raise ValueError(f"unknown method {method!r}")
    cap = resource_cap() if cap is None else cap
    if method == "refine":
        return _dc_refine(A)
    if method == "auto" and capacity is None:
        try:
            return _dc_automaton(A, None, mode, stack_height, min(cap, AUTO_ROUND_BUDGET))
        except ResourceError:
            # a budget tighter than one round is a hard limit
            if cap <= AUTO_ROUND_BUDGET:
                raise
            return _dc_refine(A)
    return _dc_automaton(A, capacity, mode, stack_height, cap)


def _dc_refine(A: BlindAutomaton) -> DcConstruction:
    from .ideals import cover_dfa
    from .parikh import blind_closure_ideals

    nfa = compact(cover_dfa(blind_closure_ideals(A), A.alphabet).to_nfa())
    return DcConstruction(nfa, len(nfa.states), 0, 0, True, "refine")


def _dc_automaton(A, capacity, mode, stack_height, cap) -> DcConstruction:
    n = len(A.states)
    B = capacity_bound(n, A.k)
    if capacity is not None or A.k == 0:
        c = 0 if A.k == 0 else min(capacity, B)
        h = n if stack_height is None else stack_height
        nfa, count = _DcBuilder(A, c, h, mode, cap).build()
        return DcConstruction(compact(downward_close_nfa(nfa)), count, c, h, False)
    from .parikh import blind_included_in_closure

    rnd = 0
    hmax = n if stack_height is None else min(stack_height, n)
    while True:
        c = min(B, 2**rnd)
        h = min(hmax, rnd + 1)
        nfa, count = _DcBuilder(A, c, h, mode, cap).build()
        closure = downward_close_nfa(nfa)
        if (c == B and h == hmax) or blind_included_in_closure(A, closure):
            return DcConstruction(compact(closure), count, c, h, True)
        rnd += 1


def dc_nfa(A: BlindAutomaton, **options) -> Nfa:
    """NFA for the downward closure of L(A)."""
    return dc_construct(A, **options).nfa
