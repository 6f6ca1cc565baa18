"""Generators: subset-sum gadgets, power-of-two languages and random models."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .automata import EPS, Alphabet, Nfa
from .blind import BlindAutomaton
from .grammar import Cfg
from .ideals import IdealExpr, OptionalLetter, StarSet, normalize

BITS = Alphabet(("0", "1"))


@dataclass(frozen=True)
class SubsetSumInstance:
    u: tuple
    v: tuple
    t: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(self.u))
        object.__setattr__(self, "v", tuple(self.v))
        if len(self.u) != len(self.v):
            raise ValueError("u and v must have the same length")
        if self.k < 1 or self.t < 0:
            raise ValueError("bit width must be positive and the target nonnegative")
        if any(not 0 <= c < 2**self.k for c in self.u + self.v):
            raise ValueError(f"entries must be below 2^{self.k}")

    @property
    def n(self) -> int:
        return len(self.u)


def subset_sum_oracle(inst: SubsetSumInstance) -> bool:
    """For every x in {0,1}^n some y in {0,1}^n has <u,x> + <v,y> = t."""
    if inst.n > 12:
        raise ValueError("oracle enumeration is limited to n <= 12")
    sums_y = {sum(c for c, b in zip(inst.v, y) if b) for y in itertools.product((0, 1), repeat=inst.n)}
    return all(
        inst.t - sum(c for c, b in zip(inst.u, x) if b) in sums_y for x in itertools.product((0, 1), repeat=inst.n)
    )


class _Builder:
    def __init__(self, dims: int):
        self.dims = dims
        self.trans = set()
        self.states = set()
        self._ids = itertools.count()

    def state(self, tag: str) -> str:
        s = f"{tag}{next(self._ids)}"
        self.states.add(s)
        return s

    def vec(self, changes: dict) -> tuple:
        d = [0] * self.dims
        for i, c in changes.items():
            d[i] += c
        return tuple(d)

    def add(self, p, x, changes, q):
        self.states.update((p, q))
        self.trans.add((p, x, self.vec(changes), q))

    def binary_add(self, value: int, first: int, width: int, p: str, q: str):
        """ε-path from p to q adding ``value`` to counter first+width-1, using
        counters first..first+width-1 for repeated doubling (most significant
        bit first)."""
        bits = [(value >> (width - 1 - j)) & 1 for j in range(width)]
        cur = self.state("g")
        self.add(p, EPS, {first: bits[0]} if bits[0] else {}, cur)
        for j in range(1, width):
            src, dst = first + j - 1, first + j
            half = self.state("h")
            self.add(cur, EPS, {src: -1, dst: 1}, half)
            self.add(half, EPS, {dst: 1}, cur)
            nxt = self.state("g")
            self.add(cur, EPS, {dst: bits[j]} if bits[j] else {}, nxt)
            cur = nxt
        self.add(cur, EPS, {}, q)


def gen_subset_sum(inst: SubsetSumInstance) -> tuple:
    """(B, A): B accepts {0,1}^n; A accepts the x for which some y balances.

    A uses 3k counters: counters 0..k-1 build <u,x> in counter k-1 while x is
    read, counters k..2k-1 build <v,y> in counter 2k-1 for a guessed y, and
    counters 2k..3k-1 build t (in chunks below 2^k) in counter 3k-1.  A final
    loop decrements counter 3k-1 together with counter k-1 or 2k-1.
    """
    n, k = inst.n, inst.k
    B = Nfa(
        frozenset(f"b{i}" for i in range(n + 1)),
        BITS,
        {(f"b{i}", x, f"b{i + 1}") for i in range(n) for x in BITS},
        "b0",
        {f"b{n}"},
    )
    g = _Builder(3 * k)
    xs = [f"x{i}" for i in range(n + 1)]
    for i in range(n):
        g.add(xs[i], "0", {}, xs[i + 1])
        mid = g.state("u")
        g.add(xs[i], "1", {}, mid)
        g.binary_add(inst.u[i], 0, k, mid, xs[i + 1])
    ys = [xs[n]] + [f"y{i + 1}" for i in range(n)]
    for i in range(n):
        g.add(ys[i], EPS, {}, ys[i + 1])
        g.binary_add(inst.v[i], k, k, ys[i], ys[i + 1])
    chunk = 2**k - 1
    remaining = inst.t
    cur = ys[n]
    while remaining > 0:
        part = min(chunk, remaining)
        nxt = g.state("t")
        g.binary_add(part, 2 * k, k, cur, nxt)
        cur = nxt
        remaining -= part
    final = "acc"
    g.add(cur, EPS, {}, final)
    g.add(final, EPS, {3 * k - 1: -1, k - 1: -1}, final)
    g.add(final, EPS, {3 * k - 1: -1, 2 * k - 1: -1}, final)
    A = BlindAutomaton(frozenset(g.states), BITS, 3 * k, frozenset(g.trans), xs[0], {final})
    return B, A


def gen_pow2_cfg(n: int) -> Cfg:
    nts = [f"A{i}" for i in range(n + 1)]
    rules = {(nts[i], (nts[i - 1], nts[i - 1])) for i in range(1, n + 1)} | {(nts[0], ("a",))}
    return Cfg(frozenset(nts), Alphabet(("a",)), frozenset(rules), nts[n])


def gen_pow2_blind(n: int) -> BlindAutomaton:
    """Blind (n+1)-counter automaton for {a^(2^n)} by repeated doubling."""
    g = _Builder(n + 1)
    start, read = "s", "r"
    cur = g.state("d")
    g.add(start, EPS, {0: 1}, cur)
    for i in range(n):
        half = g.state("h")
        g.add(cur, EPS, {i: -1, i + 1: 1}, half)
        g.add(half, EPS, {i + 1: 1}, cur)
        nxt = g.state("d")
        g.add(cur, EPS, {}, nxt)
        cur = nxt
    g.add(cur, EPS, {}, read)
    g.add(read, "a", {n: -1}, read)
    return BlindAutomaton(frozenset(g.states), Alphabet(("a",)), n + 1, frozenset(g.trans), start, {read})


def _letters(size: int) -> Alphabet:
    return Alphabet(tuple("abcdefgh"[:size]))


def random_nfa(rng: random.Random, n: int = 3, alpha: int = 2, density: float = 0.35, eps: float = 0.1) -> Nfa:
    states = [f"q{i}" for i in range(n)]
    X = _letters(alpha)
    trans = set()
    for p in states:
        for q in states:
            for x in X:
                if rng.random() < density:
                    trans.add((p, x, q))
            if p != q and rng.random() < eps:
                trans.add((p, EPS, q))
    finals = {q for q in states if rng.random() < 0.4} or {rng.choice(states)}
    return Nfa(frozenset(states), X, frozenset(trans), states[0], frozenset(finals))


def random_blind(rng: random.Random, n: int = 3, k: int = 1, alpha: int = 2, m: int = 6) -> BlindAutomaton:
    states = [f"q{i}" for i in range(n)]
    X = _letters(alpha)
    trans = set()
    # never ask for more distinct transitions than exist
    m = min(m, n * n * (alpha + 1) * 3**k)
    while len(trans) < m:
        p, q = rng.choice(states), rng.choice(states)
        x = rng.choice(list(X.symbols) + [EPS])
        d = tuple(rng.choice((-1, 0, 0, 1)) for _ in range(k))
        trans.add((p, x, d, q))
    finals = {q for q in states if rng.random() < 0.4} or {rng.choice(states)}
    return BlindAutomaton(frozenset(states), X, k, frozenset(trans), states[0], frozenset(finals))


def random_ideal(rng: random.Random, length: int = 2, alpha: int = 2):
    """A normalized ideal with exactly ``length`` optional letters."""
    X = _letters(alpha)
    while True:
        atoms = [StarSet(frozenset(x for x in X if rng.random() < 0.4))]
        for _ in range(length):
            atoms.append(OptionalLetter(rng.choice(X.symbols)))
            atoms.append(StarSet(frozenset(x for x in X if rng.random() < 0.4)))
        I = normalize(IdealExpr(tuple(atoms), X))
        if I.length == length:
            return I


def random_cfg(rng: random.Random, nonterminals: int = 3, alpha: int = 2, productions: int = 6) -> Cfg:
    nts = [f"N{i}" for i in range(nonterminals)]
    X = _letters(alpha)
    rules = set()
    symbols = nts + list(X.symbols)
    while len(rules) < productions:
        A = rng.choice(nts)
        body = tuple(rng.choice(symbols) for _ in range(rng.choice((0, 1, 2, 2, 3))))
        rules.add((A, body))
    rules.add((rng.choice(nts), (rng.choice(X.symbols),)))
    return Cfg(frozenset(nts), X, frozenset(rules), nts[0])


def random_subset_sum(rng: random.Random, n: int = 2, k: int = 2) -> SubsetSumInstance:
    u = [rng.randrange(2**k) for _ in range(n)]
    v = [rng.randrange(2**k) for _ in range(n)]
    x = [rng.randrange(2) for _ in range(n)]
    y = [rng.randrange(2) for _ in range(n)]
    t = sum(a * b for a, b in zip(u, x)) + sum(a * b for a, b in zip(v, y))
    return SubsetSumInstance(tuple(u), tuple(v), t, k)


_KINDS = {"nfa": random_nfa, "blind": random_blind, "ideal": random_ideal, "cfg": random_cfg}


def gen_random(kind: str, seed: int, **params):
    """A random model of the given kind, determined by (seed, params)."""
    if kind not in _KINDS:
        raise ValueError(f"unknown model kind {kind!r}; choose from {sorted(_KINDS)}")
    return _KINDS[kind](random.Random(seed), **params)
