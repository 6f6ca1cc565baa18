"""Walks, cycle decomposition and insertion trees.

Transitions are tuples whose first entry is the source state, second entry
the input label (or ``None`` for ε) and last entry the target state, so both
NFA triples and blind-automaton quadruples work unchanged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Sequence

from .automata import EPS, Alphabet, Word
from .ideals import IdealExpr, OptionalLetter, StarSet, normalize


@dataclass(frozen=True)
class Walk:
    start: Hashable
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        cur = self.start
        for t in self.steps:
            if t[0] != cur:
                raise ValueError(f"transition {t!r} does not continue the walk from {cur!r}")
            cur = t[-1]

    @property
    def end(self):
        return self.steps[-1][-1] if self.steps else self.start

    def sources(self) -> list:
        return [t[0] for t in self.steps]

    def word(self) -> Word:
        return tuple(t[1] for t in self.steps if t[1] is not EPS)

    def __len__(self):
        return len(self.steps)


def classify_cycle(w: Walk) -> str:
    """One of 'not_cycle', 'cycle', 'prime', 'simple' (the most specific)."""
    if not w.steps or w.end != w.start:
        return "not_cycle"
    src = w.sources()
    if len(set(src)) == len(src):
        return "simple"
    if src.count(src[0]) == 1:
        return "prime"
    return "cycle"


def split_prime(steps: Sequence) -> list:
    """Factor a cycle into prime cycles at every return to its start."""
    if not steps:
        return []
    q = steps[0][0]
    parts = []
    cur = []
    for t in steps:
        if t[0] == q and cur:
            parts.append(tuple(cur))
            cur = []
        cur.append(t)
    parts.append(tuple(cur))
    return parts


def decompose_walk(w: Walk) -> tuple:
    """Split w into a simple residual path and prime cycles.

    Cycles are erased in the order they close while reading w.  The result
    is ``(residual, cycles)`` where ``cycles`` lists ``(position, prime cycle)``
    pairs; a position j means "inserted after the first j residual steps".
    Cycles sharing a position appear in walk order.
    """
    states = [w.start]
    steps = []
    pending = [[]]
    where = {w.start: 0}
    for t in w.steps:
        q = t[-1]
        j = where.get(q)
        if j is None:
            steps.append(t)
            states.append(q)
            pending.append([])
            where[q] = len(states) - 1
            continue
        loop = []
        for i in range(j, len(steps)):
            loop.append(steps[i])
            loop.extend(pending[i + 1])
        loop.append(t)
        for s in states[j + 1 :]:
            del where[s]
        del states[j + 1 :]
        del steps[j:]
        del pending[j + 1 :]
        pending[j].extend(loop)
    residual = Walk(w.start, tuple(steps))
    cycles = [(j, c) for j, material in enumerate(pending) for c in split_prime(material)]
    return residual, cycles


def reinsert(residual: Walk, cycles: Iterable) -> Walk:
    by_pos = {}
    for j, c in cycles:
        by_pos.setdefault(j, []).extend(c)
    out = list(by_pos.get(0, []))
    for j, t in enumerate(residual.steps, start=1):
        out.append(t)
        out.extend(by_pos.get(j, []))
    return Walk(residual.start, tuple(out))


# ---------------------------------------------------------------------------
# insertion trees


@dataclass(frozen=True)
class TreeNode:
    vid: int
    cycle: tuple
    children: tuple = ()

    @property
    def start(self):
        return self.cycle[0][0]

    def slot(self, child: "TreeNode") -> int:
        """Index i >= 1 of the step of this cycle that starts at child's state."""
        for i, t in enumerate(self.cycle):
            if i and t[0] == child.start:
                return i
        raise ValueError("child start state does not occur properly in the parent cycle")


InsertionTree = TreeNode


def flatten(t: TreeNode) -> tuple:
    """The cycle obtained by inserting every child's cycle at its slot."""
    inserted = {}
    for c in t.children:
        inserted.setdefault(t.slot(c), []).extend(flatten(c))
    out = []
    for i, step in enumerate(t.cycle):
        out.extend(inserted.get(i, ()))
        out.append(step)
    return tuple(out)


def height(t: TreeNode) -> int:
    return 1 + max((height(c) for c in t.children), default=0)


def vertices(t: TreeNode) -> list:
    """Preorder, left to right."""
    out = [t]
    for c in t.children:
        out.extend(vertices(c))
    return out


def is_valid_tree(t: TreeNode) -> bool:
    if classify_cycle(Walk(t.start, t.cycle)) != "simple":
        return False
    try:
        slots = [t.slot(c) for c in t.children]
    except ValueError:
        return False
    return slots == sorted(slots) and all(is_valid_tree(c) for c in t.children)


def build_insertion_tree(cycle: Sequence, ids: Optional[Iterable[int]] = None) -> TreeNode:
    """Insertion tree whose flattening is the given prime cycle.

    The state p repeating with the longest p-cycle factor y is cut out
    (c = x y z); y is split into prime p-cycles, each built recursively, the
    remainder xz is built recursively and its root's subtrees are re-split
    into prime cycles, and the trees for y go below the root at p.
    """
    cycle = tuple(cycle)
    if classify_cycle(Walk(cycle[0][0] if cycle else None, cycle)) not in ("prime", "simple"):
        raise ValueError("insertion trees are built for prime cycles only")
    ids = itertools.count() if ids is None else iter(ids)
    return _build(cycle, ids)


def _build(c: tuple, ids) -> TreeNode:
    src = [t[0] for t in c]
    first = {}
    last = {}
    for i, p in enumerate(src):
        if i == 0:
            continue
        first.setdefault(p, i)
        last[p] = i
    repeating = [p for p in first if last[p] != first[p]]
    if not repeating:
        return TreeNode(next(ids), c, ())
    p = max(repeating, key=lambda s: (last[s] - first[s], -first[s]))
    i, j = first[p], last[p]
    x, y, z = c[:i], c[i:j], c[j:]
    inner = [_build(part, ids) for part in split_prime(y)]
    rest = _build(x + z, ids)
    children = []
    for s in rest.children:
        children.extend(_build(part, ids) for part in split_prime(flatten(s)))
    root = TreeNode(rest.vid, rest.cycle, ())
    slot = next((k for k, t in enumerate(rest.cycle) if k and t[0] == p), None)
    if slot is None:
        raise AssertionError("cut state does not occur in the root cycle")
    before = [ch for ch in children if root.slot(ch) <= slot]
    after = [ch for ch in children if root.slot(ch) > slot]
    return TreeNode(rest.vid, rest.cycle, tuple(before + inner + after))


def tree_text(t: TreeNode, indent: int = 0) -> str:
    """Indented debug rendering, one vertex per line."""
    word = " ".join(x for _, x, *_ in t.cycle if x is not EPS) or "eps"
    lines = [f"{'  ' * indent}#{t.vid} @{t.start}: {word}"]
    for c in t.children:
        lines.append(tree_text(c, indent + 1))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# pumping


@dataclass(frozen=True)
class PumpSequence:
    trees: tuple
    fixed: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))
        object.__setattr__(self, "fixed", frozenset(self.fixed))
        if len({t.start for t in self.trees}) > 1:
            raise ValueError("trees of a pump sequence must start at the same state")

    def walk(self) -> tuple:
        return tuple(s for t in self.trees for s in flatten(t))

    def word(self) -> Word:
        return tuple(s[1] for s in self.walk() if s[1] is not EPS)

    def max_vid(self) -> int:
        return max((v.vid for t in self.trees for v in vertices(t)), default=-1)


def _subtree_pumpable(t: TreeNode, fixed: frozenset) -> bool:
    return all(v.vid not in fixed for v in vertices(t))


def _renumber(t: TreeNode, ids) -> TreeNode:
    return TreeNode(next(ids), t.cycle, tuple(_renumber(c, ids) for c in t.children))


def _apply(siblings: tuple, step, fixed: frozenset, ids):
    """Apply one step inside a list of siblings; returns the new tuple or None."""
    for idx, v in enumerate(siblings):
        if v.vid == step[1]:
            if v.vid in fixed:
                raise ValueError(f"vertex {v.vid} is fixed and cannot be pumped")
            if step[0] == "split":
                i = step[2]
                if not 0 <= i <= len(v.children):
                    raise ValueError(f"split index {i} out of range for vertex {v.vid}")
                left = TreeNode(v.vid, v.cycle, v.children[:i])
                right = TreeNode(next(ids), v.cycle, v.children[i:])
                return siblings[:idx] + (left, right) + siblings[idx + 1 :]
            if step[0] == "dup":
                if not _subtree_pumpable(v, fixed):
                    raise ValueError(f"subtree under vertex {v.vid} contains a fixed vertex")
                return siblings[: idx + 1] + (_renumber(v, ids),) + siblings[idx + 1 :]
            raise ValueError(f"unknown pump step {step[0]!r}")
        sub = _apply(v.children, step, fixed, ids)
        if sub is not None:
            return siblings[:idx] + (TreeNode(v.vid, v.cycle, sub),) + siblings[idx + 1 :]
    return None


def pump(s: PumpSequence, script: Iterable) -> PumpSequence:
    """Apply ``("split", vid, i)`` and ``("dup", vid)`` steps left to right.

    New vertices receive fresh ids and are pumpable.
    """
    trees = s.trees
    ids = itertools.count(s.max_vid() + 1)
    for step in script:
        res = _apply(trees, step, s.fixed, ids)
        if res is None:
            raise ValueError(f"no vertex {step[1]} in the pump sequence")
        trees = res
    return PumpSequence(trees, s.fixed)


def _letters(t: TreeNode) -> set:
    return {s[1] for v in vertices(t) for s in v.cycle if s[1] is not EPS}


def _contains_fixed(t: TreeNode, fixed: frozenset) -> bool:
    return not _subtree_pumpable(t, fixed)


def _tree_atoms(t: TreeNode, fixed: frozenset) -> list:
    letters = [s[1] for s in t.cycle]
    ell = len(t.cycle)
    groups = {}
    for c in t.children:
        groups.setdefault(t.slot(c), []).append(c)
    own = {x for x in letters if x is not EPS}
    atoms = []
    if t.vid in fixed and letters[0] is not EPS:
        atoms.append(OptionalLetter(letters[0]))
    for i in range(1, ell):
        kids = groups.get(i, [])
        Y = set()
        for c in kids:
            if not _contains_fixed(c, fixed):
                Y |= _letters(c)
        if t.vid not in fixed:
            Y |= own
        star = StarSet(frozenset(Y))
        atoms.append(star)
        for c in kids:
            if _contains_fixed(c, fixed):
                atoms.extend(_tree_atoms(c, fixed))
                atoms.append(star)
        if t.vid in fixed and letters[i] is not EPS:
            atoms.append(OptionalLetter(letters[i]))
    return atoms


def pump_atoms(s: PumpSequence) -> list:
    fixed_trees = [t for t in s.trees if _contains_fixed(t, s.fixed)]
    Y = set()
    for t in s.trees:
        if not _contains_fixed(t, s.fixed):
            Y |= _letters(t)
    star = StarSet(frozenset(Y))
    atoms = [star]
    for t in fixed_trees:
        atoms.extend(_tree_atoms(t, s.fixed))
        atoms.append(star)
    return atoms


def pump_ideal(s: PumpSequence, ambient: Alphabet) -> IdealExpr:
    """Expression for the downward closure of everything pumping s can read."""
    return IdealExpr(tuple(pump_atoms(s)), ambient)


def pump_bound(h: int, nfixed: int, nstates: int) -> int:
    return h * nfixed * (2 * nstates + nfixed) ** 2


# ---------------------------------------------------------------------------
# ideals from accepting walks


def _effect(steps: Sequence, k: int) -> tuple:
    total = [0] * k
    for t in steps:
        for i, c in enumerate(t[2]):
            total[i] += c
    return tuple(total)


def _small_solution(effects: list, counts: list, target: tuple) -> Optional[tuple]:
    """y <= counts with sum y_i * effects[i] = target and minimal |y|_1."""
    best = {tuple(0 for _ in target): ()}
    for e, x in zip(effects, counts):
        nxt = {}
        for pos, ys in best.items():
            for yi in range(x + 1):
                p2 = tuple(a + yi * b for a, b in zip(pos, e))
                cand = ys + (yi,)
                old = nxt.get(p2)
                if old is None or (sum(cand), cand) < (sum(old), old):
                    nxt[p2] = cand
        best = nxt
    return best.get(tuple(target))


def ideal_for_walk(A, walk: Walk):
    """An ideal containing the walk's input and contained in the closure of L(A).

    The walk is cut into a simple residual path and prime cycles, each cycle
    gets an insertion tree, and just enough cycles are fixed (per effect) to
    cancel the residual's effect; everything else may be pumped.
    """
    from .blind import effect as blind_effect

    steps = walk.steps
    if walk.start != A.initial or walk.end not in A.finals:
        raise ValueError("walk is not accepting")
    if any(blind_effect(A, steps)):
        raise ValueError("walk does not return the counters to zero")
    residual, cycles = decompose_walk(walk)
    ids = itertools.count()
    seqs = {}
    for j, c in cycles:
        seqs.setdefault(j, []).append(build_insertion_tree(c, ids))
    order = [v for j in sorted(seqs) for t in seqs[j] for v in vertices(t)]
    effects = sorted({_effect(v.cycle, A.k) for v in order})
    counts = [sum(1 for v in order if _effect(v.cycle, A.k) == e) for e in effects]
    target = tuple(-c for c in _effect(residual.steps, A.k))
    y = _small_solution(effects, counts, target)
    if y is None:
        raise AssertionError("no cancelling choice of cycles for an accepting walk")
    quota = dict(zip(effects, y))
    fixed = set()
    for v in order:
        e = _effect(v.cycle, A.k)
        if quota[e] > 0:
            fixed.add(v.vid)
            quota[e] -= 1
    fixed = frozenset(fixed)
    atoms = []
    for j in range(len(residual.steps) + 1):
        if j:
            x = residual.steps[j - 1][1]
            if x is not EPS:
                atoms.append(OptionalLetter(x))
        if j in seqs:
            atoms.extend(pump_atoms(PumpSequence(tuple(seqs[j]), fixed)))
    expr = IdealExpr(tuple(atoms), A.alphabet)
    return normalize(expr), expr


def ideal_bound(n: int, k: int) -> int:
    return (5 * n) ** (7 * (k + 1) ** 2)
