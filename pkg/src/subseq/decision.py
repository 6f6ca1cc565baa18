"""Inclusion and equivalence of downward closures across model kinds.

A model is an :class:`Ideal`, an :class:`Nfa`, a :class:`BlindAutomaton` or a
:class:`Cfg`.  Each strategy below decides ``↓K ⊆ ↓L`` for the pairs it
applies to; ``decide_inclusion`` picks one, ``cross_validate`` runs them all.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .automata import (
    Alphabet,
    Nfa,
    Word,
    accepts,
    determinize,
    downward_close_nfa,
    find_short_witness,
    inclusion_counterexample,
    minimize,
)
from .blind import BlindAutomaton, dc_nfa
from .errors import AlphabetMismatchError, ResourceError, SubseqError, UnsupportedModelError, resource_cap
from .grammar import (
    Cfg,
    cfg_ideal_decomposition,
    cfg_regular_counterexample,
    cyk_accepts,
    downward_grammar,
    ideal_in_cfg,
)
from .ideals import (
    Ideal,
    decompose_downward_closed,
    ideal_in_nfa,
    ideal_inclusion,
    ideal_member,
    ideal_witness,
    ordered_dfa,
    small_alphabet_bound,
)
from .parikh import blind_counterexample, blind_ideal_included, blind_member_closure

ModelRef = Union[Ideal, Nfa, BlindAutomaton, Cfg]

# closure automata of blind automata are only attempted up to this many counters
DC_MAX_COUNTERS = 2


class DisagreementError(SubseqError):
    """Two strategies returned different verdicts for the same question."""


@dataclass
class Verdict:
    holds: bool
    witness: Optional[Union[Word, Ideal]]
    strategy: str
    stats: dict = field(default_factory=dict)
    direction: Optional[str] = None


def model_kind(m) -> str:
    if isinstance(m, Ideal):
        return "ideal"
    if isinstance(m, Nfa):
        return "nfa"
    if isinstance(m, BlindAutomaton):
        return "blind"
    if isinstance(m, Cfg):
        return "cfg"
    raise UnsupportedModelError(f"unsupported model type {type(m).__name__}")


def model_alphabet(m) -> Alphabet:
    kind = model_kind(m)
    if kind == "ideal":
        return m.ambient
    if kind == "cfg":
        return m.terminals
    return m.alphabet


def _check_pair(K, L) -> Alphabet:
    a, b = model_alphabet(K), model_alphabet(L)
    if a.symbols != b.symbols:
        raise AlphabetMismatchError(f"alphabets differ: {a} vs {b}")
    return a


def has_dc_nfa(m) -> bool:
    kind = model_kind(m)
    return kind in ("ideal", "nfa") or (kind == "blind" and m.k <= DC_MAX_COUNTERS)


def to_dc_nfa(m) -> Optional[Nfa]:
    """NFA for the downward closure, or None for grammars."""
    kind = model_kind(m)
    if kind == "ideal":
        return ordered_dfa(m).to_nfa()
    if kind == "nfa":
        return downward_close_nfa(m)
    if kind == "blind":
        return dc_nfa(m)
    return None


def member_closure(m, w) -> bool:
    """w ∈ ↓L(m)."""
    kind = model_kind(m)
    if kind == "ideal":
        return ideal_member(m, w)
    if kind == "nfa":
        return accepts(downward_close_nfa(m), w)
    if kind == "blind":
        return blind_member_closure(m, w)
    return cyk_accepts(downward_grammar(m), w)


def ideal_included(I: Ideal, m) -> bool:
    """I ⊆ ↓L(m)."""
    kind = model_kind(m)
    if kind == "ideal":
        return ideal_inclusion(I, m)
    if kind == "nfa":
        return ideal_in_nfa(I, m)
    if kind == "blind":
        return blind_ideal_included(m, I)
    return ideal_in_cfg(I, m)


def decompose(m) -> list:
    """Maximal ideals whose union is ↓L(m)."""
    kind = model_kind(m)
    if kind == "ideal":
        return [m]
    if kind == "nfa":
        return decompose_downward_closed(downward_close_nfa(m), check=False)
    if kind == "blind":
        if m.k > DC_MAX_COUNTERS:
            raise ResourceError(f"closure automata are only built for at most {DC_MAX_COUNTERS} counters")
        return decompose_downward_closed(dc_nfa(m), check=False)
    return cfg_ideal_decomposition(m)


def _memo(fn):
    cache = {}

    def wrapper(m):
        key = id(m)
        if key not in cache:
            cache[key] = (m, fn(m))
        return cache[key][1]

    return wrapper


# ---------------------------------------------------------------------------
# strategies


def _word_or_ideal(I: Ideal, L, probe: Callable[[Word], bool], mmax: int) -> Union[Word, Ideal]:
    """A word of I outside ↓L if a small ideal witness shows one, else I."""
    for m in range(1, mmax + 1):
        w = ideal_witness(I, m)
        if not probe(w):
            return w
    return I


def _via_ideals(K, L, check, probe, mmax, name, ctx) -> Verdict:
    ideals = ctx.decompose(K)
    for n, I in enumerate(ideals, start=1):
        if not check(I):
            return Verdict(False, _word_or_ideal(I, L, probe, mmax), name, {"ideals_checked": n, "ideals": len(ideals)})
    return Verdict(True, None, name, {"ideals_checked": len(ideals), "ideals": len(ideals)})


def _run_ideal_witness(K, L, ctx) -> Verdict:
    if model_kind(L) == "ideal":
        bound = L.length
        probe = lambda w: ideal_member(L, w)
    else:
        bound = len(L.states)
        closure = ctx.dc(L)
        probe = lambda w: accepts(closure, w)

    def check(I):
        return probe(ideal_witness(I, bound + 1))

    return _via_ideals(K, L, check, probe, bound + 1, "ideal-witness", ctx)


def _run_sup_route(K, L, ctx) -> Verdict:
    Lp = downward_grammar(L)
    return _via_ideals(K, L, lambda I: ideal_in_cfg(I, L), lambda w: cyk_accepts(Lp, w), 4, "sup-route", ctx)


def _run_ideal_presburger(K, L, ctx) -> Verdict:
    return _via_ideals(
        K, L, lambda I: blind_ideal_included(L, I), lambda w: blind_member_closure(L, w), 3, "ideal-presburger", ctx
    )


def _run_dcnfa_product(K, L, ctx) -> Verdict:
    dk, dl = ctx.dc(K), ctx.dc(L)
    w = inclusion_counterexample(dk, dl)
    stats = {"left_states": len(dk.states), "right_states": len(dl.states)}
    return Verdict(w is None, w, "dcnfa-product", stats)


def _run_short_witness(K, L, ctx) -> Verdict:
    dl = ctx.dc(L)
    count = itertools.count(1)
    seen = []

    def member(w):
        seen.append(next(count))
        return member_closure(K, w)

    w = find_short_witness(member, dl, model_alphabet(K))
    return Verdict(w is None, w, "short-witness", {"words_searched": len(seen), "right_states": len(dl.states)})


def _run_cfg_product(K, L, ctx) -> Verdict:
    D = minimize(determinize(ctx.dc(L)))
    w = cfg_regular_counterexample(downward_grammar(K), D)
    return Verdict(w is None, w, "cfg-product", {"dfa_states": len(D.states)})


def _run_counter_product(K, L, ctx) -> Verdict:
    dl = ctx.dc(L)
    w = blind_counterexample(K, dl)
    return Verdict(w is None, w, "counter-product", {"right_states": len(dl.states)})


def _decomposable(m) -> bool:
    return model_kind(m) != "blind" or m.k <= DC_MAX_COUNTERS


STRATEGIES = {
    "counter-product": (lambda K, L: model_kind(K) == "blind" and model_kind(L) in ("ideal", "nfa"), _run_counter_product),
    "cfg-product": (lambda K, L: model_kind(K) == "cfg" and has_dc_nfa(L), _run_cfg_product),
    "dcnfa-product": (lambda K, L: model_kind(K) != "cfg" and has_dc_nfa(K) and has_dc_nfa(L), _run_dcnfa_product),
    "ideal-presburger": (lambda K, L: model_kind(L) == "blind" and _decomposable(K), _run_ideal_presburger),
    "ideal-witness": (lambda K, L: model_kind(L) in ("ideal", "nfa") and _decomposable(K), _run_ideal_witness),
    "short-witness": (lambda K, L: has_dc_nfa(L), _run_short_witness),
    "sup-route": (lambda K, L: model_kind(L) == "cfg" and _decomposable(K), _run_sup_route),
}


def applicable_strategies(K, L) -> list:
    return sorted(name for name, (ok, _) in STRATEGIES.items() if ok(K, L))


def auto_strategy(K, L) -> str:
    kk, lk = model_kind(K), model_kind(L)
    if lk == "cfg":
        return "sup-route"
    if lk == "blind":
        return "ideal-presburger"
    return {"ideal": "ideal-witness", "nfa": "dcnfa-product", "blind": "counter-product", "cfg": "cfg-product"}[kk]


class ClosureCache:
    """Cache of closure automata and decompositions, keyed by model identity.

    Pass one instance to several queries over the same model objects to
    avoid rebuilding closures."""

    def __init__(self):
        self.dc = _memo(to_dc_nfa)
        self.decompose = _memo(decompose)


def decide_inclusion(K, L, strategy: str = "auto", cache: Optional[ClosureCache] = None) -> Verdict:
    """Decide ↓K ⊆ ↓L."""
    _check_pair(K, L)
    if strategy == "auto":
        strategy = auto_strategy(K, L)
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {sorted(STRATEGIES)}")
    ok, run = STRATEGIES[strategy]
    if not ok(K, L):
        raise UnsupportedModelError(f"strategy {strategy} does not apply to {model_kind(K)} vs {model_kind(L)}")
    return run(K, L, cache or ClosureCache())


def decide_equivalence(K, L, strategy: str = "auto", cache: Optional[ClosureCache] = None) -> Verdict:
    cache = cache or ClosureCache()
    fwd = decide_inclusion(K, L, strategy, cache)
    if not fwd.holds:
        fwd.direction = "forward"
        return fwd
    bwd = decide_inclusion(L, K, strategy, cache)
    if not bwd.holds:
        bwd.direction = "backward"
        return bwd
    return Verdict(True, None, f"{fwd.strategy}+{bwd.strategy}", {"forward": fwd.stats, "backward": bwd.stats})


def find_word_witness(K, L) -> Optional[Word]:
    """A word of ↓K outside ↓L of bounded length, or None if ↓K ⊆ ↓L."""
    alphabet = _check_pair(K, L)
    if has_dc_nfa(L):
        return find_short_witness(lambda w: member_closure(K, w), to_dc_nfa(L), alphabet)
    if model_kind(L) != "cfg":
        raise UnsupportedModelError("no witness bound is available for this pair")
    ideals = cfg_ideal_decomposition(L)
    n = max((I.length for I in ideals), default=0)
    bound = small_alphabet_bound(len(alphabet), n)
    Lp = downward_grammar(L)
    cap = resource_cap()
    layer = [()]
    visited = 0
    for length in range(bound + 1):
        nxt = []
        for w in layer:
            visited += 1
            if visited > cap:
                raise ResourceError(f"witness search exceeded {cap} words")
            if not member_closure(K, w):
                continue
            if not cyk_accepts(Lp, w):
                return w
            nxt.extend(w + (x,) for x in alphabet)
        layer = nxt
    return None


def verify_witness(K, L, witness) -> bool:
    """A word witness lies in ↓K but not ↓L; an ideal witness lies inside ↓K
    but not inside ↓L."""
    if isinstance(witness, Ideal):
        return ideal_included(witness, K) and not ideal_included(witness, L)
    return member_closure(K, witness) and not member_closure(L, witness)


@dataclass
class StrategyRow:
    strategy: str
    holds: Optional[bool]
    witness: object = None
    stats: dict = field(default_factory=dict)
    skipped: Optional[str] = None


def cross_validate(K, L, cache: Optional[ClosureCache] = None) -> list:
    """Run every applicable strategy; raise DisagreementError on conflict.

    Strategies that exceed the resource budget are reported as skipped.
    """
    _check_pair(K, L)
    rows = []
    ctx = cache or ClosureCache()
    for name in applicable_strategies(K, L):
        try:
            v = STRATEGIES[name][1](K, L, ctx)
        except ResourceError as exc:
            rows.append(StrategyRow(name, None, skipped=str(exc)))
            continue
        rows.append(StrategyRow(name, v.holds, v.witness, v.stats))
    verdicts = {r.holds for r in rows if r.skipped is None}
    if len(verdicts) > 1:
        detail = ", ".join(f"{r.strategy}={r.holds}" for r in rows if r.skipped is None)
        raise DisagreementError(f"strategies disagree: {detail}")
    return rows
