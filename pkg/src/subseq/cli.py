"""Command-line front end.  Exit status: 0 holds, 1 fails, 2 usage/input/resource error."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .automata import accepts, compact, downward_close_nfa, enumerate_upto, nfa_from_words
from .blind import dc_nfa, enumerate_bounded
from .decision import (
    STRATEGIES,
    DisagreementError,
    Verdict,
    cross_validate,
    decide_equivalence,
    decide_inclusion,
    decompose,
    member_closure,
    model_alphabet,
    model_kind,
)
from .errors import SubseqError
from .formats import load_model, serialize
from .grammar import cyk_accepts, downward_grammar, enumerate_cfg_upto, sup_decide, to_cnf
from .ideals import Ideal, ideal_member, ordered_dfa
from .instances import (
    SubsetSumInstance,
    gen_pow2_blind,
    gen_pow2_cfg,
    gen_random,
    gen_subset_sum,
    random_subset_sum,
)
from .parikh import blind_nfa_product, find_accepting_walk

OK, FAIL, ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _word_text(w) -> str:
    return " ".join(w) if w else "eps"


def _witness_json(w):
    if w is None:
        return None
    if isinstance(w, Ideal):
        return {"ideal": str(w)}
    return list(w)


def _read_word(model, tokens) -> tuple:
    """Symbols as separate arguments; a lone argument made of single-letter
    symbols may also be written run together (``aab``); ``eps`` is the empty word."""
    alphabet = model_alphabet(model)
    if tokens == ["eps"]:
        return ()
    if len(tokens) == 1 and tokens[0] not in alphabet and all(c in alphabet for c in tokens[0]):
        return tuple(tokens[0])
    return alphabet.check_word(tuple(tokens))


def cmd_dc(args) -> int:
    m = load_model(args.file)
    kind = model_kind(m)
    if kind == "cfg":
        raise UsageError("no closure automaton is built for grammars; use 'decompose' instead")
    if kind == "ideal":
        A = ordered_dfa(m).to_nfa()
    elif kind == "nfa":
        A = downward_close_nfa(m)
    else:
        A = dc_nfa(m)
    print(serialize(compact(A)), end="")
    return OK


def cmd_decompose(args) -> int:
    for text in sorted(str(I) for I in decompose(load_model(args.file))):
        print(text)
    return OK


def _report(v: Verdict, args, rows=None) -> int:
    if args.json:
        out = {
            "holds": v.holds,
            "witness": _witness_json(v.witness),
            "strategy": v.strategy,
            "stats": v.stats,
        }
        if v.direction:
            out["direction"] = v.direction
        if rows is not None:
            out["cross_validation"] = [
                {"strategy": r.strategy, "holds": r.holds, "skipped": r.skipped} for r in rows
            ]
        print(json.dumps(out, sort_keys=True, default=str))
    else:
        print(f"{'holds' if v.holds else 'fails'} (strategy {v.strategy})")
        if rows is not None:
            for r in rows:
                state = f"skipped: {r.skipped}" if r.skipped else ("holds" if r.holds else "fails")
                print(f"  {r.strategy}: {state}")
        if not v.holds and args.witness:
            label = "witness" + (f" ({v.direction})" if v.direction else "")
            w = v.witness
            print(f"{label}: {w if isinstance(w, Ideal) else _word_text(w)}")
    return OK if v.holds else FAIL


def _cross(K, L, backward: bool = False):
    rows = cross_validate(K, L)
    live = [r for r in rows if r.skipped is None]
    if not live:
        raise SubseqError("every applicable strategy exceeded the resource budget")
    first = live[0]
    direction = None if first.holds else ("backward" if backward else "forward")
    return Verdict(first.holds, first.witness, "cross-validate", {"strategies": len(live)}, direction), rows


def cmd_include(args) -> int:
    K, L = load_model(args.K), load_model(args.L)
    if args.cross_validate:
        v, rows = _cross(K, L)
        v.direction = None
        return _report(v, args, rows)
    return _report(decide_inclusion(K, L, args.strategy), args)


def cmd_equiv(args) -> int:
    K, L = load_model(args.K), load_model(args.L)
    if args.cross_validate:
        v, rows = _cross(K, L)
        if v.holds:
            v, rows2 = _cross(L, K, backward=True)
            rows = rows + rows2
        return _report(v, args, rows)
    return _report(decide_equivalence(K, L, args.strategy), args)


def cmd_sup(args) -> int:
    G = load_model(args.file)
    if model_kind(G) != "cfg":
        raise UsageError("sup expects a @cfg file")
    holds = sup_decide(G, args.order)
    print("holds" if holds else "fails")
    return OK if holds else FAIL


def _member(m, w) -> bool:
    kind = model_kind(m)
    if kind == "ideal":
        return ideal_member(m, w)
    if kind == "nfa":
        return accepts(m, w)
    if kind == "cfg":
        return cyk_accepts(to_cnf(m), w)
    P, _ = blind_nfa_product(m, nfa_from_words([w], m.alphabet))
    return find_accepting_walk(P) is not None


def cmd_member(args) -> int:
    m = load_model(args.file)
    w = _read_word(m, args.word)
    holds = member_closure(m, w) if args.closure else _member(m, w)
    print("member" if holds else "not a member")
    return OK if holds else FAIL


def _subwords(words) -> set:
    out = set()
    for w in words:
        for mask in range(1 << len(w)):
            out.add(tuple(x for i, x in enumerate(w) if mask >> i & 1))
    return out


def cmd_oracle(args) -> int:
    m = load_model(args.file)
    kind = model_kind(m)
    n = args.max_len
    if kind == "ideal":
        words = enumerate_upto(ordered_dfa(m).to_nfa(), n)
    elif kind == "nfa":
        words = enumerate_upto(downward_close_nfa(m) if args.closure else m, n)
    elif kind == "cfg":
        words = enumerate_cfg_upto(downward_grammar(to_cnf(m)) if args.closure else m, n)
    else:
        if args.closure:
            source = args.source_len if args.source_len is not None else 2 * n
            words = {w for w in _subwords(enumerate_bounded(m, source, args.counter_bound, args.eps_bound)) if len(w) <= n}
        else:
            words = enumerate_bounded(m, n, args.counter_bound, args.eps_bound)
    order = model_alphabet(m)
    for w in sorted(words, key=lambda w: (len(w), [order.index(x) for x in w])):
        print(_word_text(w))
    return OK


def _write(model, path) -> None:
    text = serialize(model)
    if path is None:
        print(text, end="")
    else:
        Path(path).write_text(text, encoding="utf-8")
        print(f"wrote {path}")


def cmd_gen(args) -> int:
    g = args.generator
    if g == "subset-sum":
        if args.u is None:
            if args.seed is None:
                raise UsageError("subset-sum needs either --u/--v/--t or --seed")
            import random

            inst = random_subset_sum(random.Random(args.seed), args.n, args.k)
        else:
            if args.v is None or args.t is None:
                raise UsageError("subset-sum needs --u, --v and --t together")
            inst = SubsetSumInstance(tuple(args.u), tuple(args.v), args.t, args.k)
        B, A = gen_subset_sum(inst)
        out = Path(args.out or ".")
        out.mkdir(parents=True, exist_ok=True)
        _write(B, out / "words.nfa")
        _write(A, out / "balanced.blind")
        print(f"instance: u={list(inst.u)} v={list(inst.v)} t={inst.t} k={inst.k}")
        return OK
    if g == "pow2-cfg":
        _write(gen_pow2_cfg(args.n), args.out)
        return OK
    if g == "pow2-blind":
        _write(gen_pow2_blind(args.n), args.out)
        return OK
    if args.seed is None:
        raise UsageError("gen random requires an explicit --seed")
    params = {
        "nfa": {"n": args.states, "alpha": args.alphabet_size},
        "blind": {"n": args.states, "k": args.counters, "alpha": args.alphabet_size},
        "ideal": {"length": args.length, "alpha": args.alphabet_size},
        "cfg": {"nonterminals": args.states, "alpha": args.alphabet_size},
    }[args.kind]
    _write(gen_random(args.kind, args.seed, **params), args.out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subseq", description="Downward closures under the subword order.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dc", help="print an NFA for the downward closure")
    s.add_argument("file")
    s.set_defaults(func=cmd_dc)

    s = sub.add_parser("decompose", help="print the closure as a union of ideals")
    s.add_argument("file")
    s.set_defaults(func=cmd_decompose)

    for name, func, helptext in (
        ("include", cmd_include, "decide whether the closure of K lies inside that of L"),
        ("equiv", cmd_equiv, "decide whether two closures coincide"),
    ):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("K")
        s.add_argument("L")
        s.add_argument("--witness", action="store_true", help="print a witness when the answer is no")
        s.add_argument("--strategy", default="auto", choices=["auto", *sorted(STRATEGIES)])
        s.add_argument("--cross-validate", action="store_true", help="run every applicable strategy")
        s.add_argument("--json", action="store_true")
        s.set_defaults(func=func)

    s = sub.add_parser("sup", help="decide whether a grammar's closure is a1* ... an*")
    s.add_argument("file")
    s.add_argument("--order", nargs="+", required=True, metavar="LETTER")
    s.set_defaults(func=cmd_sup)

    s = sub.add_parser("member", help="test membership of a word")
    s.add_argument("file")
    s.add_argument("word", nargs="*", help="symbols of the word; 'eps' or nothing for the empty word")
    s.add_argument("--closure", action="store_true", help="test the downward closure instead")
    s.set_defaults(func=cmd_member)

    s = sub.add_parser("oracle", help="enumerate short words by brute force")
    s.add_argument("file")
    s.add_argument("--max-len", type=int, default=6)
    s.add_argument("--counter-bound", type=int, default=8)
    s.add_argument("--eps-bound", type=int, default=16)
    s.add_argument("--closure", action="store_true", help="enumerate the downward closure instead")
    s.add_argument(
        "--source-len", type=int, help="with --closure on a blind model: length of the accepted words whose subwords are listed (default 2*max-len)"
    )
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("gen", help="write generated models")
    s.add_argument("generator", choices=["subset-sum", "pow2-cfg", "pow2-blind", "random"])
    s.add_argument("--out", help="output file (directory for subset-sum); stdout if omitted")
    s.add_argument("--seed", type=int)
    s.add_argument("--n", type=int, default=2, help="exponent for pow2, vector length for subset-sum")
    s.add_argument("--k", type=int, default=2, help="bit width for subset-sum")
    s.add_argument("--u", type=int, nargs="+")
    s.add_argument("--v", type=int, nargs="+")
    s.add_argument("--t", type=int)
    s.add_argument("--kind", choices=["nfa", "blind", "ideal", "cfg"], default="nfa")
    s.add_argument("--states", type=int, default=3)
    s.add_argument("--counters", type=int, default=1)
    s.add_argument("--alphabet-size", type=int, default=2)
    s.add_argument("--length", type=int, default=2)
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DisagreementError as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR
    except (UsageError, SubseqError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
