"""Line-oriented text formats for models; the kind is chosen by the ``@`` header."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Union

from .automata import EPS, Alphabet, Nfa, state_key
from .blind import BlindAutomaton
from .errors import ParseError
from .grammar import Cfg
from .ideals import Ideal, normalize, parse_seq

Model = Union[Ideal, Nfa, BlindAutomaton, Cfg]

_DELTA = re.compile(r"^\((-?\d+(?:\s*,\s*-?\d+)*)?\)$")
_TOKEN_OK = re.compile(r"^[^\s()#]+$")


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _field(no: int, line: str):
    key, sep, rest = line.partition(":")
    if not sep:
        raise ParseError(f"line {no}: expected 'key: value', got {line!r}")
    return key.strip(), rest.strip()


def _alphabet(no: int, value: str) -> Alphabet:
    try:
        return Alphabet(tuple(value.split()))
    except ValueError as e:
        raise ParseError(f"line {no}: {e}") from None


def _header(text: str):
    body = list(_lines(text))
    if not body or not body[0][1].startswith("@"):
        raise ParseError("missing '@' header line (expected @nfa, @ideal, @blind k=K or @cfg)")
    no, head = body[0]
    parts = head[1:].split()
    kind = parts[0] if parts else ""
    return kind, parts[1:], no, body[1:]


def _automaton_fields(body, kind: str):
    fields = {"alphabet": None, "states": None, "initial": None, "final": None}
    trans = []
    for no, line in body:
        key, value = _field(no, line)
        if key == "trans":
            trans.append((no, value.split()))
        elif key in fields:
            if fields[key] is not None:
                raise ParseError(f"line {no}: duplicate '{key}' field")
            fields[key] = (no, value)
        else:
            raise ParseError(f"line {no}: unknown field {key!r} in @{kind}")
    for key in ("alphabet", "states", "initial"):
        if fields[key] is None:
            raise ParseError(f"@{kind}: missing '{key}' field")
    alphabet = _alphabet(*fields["alphabet"])
    states = fields["states"][1].split()
    initial = fields["initial"][1]
    finals = fields["final"][1].split() if fields["final"] else []
    return alphabet, states, initial, finals, trans


def _label(no: int, tok: str, alphabet: Alphabet):
    if tok == "eps":
        return EPS
    if tok not in alphabet:
        raise ParseError(f"line {no}: symbol {tok!r} is not in the alphabet")
    return tok


def _parse_nfa(body) -> Nfa:
    alphabet, states, initial, finals, raw = _automaton_fields(body, "nfa")
    trans = []
    for no, toks in raw:
        if len(toks) != 3:
            raise ParseError(f"line {no}: expected 'trans: p symbol q'")
        trans.append((toks[0], _label(no, toks[1], alphabet), toks[2]))
    try:
        return Nfa(frozenset(states), alphabet, frozenset(trans), initial, frozenset(finals))
    except ValueError as e:
        raise ParseError(str(e)) from None


def _parse_delta(no: int, tok: str, k: int) -> tuple:
    m = _DELTA.match(tok)
    if not m:
        raise ParseError(f"line {no}: malformed counter vector {tok!r}")
    d = tuple(int(c) for c in m.group(1).split(",")) if m.group(1) else ()
    if len(d) != k or any(c not in (-1, 0, 1) for c in d):
        raise ParseError(f"line {no}: counter vector {tok!r} must have {k} entries in {{-1,0,1}}")
    return d


def _parse_blind(args, hno: int, body) -> BlindAutomaton:
    k = None
    for a in args:
        key, _, value = a.partition("=")
        if key == "k" and value.isdigit():
            k = int(value)
        else:
            raise ParseError(f"line {hno}: unexpected header argument {a!r}")
    if k is None:
        raise ParseError(f"line {hno}: @blind needs a counter count, e.g. '@blind k=2'")
    alphabet, states, initial, finals, raw = _automaton_fields(body, "blind")
    trans = []
    for no, toks in raw:
        # the vector may contain spaces after commas; rejoin the middle tokens
        if len(toks) < 4:
            raise ParseError(f"line {no}: expected 'trans: p symbol (d1,...,dk) q'")
        delta = _parse_delta(no, "".join(toks[2:-1]), k)
        trans.append((toks[0], _label(no, toks[1], alphabet), delta, toks[-1]))
    try:
        return BlindAutomaton(frozenset(states), alphabet, k, frozenset(trans), initial, frozenset(finals))
    except ValueError as e:
        raise ParseError(str(e)) from None


def _parse_ideal(body) -> Ideal:
    alphabet = seq = None
    for no, line in body:
        key, value = _field(no, line)
        if key == "alphabet" and alphabet is None:
            alphabet = _alphabet(no, value)
        elif key == "seq" and seq is None:
            seq = (no, value)
        else:
            raise ParseError(f"line {no}: unexpected or duplicate field {key!r} in @ideal")
    if alphabet is None or seq is None:
        raise ParseError("@ideal needs 'alphabet' and 'seq' fields")
    try:
        return normalize(parse_seq(seq[1], alphabet))
    except ValueError as e:
        raise ParseError(f"line {seq[0]}: {e}") from None


def _parse_cfg(body) -> Cfg:
    terminals = start = None
    declared = set()
    prods = []
    for no, line in body:
        key, value = _field(no, line)
        if key == "terminals" and terminals is None:
            terminals = _alphabet(no, value)
        elif key == "start" and start is None:
            start = value
        elif key == "nonterminals":
            declared.update(value.split())
        elif key == "prod":
            lhs, arrow, rhs = value.partition("->")
            lhs = lhs.strip()
            if not arrow or not lhs or " " in lhs:
                raise ParseError(f"line {no}: expected 'prod: A -> symbols'")
            prods.append((no, lhs, tuple(s for s in rhs.split() if s != "eps")))
        else:
            raise ParseError(f"line {no}: unexpected or duplicate field {key!r} in @cfg")
    if terminals is None or start is None:
        raise ParseError("@cfg needs 'terminals' and 'start' fields")
    nts = declared | {start} | {lhs for _, lhs, _ in prods}
    for no, _, body_syms in prods:
        for s in body_syms:
            if s not in terminals and s not in nts:
                nts.add(s)
    if "eps" in nts:
        raise ParseError("'eps' is reserved and cannot name a nonterminal")
    try:
        return Cfg(frozenset(nts), terminals, frozenset((lhs, b) for _, lhs, b in prods), start)
    except ValueError as e:
        raise ParseError(str(e)) from None


def parse_model(text: str) -> Model:
    kind, args, hno, body = _header(text)
    if kind == "oca":
        raise ParseError(
            "one-counter automata (@oca) are not supported; use @blind for blind counter automata"
        )
    if kind != "blind" and args:
        raise ParseError(f"line {hno}: @{kind} takes no arguments")
    if kind == "nfa":
        return _parse_nfa(body)
    if kind == "blind":
        return _parse_blind(args, hno, body)
    if kind == "ideal":
        return _parse_ideal(body)
    if kind == "cfg":
        return _parse_cfg(body)
    raise ParseError(f"line {hno}: unknown model kind @{kind}")


def load_model(path) -> Model:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None
    return parse_model(text)


def _state_names(states, initial) -> dict:
    """Keep string names that are valid tokens; otherwise rename to q0, q1, ...
    with the initial state first and the rest in a stable order."""
    if all(isinstance(s, str) and _TOKEN_OK.match(s) and s != "eps" for s in states):
        return {s: s for s in states}
    order = [initial] + sorted((s for s in states if s != initial), key=state_key)
    return {s: f"q{i}" for i, s in enumerate(order)}


def _sorted_names(names, items):
    return sorted((names[s] for s in items), key=_natural)


def _natural(s: str):
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", s)]


def _automaton_text(header: str, m, render_trans) -> str:
    names = _state_names(m.states, m.initial)
    lines = [
        header,
        "alphabet: " + " ".join(m.alphabet.symbols),
        "states: " + " ".join(_sorted_names(names, m.states)),
        "initial: " + names[m.initial],
        "final: " + " ".join(_sorted_names(names, m.finals)),
    ]
    rows = sorted(render_trans(names, t) for t in m.transitions)
    lines += ["trans: " + " ".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def serialize(m: Model) -> str:
    if isinstance(m, Nfa):
        return _automaton_text(
            "@nfa", m, lambda n, t: (n[t[0]], "eps" if t[1] is EPS else t[1], n[t[2]])
        )
    if isinstance(m, BlindAutomaton):
        return _automaton_text(
            f"@blind k={m.k}",
            m,
            lambda n, t: (n[t[0]], "eps" if t[1] is EPS else t[1], "(" + ",".join(map(str, t[2])) + ")", n[t[3]]),
        )
    if isinstance(m, Ideal):
        return f"@ideal\nalphabet: {' '.join(m.ambient.symbols)}\nseq: {m}\n"
    if isinstance(m, Cfg):
        lines = ["@cfg", "terminals: " + " ".join(m.terminals.symbols), "start: " + m.start]
        mentioned = {m.start} | {A for A, _ in m.productions} | {s for _, b in m.productions for s in b}
        silent = m.nonterminals - mentioned
        if silent:
            lines.append("nonterminals: " + " ".join(sorted(silent)))
        for A, body in sorted(m.productions, key=lambda p: (p[0] != m.start, p[0], p[1])):
            lines.append(f"prod: {A} -> {' '.join(body)}".rstrip())
        return "\n".join(lines) + "\n"
    raise TypeError(f"cannot serialize {type(m).__name__}")


def save_model(m: Model, path) -> None:
    Path(path).write_text(serialize(m), encoding="utf-8")
