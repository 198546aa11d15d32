"""Reading and writing the line-oriented ``.nta`` format, plus DOT export."""
from __future__ import annotations

import re
from dataclasses import dataclass

from .automaton import Rule, TimedAutomaton
from .constraints import FALSE, TRUE, Atom, Constraint, Not, OPS, conj, disj

__all__ = ["NtaSyntaxError", "parse_automaton", "parse_constraint", "dump_automaton", "to_dot"]


class NtaSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"\s*(?:(?P<num>-?\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<op><=|>=|==|&&|\|\||[<>()!\-]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise NtaSyntaxError(f"unexpected character {text[pos + stripped]!r}",
                                 line, col0 + pos + stripped)
        kind = mt.lastgroup
        toks.append(_Tok(kind, mt.group(kind), col0 + mt.start(kind)))
        pos = mt.end()
    return toks


class _ConstraintParser:
    # precedence: || < && < ! < atoms/parens
    def __init__(self, toks: list[_Tok], line: int, end_col: int):
        self.toks = toks
        self.i = 0
        self.line = line
        self.end_col = end_col

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg):
        tok = self.peek()
        raise NtaSyntaxError(msg, self.line, tok.col if tok else self.end_col)

    def take(self, text=None, kind=None):
        tok = self.peek()
        if tok is None or (text is not None and tok.text != text) or (kind and tok.kind != kind):
            want = text or kind
            self.error(f"expected {want!r}" if tok is None else f"expected {want!r}, got {tok.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Constraint:
        c = self.parse_or()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek().text!r}")
        return c

    def parse_or(self):
        parts = [self.parse_and()]
        while self.peek() is not None and self.peek().text == "||":
            self.i += 1
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else disj(*parts)

    def parse_and(self):
        parts = [self.parse_unary()]
        while self.peek() is not None and self.peek().text == "&&":
            self.i += 1
            parts.append(self.parse_unary())
        return parts[0] if len(parts) == 1 else conj(*parts)

    def parse_unary(self):
        tok = self.peek()
        if tok is None:
            self.error("expected a constraint")
        if tok.text == "!":
            self.i += 1
            return Not(self.parse_unary())
        if tok.text == "(":
            self.i += 1
            c = self.parse_or()
            self.take(")")
            return c
        if tok.kind == "ident":
            if tok.text == "true":
                self.i += 1
                return TRUE
            if tok.text == "false":
                self.i += 1
                return FALSE
            return self.parse_atom()
        self.error(f"unexpected {tok.text!r}")

    def parse_atom(self):
        clock = self.take(kind="ident").text
        other = None
        if self.peek() is not None and self.peek().text == "-":
            self.i += 1
            other = self.take(kind="ident").text
        op = self.peek()
        if op is None or op.text not in OPS:
            self.error("expected a comparison operator")
        self.i += 1
        const = int(self.take(kind="num").text)
        return Atom(clock, op.text, const, other)


def parse_constraint(text: str, line: int = 1, col: int = 1) -> Constraint:
    toks = _tokenize(text, line, col)
    return _ConstraintParser(toks, line, col + len(text)).parse()


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*$")
# letters may also be punctuation such as the separator "$"
_SYMBOL = re.compile(r"[^\s@#{},]+$")
_TRANS = re.compile(
    r"trans\s+(?P<src>\S+)\s*->\s*(?P<dst>\S+)\s+on\s+(?P<sym>\S+)\s+when\s+(?P<guard>.*?)"
    r"(?:\s+reset\s*\{(?P<resets>[^}]*)\})?\s*$"
)


def _check_ident(name: str, line: int, col: int, pattern=_IDENT):
    if not pattern.match(name):
        raise NtaSyntaxError(f"bad identifier {name!r}", line, col)


def parse_automaton(text: str) -> TimedAutomaton:
    name = "A"
    alphabet: list[str] = []
    clocks: list[str] = []
    locations: list[str] = []
    initial: set[str] = set()
    final: set[str] = set()
    rules: list[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        words = line.split()
        head = words[0]
        col = indent + 1
        if head == "automaton":
            if len(words) != 2:
                raise NtaSyntaxError("expected 'automaton <name>'", lineno, col)
            name = words[1]
        elif head in ("alphabet", "clocks"):
            target = alphabet if head == "alphabet" else clocks
            for w in words[1:]:
                _check_ident(w, lineno, line.index(w, col) + 1,
                             _SYMBOL if head == "alphabet" else _IDENT)
                target.append(w)
        elif head == "location":
            if len(words) < 2:
                raise NtaSyntaxError("expected 'location <name> [init] [final]'", lineno, col)
            loc = words[1]
            _check_ident(loc, lineno, line.index(loc, col) + 1)
            locations.append(loc)
            for flag in words[2:]:
                if flag == "init":
                    initial.add(loc)
                elif flag == "final":
                    final.add(loc)
                else:
                    raise NtaSyntaxError(f"unknown location flag {flag!r}", lineno,
                                         line.rindex(flag) + 1)
        elif head == "trans":
            mt = _TRANS.match(line, indent)
            if not mt:
                raise NtaSyntaxError(
                    "expected 'trans <src> -> <dst> on <sym> when <constraint> [reset {..}]'",
                    lineno, col)
            guard = parse_constraint(mt.group("guard"), lineno, mt.start("guard") + 1)
            resets = frozenset(c.strip() for c in (mt.group("resets") or "").split(",") if c.strip())
            rules.append(Rule(mt.group("src"), mt.group("sym"), guard, resets, mt.group("dst")))
        else:
            raise NtaSyntaxError(f"unknown directive {head!r}", lineno, col)
    return TimedAutomaton(tuple(alphabet), tuple(locations), tuple(clocks),
                          frozenset(initial), frozenset(final), tuple(rules), name)


def dump_automaton(a: TimedAutomaton) -> str:
    out = [f"automaton {a.name}", "alphabet " + " ".join(a.alphabet)]
    out.append(("clocks " + " ".join(a.clocks)).rstrip())
    for p in a.locations:
        flags = (" init" if p in a.initial else "") + (" final" if p in a.final else "")
        out.append(f"location {p}{flags}")
    for r in a.rules:
        reset = f" reset {{{','.join(c for c in a.clocks if c in r.resets)}}}" if r.resets else ""
        out.append(f"trans {r.source} -> {r.target} on {r.symbol} when {r.guard}{reset}")
    return "\n".join(out) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(a: TimedAutomaton) -> str:
    out = [f'digraph "{_dot_escape(a.name)}" {{', "  rankdir=LR;"]
    for p in a.locations:
        shape = "doublecircle" if p in a.final else "circle"
        out.append(f'  "{_dot_escape(p)}" [shape={shape}];')
    for i, p in enumerate(sorted(a.initial)):
        out.append(f'  "__init{i}" [shape=point];')
        out.append(f'  "__init{i}" -> "{_dot_escape(p)}";')
    for r in a.rules:
        label = f"{r.symbol}, {r.guard}"
        if r.resets:
            label += " / " + ",".join(sorted(r.resets)) + ":=0"
        out.append(f'  "{_dot_escape(r.source)}" -> "{_dot_escape(r.target)}" '
                   f'[label="{_dot_escape(label)}"];')
    out.append("}")
    return "\n".join(out) + "\n"
