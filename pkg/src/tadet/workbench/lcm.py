"""Lossy counter machines and the one-clock NTA accepting the words that are
not reversal-encodings of their runs.

A run ``(p0,u0) -d1-> (p1,u1) ... -dn-> (pn,un)`` is written last configuration
first: block ``j`` is ``p_j d_j u_j`` (block 0 has no instruction), control
letters of block ``j`` sit at time ``n - j`` and the counter letters of ``u_j``
(``c1``s, then ``c2``s, ...) strictly inside the following unit interval.  A
counter unit that survives from ``u_j`` to ``u_{j+1}`` appears in both blocks
exactly one time unit apart.

Valid encodings, in the canonical form this module produces and checks, are
the words with

* the block shape above, ``p_0`` initial, ``u_0`` empty and instruction
  endpoints matching the neighbouring control letters;
* control letters at times ``0, 1, 2, ...`` and every instruction at the time
  of its control letter;
* counter letters off the grid, at pairwise distinct times within a block;
* every counter letter of ``u_{j+1}`` matched one unit later in ``u_j``, except
  the last ``c`` of a block whose instruction is ``incr c``;
* for ``decr c`` the last ``c`` of ``u_j`` unmatched one unit earlier, and for
  ``ztest c`` no ``c`` in ``u_j``.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..core.automaton import AutomatonError, Rule, TimedAutomaton, TimedWord
from ..core.constraints import TRUE
from ..core.nta_format import parse_constraint
from ..core.ops import union

__all__ = [
    "Instruction", "Lcm", "LcmSyntaxError", "parse_lcm", "dump_lcm", "run_configurations",
    "reversal_encoding", "encode_lcm", "single_faults", "LcmConfigSet", "lcm_bounded_reach",
    "parse_run",
]

OPS = ("incr", "decr", "ztest")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*$")


class LcmSyntaxError(ValueError):
    def __init__(self, msg: str, line: int):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass(frozen=True)
class Instruction:
    source: str
    op: str
    counter: str
    target: str
    name: str


@dataclass(frozen=True)
class Lcm:
    counters: tuple[str, ...]
    locations: tuple[str, ...]
    initial: str
    instructions: tuple[Instruction, ...]

    def __post_init__(self):
        names = list(self.counters) + list(self.locations) + [d.name for d in self.instructions]
        bad = [n for n in names if not _IDENT.match(n)]
        if bad:
            raise AutomatonError(f"invalid names: {bad}")
        if len(set(names)) != len(names):
            raise AutomatonError("counter, location and instruction names must be distinct")
        if self.initial not in self.locations:
            raise AutomatonError(f"unknown initial location {self.initial!r}")
        for d in self.instructions:
            if d.op not in OPS:
                raise AutomatonError(f"unknown operation {d.op!r}")
            if d.source not in self.locations or d.target not in self.locations:
                raise AutomatonError(f"instruction {d.name} uses an unknown location")
            if d.counter not in self.counters:
                raise AutomatonError(f"instruction {d.name} uses an unknown counter")

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.locations + tuple(d.name for d in self.instructions) + self.counters

    def instruction(self, name: str) -> Instruction:
        for d in self.instructions:
            if d.name == name:
                return d
        raise KeyError(name)

    def index(self, counter: str) -> int:
        return self.counters.index(counter)


# -- text format ---------------------------------------------------------------------

def parse_lcm(text: str) -> Lcm:
    """Line format: ``counters 4`` (or a list of names), ``location p [init]``,
    ``instr p incr c1 q [as name]``; ``#`` starts a comment."""
    counters: tuple[str, ...] = ()
    locations: list[str] = []
    initial = None
    instrs: list[Instruction] = []
    for no, raw in enumerate(text.splitlines(), 1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        head, rest = words[0], words[1:]
        if head == "counters":
            if len(rest) == 1 and rest[0].isdigit():
                counters = tuple(f"c{i}" for i in range(1, int(rest[0]) + 1))
            elif rest:
                counters = tuple(rest)
            else:
                raise LcmSyntaxError("counters needs a count or names", no)
        elif head == "location":
            if not rest or any(w != "init" for w in rest[1:]):
                raise LcmSyntaxError("expected 'location <name> [init]'", no)
            locations.append(rest[0])
            if "init" in rest[1:]:
                if initial is not None:
                    raise LcmSyntaxError("second initial location", no)
                initial = rest[0]
        elif head == "instr":
            if len(rest) == 4:
                name = f"i{len(instrs)}"
            elif len(rest) == 6 and rest[4] == "as":
                name = rest[5]
            else:
                raise LcmSyntaxError("expected 'instr <src> <op> <counter> <dst> [as <name>]'", no)
            if rest[1] not in OPS:
                raise LcmSyntaxError(f"unknown operation {rest[1]!r}", no)
            instrs.append(Instruction(rest[0], rest[1], rest[2], rest[3], name))
        else:
            raise LcmSyntaxError(f"unknown directive {head!r}", no)
    if initial is None:
        raise LcmSyntaxError("no initial location", 0)
    return Lcm(counters, tuple(locations), initial, tuple(instrs))


def dump_lcm(m: Lcm) -> str:
    out = ["counters " + " ".join(m.counters)]
    out += [f"location {p}" + (" init" if p == m.initial else "") for p in m.locations]
    out += [f"instr {d.source} {d.op} {d.counter} {d.target} as {d.name}" for d in m.instructions]
    return "\n".join(out) + "\n"


# -- runs ------------------------------------------------------------------------------

Valuation = tuple[int, ...]


def _apply(m: Lcm, d: Instruction, u: Valuation) -> Valuation | None:
    i = m.index(d.counter)
    if d.op == "incr":
        return u[:i] + (u[i] + 1,) + u[i + 1:]
    if d.op == "decr":
        return None if u[i] == 0 else u[:i] + (u[i] - 1,) + u[i + 1:]
    return u if u[i] == 0 else None


def parse_run(m: Lcm, text: str) -> list[tuple[str, Valuation | None]]:
    """``"i0 i1:1,0,0,0 i2"``: instruction names, optionally with the valuation
    reached (lossy steps); without one the exact effect is taken."""
    steps = []
    for item in text.split():
        name, _, vals = item.partition(":")
        v = tuple(int(x) for x in vals.split(",")) if vals else None
        if v is not None and len(v) != len(m.counters):
            raise ValueError(f"valuation {vals!r} does not have {len(m.counters)} entries")
        steps.append((name, v))
    return steps


def run_configurations(m: Lcm, steps: Sequence[tuple[str, Valuation | None]]):
    """Check a run and return its configurations ``(p_j, u_j)``, j = 0..n."""
    p, u = m.initial, (0,) * len(m.counters)
    out = [(p, u)]
    for name, v in steps:
        d = m.instruction(name)
        if d.source != p:
            raise ValueError(f"instruction {name} does not start in {p}")
        top = _apply(m, d, u)
        if top is None:
            raise ValueError(f"instruction {name} is not enabled at {u}")
        if v is None:
            v = top
        if any(a > b or a < 0 for a, b in zip(v, top)):
            raise ValueError(f"{v} is not below {top}")
        p, u = d.target, tuple(v)
        out.append((p, u))
    return out


@dataclass
class _Block:
    time: int
    location: str
    instruction: Instruction | None
    units: list[tuple[str, Fraction]]  # (counter, offset in the unit interval)


def _layout(m: Lcm, steps) -> list[_Block]:
    """Blocks in word order with a fixed offset per counter unit."""
    configs = run_configurations(m, steps)
    n = len(configs) - 1
    k = len(m.counters)
    live: list[list[Fraction]] = [[] for _ in range(k)]
    per_config = [[]]
    for j, (name, _) in enumerate(steps, 1):
        d = m.instruction(name)
        i = m.index(d.counter)
        cur = [list(xs) for xs in live]
        if d.op == "incr":
            hi = Fraction(i + 1, k)
            lo = cur[i][-1] if cur[i] else Fraction(i, k)
            cur[i].append((lo + hi) / 2)
        elif d.op == "decr":
            cur[i].pop()
        target = configs[j][1]
        live = [xs[:target[c]] for c, xs in enumerate(cur)]
        per_config.append([(m.counters[c], o) for c in range(k) for o in live[c]])
    blocks = []
    for j in range(n, -1, -1):
        d = m.instruction(steps[j - 1][0]) if j else None
        blocks.append(_Block(n - j, configs[j][0], d, per_config[j]))
    return blocks


def _word(blocks: list[_Block]) -> TimedWord:
    letters = []
    for b in blocks:
        letters.append((b.location, Fraction(b.time)))
        if b.instruction is not None:
            letters.append((b.instruction.name, Fraction(b.time)))
        letters += [(c, b.time + o) for c, o in b.units]
    return TimedWord(letters)


def reversal_encoding(m: Lcm, steps) -> TimedWord:
    return _word(_layout(m, steps))


def single_faults(m: Lcm, steps) -> dict[str, TimedWord]:
    """One perturbed encoding per fault class: a shifted control pair, a
    shifted counter letter, and a dropped persistence partner."""
    blocks = _layout(m, steps)
    times = sorted({t for _, t in _word(blocks)})
    gaps = [b - a for a, b in zip(times, times[1:])]
    eps = min(gaps + [Fraction(1)]) / 4
    out = {}
    if len(blocks) > 1:
        word = _word(blocks)
        j = len(blocks) // 2
        out["control"] = TimedWord(
            (a, t + eps) if t == blocks[j].time and (a == blocks[j].location or (
                blocks[j].instruction is not None and a == blocks[j].instruction.name)) else (a, t)
            for a, t in word)
    # a unit with a partner one block later whose partner is mandatory
    for j in range(len(blocks) - 1):
        b, nxt = blocks[j], blocks[j + 1]
        last = {}
        for c, o in b.units:
            last[c] = o
        for c, o in b.units:
            exempt = b.instruction.op == "incr" and b.instruction.counter == c and last[c] == o
            if exempt or (c, o) not in nxt.units:
                continue
            word = list(_word(blocks))
            at = word.index((c, b.time + o))
            word[at] = (c, b.time + o + eps)
            out["counter"] = TimedWord(word)
            word = list(_word(blocks))
            word.remove((c, nxt.time + o))
            out["partner"] = TimedWord(word)
            return out
    return out


# -- the encoder -------------------------------------------------------------------------

def _x(text: str):
    return parse_constraint(text)


def _shape_component(m: Lcm) -> TimedAutomaton:
    """Complement of the (untimed) block-shape language, as a complete DFA."""
    sigma = m.alphabet
    locs, instrs = set(m.locations), {d.name: d for d in m.instructions}
    cidx = {c: i for i, c in enumerate(m.counters)}

    def need(d):
        return None if d is None or d.op == "incr" else (d.op, d.counter)

    def step(state, a):
        kind = state[0]
        if kind == "start":
            return ("P", a, None) if a in locs else None
        if kind == "P":
            _, p, req = state
            d = instrs.get(a)
            if d is not None and d.target == p:
                return ("U", d.name, -1, req, False)
            return None
        _, name, last, req, seen = state
        d = instrs[name]
        if a in cidx:
            i = cidx[a]
            if i < last or (req is not None and req == ("ztest", a)):
                return None
            return ("U", name, i, req, seen or req == ("decr", a))
        if a in locs and a == d.source and not (req is not None and req[0] == "decr" and not seen):
            return ("P", a, need(d))
        return None

    def accepting(state):
        return state is not None and state[0] == "P" and state[1] == m.initial and (
            state[2] is None or state[2][0] != "decr")

    start = ("start",)
    index = {start: 0, None: 1}
    order = [start, None]
    rules = []
    i = 0
    while i < len(order):
        s = order[i]
        for a in sigma:
            t = step(s, a) if s is not None else None
            if t not in index:
                index[t] = len(order)
                order.append(t)
            rules.append(Rule(f"s{i}", a, TRUE, frozenset(), f"s{index[t]}"))
        i += 1
    names = tuple(f"s{j}" for j in range(len(order)))
    final = frozenset(f"s{j}" for j, s in enumerate(order) if not accepting(s))
    return TimedAutomaton(sigma, names, ("x",), frozenset({"s0"}), final, tuple(rules), "shape")


def _error_sink(sigma, rules, name="err"):
    rules += [Rule(name, a, TRUE, frozenset(), name) for a in sigma]


def _timing_component(m: Lcm) -> TimedAutomaton:
    sigma = m.alphabet
    instrs = [d.name for d in m.instructions]
    rules: list[Rule] = []
    no_reset: frozenset[str] = frozenset()
    reset = frozenset({"x"})
    for a in sigma:
        # the first letter is at time 0
        rules.append(Rule("first", a, _x("x > 0"), no_reset, "err"))
        rules.append(Rule("scan", a, TRUE, no_reset, "scan"))
    for p in m.locations:
        rules.append(Rule("scan", p, TRUE, reset, "ctl"))
    for a in sigma:
        if a in m.locations:
            # consecutive control letters exactly one unit apart
            rules.append(Rule("ctl", a, _x("x < 1 || x > 1"), no_reset, "err"))
        elif a in instrs:
            rules.append(Rule("ctl", a, _x("x > 0"), no_reset, "err"))
            rules.append(Rule("ctl", a, _x("x == 0"), no_reset, "ctl"))
        else:
            rules.append(Rule("ctl", a, _x("x == 0 || x >= 1"), no_reset, "err"))
            rules.append(Rule("ctl", a, _x("x > 0 && x < 1"), no_reset, "ctl"))
    for c in m.counters:
        rules.append(Rule("scan", c, TRUE, reset, "cnt"))
        for c2 in m.counters:
            rules.append(Rule("cnt", c2, _x("x == 0"), no_reset, "err"))
    _error_sink(sigma, rules)
    return TimedAutomaton(sigma, ("first", "scan", "ctl", "cnt", "err"), ("x",),
                          frozenset({"first", "scan"}), frozenset({"err"}), tuple(rules), "timing")


def _partner_component(m: Lcm, c: str) -> TimedAutomaton:
    """Guess a ``c`` whose partner one unit later is missing."""
    sigma = m.alphabet
    rules: list[Rule] = []
    none: frozenset[str] = frozenset()
    reset = frozenset({"x"})
    locs = ["scan", "watch", "err"]
    for a in sigma:
        rules.append(Rule("scan", a, TRUE, none, "scan"))
    for d in m.instructions:
        blk = f"b_{d.name}"
        locs.append(blk)
        rules.append(Rule("scan", d.name, TRUE, none, blk))
        for c2 in m.counters:
            rules.append(Rule(blk, c2, TRUE, none, blk))
        if d.op == "incr" and d.counter == c:
            # the incremented unit is the last c: the guessed one must be followed by a c
            more = f"m_{d.name}"
            locs.append(more)
            rules.append(Rule(blk, c, TRUE, reset, more))
            for c2 in m.counters:
                if c2 != c:
                    rules.append(Rule(more, c2, TRUE, none, more))
            rules.append(Rule(more, c, TRUE, none, "watch"))
        else:
            rules.append(Rule(blk, c, TRUE, reset, "watch"))
    for a in sigma:
        rules.append(Rule("watch", a, _x("x < 1"), none, "watch"))
        if a != c:
            rules.append(Rule("watch", a, _x("x == 1"), none, "watch"))
        rules.append(Rule("watch", a, _x("x > 1"), none, "err"))
    _error_sink(sigma, rules)
    return TimedAutomaton(sigma, tuple(locs), ("x",), frozenset({"scan"}),
                          frozenset({"watch", "err"}), tuple(rules), f"partner_{c}")


def _decrement_component(m: Lcm, c: str) -> TimedAutomaton | None:
    """For ``decr c``: the last ``c`` of the next block has a predecessor."""
    decs = [d for d in m.instructions if d.op == "decr" and d.counter == c]
    if not decs:
        return None
    sigma = m.alphabet
    rules: list[Rule] = []
    none: frozenset[str] = frozenset()
    reset = frozenset({"x"})
    locs = ["scan", "track", "last", "err"]
    for a in sigma:
        rules.append(Rule("scan", a, TRUE, none, "scan"))
    for d in decs:
        blk = f"b_{d.name}"
        locs.append(blk)
        rules.append(Rule("scan", d.name, TRUE, none, blk))
        for c2 in m.counters:
            rules.append(Rule(blk, c2, TRUE, none, blk))
        rules.append(Rule(blk, c, TRUE, reset, "track"))
    for a in sigma:
        rules.append(Rule("track", a, _x("x < 1"), none, "track"))
        if a != c:
            rules.append(Rule("track", a, _x("x == 1"), none, "track"))
    rules.append(Rule("track", c, _x("x == 1"), none, "last"))
    for c2 in m.counters:
        if c2 != c:
            rules.append(Rule("last", c2, TRUE, none, "last"))
    for p in m.locations:
        rules.append(Rule("last", p, TRUE, none, "err"))
    _error_sink(sigma, rules)
    return TimedAutomaton(sigma, tuple(locs), ("x",), frozenset({"scan"}),
                          frozenset({"last", "err"}), tuple(rules), f"decr_{c}")


def encode_lcm(m: Lcm, name: str = "lcm") -> TimedAutomaton:
    """One-clock NTA (constant 1) accepting every word that is not a
    reversal-encoding of a run of ``m``."""
    parts = [_shape_component(m), _timing_component(m)]
    parts += [_partner_component(m, c) for c in m.counters]
    parts += [p for p in (_decrement_component(m, c) for c in m.counters) if p is not None]
    return union(parts, name)


# -- bounded reachability ---------------------------------------------------------------

@dataclass
class LcmConfigSet:
    configs: frozenset[tuple[str, Valuation]]
    cap: int
    # True: closed strictly below the cap; False: the cap was hit; None: gave up
    bounded: bool | None
    explored: int = 0
    notes: list[str] = field(default_factory=list)

    def is_downward_closed(self) -> bool:
        for p, u in self.configs:
            for i, x in enumerate(u):
                if x and (p, u[:i] + (x - 1,) + u[i + 1:]) not in self.configs:
                    return False
        return True


def lcm_bounded_reach(m: Lcm, cap: int, max_configs: int = 100_000) -> LcmConfigSet:
    """Reachable configurations under lossy semantics with counters truncated
    at ``cap`` (an exploration aid; finiteness itself is undecidable)."""
    k = len(m.counters)
    start = (m.initial, (0,) * k)
    seen = {start}
    todo = deque([start])
    hit_cap = False

    def add(c):
        if c not in seen:
            seen.add(c)
            todo.append(c)

    while todo:
        if len(seen) > max_configs:
            return LcmConfigSet(frozenset(seen), cap, None, len(seen),
                                [f"more than {max_configs} configurations"])
        p, u = todo.popleft()
        if any(x >= cap for x in u):
            hit_cap = True
        # losing one unit at a time gives the whole downward closure
        for i, x in enumerate(u):
            if x:
                add((p, u[:i] + (x - 1,) + u[i + 1:]))
        for d in m.instructions:
            if d.source != p:
                continue
            v = _apply(m, d, u)
            if v is None:
                continue
            if any(x > cap for x in v):
                hit_cap = True
                v = tuple(min(x, cap) for x in v)
            add((d.target, v))
    return LcmConfigSet(frozenset(seen), cap, not hit_cap, len(seen))
