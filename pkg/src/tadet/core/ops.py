"""Structural operations: determinism, completion, complement, product,
emptiness and greedy-reset normalisation."""
from __future__ import annotations

from collections import deque
from fractions import Fraction

from .automaton import Configuration, Rule, TimedAutomaton, TimedWord
from .constraints import Atom, Constraint, TRUE, conj, disj, negate
from .semantics import apply_rule, initial_configurations, rule_fires


class NotDeterministicError(ValueError):
    pass


def _valuation(clocks, values):
    return dict(zip(clocks, values))


def _clock_regions(a: TimedAutomaton):
    from ..regions import enumerate_regions

    return enumerate_regions(a.k, a.max_constant)


def is_deterministic(a: TimedAutomaton) -> bool:
    if len(a.initial) != 1:
        return False
    regions = None
    for rules in a.rules_from.values():
        if len(rules) < 2:
            continue
        if regions is None:
            regions = _clock_regions(a)
        for reg in regions:
            val = _valuation(a.clocks, reg.realiser)
            enabled = {(r.resets, r.target) for r in rules if r.guard.holds(val)}
            if len(enabled) > 1:
                return False
    return True


def fresh_name(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "_"
    return name


def make_total(a: TimedAutomaton) -> TimedAutomaton:
    if not is_deterministic(a):
        raise NotDeterministicError("make_total needs a deterministic automaton")
    sink = fresh_name("sink", set(a.locations))
    rules = list(a.rules)
    for p in a.locations:
        for sym in a.alphabet:
            covered = disj(*(r.guard for r in a.outgoing(p, sym)))
            rest = negate(covered)
            if rest != TRUE and not _satisfiable(a, rest):
                continue
            rules.append(Rule(p, sym, rest, frozenset(), sink))
    rules.extend(Rule(sink, sym, TRUE, frozenset(), sink) for sym in a.alphabet)
    return a.with_changes(locations=a.locations + (sink,), rules=tuple(rules))


def _satisfiable(a: TimedAutomaton, c: Constraint) -> bool:
    return any(c.holds(_valuation(a.clocks, reg.realiser)) for reg in _clock_regions(a))


def complement_dta(a: TimedAutomaton) -> TimedAutomaton:
    t = make_total(a)
    return t.with_changes(final=frozenset(t.locations) - t.final, name=f"not_{a.name}")


def product(a: TimedAutomaton, b: TimedAutomaton) -> TimedAutomaton:
    if set(a.alphabet) != set(b.alphabet):
        raise ValueError("product needs equal alphabets")
    taken = set(a.clocks)
    ren = {}
    for c in b.clocks:
        new = fresh_name(c, taken)
        ren[c] = new
        taken.add(new)
    bclocks = tuple(ren[c] for c in b.clocks)

    def pair(p, q):
        return f"{p}__{q}"

    init = [(p, q) for p in sorted(a.initial) for q in sorted(b.initial)]
    seen = set(init)
    todo = deque(init)
    rules = []
    while todo:
        p, q = todo.popleft()
        for sym in a.alphabet:
            for ra in a.outgoing(p, sym):
                for rb in b.outgoing(q, sym):
                    guard = conj(ra.guard, rb.guard.rename(ren))
                    resets = ra.resets | frozenset(ren[c] for c in rb.resets)
                    tgt = (ra.target, rb.target)
                    rules.append(Rule(pair(p, q), sym, guard, resets, pair(*tgt)))
                    if tgt not in seen:
                        seen.add(tgt)
                        todo.append(tgt)
    locs = sorted(seen)
    return TimedAutomaton(
        a.alphabet, tuple(pair(*x) for x in locs), a.clocks + bclocks,
        frozenset(pair(*x) for x in init),
        frozenset(pair(p, q) for p, q in locs if p in a.final and q in b.final),
        tuple(rules), f"{a.name}_x_{b.name}",
    )


def is_empty(a: TimedAutomaton) -> tuple[bool, TimedWord | None]:
    """Region-graph reachability; returns ``(empty, witness)``."""
    from ..regions import region_of, timestamp_region_choices

    m = a.max_constant
    parent: dict = {}
    todo = deque()
    for c in sorted(initial_configurations(a)):
        key = (c.location, region_of(c.valuation(), a.k, m))
        if key not in parent:
            parent[key] = (None, None, c)
            todo.append(key)
    while todo:
        key = todo.popleft()
        c = parent[key][2]
        if c.location in a.final:
            word = []
            while parent[key][0] is not None:
                prev, letter, _ = parent[key]
                word.append(letter)
                key = prev
            return False, TimedWord(reversed(word))
        for _, t in timestamp_region_choices(c.mu, c.now, m):
            for sym in a.alphabet:
                for r in a.outgoing(c.location, sym):
                    if not rule_fires(a, r, c, t):
                        continue
                    d = apply_rule(a, r, c, t)
                    dkey = (d.location, region_of(d.valuation(), a.k, m))
                    if dkey not in parent:
                        parent[dkey] = (key, (sym, t), d)
                        todo.append(dkey)
    return True, None


TOP = "T"


def _one_clock_regions(m: int):
    # (kind, j) for the 2m+2 one-clock regions
    out = []
    for j in range(m + 1):
        out.append(("eq", j))
        if j < m:
            out.append(("open", j))
    out.append(("gt", m))
    return out


def _region_guard(x: str, kind: str, j: int) -> Constraint:
    if kind == "eq":
        return Atom(x, "==", j)
    if kind == "open":
        return conj(Atom(x, ">", j), Atom(x, "<", j + 1))
    return Atom(x, ">", j)


def greedy_reset_normalise(a: TimedAutomaton) -> TimedAutomaton:
    """Equivalent one-clock automaton that resets whenever the clock would
    otherwise become integral or exceed the maximal constant.

    A location ``(p, r)`` remembers the integral value ``r`` the original clock
    had at the last reset of the new clock (``T`` for "above m").
    """
    if a.k != 1:
        raise ValueError("greedy_reset_normalise needs a one-clock automaton")
    x = a.clocks[0]
    m = a.max_constant
    regs = _one_clock_regions(m)

    def name(p, r):
        return f"{p}__{r}"

    def orig_value(r, kind, j):
        if r == TOP or kind == "gt":
            return Fraction(m + 1)
        if kind == "eq":
            return Fraction(r + j)
        return Fraction(r + j) + Fraction(1, 2)

    init = [(p, 0) for p in sorted(a.initial)]
    seen = set(init)
    todo = deque(init)
    rules = []
    while todo:
        p, r = todo.popleft()
        for sym in a.alphabet:
            for rule in a.outgoing(p, sym):
                for kind, j in regs:
                    if not rule.guard.holds({x: orig_value(r, kind, j)}):
                        continue
                    if x in rule.resets:
                        reset, r2 = True, 0
                    elif kind == "open" and r != TOP and r + j + 1 <= m:
                        reset, r2 = False, r
                    else:
                        reset = True
                        if kind == "eq" and r != TOP and r + j <= m:
                            r2 = r + j
                        else:
                            r2 = TOP
                    tgt = (rule.target, r2)
                    rules.append(Rule(name(p, r), sym, _region_guard(x, kind, j),
                                      frozenset({x}) if reset else frozenset(), name(*tgt)))
                    if tgt not in seen:
                        seen.add(tgt)
                        todo.append(tgt)
    order = sorted(seen, key=lambda s: (a.locations.index(s[0]), m + 1 if s[1] == TOP else s[1]))
    return TimedAutomaton(
        a.alphabet, tuple(name(*s) for s in order), (x,),
        frozenset(name(*s) for s in init),
        frozenset(name(*s) for s in order if s[0] in a.final),
        tuple(rules), a.name,
    )


def is_greedily_resetting(a: TimedAutomaton) -> bool:
    """One clock, and no non-resetting rule can fire at an integral value or above m."""
    if a.k == 0:
        return True
    if a.k != 1:
        return False
    x = a.clocks[0]
    m = a.max_constant
    bad = [Fraction(j) for j in range(m + 1)] + [Fraction(m) + Fraction(1, 2)]
    return all(
        not r.guard.holds({x: v}) for r in a.rules if not r.resets for v in bad
    )


def check_greedy_configuration(c: Configuration, m: int) -> bool:
    """A reachable configuration of a greedily resetting automaton keeps
    ``now - m < mu <= now`` and is integral only at ``mu == now``."""
    for mu in c.mu:
        v = c.now - mu
        if v != 0 and (v >= m or v.denominator == 1):
            return False
    return True


def union(parts: list[TimedAutomaton], name: str = "U") -> TimedAutomaton:
    """Disjoint union over shared clocks: part i's locations get prefix ``u<i>_``
    and all initial locations are kept, so a run picks its part at the start."""
    alphabet = tuple(dict.fromkeys(s for a in parts for s in a.alphabet))
    clocks = tuple(dict.fromkeys(c for a in parts for c in a.clocks))
    locs, init, final, rules = [], set(), set(), []
    for i, a in enumerate(parts):
        pre = f"u{i}_"
        locs += [pre + p for p in a.locations]
        init |= {pre + p for p in a.initial}
        final |= {pre + p for p in a.final}
        rules += [Rule(pre + r.source, r.symbol, r.guard, r.resets, pre + r.target)
                  for r in a.rules]
    return TimedAutomaton(alphabet, tuple(locs), clocks, frozenset(init), frozenset(final),
                          tuple(rules), name)


__all__ = [
    "union", "NotDeterministicError", "is_deterministic", "make_total", "complement_dta", "product",
    "is_empty", "greedy_reset_normalise", "is_greedily_resetting", "check_greedy_configuration",
    "fresh_name",
]
