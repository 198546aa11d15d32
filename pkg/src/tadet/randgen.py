"""Seeded random generators for one-clock automata and macro-configurations."""
from __future__ import annotations

import random
from fractions import Fraction

from .core.automaton import Rule, TimedAutomaton
from .core.constraints import TRUE, Atom, conj, disj
from .orbits import SymbolicMacroConfig, close_under, grid_positions


def _region_guard(x, kind, j):
    if kind == "eq":
        return Atom(x, "==", j)
    if kind == "open":
        return conj(Atom(x, ">", j), Atom(x, "<", j + 1))
    return Atom(x, ">", j)


def random_greedy_nta(rng: random.Random, n: int = 3, m: int = 2, alphabet=("a", "b"),
                      density: float = 0.35, name: str = "R") -> TimedAutomaton:
    """Random one-clock automaton whose non-resetting rules only fire strictly
    between consecutive integers below m (so it is greedily resetting)."""
    x = "x"
    locs = tuple(f"l{i}" for i in range(n))
    regions = [("eq", j) for j in range(m + 1)] + [("open", j) for j in range(m)] + [("gt", m)]
    rules = []
    for p in locs:
        for a in alphabet:
            for q in locs:
                if rng.random() > density:
                    continue
                reset = rng.random() < 0.5
                pool = regions if reset else [r for r in regions if r[0] == "open"]
                if not pool:
                    reset, pool = True, regions
                picked = rng.sample(pool, rng.randint(1, min(3, len(pool))))
                guard = TRUE if reset and rng.random() < 0.2 else disj(
                    *(_region_guard(x, *r) for r in picked))
                rules.append(Rule(p, a, guard, frozenset({x}) if reset else frozenset(), q))
    # make sure the constant m actually occurs
    rules.append(Rule(locs[0], alphabet[0], Atom(x, "==", m), frozenset({x}), locs[-1]))
    final = frozenset(q for q in locs if rng.random() < 0.4) or frozenset({locs[-1]})
    return TimedAutomaton(tuple(alphabet), locs, (x,), frozenset({locs[0]}), final,
                          tuple(rules), name)


def random_macro(rng: random.Random, locations, m: int, now: Fraction | None = None,
                 support_size: int = 2, density: float = 0.3) -> SymbolicMacroConfig:
    if now is None:
        now = Fraction(rng.randint(0, 20), 4)
    support = {now}
    tries = 0
    while len(support) < support_size and tries < 20:
        tries += 1
        u = now - Fraction(rng.randint(1, 8 * m - 1), 8)
        if all((u - s).denominator != 1 for s in support):
            support.add(u)
    items = []
    for pos in grid_positions(support, now, m)[1:]:
        for p in locations:
            if rng.random() < density:
                items.append((p, pos))
    return close_under(support, items, now, m)
