"""Bounded, enumerative equivalence check for macro-configurations.

Every word of length at most ``n`` is explored up to the obvious symmetry: the
timestamp of the next letter only matters through its position relative to the
points ``e + z`` (``e`` an endpoint of the current sets, ``z = 0..m``), so one
representative per point and per open segment between them is enough.
"""
from __future__ import annotations

from fractions import Fraction

from .core.automaton import TimedAutomaton, TimedWord
from .intervals import Span, USet, config_set_of, simulate_step
from .orbits import SymbolicMacroConfig

__all__ = ["bounded_difference", "time_choices"]


def _saturate(cs: dict[str, USet], now: Fraction, m: int) -> dict[str, USet]:
    # reset points older than now - m all behave alike from here on
    old = USet([Span(None, False, now - m, False)])
    out = {}
    for p, us in cs.items():
        if us.is_empty():
            continue
        if not (us & old).is_empty():
            us = us | old
        out[p] = us
    return out


def time_choices(endpoints, now: Fraction, m: int) -> list[Fraction]:
    cuts = sorted({e + z for e in endpoints | {now} for z in range(m + 1) if e + z > now})
    pts = [now] + cuts
    out = []
    for a, b in zip(pts, pts[1:]):
        out += [a, (a + b) / 2]
    out += [pts[-1], pts[-1] + 1]
    return out


def _key(cs: dict[str, USet], now: Fraction):
    return tuple(sorted((p, us.shifted(-now)) for p, us in cs.items()))


def bounded_difference(a: TimedAutomaton, x1: SymbolicMacroConfig, x2: SymbolicMacroConfig,
                       n: int) -> TimedWord | None:
    """A word of length <= n accepted from exactly one side, or None."""
    if x1.now != x2.now:
        raise ValueError("both sides must share now")
    m = a.max_constant
    final = a.final

    def accepting(cs):
        return any(p in final for p in cs)

    memo: dict = {}

    def explore(c1, c2, now, depth) -> tuple | None:
        if accepting(c1) != accepting(c2):
            return ()
        if depth == 0 or (not c1 and not c2):
            return None
        key = (_key(c1, now), _key(c2, now), depth)
        if key in memo:
            hit = memo[key]
            return None if hit is None else tuple((s, t + now) for s, t in hit)
        ends = set()
        for cs in (c1, c2):
            for us in cs.values():
                ends |= {e for e in us.endpoints() if e > now - m or e == now - m}
        found = None
        for t in time_choices(ends, now, m):
            for sym in a.alphabet:
                n1 = _saturate(simulate_step(a, c1, sym, t, m), t, m)
                n2 = _saturate(simulate_step(a, c2, sym, t, m), t, m)
                sub = explore(n1, n2, t, depth - 1)
                if sub is not None:
                    found = ((sym, t),) + sub
                    break
            if found is not None:
                break
        memo[key] = None if found is None else tuple((s, t - now) for s, t in found)
        return found

    c1 = _saturate(config_set_of(x1), x1.now, m)
    c2 = _saturate(config_set_of(x2), x2.now, m)
    res = explore(c1, c2, x1.now, n)
    return None if res is None else TimedWord(res)
