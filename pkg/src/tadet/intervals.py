"""Exact sets of rationals as finite unions of intervals, and an exact
simulator of one-clock automata on (possibly infinite) configuration sets.

This is deliberately naive: no abstraction, just interval arithmetic on the
actual reset points.  It serves as the reference against which the symbolic
inclusion engine is checked.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .core.automaton import TimedAutomaton, TimedWord, to_fraction
from .orbits import Point, SymbolicMacroConfig

__all__ = ["Span", "USet", "ConfigSet", "config_set_of", "simulate_step", "simulate_word"]


@dataclass(frozen=True, order=True)
class Span:
    """Interval with optional infinite lower end (``lo is None``)."""

    lo: Fraction | None
    lo_closed: bool
    hi: Fraction
    hi_closed: bool

    def is_empty(self) -> bool:
        if self.lo is None:
            return False
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and self.lo_closed and self.hi_closed)


def _lower_key(s: Span):
    # order lower ends; -inf first, closed before open at equal values
    return (0, 0, 0) if s.lo is None else (1, s.lo, 0 if s.lo_closed else 1)


class USet:
    """Finite union of disjoint, non-touching spans, kept sorted."""

    __slots__ = ("spans",)

    def __init__(self, spans: Iterable[Span] = ()):
        self.spans = _normalise(spans)

    @classmethod
    def point(cls, v) -> "USet":
        v = to_fraction(v)
        return cls([Span(v, True, v, True)])

    @classmethod
    def open(cls, lo, hi) -> "USet":
        return cls([Span(lo if lo is None else to_fraction(lo), False, to_fraction(hi), False)])

    def is_empty(self) -> bool:
        return not self.spans

    def __or__(self, other: "USet") -> "USet":
        return USet(self.spans + other.spans)

    def __and__(self, other: "USet") -> "USet":
        out = []
        for a in self.spans:
            for b in other.spans:
                out.append(_intersect(a, b))
        return USet(s for s in out if not s.is_empty())

    def __eq__(self, other):
        return isinstance(other, USet) and self.spans == other.spans

    def __hash__(self):
        return hash(self.spans)

    def endpoints(self) -> set[Fraction]:
        out = set()
        for s in self.spans:
            if s.lo is not None:
                out.add(s.lo)
            out.add(s.hi)
        return out

    def contains(self, v) -> bool:
        v = to_fraction(v)
        for s in self.spans:
            lo_ok = s.lo is None or s.lo < v or (s.lo_closed and s.lo == v)
            hi_ok = v < s.hi or (s.hi_closed and s.hi == v)
            if lo_ok and hi_ok:
                return True
        return False

    def shifted(self, d: Fraction) -> "USet":
        return USet(Span(None if s.lo is None else s.lo + d, s.lo_closed, s.hi + d, s.hi_closed)
                    for s in self.spans)

    def __repr__(self):
        parts = []
        for s in self.spans:
            lo = "-inf" if s.lo is None else str(s.lo)
            parts.append(("[" if s.lo_closed else "(") + f"{lo}, {s.hi}" + ("]" if s.hi_closed else ")"))
        return "USet(" + " ∪ ".join(parts) + ")"


def _intersect(a: Span, b: Span) -> Span:
    if a.lo is None:
        lo, lc = b.lo, b.lo_closed
    elif b.lo is None or a.lo > b.lo:
        lo, lc = a.lo, a.lo_closed
    elif b.lo > a.lo:
        lo, lc = b.lo, b.lo_closed
    else:
        lo, lc = a.lo, a.lo_closed and b.lo_closed
    if a.hi < b.hi:
        hi, hc = a.hi, a.hi_closed
    elif b.hi < a.hi:
        hi, hc = b.hi, b.hi_closed
    else:
        hi, hc = a.hi, a.hi_closed and b.hi_closed
    if lo is not None and (lo > hi):
        return Span(hi, False, hi, False)
    return Span(lo, lc, hi, hc)


def _normalise(spans: Iterable[Span]) -> tuple[Span, ...]:
    items = sorted((s for s in spans if not s.is_empty()), key=_lower_key)
    out: list[Span] = []
    for s in items:
        if out:
            p = out[-1]
            touches = s.lo is None or s.lo < p.hi or (
                s.lo == p.hi and (s.lo_closed or p.hi_closed))
            if touches:
                if s.hi > p.hi:
                    out[-1] = Span(p.lo, p.lo_closed, s.hi, s.hi_closed)
                elif s.hi == p.hi:
                    out[-1] = Span(p.lo, p.lo_closed, p.hi, p.hi_closed or s.hi_closed)
                continue
        out.append(s)
    return tuple(out)


# A configuration set maps each location to the set of reset points it holds.
ConfigSet = Mapping[str, USet]


def config_set_of(x: SymbolicMacroConfig) -> dict[str, USet]:
    out: dict[str, USet] = {}
    for slot in x.slots:
        d = slot.descriptor
        piece = USet.point(d.value) if isinstance(d, Point) else USet.open(d.lo, d.hi)
        for p in slot.locations:
            out[p] = out.get(p, USet()) | piece
    return out


def guard_preimage(a: TimedAutomaton, guard, t: Fraction, m: int) -> USet:
    """Reset points ``u`` with ``guard(t - u)``, for a one-clock automaton."""
    if a.k == 0:
        return USet([Span(None, False, t, True)]) if guard.holds({}) else USet()
    x = a.clocks[0]
    spans = []
    for j in range(m + 1):
        if guard.holds({x: Fraction(j)}):
            spans.append(Span(t - j, True, t - j, True))
        if j < m and guard.holds({x: Fraction(j) + Fraction(1, 2)}):
            spans.append(Span(t - j - 1, False, t - j, False))
    if guard.holds({x: Fraction(m + 1)}):
        spans.append(Span(None, False, t - m, False))
    return USet(spans)


def simulate_step(a: TimedAutomaton, cs: ConfigSet, sym: str, t, m: int | None = None) -> dict[str, USet]:
    t = to_fraction(t)
    m = a.max_constant if m is None else m
    out: dict[str, USet] = {}
    for p, us in cs.items():
        for r in a.outgoing(p, sym):
            hit = us & guard_preimage(a, r.guard, t, m)
            if hit.is_empty():
                continue
            new = USet.point(t) if r.resets else hit
            out[r.target] = out.get(r.target, USet()) | new
    return out


def simulate_word(a: TimedAutomaton, cs: ConfigSet, w: TimedWord) -> dict[str, USet]:
    cur = dict(cs)
    for sym, t in w:
        cur = simulate_step(a, cur, sym, t)
    return cur


def accepts_from(a: TimedAutomaton, cs: ConfigSet, w: TimedWord) -> bool:
    return any(p in a.final for p, us in simulate_word(a, cs, w).items() if not us.is_empty())
