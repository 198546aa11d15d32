"""Inclusion and equivalence of configuration languages of a one-clock automaton.

The left side is a single tracked configuration (chosen existentially from a
macro-configuration, or a configuration of a separate deterministic
automaton); the right side is a whole macro-configuration of the one-clock
automaton ``A``, pushed forward as a set.  Both live on a common *frame*: the
fraction classes of ``now - e`` over the interesting reset points ``e``.  A
frame with ``c`` classes cuts ``[0, m]`` into ``2cm + 1`` positions (points
and open gaps, ordered by clock value) and everything above ``m`` goes into
one saturated bucket.  The right side stores a location set per position.

The search is breadth first over these abstract states with an antichain:
a new state is dropped when an old one with the same left side embeds into it
with pointwise smaller right-hand sets (a smaller right side is easier to
escape).  Termination is not guaranteed in general: right sides built from
intervals can develop ever more holes, and such states form an infinite
antichain.  A node budget and a cap on the frame size bound the search.
"""
from __future__ import annotations

from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Iterable, Sequence

from .core.automaton import Configuration, TimedAutomaton, TimedWord
from .core.ops import complement_dta, is_empty, product
from .core.semantics import accepts
from .intervals import accepts_from, config_set_of
from .orbits import SymbolicMacroConfig, close_under, frac
from .regions import interval_code

__all__ = [
    "BudgetExceeded", "Verdict", "WitnessReport", "macro_included", "macro_equivalent",
    "bounded_equivalent", "validate_witness", "initial_macro", "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 10 ** 6
# frames beyond this many fraction classes make every step too slow to finish
MAX_CLASSES = 24
HALF = Fraction(1, 2)
EMPTY: frozenset[str] = frozenset()


class BudgetExceeded(RuntimeError):
    """The abstract search visited more states than allowed."""


@dataclass(frozen=True)
class Verdict:
    included: bool
    counterexample: TimedWord | None = None
    explored: int = 0
    # concrete left configuration the counterexample starts from (one-clock lhs)
    start: tuple[str, Fraction] | None = None

    def __bool__(self):
        return self.included


# -- frame arithmetic -------------------------------------------------------

def _npos(c: int, m: int) -> int:
    return 2 * c * m + 1


def _point_value(fracs: Sequence[Fraction], r: int) -> Fraction:
    c = len(fracs)
    return r // c + fracs[r % c]


def _pos_value(fracs, m, i) -> Fraction:
    """Exact value of a point position, midpoint of a gap, m+1 for saturation."""
    if i == _npos(len(fracs), m):
        return Fraction(m + 1)
    if i % 2 == 0:
        return _point_value(fracs, i // 2)
    return (_point_value(fracs, i // 2) + _point_value(fracs, i // 2 + 1)) / 2


def _pos_upper(fracs, m, i) -> Fraction:
    if i % 2 == 0:
        return _point_value(fracs, i // 2)
    return _point_value(fracs, i // 2 + 1)


def _pos_of(fracs, m, v: Fraction) -> int:
    c = len(fracs)
    if v > m:
        return _npos(c, m)
    z = floor(v)
    f = v - z
    j = bisect_left(fracs, f)
    if j < c and fracs[j] == f:
        return 2 * (z * c + j)
    return 2 * (z * c + j - 1) + 1


# -- left sides -------------------------------------------------------------
# ("A", location, position)              configuration of the one-clock automaton
# ("B", location, positions, diff codes) configuration of a foreign automaton


@dataclass
class _Node:
    now: Fraction
    fracs: tuple[Fraction, ...]
    rhs: tuple[frozenset[str], ...]
    lhs: tuple
    parent: int | None
    letter: tuple[str, Fraction] | None
    dead: bool = False
    depth: int = 0

    @property
    def key(self):
        return (len(self.fracs), self.rhs, self.lhs)


class _Engine:
    def __init__(self, a: TimedAutomaton, m: int, lhs_automaton: TimedAutomaton | None = None,
                 budget: int = DEFAULT_BUDGET):
        if a.k != 1:
            raise ValueError("the right-hand automaton must have exactly one clock")
        self.a = a
        self.b = lhs_automaton
        self.m = m
        self.budget = budget
        self.x = a.clocks[0]
        self._guard_cache: dict = {}
        self.alphabet = tuple(a.alphabet)
        if self.b is not None:
            if set(self.b.alphabet) - set(a.alphabet):
                raise ValueError("left automaton uses letters unknown to the right one")
            if self.b.max_constant > m:
                raise ValueError("left automaton's constants exceed the bound")

    # guard of a one-clock rule depends only on the 1,m-region of the value
    def fires(self, rule, v: Fraction) -> bool:
        key = (id(rule), interval_code(v, 0, self.m))
        hit = self._guard_cache.get(key)
        if hit is None:
            hit = rule.guard.holds({self.x: v})
            self._guard_cache[key] = hit
        return hit

    # -- left side helpers --------------------------------------------------
    def lhs_final(self, lhs) -> bool:
        if lhs[0] == "A":
            return lhs[1] in self.a.final
        return lhs[1] in self.b.final

    def lhs_marks(self, lhs) -> set[int]:
        if lhs[0] == "A":
            return {lhs[2]}
        return set(lhs[2])

    def b_atom(self, fracs, positions, diffs):
        m = self.m
        sat = _npos(len(fracs), m)
        idx = self.b.clock_index
        k = self.b.k

        def value(i):
            return _pos_value(fracs, m, positions[i])

        def oracle(atom):
            i = idx[atom.clock]
            if atom.other is None:
                v = value(i)
            else:
                j = idx[atom.other]
                if positions[i] != sat and positions[j] != sat:
                    v = value(i) - value(j)
                else:
                    lo, hi = (i, j) if i < j else (j, i)
                    code = diffs[_pair(k, lo, hi)]
                    v = _code_rep(code, m)
                    if i > j:
                        v = -v
            from .core.constraints import compare

            return compare(v, atom.op, atom.const)

        return oracle

    # -- one abstract step ----------------------------------------------------
    def choices(self, fracs) -> list[Fraction]:
        m = self.m
        crit = sorted({frac(1 - f) for f in fracs})
        gs = []
        for i, cv in enumerate(crit):
            nxt = crit[i + 1] if i + 1 < len(crit) else Fraction(1)
            gs += [cv, (cv + nxt) / 2]
        out = [d + g for d in range(m) for g in gs]
        out += [Fraction(m), m + gs[1]]
        return out

    def successors(self, node: _Node):
        m = self.m
        fracs = node.fracs
        c = len(fracs)
        old_sat = _npos(c, m)
        for delta in self.choices(fracs):
            g = frac(delta)
            nf = tuple(sorted({Fraction(0)} | {frac(f + g) for f in fracs}))
            nc = len(nf)
            new_sat = _npos(nc, m)
            pre = []
            for i in range(new_sat):
                v_old = _pos_value(nf, m, i) - delta
                pre.append(EMPTY if v_old < 0 else node.rhs[_pos_of(fracs, m, v_old)])
            sat = set(node.rhs[old_sat])
            for i in range(old_sat):
                if _pos_upper(fracs, m, i) + delta > m:
                    sat |= node.rhs[i]
            pre.append(frozenset(sat))

            def moved(i):
                if i == old_sat:
                    return new_sat
                return _pos_of(nf, m, _pos_value(fracs, m, i) + delta)

            lhs = node.lhs
            if lhs[0] == "A":
                moved_lhs = ("A", lhs[1], moved(lhs[2]))
            else:
                moved_lhs = ("B", lhs[1], tuple(moved(i) for i in lhs[2]), lhs[3])
            t = node.now + delta
            for sym in self.alphabet:
                rhs = self._rhs_step(nf, pre, sym)
                for new_lhs in self._lhs_step(nf, moved_lhs, sym):
                    yield sym, t, self._prune(t, nf, rhs, new_lhs)

    def _rhs_step(self, nf, pre, sym):
        m = self.m
        out = [set() for _ in pre]
        for i, locs in enumerate(pre):
            if not locs:
                continue
            v = _pos_value(nf, m, i)
            for p in locs:
                for r in self.a.outgoing(p, sym):
                    if self.fires(r, v):
                        out[0 if r.resets else i].add(r.target)
        return tuple(frozenset(s) for s in out)

    def _lhs_step(self, nf, lhs, sym):
        m = self.m
        if lhs[0] == "A":
            v = _pos_value(nf, m, lhs[2])
            seen = set()
            for r in self.a.outgoing(lhs[1], sym):
                if self.fires(r, v):
                    nxt = ("A", r.target, 0 if r.resets else lhs[2])
                    if nxt not in seen:
                        seen.add(nxt)
                        yield nxt
            return
        _, loc, positions, diffs = lhs
        k = self.b.k
        sat = _npos(len(nf), m)
        oracle = self.b_atom(nf, positions, diffs)
        seen = set()
        for r in self.b.outgoing(loc, sym):
            if not r.guard.evaluate(oracle):
                continue
            reset = [c in r.resets for c in self.b.clocks]
            npos = tuple(0 if reset[i] else positions[i] for i in range(k))
            nd = list(diffs)
            for i in range(k):
                for j in range(i + 1, k):
                    if not (reset[i] or reset[j]):
                        continue
                    if reset[i] and reset[j]:
                        d = Fraction(0)
                    elif reset[i]:
                        d = -_pos_value(nf, m, positions[j]) if positions[j] != sat else -Fraction(m + 1)
                    else:
                        d = _pos_value(nf, m, positions[i]) if positions[i] != sat else Fraction(m + 1)
                    nd[_pair(k, i, j)] = interval_code(d, -m, m)
            nxt = ("B", r.target, npos, tuple(nd))
            if nxt not in seen:
                seen.add(nxt)
                yield nxt

    def _prune(self, now, fracs, rhs, lhs) -> _Node:
        """Drop fraction classes that no longer separate anything."""
        m = self.m
        c = len(fracs)
        marks = self.lhs_marks(lhs)
        keep = [0]
        for j in range(1, c):
            needed = False
            for z in range(m):
                i = 2 * (z * c + j)
                if i in marks or not (rhs[i - 1] == rhs[i] == rhs[i + 1]):
                    needed = True
                    break
            if needed:
                keep.append(j)
        if len(keep) == c:
            return _Node(now, fracs, rhs, lhs, None, None)
        nf = tuple(fracs[j] for j in keep)
        nsat = _npos(len(nf), m)
        new_rhs = tuple(rhs[_pos_of(fracs, m, _pos_value(nf, m, i))] for i in range(nsat))
        new_rhs += (rhs[_npos(c, m)],)

        def remap(i):
            if i == _npos(c, m):
                return nsat
            return _pos_of(nf, m, _pos_value(fracs, m, i))

        if lhs[0] == "A":
            lhs = ("A", lhs[1], remap(lhs[2]))
        else:
            lhs = ("B", lhs[1], tuple(remap(i) for i in lhs[2]), lhs[3])
        return _Node(now, nf, new_rhs, lhs, None, None)

    # -- subsumption ----------------------------------------------------------
    def covered(self, node: _Node) -> bool:
        """The tracked left configuration itself belongs to the right side, so
        everything it accepts is accepted on the right as well."""
        lhs = node.lhs
        return lhs[0] == "A" and lhs[1] in node.rhs[lhs[2]]

    def embeds(self, small: _Node, big: _Node) -> bool:
        """Some order embedding of small's classes into big's (class 0 fixed)
        maps small's left side onto big's, with small's right sets included."""
        m = self.m
        cs, cb = len(small.fracs), len(big.fracs)
        if cs > cb or small.lhs[0] != big.lhs[0] or small.lhs[1] != big.lhs[1]:
            return False
        if small.lhs[0] == "B" and small.lhs[3] != big.lhs[3]:
            return False
        if not small.rhs[-1] <= big.rhs[-1]:
            return False
        sat_s, sat_b = _npos(cs, m), _npos(cb, m)
        s_lhs = small.lhs[2] if small.lhs[0] == "A" else small.lhs[2]
        b_lhs = big.lhs[2] if big.lhs[0] == "A" else big.lhs[2]
        if small.lhs[0] == "A":
            s_lhs, b_lhs = (s_lhs,), (b_lhs,)
        # tracked positions that sit in saturation must stay there
        for i, q in zip(s_lhs, b_lhs):
            if (i == sat_s) != (q == sat_b):
                return False

        # Every condition involves the image of one class, or of two
        # neighbouring classes, so a chain search over classes suffices.
        # Image index cb stands for class 0 one unit later.
        def point_ok(j: int, h: int) -> bool:
            for z in range(m + 1 if j == 0 else m):
                i, q = 2 * (z * cs + j), 2 * (z * cb + h)
                if not small.rhs[i] <= big.rhs[q]:
                    return False
                for a, b in zip(s_lhs, b_lhs):
                    if (a == i) != (b == q):
                        return False
            return True

        def gap_ok(j: int, h: int, h2: int) -> bool:
            for z in range(m):
                i = 2 * (z * cs + j) + 1
                lo, hi = 2 * (z * cb + h), 2 * (z * cb + h2)
                gap = small.rhs[i]
                if gap and not all(gap <= big.rhs[q] for q in range(lo + 1, hi)):
                    return False
                for a, b in zip(s_lhs, b_lhs):
                    if (a == i) != (lo < b < hi):
                        return False
            return True

        if m == 0:
            return point_ok(0, 0)
        if not point_ok(0, 0):
            return False
        reach = {0}
        for j in range(1, cs):
            reach = {h for h in range(j, cb - (cs - 1 - j))
                     if point_ok(j, h) and any(h0 < h and gap_ok(j - 1, h0, h) for h0 in reach)}
            if not reach:
                return False
        return any(gap_ok(cs - 1, h, cb) for h in reach)

    # -- search ----------------------------------------------------------------
    def search(self, starts: Iterable[tuple[_Node, object]]) -> Verdict:
        nodes: list[_Node] = []
        origin: list[object] = []
        exact: set = set()
        buckets: dict = {}
        todo: deque[int] = deque()

        def add(node: _Node, org) -> int | None:
            key = node.key
            if key in exact or self.covered(node):
                return None
            bucket = buckets.setdefault(node.lhs[:2], [])
            for j in bucket:
                if not nodes[j].dead and self.embeds(nodes[j], node):
                    return None
            # only same-depth or deeper nodes are replaced, so BFS still finds
            # a shortest counterexample
            for j in bucket:
                if (not nodes[j].dead and nodes[j].depth >= node.depth
                        and self.embeds(node, nodes[j])):
                    nodes[j].dead = True
            nodes.append(node)
            origin.append(org)
            exact.add(key)
            idx = len(nodes) - 1
            bucket.append(idx)
            todo.append(idx)
            if len(nodes) > self.budget:
                raise BudgetExceeded(f"more than {self.budget} abstract states")
            if len(node.fracs) > MAX_CLASSES:
                raise BudgetExceeded(f"frame grew beyond {MAX_CLASSES} fraction classes")
            return idx

        def violation(node: _Node) -> bool:
            return self.lhs_final(node.lhs) and not any(
                p in self.a.final for locs in node.rhs for p in locs)

        def word_of(idx: int) -> tuple[TimedWord, object]:
            letters = []
            while nodes[idx].parent is not None:
                letters.append(nodes[idx].letter)
                idx = nodes[idx].parent
            return TimedWord(reversed(letters)), origin[idx]

        for node, org in starts:
            i = add(node, org)
            if i is not None and violation(node):
                w, o = word_of(i)
                return Verdict(False, w, len(nodes), o)
        while todo:
            i = todo.popleft()
            if nodes[i].dead:
                continue
            for sym, t, child in self.successors(nodes[i]):
                child.parent = i
                child.letter = (sym, t)
                child.depth = nodes[i].depth + 1
                j = add(child, origin[i])
                if j is not None and violation(child):
                    w, o = word_of(j)
                    return Verdict(False, w, len(nodes), o)
        return Verdict(True, None, len(nodes))


def _pair(k: int, i: int, j: int) -> int:
    return i * k - i * (i + 1) // 2 + (j - i - 1)


def _code_rep(code: int, m: int) -> Fraction:
    # representative value of an interval code over -m..m
    if code == 0:
        return Fraction(-m - 1)
    if code == 4 * m + 2:
        return Fraction(m + 1)
    z = -m + (code - 1) // 2
    return Fraction(z) if code % 2 == 1 else Fraction(z) + HALF


# -- building start states ----------------------------------------------------

def _frame_from(now: Fraction, values: Iterable[Fraction], m: int) -> tuple[Fraction, ...]:
    return tuple(sorted({Fraction(0)} | {frac(now - u) for u in values if now - u <= m}))


def _rhs_on(fracs, m, x: SymbolicMacroConfig) -> tuple[frozenset[str], ...]:
    out = []
    for i in range(_npos(len(fracs), m)):
        u = x.now - _pos_value(fracs, m, i)
        out.append(frozenset(p for s in x.slots if s.descriptor.contains(u) for p in s.locations))
    out.append(EMPTY)
    return tuple(out)


def _macro_values(x: SymbolicMacroConfig) -> set[Fraction]:
    vals = set(x.support) | {x.now}
    for s in x.slots:
        d = s.descriptor
        vals |= {d.value} if hasattr(d, "value") else {d.lo, d.hi}
    return vals


def _engine_bound(a: TimedAutomaton, *xs, b: TimedAutomaton | None = None) -> int:
    m = max([a.max_constant] + [x.m for x in xs])
    if b is not None:
        m = max(m, b.max_constant)
    return max(m, 1)


def _starts_from_macro(eng: _Engine, lhs: SymbolicMacroConfig, rhs: SymbolicMacroConfig):
    m = eng.m
    now = rhs.now
    base = _frame_from(now, _macro_values(lhs) | _macro_values(rhs), m)
    for i in range(_npos(len(base), m)):
        u = now - _pos_value(base, m, i)
        locs = sorted(p for s in lhs.slots if s.descriptor.contains(u) for p in s.locations)
        if not locs:
            continue
        fracs = base
        if i % 2 == 1:
            fracs = tuple(sorted(set(base) | {frac(now - u)}))
        pos = _pos_of(fracs, m, now - u)
        rhs_t = _rhs_on(fracs, m, rhs)
        for p in locs:
            node = eng._prune(now, fracs, rhs_t, ("A", p, pos))
            yield node, (p, u)


def _starts_from_automaton(eng: _Engine, configs: Iterable[Configuration], rhs: SymbolicMacroConfig):
    m = eng.m
    now = rhs.now
    b = eng.b
    for c in configs:
        if c.now != now:
            raise ValueError("left configurations must share now with the right side")
        fracs = _frame_from(now, _macro_values(rhs) | set(c.mu), m)
        positions = tuple(_pos_of(fracs, m, now - u) for u in c.mu)
        diffs = tuple(interval_code((now - c.mu[i]) - (now - c.mu[j]), -m, m)
                      for i in range(b.k) for j in range(i + 1, b.k))
        node = eng._prune(now, fracs, _rhs_on(fracs, m, rhs), ("B", c.location, positions, diffs))
        yield node, None


# -- public API ---------------------------------------------------------------------

def initial_macro(a: TimedAutomaton, m: int | None = None) -> SymbolicMacroConfig:
    """Initial configurations of a one-clock automaton as a macro-configuration."""
    m = a.max_constant if m is None else m
    return close_under([Fraction(0)], [(p, Fraction(0)) for p in a.initial], 0, m)


def macro_included(lhs, a: TimedAutomaton, rhs: SymbolicMacroConfig,
                   budget: int = DEFAULT_BUDGET) -> Verdict:
    """Is every word accepted from ``lhs`` accepted by ``a`` from ``rhs``?

    ``lhs`` is a macro-configuration of ``a`` or a pair ``(B, configurations)``
    for a deterministic automaton ``B``.
    """
    if isinstance(lhs, SymbolicMacroConfig):
        if lhs.now != rhs.now:
            raise ValueError("both sides must share now")
        eng = _Engine(a, _engine_bound(a, lhs, rhs), budget=budget)
        return eng.search(_starts_from_macro(eng, lhs, rhs))
    b, configs = lhs
    eng = _Engine(a, _engine_bound(a, rhs, b=b), lhs_automaton=b, budget=budget)
    return eng.search(_starts_from_automaton(eng, configs, rhs))


def macro_equivalent(a: TimedAutomaton, x1: SymbolicMacroConfig, x2: SymbolicMacroConfig,
                     budget: int = DEFAULT_BUDGET) -> Verdict:
    v = macro_included(x1, a, x2, budget)
    if not v:
        return v
    w = macro_included(x2, a, x1, budget)
    return Verdict(w.included, w.counterexample, v.explored + w.explored, w.start)


def bounded_equivalent(a: TimedAutomaton, x1: SymbolicMacroConfig, x2: SymbolicMacroConfig,
                       n: int) -> bool:
    from .oracle import bounded_difference

    return bounded_difference(a, x1, x2, n) is None


@dataclass
class WitnessReport:
    a_in_b: bool
    b_in_a: bool
    counterexamples: list[tuple[str, TimedWord]] = field(default_factory=list)
    replay_ok: bool = True

    @property
    def ok(self) -> bool:
        return self.a_in_b and self.b_in_a


def validate_witness(a: TimedAutomaton, b: TimedAutomaton,
                     budget: int = DEFAULT_BUDGET) -> WitnessReport:
    """Check ``L(a) = L(b)`` for a one-clock ``a`` and a deterministic ``b``."""
    if not b.is_deterministic:
        raise ValueError("validate_witness needs a deterministic candidate")
    rep = WitnessReport(True, True)
    empty, w = is_empty(product(a, complement_dta(b)))
    if not empty:
        rep.a_in_b = False
        rep.counterexamples.append(("L(A) - L(B)", w))
        rep.replay_ok &= accepts(a, w) and not accepts(b, w)
    if a.k == 0:
        # a timeless automaton gets a dummy clock so the engine can run
        from .core.automaton import TimedAutomaton as TA

        a = TA(a.alphabet, a.locations, ("x",), a.initial, a.final, a.rules, a.name)
    x0 = initial_macro(a, max(a.max_constant, b.max_constant, 1))
    zero = tuple(Fraction(0) for _ in b.clocks)
    start = [Configuration(p, zero, Fraction(0)) for p in b.initial]
    v = macro_included((b, start), a, x0, budget)
    if not v:
        rep.b_in_a = False
        rep.counterexamples.append(("L(B) - L(A)", v.counterexample))
        rep.replay_ok &= accepts(b, v.counterexample) and not accepts_from(
            a, config_set_of(x0), v.counterexample)
    return rep
