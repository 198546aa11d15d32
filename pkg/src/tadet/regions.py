"""Canonical k,m-regions of clock valuations.

A region is identified by the interval code of every clock (``= z``,
``(z, z+1)`` or ``> m``) together with the interval code of every pairwise
difference ``x_i - x_j`` against the integers ``-m..m``.  For clocks below
the bound the difference codes are just the fractional order in disguise; for
clocks above it they carry the diagonal information that diagonal atoms can
still observe.  Two valuations get the same region exactly when no atom with
constant of absolute value at most ``m`` separates them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor
from typing import Mapping, Sequence

from .core.constraints import Atom, Constraint, conj

__all__ = [
    "Region",
    "region_of",
    "enumerate_regions",
    "region_count",
    "region_to_constraint",
    "timestamp_region_choices",
    "default_clock_names",
    "interval_code",
]


def interval_code(v: Fraction, lo: int, hi: int) -> int:
    """Position of ``v`` in the partition of the line cut at ``lo..hi``.

    0 is ``v < lo``; odd codes are the points ``lo..hi``; even codes are the
    open unit intervals between them and, last, ``v > hi``.
    """
    if v < lo:
        return 0
    if v > hi:
        return 2 * (hi - lo) + 2
    z = floor(v)
    if v == z:
        return 2 * (z - lo) + 1
    return 2 * (z - lo) + 2


def _code_range(code: int, lo: int, hi: int) -> tuple[str, int]:
    """Decode an interval code into ('lt'|'eq'|'open'|'gt', integer)."""
    if code == 0:
        return ("lt", lo)
    if code == 2 * (hi - lo) + 2:
        return ("gt", hi)
    if code % 2 == 1:
        return ("eq", lo + (code - 1) // 2)
    return ("open", lo + (code - 2) // 2)


def default_clock_names(k: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(k))


@dataclass(frozen=True)
class Region:
    k: int
    m: int
    codes: tuple[int, ...]
    diffs: tuple[int, ...]
    realiser: tuple[Fraction, ...] = field(compare=False, hash=False, repr=False, default=())

    def clock_interval(self, i: int) -> tuple[str, int]:
        return _code_range(self.codes[i], 0, self.m)

    def diff_interval(self, i: int, j: int) -> tuple[str, int]:
        """Interval of ``x_i - x_j`` for ``i < j``."""
        return _code_range(self.diffs[_pair_index(self.k, i, j)], -self.m, self.m)

    def is_saturated(self, i: int) -> bool:
        return self.clock_interval(i)[0] == "gt"

    def fractional_order(self) -> tuple[frozenset[int], ...]:
        """Weak order of the non-integer clocks at most m, by fractional part."""
        if not self.realiser:
            return ()
        open_clocks = [i for i in range(self.k) if self.clock_interval(i)[0] == "open"]
        by_frac: dict[Fraction, set[int]] = {}
        for i in open_clocks:
            v = self.realiser[i]
            by_frac.setdefault(v - floor(v), set()).add(i)
        return tuple(frozenset(by_frac[f]) for f in sorted(by_frac))

    def contains(self, valuation: Sequence[Fraction]) -> bool:
        return region_of(valuation, self.k, self.m) == self

    def __str__(self):
        return str(region_to_constraint(self))


def _pair_index(k: int, i: int, j: int) -> int:
    # index of (i, j), i < j, in row-major order of the strict upper triangle
    return i * k - i * (i + 1) // 2 + (j - i - 1)


def region_of(v: Sequence[Fraction] | Mapping[str, Fraction], k: int, m: int) -> Region:
    if isinstance(v, Mapping):
        vals = tuple(Fraction(v[c]) for c in sorted(v))
    else:
        vals = tuple(Fraction(x) for x in v)
    if len(vals) != k:
        raise ValueError(f"valuation has {len(vals)} clocks, expected {k}")
    if any(x < 0 for x in vals):
        raise ValueError("clock valuations are nonnegative")
    codes = tuple(interval_code(x, 0, m) for x in vals)
    diffs = tuple(
        interval_code(vals[i] - vals[j], -m, m) for i in range(k) for j in range(i + 1, k)
    )
    return Region(k, m, codes, diffs, vals)


@lru_cache(maxsize=None)
def enumerate_regions(k: int, m: int) -> tuple[Region, ...]:
    """All k,m-regions, each with a rational realiser, in a fixed order.

    Every region has a realiser whose fractional parts are multiples of
    ``1/(k+1)`` (only their order matters) and whose integer parts are at most
    ``(m+2)k`` (gaps wider than ``m+1`` between sorted clocks can be shrunk
    without changing any atom).
    """
    if k < 0 or m < 0:
        raise ValueError("k and m must be nonnegative")
    if k == 0:
        return (region_of((), 0, m),)
    bound = (m + 2) * k
    seen: dict[Region, Region] = {}
    for ranks in itertools.product(range(k + 1), repeat=k):
        fracs = [Fraction(r, k + 1) for r in ranks]
        for floors in itertools.product(range(bound + 1), repeat=k):
            reg = region_of([z + f for z, f in zip(floors, fracs)], k, m)
            if reg not in seen:
                seen[reg] = reg
    return tuple(sorted(seen, key=lambda r: (r.codes, r.diffs)))


def region_count(k: int, m: int) -> int:
    return len(enumerate_regions(k, m))


def _interval_atoms(lhs: str, other: str | None, kind: str, z: int) -> list[Atom]:
    if kind == "eq":
        return [Atom(lhs, "==", z, other)]
    if kind == "open":
        return [Atom(lhs, ">", z, other), Atom(lhs, "<", z + 1, other)]
    if kind == "gt":
        return [Atom(lhs, ">", z, other)]
    return [Atom(lhs, "<", z, other)]


def region_to_constraint(r: Region, clocks: Sequence[str] | None = None) -> Constraint:
    """Conjunction of atoms whose solutions are exactly the region.

    A diagonal atom is left out only when one clock of the pair is integral and
    the other is not above m: the per-clock atoms then fix the difference.
    """
    names = tuple(clocks) if clocks is not None else default_clock_names(r.k)
    parts: list[Constraint] = []
    for i in range(r.k):
        parts.extend(_interval_atoms(names[i], None, *r.clock_interval(i)))
    for i in range(r.k):
        for j in range(i + 1, r.k):
            ki, kj = r.clock_interval(i)[0], r.clock_interval(j)[0]
            if "eq" in (ki, kj) and "gt" not in (ki, kj):
                continue
            parts.extend(_interval_atoms(names[i], names[j], *r.diff_interval(i, j)))
    return conj(*parts)


def timestamp_region_choices(
    mu: Sequence[Fraction], now: Fraction, m: int
) -> list[tuple[Region, Fraction]]:
    """Regions of ``t - mu`` reachable by some ``t >= now``, with a representative.

    The line above ``now`` is cut at every ``mu_i + z`` (``z = 0..m``); each
    cut point and each open segment between cuts has a constant region.  Open
    segments use their midpoint, the unbounded last segment uses last cut + 1.
    """
    now = Fraction(now)
    mu = tuple(Fraction(x) for x in mu)
    if any(x > now for x in mu):
        raise ValueError("reset points must not exceed now")
    k = len(mu)
    cuts = sorted({x + z for x in mu for z in range(m + 1) if x + z > now})
    points = [now] + cuts
    reps: list[Fraction] = []
    for a, b in zip(points, points[1:]):
        reps.append(a)
        reps.append((a + b) / 2)
    reps.append(points[-1])
    reps.append(points[-1] + 1)
    out: list[tuple[Region, Fraction]] = []
    seen: set[Region] = set()
    for t in reps:
        reg = region_of([t - x for x in mu], k, m)
        if reg not in seen:
            seen.add(reg)
            out.append((reg, t))
    return out
