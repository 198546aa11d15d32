"""Timed automorphisms, orbits of reals under support sets, and symbolic
macro-configurations of a one-clock automaton.

A timed automorphism is a monotone bijection of the rationals commuting with
``+1``.  We describe one by finitely many anchors ``a -> b`` with ``a`` a
fraction in ``[0, 1)``; between anchors the map is linear.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Iterable, Sequence, Union

from .core.automaton import Configuration, TimedWord, format_rational, to_fraction
from .regions import Region, region_of

__all__ = [
    "TimedAutomorphism", "Point", "OpenInterval", "OrbitSlot", "SymbolicMacroConfig",
    "OrbitKey", "frac", "is_fraction_independent", "grid_points", "grid_positions",
    "orbit_of_real", "close_under", "perturbation_automorphism", "orbit_key", "apply",
]


def frac(x: Fraction) -> Fraction:
    return x - floor(x)


def is_fraction_independent(values: Iterable[Fraction]) -> bool:
    fs = [frac(to_fraction(v)) for v in values]
    return len(fs) == len(set(fs))


class TimedAutomorphism:
    """Anchors ``(a_i, b_i)`` with ``0 <= a_0 < ... < a_n < 1`` and
    ``b_0 < ... < b_n < b_0 + 1``; ``pi(a_i + z) = b_i + z``."""

    __slots__ = ("anchors",)

    def __init__(self, anchors: Iterable[tuple[object, object]] = ()):
        pts = sorted((to_fraction(a), to_fraction(b)) for a, b in anchors)
        for a, _ in pts:
            if not 0 <= a < 1:
                raise ValueError(f"anchor source {a} not in [0, 1)")
        for (a1, b1), (a2, b2) in zip(pts, pts[1:]):
            if a1 == a2:
                raise ValueError("duplicate anchor source")
            if not b1 < b2:
                raise ValueError("anchors are not monotone")
        if pts and not pts[-1][1] < pts[0][1] + 1:
            raise ValueError("anchors do not respect +1 periodicity")
        self.anchors = tuple(pts)

    @classmethod
    def from_classes(cls, triples: Iterable[tuple[object, object, int]]) -> "TimedAutomorphism":
        """Build from ``(f, f', shift)``: the class of ``f`` goes to ``f' + shift``."""
        return cls((f, to_fraction(g) + z) for f, g, z in triples)

    @classmethod
    def translation(cls, d) -> "TimedAutomorphism":
        return cls([(0, to_fraction(d))])

    def __call__(self, x) -> Fraction:
        x = to_fraction(x)
        if not self.anchors:
            return x
        a0, b0 = self.anchors[0]
        n = floor(x - a0)
        y = x - n  # y in [a0, a0 + 1)
        srcs = [a for a, _ in self.anchors] + [a0 + 1]
        imgs = [b for _, b in self.anchors] + [b0 + 1]
        i = bisect_right(srcs, y) - 1
        a, b = srcs[i], imgs[i]
        if y == a:
            return b + n
        a2, b2 = srcs[i + 1], imgs[i + 1]
        return b + (y - a) * (b2 - b) / (a2 - a) + n

    def inverse(self) -> "TimedAutomorphism":
        return TimedAutomorphism((frac(b), a - floor(b)) for a, b in self.anchors)

    def compose(self, other: "TimedAutomorphism") -> "TimedAutomorphism":
        """``self . other`` (apply ``other`` first)."""
        cuts = {a for a, _ in other.anchors}
        inv = other.inverse()
        cuts |= {frac(inv(a)) for a, _ in self.anchors}
        if not cuts:
            return TimedAutomorphism()
        return TimedAutomorphism((c, self(other(c))) for c in cuts)

    def __matmul__(self, other):
        return self.compose(other)

    def is_identity(self) -> bool:
        return all(a == b for a, b in self.anchors)

    def __repr__(self):
        body = ", ".join(f"{format_rational(a)}->{format_rational(b)}" for a, b in self.anchors)
        return f"TimedAutomorphism({body})"


@dataclass(frozen=True, order=True)
class Point:
    value: Fraction

    def contains(self, u) -> bool:
        return u == self.value

    def __str__(self):
        return "{" + format_rational(self.value) + "}"


@dataclass(frozen=True, order=True)
class OpenInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("empty open interval")

    def contains(self, u) -> bool:
        return self.lo < u < self.hi

    def __str__(self):
        return f"({format_rational(self.lo)}, {format_rational(self.hi)})"


Descriptor = Union[Point, OpenInterval]


@dataclass(frozen=True)
class OrbitSlot:
    descriptor: Descriptor
    locations: frozenset[str]

    def __post_init__(self):
        if not self.locations:
            raise ValueError("orbit slot without locations")


def grid_points(support: Iterable[Fraction], now: Fraction, m: int) -> list[Fraction]:
    """``{s + z} ∩ [now - m, now]`` over the support together with ``now``."""
    now = to_fraction(now)
    lo = now - m
    out = set()
    for s in set(support) | {now}:
        z = floor(lo - s)
        while s + z <= now:
            if s + z >= lo:
                out.add(s + z)
            z += 1
    return sorted(out)


def grid_positions(support: Iterable[Fraction], now: Fraction, m: int) -> list[Descriptor]:
    """Consecutive orbits ``{e_1}, (e_1, e_2), {e_2}, ..., {e_last}``."""
    g = grid_points(support, now, m)
    out: list[Descriptor] = [Point(g[0])]
    for a, b in zip(g, g[1:]):
        out.append(OpenInterval(a, b))
        out.append(Point(b))
    return out


def orbit_of_real(support: Iterable[Fraction], u, now, m: int) -> Descriptor:
    u, now = to_fraction(u), to_fraction(now)
    if not (now - m < u <= now or u == now):
        raise ValueError(f"{u} outside the window ({now - m}, {now}]")
    g = grid_points(support, now, m)
    i = bisect_left(g, u)
    if g[i] == u:
        return Point(u)
    return OpenInterval(g[i - 1], g[i])


def _meets(desc: Descriptor, pos: Descriptor) -> bool:
    if isinstance(desc, Point):
        return pos.contains(desc.value)
    if isinstance(pos, Point):
        return desc.contains(pos.value)
    return desc.lo < pos.hi and pos.lo < desc.hi


@dataclass(frozen=True)
class SymbolicMacroConfig:
    """A finite union of sets ``{(p, u, now) : u in descriptor}``."""

    now: Fraction
    support: tuple[Fraction, ...]
    m: int
    slots: tuple[OrbitSlot, ...]

    def __post_init__(self):
        object.__setattr__(self, "now", to_fraction(self.now))
        object.__setattr__(self, "support", tuple(sorted(set(map(to_fraction, self.support)))))
        if not is_fraction_independent(self.support):
            raise ValueError("support is not fraction-independent")

    @property
    def positions(self) -> list[Descriptor]:
        return grid_positions(self.support, self.now, self.m)

    def location_sets(self) -> tuple[frozenset[str], ...]:
        """Location set of every grid position, empty ones included."""
        where = {s.descriptor: s.locations for s in self.slots}
        return tuple(where.get(pos, frozenset()) for pos in self.positions)

    def locations(self) -> frozenset[str]:
        out: set[str] = set()
        for s in self.slots:
            out |= s.locations
        return frozenset(out)

    def contains(self, location: str, u) -> bool:
        u = to_fraction(u)
        return any(location in s.locations and s.descriptor.contains(u) for s in self.slots)

    def is_empty(self) -> bool:
        return not self.slots

    def pairs(self) -> list[tuple[str, Descriptor]]:
        return [(p, s.descriptor) for s in self.slots for p in sorted(s.locations)]

    def __str__(self):
        if not self.slots:
            return "{}"
        n = format_rational(self.now)
        parts = []
        for s in self.slots:
            for p in sorted(s.locations):
                d = s.descriptor
                if isinstance(d, Point):
                    parts.append(f"{{({p},{format_rational(d.value)},{n})}}")
                else:
                    parts.append(f"{{({p},t,{n}) | t ∈ {d}}}")
        return " ∪ ".join(parts)


def close_under(support: Iterable[Fraction], configs: Iterable[tuple[str, object]],
                now, m: int) -> SymbolicMacroConfig:
    """Least support-invariant set containing the given ``(location, value or
    descriptor)`` pairs, all at time ``now``."""
    now = to_fraction(now)
    support = tuple(support)
    items: list[tuple[str, Descriptor]] = []
    for p, d in configs:
        if not isinstance(d, (Point, OpenInterval)):
            d = Point(to_fraction(d))
        lo = d.value if isinstance(d, Point) else d.lo
        hi = d.value if isinstance(d, Point) else d.hi
        if lo < now - m or hi > now or (isinstance(d, Point) and lo == now - m and m > 0):
            raise ValueError(f"{d} leaves the window ({now - m}, {now}]")
        items.append((p, d))
    slots = []
    for pos in grid_positions(support, now, m):
        locs = frozenset(p for p, d in items if _meets(d, pos))
        if locs:
            slots.append(OrbitSlot(pos, locs))
    return SymbolicMacroConfig(now, support, m, tuple(slots))


def perturbation_automorphism(support: Sequence[Fraction], s) -> TimedAutomorphism:
    """Fix every fraction class of ``support`` except that of ``s``, which moves
    to the middle of its gap between the neighbouring classes."""
    s = to_fraction(s)
    f = frac(s)
    others = sorted({frac(to_fraction(x)) for x in support} - {f})
    if not others:
        return TimedAutomorphism([(f, f + Fraction(1, 2))])
    below = [g for g in others if g < f]
    above = [g for g in others if g > f]
    lo = below[-1] if below else others[-1] - 1
    hi = above[0] if above else others[0] + 1
    mid = (lo + hi) / 2
    if mid == f:
        mid = (f + hi) / 2
    return TimedAutomorphism([(g, g) for g in others] + [(f, mid)])


def apply(pi: TimedAutomorphism, x):
    """Image of a rational, timed word, configuration or macro-configuration."""
    if isinstance(x, (int, Fraction)):
        return pi(x)
    if isinstance(x, TimedWord):
        return TimedWord((a, pi(t)) for a, t in x)
    if isinstance(x, Configuration):
        return Configuration(x.location, tuple(pi(v) for v in x.mu), pi(x.now))
    if isinstance(x, Point):
        return Point(pi(x.value))
    if isinstance(x, OpenInterval):
        return OpenInterval(pi(x.lo), pi(x.hi))
    if isinstance(x, OrbitSlot):
        return OrbitSlot(apply(pi, x.descriptor), x.locations)
    if isinstance(x, SymbolicMacroConfig):
        return SymbolicMacroConfig(pi(x.now), tuple(pi(v) for v in x.support), x.m,
                                   tuple(apply(pi, s) for s in x.slots))
    if isinstance(x, (tuple, list)):
        return type(x)(apply(pi, y) for y in x)
    raise TypeError(f"cannot apply an automorphism to {type(x).__name__}")


@dataclass(frozen=True)
class OrbitKey:
    region: Region
    location_sets: tuple[tuple[str, ...], ...]

    def __str__(self):
        sets = " ".join("{" + ",".join(s) + "}" for s in self.location_sets)
        return f"[{self.region}] {sets}"


def orbit_key(x: SymbolicMacroConfig, mu: Sequence[Fraction]) -> OrbitKey:
    mu = tuple(map(to_fraction, mu))
    if set(mu) != set(x.support) and not (not mu and set(x.support) <= {x.now}):
        raise ValueError("clock assignment does not match the support")
    region = region_of([x.now - v for v in mu], len(mu), x.m)
    sets = tuple(tuple(sorted(s)) for s in x.location_sets())
    return OrbitKey(region, sets)
