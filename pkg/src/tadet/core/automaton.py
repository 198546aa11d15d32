"""Timed words, timed automata and configurations (reset-point semantics)."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .constraints import Constraint, TRUE


class AutomatonError(ValueError):
    """Semantic problem with an automaton (unknown names, duplicates...)."""


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # floats only ever come from user literals; keep their decimal meaning
        return Fraction(repr(x))
    return Fraction(x)


class TimedWord(Sequence):
    """Immutable sequence of ``(symbol, timestamp)`` with monotone timestamps."""

    __slots__ = ("_letters",)

    def __init__(self, letters: Iterable[tuple[str, object]] = ()):
        out = []
        last = Fraction(0)
        for sym, t in letters:
            t = to_fraction(t)
            if t < 0:
                raise ValueError(f"negative timestamp {t}")
            if t < last:
                raise ValueError(f"timestamps not monotone at {sym}@{t}")
            last = t
            out.append((sym, t))
        self._letters = tuple(out)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return TimedWord(self._letters[i])
        return self._letters[i]

    def __len__(self):
        return len(self._letters)

    def __iter__(self) -> Iterator[tuple[str, Fraction]]:
        return iter(self._letters)

    def __eq__(self, other):
        return isinstance(other, TimedWord) and self._letters == other._letters

    def __hash__(self):
        return hash(self._letters)

    def __add__(self, other):
        return TimedWord(self._letters + tuple(other))

    def shifted(self, delta) -> "TimedWord":
        d = to_fraction(delta)
        return TimedWord((a, t + d) for a, t in self._letters)

    @property
    def last_time(self) -> Fraction:
        return self._letters[-1][1] if self._letters else Fraction(0)

    def __repr__(self):
        return f"TimedWord({format_word(self)!r})"

    def __str__(self):
        return format_word(self)


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_word(w: Iterable[tuple[str, Fraction]]) -> str:
    return " ".join(f"{a}@{format_rational(t)}" for a, t in w)


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(text)


def parse_word(text: str) -> TimedWord:
    letters = []
    for tok in text.split():
        if "@" not in tok:
            raise ValueError(f"bad timed letter {tok!r}, expected sym@time")
        sym, t = tok.rsplit("@", 1)
        letters.append((sym, parse_rational(t)))
    return TimedWord(letters)


@dataclass(frozen=True)
class Rule:
    source: str
    symbol: str
    guard: Constraint
    resets: frozenset[str]
    target: str

    def __str__(self):
        reset = ""
        if self.resets:
            reset = " reset {" + ",".join(sorted(self.resets)) + "}"
        return f"{self.source} -> {self.target} on {self.symbol} when {self.guard}{reset}"


@dataclass(frozen=True)
class TimedAutomaton:
    alphabet: tuple[str, ...]
    locations: tuple[str, ...]
    clocks: tuple[str, ...]
    initial: frozenset[str]
    final: frozenset[str]
    rules: tuple[Rule, ...]
    name: str = "A"

    def __post_init__(self):
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "final", frozenset(self.final))
        object.__setattr__(self, "rules", tuple(self.rules))
        for kind, names in (("location", self.locations), ("clock", self.clocks),
                            ("symbol", self.alphabet)):
            if len(set(names)) != len(names):
                raise AutomatonError(f"duplicate {kind} name")
        locs, clocks, sigma = set(self.locations), set(self.clocks), set(self.alphabet)
        for p in self.initial | self.final:
            if p not in locs:
                raise AutomatonError(f"unknown location {p!r}")
        for r in self.rules:
            if r.source not in locs or r.target not in locs:
                raise AutomatonError(f"rule {r} uses an unknown location")
            if r.symbol not in sigma:
                raise AutomatonError(f"rule {r} uses unknown symbol {r.symbol!r}")
            bad = (r.guard.clocks() | r.resets) - clocks
            if bad:
                raise AutomatonError(f"rule {r} uses undeclared clock(s) {sorted(bad)}")

    # -- derived data -----------------------------------------------------
    @property
    def k(self) -> int:
        return len(self.clocks)

    @property
    def n(self) -> int:
        return len(self.locations)

    @cached_property
    def max_constant(self) -> int:
        return max((r.guard.max_constant() for r in self.rules), default=0)

    @cached_property
    def clock_index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.clocks)}

    @cached_property
    def rules_from(self) -> dict[tuple[str, str], tuple[Rule, ...]]:
        out: dict[tuple[str, str], list[Rule]] = {}
        for r in self.rules:
            out.setdefault((r.source, r.symbol), []).append(r)
        return {key: tuple(v) for key, v in out.items()}

    def outgoing(self, p: str, a: str) -> tuple[Rule, ...]:
        return self.rules_from.get((p, a), ())

    @cached_property
    def is_deterministic(self) -> bool:
        from .ops import is_deterministic

        return is_deterministic(self)

    @property
    def is_always_resetting(self) -> bool:
        return all(r.resets for r in self.rules)

    @cached_property
    def is_greedily_resetting(self) -> bool:
        from .ops import is_greedily_resetting

        return is_greedily_resetting(self)

    def with_changes(self, **kw) -> "TimedAutomaton":
        data = dict(alphabet=self.alphabet, locations=self.locations, clocks=self.clocks,
                    initial=self.initial, final=self.final, rules=self.rules, name=self.name)
        data.update(kw)
        return TimedAutomaton(**data)

    def __str__(self):
        from .nta_format import dump_automaton

        return dump_automaton(self)


def make_rule(source, symbol, target, guard: Constraint = TRUE, resets=()) -> Rule:
    return Rule(source, symbol, guard, frozenset(resets), target)


@dataclass(frozen=True, order=True)
class Configuration:
    """``(location, reset points aligned with the automaton's clocks, now)``."""

    location: str
    mu: tuple[Fraction, ...]
    now: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(to_fraction(x) for x in self.mu))
        object.__setattr__(self, "now", to_fraction(self.now))
        if any(x > self.now for x in self.mu):
            raise ValueError("reset point after now")

    def valuation(self, t: Fraction | None = None) -> tuple[Fraction, ...]:
        t = self.now if t is None else t
        return tuple(t - x for x in self.mu)

    def __str__(self):
        mu = ",".join(format_rational(x) for x in self.mu)
        return f"({self.location}, [{mu}], {format_rational(self.now)})"


@dataclass(frozen=True)
class Run:
    start: Configuration
    steps: tuple[tuple[Rule, Fraction, Configuration], ...] = field(default=())

    @property
    def end(self) -> Configuration:
        return self.steps[-1][2] if self.steps else self.start

    @property
    def word(self) -> TimedWord:
        return TimedWord((r.symbol, t) for r, t, _ in self.steps)
