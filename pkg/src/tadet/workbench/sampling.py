"""Seeded timed-word sampling and differential testing of two automata."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from ..core.automaton import TimedAutomaton, TimedWord, format_word
from ..core.semantics import accepts, initial_configurations, reachable

__all__ = ["TimeProfile", "sample_words", "has_fraction_collision", "DiffReport", "differential_test"]


@dataclass(frozen=True)
class TimeProfile:
    """How timestamps are drawn.  Each letter after the first copies the
    fractional part of an earlier timestamp with probability ``collision``,
    otherwise lands on an integer with probability ``grid``, otherwise gets a
    random fraction with one of ``denominators``.  Gaps are below ``max_gap``."""

    collision: float = 0.3
    grid: float = 0.2
    max_gap: int = 2
    denominators: tuple[int, ...] = (2, 3, 4, 5, 8)
    guided: float = 0.7  # in automaton mode: chance to pick a letter some run can read


def _fresh_fraction(rng: random.Random, prof: TimeProfile) -> Fraction:
    d = rng.choice(prof.denominators)
    return Fraction(rng.randrange(1, d), d)


def _next_time(rng: random.Random, prof: TimeProfile, times: list[Fraction]) -> Fraction:
    now = times[-1] if times else Fraction(0)
    r = rng.random()
    if times and r < prof.collision:
        f = rng.choice(times) % 1
    elif r < prof.collision + prof.grid:
        f = Fraction(0)
    else:
        f = _fresh_fraction(rng, prof)
    # smallest value with fractional part f at or above now, plus whole units
    base = now - now % 1 + f
    if base < now:
        base += 1
    return base + rng.randrange(0, prof.max_gap)


def sample_words(source: TimedAutomaton | Sequence[str], count: int, length: int | tuple[int, int],
                 seed: int = 0, profile: TimeProfile | None = None) -> list[TimedWord]:
    """``count`` reproducible words over the automaton's (or given) alphabet.

    With an automaton, letters are biased towards ones the automaton can read
    at the drawn time, so accepted and rejected words both show up."""
    prof = profile or TimeProfile()
    rng = random.Random(seed)
    auto = source if isinstance(source, TimedAutomaton) else None
    alphabet = tuple(auto.alphabet if auto else source)
    lo, hi = (length, length) if isinstance(length, int) else length
    out = []
    for _ in range(count):
        n = rng.randint(lo, hi)
        times: list[Fraction] = []
        letters = []
        confs = set(initial_configurations(auto)) if auto else set()
        for _ in range(n):
            t = _next_time(rng, prof, times)
            times.append(t)
            sym = rng.choice(alphabet)
            if auto and rng.random() < prof.guided:
                live = [a for a in alphabet if reachable(auto, confs, [(a, t)])]
                if live:
                    sym = rng.choice(live)
            if auto:
                confs = reachable(auto, confs, [(sym, t)])
            letters.append((sym, t))
        out.append(TimedWord(letters))
    return out


def has_fraction_collision(w: TimedWord) -> bool:
    fracs = [t % 1 for _, t in w]
    return len(set(fracs)) < len(fracs)


@dataclass
class DiffReport:
    total: int = 0
    accepted_a: int = 0
    accepted_b: int = 0
    mismatches: list[tuple[int, TimedWord, bool, bool]] = field(default_factory=list)
    replay_files: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        return (f"{self.total} words, accepted by A: {self.accepted_a}, by B: {self.accepted_b}, "
                f"mismatches: {len(self.mismatches)}")


def differential_test(a: TimedAutomaton, b: TimedAutomaton, samples: Iterable[TimedWord],
                      replay_dir: str | Path | None = None, max_replays: int = 20) -> DiffReport:
    """Compare acceptance word by word; mismatching words are written to
    ``replay_dir`` (one file each) when given."""
    rep = DiffReport()
    for i, w in enumerate(samples):
        x, y = accepts(a, w), accepts(b, w)
        rep.total += 1
        rep.accepted_a += x
        rep.accepted_b += y
        if x != y:
            rep.mismatches.append((i, w, x, y))
    if replay_dir is not None and rep.mismatches:
        d = Path(replay_dir)
        d.mkdir(parents=True, exist_ok=True)
        for i, w, x, y in rep.mismatches[:max_replays]:
            p = d / f"mismatch_{i:06d}.word"
            p.write_text(f"# A accepts: {x}, B accepts: {y}\n{format_word(w)}\n")
            rep.replay_files.append(str(p))
    return rep
