"""Reset-point operational semantics."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .automaton import Configuration, Rule, Run, TimedAutomaton, TimedWord, to_fraction


def initial_configurations(a: TimedAutomaton) -> set[Configuration]:
    zero = tuple(Fraction(0) for _ in a.clocks)
    return {Configuration(p, zero, Fraction(0)) for p in a.initial}


def rule_fires(a: TimedAutomaton, rule: Rule, c: Configuration, t: Fraction) -> bool:
    val = {x: t - mu for x, mu in zip(a.clocks, c.mu)}
    return rule.guard.holds(val)


def apply_rule(a: TimedAutomaton, rule: Rule, c: Configuration, t: Fraction) -> Configuration:
    mu = tuple(t if x in rule.resets else m for x, m in zip(a.clocks, c.mu))
    return Configuration(rule.target, mu, t)


def step(a: TimedAutomaton, c: Configuration, sym: str, t) -> list[tuple[Rule, Configuration]]:
    t = to_fraction(t)
    if t < c.now:
        raise ValueError(f"timestamp {t} precedes now={c.now}")
    return [(r, apply_rule(a, r, c, t)) for r in a.outgoing(c.location, sym)
            if rule_fires(a, r, c, t)]


def successors(a: TimedAutomaton, c: Configuration, sym: str, t) -> set[Configuration]:
    return {d for _, d in step(a, c, sym, t)}


def reachable(a: TimedAutomaton, configs: Iterable[Configuration], w: TimedWord) -> set[Configuration]:
    cur = set(configs)
    for sym, t in w:
        cur = {d for c in cur for d in successors(a, c, sym, t)}
        if not cur:
            break
    return cur


def accepts(a: TimedAutomaton, w, start: Iterable[Configuration] | None = None) -> bool:
    if not isinstance(w, TimedWord):
        w = TimedWord(w)
    configs = initial_configurations(a) if start is None else start
    return any(c.location in a.final for c in reachable(a, configs, w))


def accepting_run(a: TimedAutomaton, w) -> Run | None:
    """Some accepting run over ``w``, found by search over the configuration sets."""
    if not isinstance(w, TimedWord):
        w = TimedWord(w)
    layers = [{c: None for c in initial_configurations(a)}]
    for sym, t in w:
        nxt: dict = {}
        for c in layers[-1]:
            for r, d in step(a, c, sym, t):
                nxt.setdefault(d, (c, r))
        layers.append(nxt)
    finals = [c for c in layers[-1] if c.location in a.final]
    if not finals:
        return None
    c = min(finals)
    steps = []
    for i in range(len(w), 0, -1):
        prev, r = layers[i][c]
        steps.append((r, w[i - 1][1], c))
        c = prev
    return Run(c, tuple(reversed(steps)))


def replay_run(a: TimedAutomaton, run: Run) -> bool:
    """Re-check every guard and reset of a run."""
    c = run.start
    for r, t, d in run.steps:
        if t < c.now or r.source != c.location or not rule_fires(a, r, c, t):
            return False
        if apply_rule(a, r, c, t) != d:
            return False
        c = d
    return True
