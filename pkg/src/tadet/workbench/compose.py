"""Sequential composition ``L $ M``: a word of L, a separator, then a word of M
whose timestamps count from the separator."""
from __future__ import annotations

from ..core.automaton import AutomatonError, Rule, TimedAutomaton
from ..core.constraints import TRUE

__all__ = ["compose", "SEPARATOR"]

SEPARATOR = "$"


def compose(left: TimedAutomaton, right: TimedAutomaton, sep: str = SEPARATOR,
            name: str | None = None) -> TimedAutomaton:
    """Automaton for ``{v (sep,t) u' : v in L(left), u in L(right)}``, where
    ``u'`` is ``u`` with ``t`` added to every timestamp.

    Clocks are shared by position: right's i-th clock is left's i-th clock, and
    the separator resets them all, so two one-clock factors give a one-clock
    result.  The left part is finished once the separator is read."""
    if set(left.alphabet) & set(right.alphabet):
        raise AutomatonError("the two alphabets must be disjoint")
    if sep in left.alphabet or sep in right.alphabet:
        raise AutomatonError(f"separator {sep!r} is not fresh")
    k = max(left.k, right.k)
    clocks = left.clocks + tuple(c for c in right.clocks[len(left.clocks):])
    if len(set(clocks)) != len(clocks):
        clocks = tuple(f"x{i + 1}" for i in range(k))
    lmap = dict(zip(left.clocks, clocks))
    rmap = dict(zip(right.clocks, clocks))

    def port(a: TimedAutomaton, pre: str, cmap: dict[str, str]) -> list[Rule]:
        return [Rule(pre + r.source, r.symbol, r.guard.rename(cmap),
                     frozenset(cmap[c] for c in r.resets), pre + r.target) for r in a.rules]

    rules = port(left, "l_", lmap) + port(right, "r_", rmap)
    for p in sorted(left.final):
        for q in sorted(right.initial):
            rules.append(Rule("l_" + p, sep, TRUE, frozenset(clocks), "r_" + q))
    return TimedAutomaton(
        left.alphabet + (sep,) + right.alphabet,
        tuple("l_" + p for p in left.locations) + tuple("r_" + q for q in right.locations),
        clocks,
        frozenset("l_" + p for p in left.initial),
        frozenset("r_" + q for q in right.final),
        tuple(rules),
        name or f"{left.name}_then_{right.name}",
    )
