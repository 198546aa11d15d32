"""Timed automata: syntax, semantics and structural operations."""
from .automaton import (
    AutomatonError, Configuration, Rule, Run, TimedAutomaton, TimedWord, format_rational,
    format_word, make_rule, parse_rational, parse_word, to_fraction,
)
from .constraints import FALSE, TRUE, And, Atom, Constraint, Not, Or, conj, disj, negate
from .nta_format import NtaSyntaxError, dump_automaton, parse_automaton, parse_constraint, to_dot
from .ops import (
    NotDeterministicError, check_greedy_configuration, complement_dta, greedy_reset_normalise,
    is_deterministic, is_empty, is_greedily_resetting, make_total, product,
)
from .semantics import (
    accepting_run, accepts, apply_rule, initial_configurations, reachable, replay_run, step,
    successors,
)
