"""Deciding whether a one-clock timed automaton is equivalent to a deterministic one."""
__version__ = "0.1.0"
