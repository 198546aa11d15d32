"""Clock constraints as immutable expression trees.

Atoms compare a clock (or a difference of two clocks) with an integer.
Everything is evaluated over exact rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

OPS = ("<", "<=", "==", ">=", ">")


def compare(lhs: Fraction, op: str, rhs) -> bool:
    if op == "<":
        return lhs < rhs
    if op == "<=":
        return lhs <= rhs
    if op == "==":
        return lhs == rhs
    if op == ">=":
        return lhs >= rhs
    if op == ">":
        return lhs > rhs
    raise ValueError(f"unknown comparison {op!r}")


class Constraint:
    """Base class; subclasses are frozen dataclasses."""

    def evaluate(self, atom_oracle: Callable[["Atom"], bool]) -> bool:
        raise NotImplementedError

    def holds(self, valuation: Mapping[str, Fraction]) -> bool:
        return self.evaluate(lambda a: a.holds(valuation))

    def atoms(self) -> Iterable["Atom"]:
        return ()

    def clocks(self) -> frozenset[str]:
        out: set[str] = set()
        for a in self.atoms():
            out.add(a.clock)
            if a.other is not None:
                out.add(a.other)
        return frozenset(out)

    def max_constant(self) -> int:
        return max((abs(a.const) for a in self.atoms()), default=0)

    def rename(self, mapping: Mapping[str, str]) -> "Constraint":
        raise NotImplementedError

    # precedence used by __str__: or=1, and=2, unary/atom=3
    _prec = 3

    def _wrap(self, outer: int) -> str:
        s = str(self)
        return f"({s})" if self._prec < outer else s


@dataclass(frozen=True)
class TrueC(Constraint):
    def evaluate(self, atom_oracle):
        return True

    def rename(self, mapping):
        return self

    def __str__(self):
        return "true"


@dataclass(frozen=True)
class FalseC(Constraint):
    def evaluate(self, atom_oracle):
        return False

    def rename(self, mapping):
        return self

    def __str__(self):
        return "false"


TRUE = TrueC()
FALSE = FalseC()


@dataclass(frozen=True)
class Atom(Constraint):
    """``clock op const`` or, when ``other`` is set, ``clock - other op const``."""

    clock: str
    op: str
    const: int
    other: str | None = None

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown comparison {self.op!r}")

    def value(self, valuation: Mapping[str, Fraction]) -> Fraction:
        v = Fraction(valuation[self.clock])
        if self.other is not None:
            v -= Fraction(valuation[self.other])
        return v

    def holds(self, valuation):
        return compare(self.value(valuation), self.op, self.const)

    def evaluate(self, atom_oracle):
        return atom_oracle(self)

    def atoms(self):
        return (self,)

    def rename(self, mapping):
        other = None if self.other is None else mapping.get(self.other, self.other)
        return Atom(mapping.get(self.clock, self.clock), self.op, self.const, other)

    def __str__(self):
        lhs = self.clock if self.other is None else f"{self.clock} - {self.other}"
        return f"{lhs} {self.op} {self.const}"


@dataclass(frozen=True)
class Not(Constraint):
    arg: Constraint

    def evaluate(self, atom_oracle):
        return not self.arg.evaluate(atom_oracle)

    def atoms(self):
        return self.arg.atoms()

    def rename(self, mapping):
        return Not(self.arg.rename(mapping))

    def __str__(self):
        inner = str(self.arg)
        return f"!{inner}" if isinstance(self.arg, (TrueC, FalseC)) else f"!({inner})"


@dataclass(frozen=True)
class And(Constraint):
    args: tuple[Constraint, ...]
    _prec = 2

    def evaluate(self, atom_oracle):
        return all(a.evaluate(atom_oracle) for a in self.args)

    def atoms(self):
        return tuple(x for a in self.args for x in a.atoms())

    def rename(self, mapping):
        return And(tuple(a.rename(mapping) for a in self.args))

    def __str__(self):
        return " && ".join(a._wrap(3) for a in self.args)


@dataclass(frozen=True)
class Or(Constraint):
    args: tuple[Constraint, ...]
    _prec = 1

    def evaluate(self, atom_oracle):
        return any(a.evaluate(atom_oracle) for a in self.args)

    def atoms(self):
        return tuple(x for a in self.args for x in a.atoms())

    def rename(self, mapping):
        return Or(tuple(a.rename(mapping) for a in self.args))

    def __str__(self):
        return " || ".join(a._wrap(2) for a in self.args)


def conj(*parts: Constraint) -> Constraint:
    flat: list[Constraint] = []
    for p in parts:
        if isinstance(p, TrueC):
            continue
        if isinstance(p, FalseC):
            return FALSE
        flat.extend(p.args if isinstance(p, And) else (p,))
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts: Constraint) -> Constraint:
    flat: list[Constraint] = []
    for p in parts:
        if isinstance(p, FalseC):
            continue
        if isinstance(p, TrueC):
            return TRUE
        flat.extend(p.args if isinstance(p, Or) else (p,))
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def negate(c: Constraint) -> Constraint:
    if isinstance(c, TrueC):
        return FALSE
    if isinstance(c, FalseC):
        return TRUE
    if isinstance(c, Not):
        return c.arg
    return Not(c)
