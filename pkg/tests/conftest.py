from fractions import Fraction
from pathlib import Path

import pytest

from tadet.core import parse_automaton

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

F = Fraction


def load_sample(name: str):
    return parse_automaton((SAMPLES / name).read_text())


# one-clock NTA: the last letter comes exactly one unit after an earlier one
L1_TEXT = """
automaton L1
alphabet a
clocks x
location p init
location q
location r final
trans p -> p on a when true
trans p -> q on a when true reset {x}
trans q -> q on a when x < 1
trans q -> r on a when x == 1
"""

# the four-location automaton around the predecessor configuration at 4.2
EX42_TEXT = """
automaton Ex42
alphabet a c
clocks x
location p0 init
location q0 init
location r0 init
location p
location q
location r
location f final
trans p0 -> p on a when x > 1 && x < 2
trans q0 -> q on a when x > 1 && x < 2
trans r0 -> r on a when x > 0 && x < 1
trans p -> f on c when x == 2 reset {x}
trans r -> f on c when x == 1 reset {x}
"""


@pytest.fixture
def l1():
    return parse_automaton(L1_TEXT)


@pytest.fixture
def ex42():
    return parse_automaton(EX42_TEXT)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
