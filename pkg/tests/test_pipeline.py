import random
from fractions import Fraction as F

import pytest

from tadet.core import (
    accepts, greedy_reset_normalise, is_deterministic, parse_automaton, parse_word,
)
from tadet.orbits import OpenInterval, Point, TimedAutomorphism, apply, close_under
from tadet.pipeline import (
    Overflow, OrbitGraph, Refutation, clock_realloc, decide_membership, emit_dta, explore,
    initial_state, least_support, macro_successor, orbit_bound, trace_word,
)
from tadet.regions import region_count
from tadet.workbench.sampling import sample_words

from conftest import load_sample

D = F  # decimal strings read as exact rationals


def test_initial_state(l1):
    z = initial_state(l1, 1)
    assert [(s.descriptor, set(s.locations)) for s in z.macro.slots] == [(Point(F(0)), {"p"})]
    assert z.mu == (F(0),) and z.now == 0
    two = parse_automaton("automaton T\nalphabet a\nclocks x\nlocation p init\n"
                          "location q init final\n")
    assert set(initial_state(two, 2).macro.slots[0].locations) == {"p", "q"}
    shifted = apply(TimedAutomorphism.translation(3), z.macro)
    assert z.key == type(z)(shifted, (F(3),)).key


def test_example_successor(ex42):
    pred = close_under([D("3.7"), D("3.9"), D("4.2")],
                       [("p0", D("3.7")), ("q0", D("3.9")), ("r0", D("4.2"))], D("4.2"), 2)
    succ = macro_successor(ex42, pred, "a", 5)
    assert succ == [("p", Point(D("3.7"))), ("q", Point(D("3.9"))), ("r", Point(D("4.2")))]
    sup = least_support(ex42, succ, pred.support, 5, 3)
    assert sup == (D("3.7"), D("4.2"), F(5))
    assert clock_realloc((D("3.7"), D("4.2"), D("3.9")), sup, 5) == (D("3.7"), D("4.2"), F(5))
    assert least_support(ex42, succ, pred.support, 5, 2) == Overflow(sup)


def test_successor_splits_interval(l1):
    x = close_under([F(1)], [("q", OpenInterval(F(0), F(1)))], 1, 1)
    succ = macro_successor(l1, x, "a", D("1.5"))
    assert ("r", Point(F(1, 2))) in succ
    assert ("q", OpenInterval(F(1, 2), F(1))) in succ
    assert macro_successor(l1, close_under([F(0)], [("r", F(0))], 0, 1), "a", 1) == []


def test_least_support_after_two_letters(l1):
    succ = [("p", Point(F(0))), ("q", Point(F(0))), ("q", Point(F(1, 2)))]
    assert least_support(l1, succ, (F(0),), F(1, 2), 2) == (F(0), F(1, 2))
    assert least_support(l1, succ, (F(0),), F(1, 2), 1) == Overflow((F(0), F(1, 2)))
    flat = [("p", Point(F(1, 2))), ("q", Point(F(1, 2)))]
    assert least_support(l1, flat, (F(0),), F(1, 2), 1) == (F(1, 2),)


def test_clock_realloc_examples():
    assert clock_realloc((F(2), F(2), F(3)), (F(2), F(7, 2)), F(7, 2)) == (F(7, 2), F(2), F(7, 2))
    assert clock_realloc((F(0), F(1)), (F(5),), F(5)) == (F(5), F(5))


def test_explore_l1_refutes(l1):
    n = greedy_reset_normalise(l1)
    res = explore(n, 1)
    assert isinstance(res, Refutation)
    assert len(res.support) == 2 and len(res.prefix) == 2


def test_explore_timeless_is_subset_dfa():
    a = greedy_reset_normalise(load_sample("timeless.nta").with_changes(clocks=("x",)))
    g = explore(a, 1)
    assert isinstance(g, OrbitGraph)
    # projected to the original locations, the states are the subsets reachable
    # for "ends with ab": {p}, {p,q}, {p,r}; normalisation with m = 0 keeps a
    # separate copy for "still at time 0"
    subsets = {frozenset(loc.split("__")[0] for loc in z.macro.locations())
               for z in g.nodes.values()}
    assert subsets == {frozenset("p"), frozenset("pq"), frozenset("pr")}
    assert {frozenset(loc.split("__")[0] for loc in g.nodes[k].macro.locations())
            for k in g.final} == {frozenset("pr")}


def test_explore_is_deterministic():
    a = greedy_reset_normalise(load_sample("two_clock.nta"))
    g1, g2 = explore(a, 2), explore(a, 2)
    assert g1.order == g2.order and g1.edges == g2.edges and g1.final == g2.final
    assert dict((k, (v.macro, v.mu)) for k, v in g1.nodes.items()) == \
        dict((k, (v.macro, v.mu)) for k, v in g2.nodes.items())


def test_orbit_bound_formula():
    assert orbit_bound(1, 1, 5) == region_count(1, 1) * 2 ** 15 == 4 * 2 ** 15


@pytest.mark.parametrize("sample,k", [("two_clock.nta", 2), ("nondet_dta.nta", 1),
                                      ("timeless.nta", 1), ("example_l1.nta", 1)])
def test_node_count_within_bound(sample, k):
    a = load_sample(sample)
    a = a if a.k else a.with_changes(clocks=("x",))
    n = greedy_reset_normalise(a)
    for kk in range(1, k + 1):
        g = explore(n, kk, check=True)
        if isinstance(g, OrbitGraph):
            assert len(g.nodes) <= orbit_bound(kk, n.max_constant, n.n)


def test_emitted_structure():
    for sample, k in [("two_clock.nta", 2), ("nondet_dta.nta", 1)]:
        n = greedy_reset_normalise(load_sample(sample))
        b = emit_dta(explore(n, k, check=True), n)
        assert is_deterministic(b) and b.is_always_resetting
        assert b.max_constant <= n.max_constant and b.k == k


def test_membership_simple_dta():
    d = parse_automaton("automaton D\nalphabet a\nclocks x\nlocation p init final\n"
                        "trans p -> p on a when x == 1 reset {x}\n")
    v = decide_membership(d, 1)
    assert v.answer == "YES" and v.witness is not None
    for w in sample_words(d, 2000, (0, 5), seed=1):
        assert accepts(d, w) == accepts(v.witness, w)


def test_membership_l1_no(l1):
    for k in (1, 2):
        v = decide_membership(l1, k)
        assert v.answer == "NO" and v.refutation is not None
        assert len(v.refutation.support) > k


def test_membership_two_clock_needs_two():
    a = load_sample("two_clock.nta")
    v1 = decide_membership(a, 1)
    assert v1.answer == "UNKNOWN" and v1.candidate is not None and v1.refutation is not None
    v2 = decide_membership(a, 2)
    assert v2.answer == "YES"


def test_membership_timeless_zero_clocks():
    v = decide_membership(load_sample("timeless.nta"), 0)
    assert v.answer == "YES" and v.witness.k == 0


def test_membership_zero_clocks_refuted(l1):
    v = decide_membership(l1, 0)
    assert v.answer == "NO"


def test_kmdta_mode(l1):
    assert decide_membership(l1, 1, "kmdta", 1).answer == "NO"
    with pytest.raises(ValueError):
        decide_membership(l1, 1, "kmdta", 2)


def test_budget_reported_as_unknown(l1):
    v = decide_membership(l1, 1, budget=1)
    assert v.answer == "UNKNOWN" and v.reason.startswith("BUDGET")


def test_report_json(l1):
    rep = decide_membership(l1, 1).to_json()
    assert rep["verdict"] == "NO" and rep["clocks"] == 1 and rep["maxConst"] == 1
    assert "refutationPrefix" in rep and "timings" in rep and rep["fBound"] > 0


def test_trace_l1_overflow(l1):
    tr = trace_word(l1, 1, parse_word("a@0 a@1/2"))
    assert [e.overflow for e in tr] == [False, False, True]
    assert tr[-1].support == (F(0), F(1, 2))
    assert len(trace_word(l1, 1, parse_word(""))) == 1


def test_trace_supports_shift_invariant():
    rng = random.Random(5)
    a = load_sample("two_clock.nta")
    for w in sample_words(a, 30, (1, 4), seed=6):
        d = rng.randint(1, 3)
        base = trace_word(a, 2, w)
        moved = trace_word(a, 2, w.shifted(d))
        assert [tuple(s + d for s in e.support) for e in base[1:]] == \
            [e.support for e in moved[1:]]
        assert [e.overflow for e in base] == [e.overflow for e in moved]


def test_trace_shift_by_one(l1):
    w = parse_word("a@0 a@1/3 a@4/3")
    base = trace_word(l1, 2, w)
    moved = trace_word(l1, 2, w.shifted(1))
    assert [tuple(s + 1 for s in e.support) for e in base[1:]] == [e.support for e in moved[1:]]
