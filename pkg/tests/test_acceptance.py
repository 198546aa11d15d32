"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (the lines are printed in the
terminal summary) or directly with ``python tests/test_acceptance.py``.
"""
import random
import sys
import time
from fractions import Fraction as F
from math import floor
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from tadet.core import (  # noqa: E402
    Configuration, TimedWord, accepts, greedy_reset_normalise, is_deterministic,
    parse_automaton, parse_word, successors,
)
from tadet.intervals import accepts_from, config_set_of  # noqa: E402
from tadet.langequiv import (  # noqa: E402
    BudgetExceeded, bounded_equivalent, macro_equivalent, validate_witness,
)
from tadet.oracle import bounded_difference  # noqa: E402
from tadet.orbits import (  # noqa: E402
    OpenInterval, Point, TimedAutomorphism, apply, close_under, frac, grid_points,
)
from tadet.pipeline import (  # noqa: E402
    OrbitGraph, clock_realloc, decide_membership, emit_dta, explore, least_support,
    macro_successor, orbit_bound, trace_word,
)
from tadet.randgen import random_greedy_nta, random_macro  # noqa: E402
from tadet.regions import region_count, region_of, region_to_constraint  # noqa: E402
from tadet.workbench.lcm import (  # noqa: E402
    encode_lcm, parse_lcm, parse_run, reversal_encoding, single_faults,
)
from tadet.workbench.sampling import differential_test, sample_words  # noqa: E402

from conftest import EX42_TEXT, L1_TEXT, load_sample  # noqa: E402
from lcm_cases import CASES  # noqa: E402
from test_regions import GRID_COUNTS, grid_classes  # noqa: E402

RESULTS: list[str] = []
D = F


def report(n: int, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def corpus():
    """Automata the structural criteria are checked on: the samples plus
    seeded random greedily resetting ones."""
    out = []
    for name, k in [("example_l1.nta", 1), ("two_clock.nta", 2), ("nondet_dta.nta", 1),
                    ("timeless.nta", 1)]:
        a = load_sample(name)
        a = a if a.k else a.with_changes(clocks=("x",))
        out += [(name, greedy_reset_normalise(a), kk) for kk in range(1, k + 1)]
    rng = random.Random(0)
    for i in range(40):
        a = random_greedy_nta(rng, n=rng.randint(2, 3), m=rng.randint(1, 2),
                              alphabet=("a", "b")[:rng.randint(1, 2)])
        out += [(f"random{i}", a, 1), (f"random{i}", a, 2)]
    return out


_EXPLORED = {}


def explored():
    """(name, automaton, k, graph or refutation) over the corpus, computed once."""
    if not _EXPLORED:
        rows = []
        for name, a, k in corpus():
            try:
                res = explore(a, k, budget=100_000, check=True, max_nodes=300)
            except BudgetExceeded:
                res = None
            rows.append((name, a, k, res))
        _EXPLORED["rows"] = rows
    return _EXPLORED["rows"]


# 1 ---------------------------------------------------------------------------------

def test_criterion_1_example_golden():
    t0 = time.perf_counter()
    sup = [D("3.7"), D("4.2"), F(5)]
    x = close_under(sup, [("p", D("3.7")), ("q", D("3.9")), ("r", D("4.2"))], 5, 2)
    slots = [(s.descriptor, set(s.locations)) for s in x.slots]
    want = [(Point(D("3.7")), {"p"}), (OpenInterval(D("3.7"), F(4)), {"q"}),
            (Point(D("4.2")), {"r"})]
    grid = grid_points(sup, 5, 2)
    want_grid = [F(3), D("3.2"), D("3.7"), F(4), D("4.2"), D("4.7"), F(5)]
    # the same state reached through the pipeline from a hand-built predecessor
    a = parse_automaton(EX42_TEXT)
    pred = close_under([D("3.7"), D("3.9"), D("4.2")],
                       [("p0", D("3.7")), ("q0", D("3.9")), ("r0", D("4.2"))], D("4.2"), 2)
    succ = macro_successor(a, pred, "a", 5)
    s2 = least_support(a, succ, pred.support, 5, 3)
    mu = clock_realloc((D("3.7"), D("4.2"), D("3.9")), s2, 5)
    elapsed = time.perf_counter() - t0
    ok = (slots == want and grid == want_grid and s2 == tuple(sup) and mu == tuple(sup)
          and close_under(s2, succ, 5, 2) == x and elapsed < 1)
    report(1, ok, f"closure, grid, least support and clocks exact ({elapsed:.3f}s)")


# 2 ---------------------------------------------------------------------------------

def test_criterion_2_negative_decision():
    a = parse_automaton(L1_TEXT)
    parts, ok = [], True
    for k in (1, 2):
        t0 = time.perf_counter()
        v = decide_membership(a, k, "kdta")
        dt = time.perf_counter() - t0
        ok &= v.answer == "NO" and dt < 600 and v.refutation is not None
        parts.append(f"k={k} {v.answer} in {dt:.1f}s")
    tr = trace_word(a, 1, parse_word("a@0 a@1/2"))
    ok &= [e.overflow for e in tr] == [False, False, True] and tr[-1].support == (F(0), F(1, 2))
    report(2, ok, ", ".join(parts) + "; trace overflows with support {0, 1/2}")


# 3 ---------------------------------------------------------------------------------

CRAFTED = [("nondet_dta.nta", 1), ("timeless.nta", 0), ("two_clock.nta", 2)]


def test_criterion_3_positive_round_trips():
    ok, parts = True, []
    for i, (name, k) in enumerate(CRAFTED):
        a = load_sample(name)
        v = decide_membership(a, k)
        if v.answer != "YES":
            ok = False
            parts.append(f"{name}: {v.answer}")
            continue
        rep = validate_witness(a, v.witness)
        words = sample_words(a, 10_000, (1, 6), seed=100 + i)
        diff = differential_test(a, v.witness, words)
        ok &= rep.ok and diff.ok
        parts.append(f"{name} k={k}: validated, {len(diff.mismatches)}/{diff.total} mismatches")
    report(3, ok, "; ".join(parts))


# 4 ---------------------------------------------------------------------------------

def test_criterion_4_orbit_bound():
    l1n = greedy_reset_normalise(parse_automaton(L1_TEXT))
    f_l1 = orbit_bound(1, 1, l1n.n)
    ok = region_count(1, 1) == 4 and f_l1 == 4 * 2 ** (l1n.n * 3)
    graphs = worst = 0
    for _, a, k, res in explored():
        if isinstance(res, OrbitGraph):
            graphs += 1
            f = orbit_bound(k, a.max_constant, a.n)
            ok &= len(res.nodes) <= f
            worst = max(worst, len(res.nodes))
    report(4, ok, f"{graphs} graphs within f(k,m,n) (largest {worst} orbits); "
                  f"normalised example at k=1: f = 4*2^{l1n.n * 3} = {f_l1}")


# 5 ---------------------------------------------------------------------------------

def test_criterion_5_oracle_agreement():
    t0 = time.perf_counter()
    rng = random.Random(0)
    agree = disagree = budget = deep = 0
    for _ in range(200):
        m = rng.randint(1, 2)
        a = random_greedy_nta(rng, n=rng.randint(2, 3), m=m,
                              alphabet=("a", "b")[:rng.randint(1, 2)])
        x1 = random_macro(rng, a.locations, m)
        x2 = random_macro(rng, a.locations, m, now=x1.now) if rng.random() < 0.6 else x1
        bd = bounded_difference(a, x1, x2, 4)
        try:
            v = macro_equivalent(a, x1, x2, budget=200_000)
        except BudgetExceeded:
            budget += 1
            continue
        if bd is not None:
            good = not v.included and len(v.counterexample) <= 4
        elif v.included:
            good = True
        else:
            # a difference beyond the oracle's depth: it must replay
            w = v.counterexample
            good = len(w) > 4 and (accepts_from(a, config_set_of(x1), w)
                                   != accepts_from(a, config_set_of(x2), w))
            deep += good
        if not v.included:
            w = v.counterexample
            good &= accepts_from(a, config_set_of(x1), w) != accepts_from(a, config_set_of(x2), w)
        agree += good
        disagree += not good
    dt = time.perf_counter() - t0
    report(5, disagree == 0 and dt < 1800,
           f"{agree} agree, {disagree} disagree, {budget} inconclusive (budget), "
           f"{deep} differences deeper than 4; {dt:.0f}s")


# 6 ---------------------------------------------------------------------------------

def _random_automorphism(rng):
    srcs = sorted({F(rng.randint(0, 23), 24) for _ in range(3)})
    while True:
        imgs = sorted({F(rng.randint(0, 47), 48) for _ in srcs})
        if len(imgs) == len(srcs):
            break
    r = rng.randint(0, len(srcs) - 1)
    imgs = imgs[r:] + [b + 1 for b in imgs[:r]]
    # a positive shift keeps images of nonnegative times nonnegative
    z = rng.randint(1, 3)
    return TimedAutomorphism((a, b + z) for a, b in zip(srcs, imgs))


def _fixing_automorphism(rng, values):
    """Random automorphism fixing every given value (and its integer shifts)."""
    fs = sorted({frac(v) for v in values})
    anchors = [(f, f) for f in fs]
    gaps = list(zip(fs, fs[1:] + [fs[0] + 1]))
    lo, hi = rng.choice(gaps)
    a = lo + (hi - lo) * F(rng.randint(1, 9), 10)
    b = lo + (hi - lo) * F(rng.randint(1, 9), 10)
    if frac(a) not in fs:
        anchors.append((frac(a), b - floor(a)))
    return TimedAutomorphism(anchors)


def _random_config(rng, a):
    mu = F(rng.randint(0, 16), rng.choice([2, 3, 4, 6]))
    now = mu + F(rng.randint(0, 8), rng.choice([2, 3, 4]))
    return Configuration(rng.choice(a.locations), (mu,), now)


def _random_word(rng, a, start, values, n):
    letters, t = [], start
    for _ in range(n):  # times reuse the fractions of the given values
        base = rng.choice(values + [t])
        t = max(t, t - frac(t) + frac(base)) + rng.choice([0, 0, 1]) + (
            F(rng.randint(1, 7), 8) if rng.random() < 0.3 else 0)
        letters.append((rng.choice(a.alphabet), t))
    return TimedWord(letters)


def test_criterion_6_invariance():
    rng = random.Random(6)
    autos = [random_greedy_nta(rng, n=3, m=rng.randint(1, 2)) for _ in range(10)]
    autos.append(parse_automaton(L1_TEXT))
    fails = [0, 0, 0, 0]
    for _ in range(1000):
        a = rng.choice(autos)
        pi = _random_automorphism(rng)
        c = _random_config(rng, a)
        # transition transport
        t = c.now + F(rng.randint(0, 12), 4)
        sym = rng.choice(a.alphabet)
        img = {apply(pi, d) for d in successors(a, c, sym, t)}
        fails[0] += img != successors(a, apply(pi, c), sym, pi(t))
        # language transport: w from c iff pi(w) from pi(c)
        w = _random_word(rng, a, c.now, [c.mu[0]], rng.randint(1, 4))
        fails[1] += accepts(a, w, [c]) != accepts(a, apply(pi, w), [apply(pi, c)])
        # language of c is fixed by automorphisms fixing its values and now
        sigma = _fixing_automorphism(rng, [c.mu[0], c.now])
        fails[2] += accepts(a, w, [c]) != accepts(a, apply(sigma, w), [c])
        # the same through the bounded oracle on a closed macro-configuration
        m = a.max_constant
        sup = sorted({c.now} | ({c.mu[0]} if c.now - m < c.mu[0] and frac(c.mu[0]) != frac(c.now)
                                else set()))
        x = close_under(sup, [(c.location, max(c.mu[0], c.now - m + F(1, 7)))], c.now, m)
        sigma = _fixing_automorphism(rng, sup)
        fails[3] += not bounded_equivalent(a, x, apply(sigma, x), 4)
    report(6, fails == [0, 0, 0, 0],
           f"1000 trials each: transport {fails[0]}, language transport {fails[1]}, "
           f"value-fixing invariance {fails[2]}, bounded-oracle invariance {fails[3]} failures")


# 7 ---------------------------------------------------------------------------------

def test_criterion_7_structural():
    ok, emitted, budget = True, 0, 0
    for name, a, k, res in explored():
        if res is None:
            budget += 1
        if isinstance(res, OrbitGraph):
            b = emit_dta(res, a)
            emitted += 1
            ok &= (is_deterministic(b) and b.is_always_resetting
                   and b.max_constant <= a.max_constant and b.n == len(res.nodes))
    for name, k in CRAFTED:
        v = decide_membership(load_sample(name), k)
        b = v.witness
        emitted += 1
        ok &= b is not None and is_deterministic(b) and b.max_constant <= max(v.max_const, 0)
        ok &= b is not None and (b.k == 0 or b.is_always_resetting)
    report(7, ok, f"{emitted} emitted automata deterministic, always resetting, constant <= m; "
                  f"edge re-derivation never disagreed ({budget} explorations over budget)")


# 8 ---------------------------------------------------------------------------------

def test_criterion_8_regions():
    ok = all(region_count(k, m) == len(grid_classes(k, m)) == GRID_COUNTS[(k, m)]
             for k in range(3) for m in range(4))
    rng = random.Random(8)
    bad = 0
    for _ in range(10_000):
        k, m = rng.randint(1, 2), rng.randint(0, 3)
        v = [F(rng.randint(0, 8 * (m + 2)), rng.choice([1, 2, 3, 4, 8])) for _ in range(k)]
        names = [f"x{i + 1}" for i in range(k)]
        r = region_of(v, k, m)
        c = region_to_constraint(r, names)
        bad += not (c.holds(dict(zip(names, v))) and region_of(r.realiser, k, m) == r)
    report(8, ok and bad == 0, f"counts match the grid oracle for k<=2, m<=3; "
                               f"10^4 round trips, {bad} failures")


# 9 ---------------------------------------------------------------------------------

def test_criterion_9_lcm_faults():
    t0 = time.perf_counter()
    ok, cells = True, 0
    for name, (text, run) in CASES.items():
        m = parse_lcm(text)
        a = encode_lcm(m)
        steps = parse_run(m, run)
        ok &= len(m.counters) == 4 and a.k == 1 and a.max_constant == 1
        ok &= not accepts(a, reversal_encoding(m, steps))
        faults = single_faults(m, steps)
        ok &= set(faults) == {"control", "counter", "partner"}
        for w in faults.values():
            ok &= accepts(a, w)
            cells += 1
    dt = time.perf_counter() - t0
    report(9, ok and cells == 15 and dt < 60,
           f"{len(CASES)} encodings rejected, {cells}/15 single faults accepted ({dt:.1f}s)")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
