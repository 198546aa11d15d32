import itertools
import random
from fractions import Fraction as F

import pytest

from tadet.core.constraints import Atom
from tadet.regions import (
    enumerate_regions, region_count, region_of, region_to_constraint, timestamp_region_choices,
)

# grid-classification oracle: valuations on a rational grid with denominator 4,
# grouped by the truth values of all atoms x ~ z and x - y ~ z with |z| <= m
GRID_COUNTS = {
    (0, 0): 1, (0, 1): 1, (0, 2): 1, (0, 3): 1,
    (1, 0): 2, (1, 1): 4, (1, 2): 6, (1, 3): 8,
    (2, 0): 6, (2, 1): 32, (2, 2): 78, (2, 3): 144,
    (3, 1): 424,
}


def atom_signature(v, m):
    k = len(v)
    sig = []
    for i in range(k):
        sig += [(v[i] < z, v[i] == z) for z in range(m + 1)]
        for j in range(i + 1, k):
            sig += [(v[i] - v[j] < z, v[i] - v[j] == z) for z in range(-m, m + 1)]
    return tuple(sig)


def grid_classes(k, m, top=None):
    top = 2 * m + 3 if top is None else top
    vals = [F(i, 4) for i in range(4 * top + 1)]
    return {atom_signature(v, m) for v in itertools.product(vals, repeat=k)}


@pytest.mark.parametrize("k,m", [(k, m) for k in range(3) for m in range(4)])
def test_count_matches_grid_oracle(k, m):
    assert region_count(k, m) == len(grid_classes(k, m)) == GRID_COUNTS[(k, m)]


def test_three_clocks_frozen():
    assert region_count(3, 1) == GRID_COUNTS[(3, 1)]


def test_one_clock_one_constant_listing():
    regs = enumerate_regions(1, 1)
    assert len(regs) == 4
    reps = [F(0), F(1, 2), F(1), F(3, 2), F(7)]
    assert {region_of([v], 1, 1) for v in reps} == set(regs)


def test_regions_are_distinct_atom_classes():
    for k, m in [(1, 2), (2, 1), (2, 2)]:
        sigs = [atom_signature(r.realiser, m) for r in enumerate_regions(k, m)]
        assert len(set(sigs)) == len(sigs)


def test_triangle_region():
    r = region_of([F(3, 2), F(21, 5)], 2, 5)
    c = region_to_constraint(r, ("x1", "x2"))
    diag = [a for a in c.atoms() if isinstance(a, Atom) and a.other is not None]
    assert diag, "the triangle needs a diagonal atom"
    assert c.holds({"x1": F(6, 5), "x2": F(41, 10)})
    assert c.holds({"x1": F(19, 10), "x2": F(41, 10)})
    assert not c.holds({"x1": F(11, 10), "x2": F(49, 10)})  # x2 - x1 > 3


def test_trivial_regions():
    z = region_of([F(0), F(0)], 2, 3)
    assert str(region_to_constraint(z)) == "x1 == 0 && x2 == 0"
    sat = region_of([F(7)], 1, 2)
    assert sat.is_saturated(0)
    assert region_to_constraint(sat, ("x",)).holds({"x": F(5, 2)})
    assert not region_to_constraint(sat, ("x",)).holds({"x": F(2)})
    assert region_count(0, 4) == 1 and len(enumerate_regions(0, 2)) == 1


def test_realisers_round_trip():
    for k, m in [(1, 2), (2, 1), (2, 3), (3, 1)]:
        for r in enumerate_regions(k, m):
            assert region_of(r.realiser, k, m) == r


def test_random_round_trip():
    rng = random.Random(11)
    for _ in range(10_000):
        k, m = rng.randint(1, 2), rng.randint(0, 3)
        v = [F(rng.randint(0, 8 * (m + 2)), rng.choice([1, 2, 3, 4, 8])) for _ in range(k)]
        r = region_of(v, k, m)
        names = [f"x{i + 1}" for i in range(k)]
        c = region_to_constraint(r, names)
        assert c.holds(dict(zip(names, v)))
        assert c.holds(dict(zip(names, r.realiser)))
        w = [F(rng.randint(0, 8 * (m + 2)), 4) for _ in range(k)]
        assert c.holds(dict(zip(names, w))) == (region_of(w, k, m) == r)


def test_choices_from_zero():
    got = timestamp_region_choices([F(0)], F(0), 1)
    assert [t for _, t in got] == [F(0), F(1, 2), F(1), F(2)]
    assert len({r for r, _ in got}) == 4


def test_choices_timeless():
    got = timestamp_region_choices([], F(3, 2), 2)
    assert len(got) == 1 and got[0][1] == F(3, 2)


def test_choices_match_dense_scan():
    mu, now, m = [F(0), F(1, 2)], F(1, 2), 1
    got = {r for r, _ in timestamp_region_choices(mu, now, m)}
    scan = {region_of([t - x for x in mu], 2, m)
            for t in (now + F(i, 24) for i in range(24 * (m + 2) + 1))}
    assert got == scan
    assert region_of([F(3, 2), F(1)], 2, m) in got


def test_region_of_rejects_bad_input():
    with pytest.raises(ValueError):
        region_of([F(1)], 2, 1)
    with pytest.raises(ValueError):
        region_of([F(-1)], 1, 1)
