"""Command line interface: ``tadet <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .core.automaton import format_word, parse_rational, parse_word
from .core.nta_format import dump_automaton, parse_automaton, to_dot
from .langequiv import DEFAULT_BUDGET, BudgetExceeded, macro_equivalent
from .oracle import bounded_difference
from .orbits import OpenInterval, Point, close_under
from .pipeline import decide_membership, trace_word
from .regions import default_clock_names, enumerate_regions, region_count, region_to_constraint
from .workbench.compose import compose
from .workbench.lcm import encode_lcm, parse_lcm, parse_run, reversal_encoding
from .workbench.sampling import TimeProfile, differential_test, sample_words

log = logging.getLogger("tadet")

# membership on bigger inputs (e.g. encoded counter machines) needs --slow
SLOW_LOCATIONS = 40


def _load(path: str):
    return parse_automaton(Path(path).read_text())


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def macro_from_json(spec: dict, m: int):
    """``{now, support[], slots[{point | interval, locations[]}]}``, closed under
    the support."""
    now = parse_rational(str(spec["now"]))
    support = [parse_rational(str(s)) for s in spec.get("support", [])]
    items = []
    for slot in spec.get("slots", []):
        if "point" in slot:
            d = Point(parse_rational(str(slot["point"])))
        else:
            lo, hi = slot["interval"]
            d = OpenInterval(parse_rational(str(lo)), parse_rational(str(hi)))
        items += [(p, d) for p in slot["locations"]]
    return close_under(support, items, now, m)


def cmd_regions(args) -> int:
    print(region_count(args.clocks, args.max_const))
    if args.list:
        names = default_clock_names(args.clocks)
        for r in enumerate_regions(args.clocks, args.max_const):
            print(region_to_constraint(r, names))
    return 0


def _json_arg(text: str) -> dict:
    p = Path(text)
    return json.loads(p.read_text() if p.exists() else text)


def cmd_equiv(args) -> int:
    a = _load(args.automaton)
    m = a.max_constant
    x1 = macro_from_json(_json_arg(args.left), m)
    x2 = macro_from_json(_json_arg(args.right), m)
    if args.bounded is not None:
        w = bounded_difference(a, x1, x2, args.bounded)
        print("equivalent up to length", args.bounded if w is None else f"no: {format_word(w)}")
        return 0 if w is None else 1
    try:
        v = macro_equivalent(a, x1, x2, args.budget)
    except BudgetExceeded as e:
        print("unknown:", e)
        return 2
    print("equivalent" if v.included else f"not equivalent: {format_word(v.counterexample)}")
    return 0 if v.included else 1


def cmd_membership(args) -> int:
    a = _load(args.automaton)
    if a.n > SLOW_LOCATIONS and not args.slow:
        print(f"refusing: {a.n} locations (more than {SLOW_LOCATIONS}); pass --slow to run anyway")
        return 2
    v = decide_membership(a, args.clocks, args.mode, args.max_const, args.budget, args.check)
    print(v.answer)
    if v.refutation is not None:
        print(f"refutation: {format_word(v.refutation.prefix)} needs support "
              + "{" + ", ".join(map(str, v.refutation.support)) + "}")
    if v.reason:
        print("note:", v.reason)
    report = v.to_json()
    emitted = v.witness or v.candidate
    if args.emit and emitted is not None:
        Path(args.emit).write_text(dump_automaton(emitted))
        report["witnessFile"] = args.emit
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2) + "\n")
    return {"YES": 0, "NO": 1}.get(v.answer, 2)


def cmd_trace(args) -> int:
    a = _load(args.automaton)
    for e in trace_word(a, args.clocks, parse_word(args.word), args.budget):
        head = "start" if e.letter is None else f"{e.letter[0]}@{e.letter[1]}"
        sup = "{" + ", ".join(map(str, e.support)) + "}"
        flag = "  OVERFLOW" if e.overflow else ""
        print(f"{head:>12}  support {sup}{flag}\n{'':>12}  {e.macro}")
    return 0


def cmd_gen_lcm(args) -> int:
    m = parse_lcm(Path(args.machine).read_text())
    _write(dump_automaton(encode_lcm(m, args.name)), args.output)
    return 0


def cmd_encode_run(args) -> int:
    m = parse_lcm(Path(args.machine).read_text())
    print(format_word(reversal_encoding(m, parse_run(m, args.run))))
    return 0


def cmd_compose(args) -> int:
    _write(dump_automaton(compose(_load(args.left), _load(args.right), args.sep)), args.output)
    return 0


def _profile(args) -> TimeProfile:
    return TimeProfile(collision=args.collision, grid=args.grid, max_gap=args.max_gap)


def cmd_sample(args) -> int:
    src = _load(args.automaton) if args.automaton else args.alphabet.split(",")
    for w in sample_words(src, args.n, (args.min_length, args.length), args.seed, _profile(args)):
        print(format_word(w))
    return 0


def cmd_difftest(args) -> int:
    a, b = _load(args.a), _load(args.b)
    words = sample_words(a, args.n, (args.min_length, args.length), args.seed, _profile(args))
    rep = differential_test(a, b, words, args.replay_dir)
    print(rep.summary())
    for i, w, x, y in rep.mismatches[:10]:
        print(f"  #{i}: A={x} B={y}  {format_word(w)}")
    return 0 if rep.ok else 1


def cmd_dot(args) -> int:
    _write(to_dot(_load(args.automaton)), args.output)
    return 0


def _sampling_opts(p):
    p.add_argument("-n", type=int, default=100, help="number of words")
    p.add_argument("--length", type=int, default=5, help="maximal word length")
    p.add_argument("--min-length", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--collision", type=float, default=0.3, help="fraction-collision rate")
    p.add_argument("--grid", type=float, default=0.2, help="rate of integer timestamps")
    p.add_argument("--max-gap", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tadet", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("regions", help="count (and list) k,m-regions")
    p.add_argument("--clocks", "-k", type=int, required=True)
    p.add_argument("--max-const", "-m", type=int, required=True)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("equiv", help="language equivalence of two macro-configurations")
    p.add_argument("automaton")
    p.add_argument("--left", required=True, help="JSON text or file")
    p.add_argument("--right", required=True, help="JSON text or file")
    p.add_argument("--bounded", type=int, help="use the bounded oracle up to this length")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("membership", help="is the language recognised by a k-clock DTA?")
    p.add_argument("automaton")
    p.add_argument("--clocks", "-k", type=int, required=True)
    p.add_argument("--mode", choices=("kdta", "kmdta"), default="kdta")
    p.add_argument("--max-const", type=int, help="target constant in kmdta mode")
    p.add_argument("--json", help="write a JSON report here")
    p.add_argument("--emit", help="write the witness (or candidate) automaton here")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--check", action="store_true", help="re-derive every edge from a second timestamp")
    p.add_argument("--slow", action="store_true", help=f"allow inputs with more than {SLOW_LOCATIONS} locations")
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("trace", help="run the determinisation along one word")
    p.add_argument("automaton")
    p.add_argument("--clocks", "-k", type=int, required=True)
    p.add_argument("--word", required=True, help='e.g. "a@0 a@1/2"')
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("gen-lcm", help="NTA for the non-encodings of a counter machine's runs")
    p.add_argument("machine")
    p.add_argument("-o", "--output")
    p.add_argument("--name", default="lcm")
    p.set_defaults(func=cmd_gen_lcm)

    p = sub.add_parser("encode-run", help="reversal-encoding of a counter machine run")
    p.add_argument("machine")
    p.add_argument("--run", required=True, help='instruction names, e.g. "i0 i1:1,0,0,0"')
    p.set_defaults(func=cmd_encode_run)

    p = sub.add_parser("compose", help="L $ M composition")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("-o", "--output")
    p.add_argument("--sep", default="$")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("sample", help="print seeded random timed words")
    p.add_argument("automaton", nargs="?")
    p.add_argument("--alphabet", default="a,b")
    _sampling_opts(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("difftest", help="compare two automata on sampled words")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--replay-dir")
    _sampling_opts(p)
    p.set_defaults(func=cmd_difftest)

    p = sub.add_parser("dot", help="Graphviz rendering")
    p.add_argument("automaton")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_dot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
