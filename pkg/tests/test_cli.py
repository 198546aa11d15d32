import json
import subprocess
import sys

from tadet.cli import main
from tadet.core import accepts, parse_automaton, parse_word

from conftest import SAMPLES

L1 = str(SAMPLES / "example_l1.nta")


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_regions(capsys):
    code, out = run(capsys, "regions", "-k", "1", "-m", "1", "--list")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "4" and len(lines) == 5


def test_membership_no_with_report(capsys, tmp_path):
    rep = tmp_path / "r.json"
    code, out = run(capsys, "membership", L1, "--clocks", "1", "--json", str(rep))
    assert code == 1 and out.startswith("NO")
    data = json.loads(rep.read_text())
    assert data["verdict"] == "NO" and data["clocks"] == 1 and data["maxConst"] == 1
    assert {"orbitCount", "fBound", "timings", "refutationPrefix"} <= set(data)


def test_membership_yes_emits_witness(capsys, tmp_path):
    out_file = tmp_path / "w.nta"
    rep = tmp_path / "r.json"
    code, out = run(capsys, "membership", str(SAMPLES / "two_clock.nta"), "-k", "2",
                    "--emit", str(out_file), "--json", str(rep), "--check")
    assert code == 0 and out.startswith("YES")
    w = parse_automaton(out_file.read_text())
    assert w.is_deterministic and w.k == 2
    assert json.loads(rep.read_text())["witnessFile"] == str(out_file)


def test_membership_unknown(capsys):
    code, out = run(capsys, "membership", str(SAMPLES / "two_clock.nta"), "-k", "1")
    assert code == 2 and out.startswith("UNKNOWN")


def test_membership_slow_gate(capsys, tmp_path):
    enc = tmp_path / "enc.nta"
    assert main(["gen-lcm", str(SAMPLES / "counter.lcm"), "-o", str(enc)]) == 0
    code, out = run(capsys, "membership", str(enc), "-k", "1")
    assert code == 2 and "--slow" in out


def test_trace(capsys):
    code, out = run(capsys, "trace", L1, "-k", "1", "--word", "a@0 a@1/2")
    assert code == 0 and "OVERFLOW" in out and "{0, 1/2}" in out


def test_equiv(capsys):
    left = '{"now": "1/2", "support": ["0", "1/2"], "slots": [{"point": "0", "locations": ["q"]}]}'
    right = '{"now": "1/2", "support": ["1/2"], "slots": [{"point": "1/2", "locations": ["q"]}]}'
    code, out = run(capsys, "equiv", L1, "--left", left, "--right", right)
    assert code == 1 and "a@1" in out
    code, out = run(capsys, "equiv", L1, "--left", left, "--right", left)
    assert code == 0
    code, out = run(capsys, "equiv", L1, "--left", left, "--right", right, "--bounded", "1")
    assert code == 1


def test_encode_run_and_gen(capsys, tmp_path):
    code, out = run(capsys, "encode-run", str(SAMPLES / "counter.lcm"), "--run", "i0 i1")
    assert code == 0
    w = parse_word(out.strip())
    enc = tmp_path / "enc.nta"
    assert main(["gen-lcm", str(SAMPLES / "counter.lcm"), "-o", str(enc)]) == 0
    a = parse_automaton(enc.read_text())
    assert a.k == 1 and a.max_constant == 1 and not accepts(a, w)


def test_compose_sample_difftest_dot(capsys, tmp_path):
    b = tmp_path / "b.nta"
    b.write_text("automaton U\nalphabet b\nclocks\nlocation u init final\n"
                 "trans u -> u on b when true\n")
    out_file = tmp_path / "c.nta"
    assert main(["compose", str(b), L1, "-o", str(out_file)]) == 0
    c = parse_automaton(out_file.read_text())
    assert accepts(c, parse_word("b@0 $@1 a@1 a@2"))
    code, out = run(capsys, "sample", L1, "-n", "5", "--seed", "3")
    assert code == 0 and len(out.splitlines()) == 5
    code, out = run(capsys, "difftest", L1, L1, "-n", "200")
    assert code == 0 and "mismatches: 0" in out
    code, out = run(capsys, "dot", L1)
    assert code == 0 and out.startswith("digraph")


def test_errors_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.nta"
    bad.write_text("automaton X\nalphabet a\nclocks x\nlocation p init\ntrans p -> q on a when true\n")
    assert main(["dot", str(bad)]) == 3
    assert main(["dot", str(tmp_path / "missing.nta")]) == 3


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "tadet.cli", "regions", "-k", "2", "-m", "1"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "32"
