"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Time limits are part of the verdict. The machine this runs on may have fewer
cores than the targets assume, so limits are never scaled down or skipped.
"""
import json
import time
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction

import pytest

from thetanorm.cli import main
from thetanorm.ordercomb import canonicalize_cyclic
from thetanorm.search import eval_regular
from thetanorm.verify import verify_identities

TIED_MAXIMA = {
    "1,1,1,1,2,3,4": "2/15",
    "1,1,1,2,2,3,4": "7/45",
    "1,1,1,2,3,3,4": "7/45",
    "1,1,2,2,3,3,4": "8/45",
    "1,1,1,2,3,4,5": "8/45",
    "1,1,2,2,3,4,5": "1/5",
    "1,1,2,3,4,5,6": "2/9",
}
REGULAR3 = [[1, 2, 3, 4, 5, 6, 7], list(canonicalize_cyclic((1, 3, 5, 7, 2, 4, 6))),
           list(canonicalize_cyclic((1, 4, 7, 3, 6, 2, 5)))]


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def cli_json(tmp_path, name, *args):
    out = tmp_path / name
    t0 = time.monotonic()
    code = main([*args, "--out", str(out)])
    return code, json.loads(out.read_text()), time.monotonic() - t0


@pytest.fixture(scope="module")
def exhaustive_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("acc")
    return cli_json(tmp, "n3.json", "norm", "--n", "3", "--mode", "exhaustive")


def test_criterion_1_paper_fast(tmp_path, capsys):
    code, data, dt = cli_json(tmp_path, "f.json", "norm", "--n", "3", "--mode", "paper-fast")
    ok = code == 0 and data["norm"] == "11/45" and dt < 10
    report(capsys, 1, ok, f"paper-fast n=3 norm {data['norm']} in {dt:.1f} s (target 11/45, < 10 s)")


def test_criterion_2_exhaustive(exhaustive_run, capsys):
    code, data, dt = exhaustive_run
    regular = REGULAR3 in data["witnesses"]
    ok = code == 0 and data["norm"] == "11/45" and data["complete"] and regular and dt < 1800
    report(capsys, 2, ok, f"exhaustive n=3 norm {data['norm']}, regular witness {regular}, {dt:.1f} s (target < 1800 s)")


def test_criterion_3_pattern_maxima(exhaustive_run, capsys):
    _, data, dt = exhaustive_run
    got = {k: data["per_pattern_maxima"][k] for k in TIED_MAXIMA}
    ok = got == TIED_MAXIMA and dt < 300
    report(capsys, 3, ok, f"7 pattern maxima {'match' if got == TIED_MAXIMA else got} in {dt:.1f} s (target < 300 s)")


def test_criterion_4_small_n(tmp_path, capsys):
    c2, d2, t2 = cli_json(tmp_path, "n2.json", "norm", "--n", "2", "--mode", "exhaustive")
    c1, d1, t1 = cli_json(tmp_path, "n1.json", "norm", "--n", "1")
    ok = c2 == c1 == 0 and d2["norm"] == "2/3" and t2 < 10 and d1["norm"] == "1" and t1 < 1
    report(capsys, 4, ok, f"n=2 {d2['norm']} in {t2:.2f} s; n=1 {d1['norm']} in {t1:.2f} s")


def test_criterion_5_regular(capsys):
    expected = {1: Fraction(1), 2: Fraction(2, 3), 3: Fraction(11, 45)}
    parts, ok = [], True
    for n, want in expected.items():
        t0 = time.monotonic()
        v = eval_regular(n)
        dt = time.monotonic() - t0
        ok &= v == want and dt < 1
        parts.append(f"n={n} {v} ({dt:.2f} s)")
    t0 = time.monotonic()
    v4 = eval_regular(4)
    dt = time.monotonic() - t0
    ok &= dt < 10
    parts.append(f"n=4 {v4} ({dt:.2f} s, recorded)")
    report(capsys, 5, ok, "; ".join(parts))


def test_criterion_6_identities(capsys):
    t0 = time.monotonic()
    items = verify_identities(seed=0, samples=10_000, n=3)
    dt = time.monotonic() - t0
    needed = {"i01-reduced-equals-direct", "i02-alternation", "i03-cocycle", "i04-factor-swap",
              "i05-rotation", "i06-reflection"}
    failed = [it.id for it in items if not it.passed]
    ok = needed <= {it.id for it in items} and not failed and dt < 300
    report(capsys, 6, ok, f"{len(items)} identity checks at 10^4 samples, failures {failed or 'none'}, {dt:.1f} s")


def test_criterion_7_three_rank_patterns(exhaustive_run, capsys):
    _, data, dt = exhaustive_run
    three = {k: Fraction(v) for k, v in data["per_pattern_maxima"].items() if max(map(int, k.split(","))) == 3}
    worst = max(three.values())
    ok = len(three) == 15 and worst < Fraction(11, 45) and dt < 600
    report(capsys, 7, ok, f"{len(three)} three-rank patterns, largest max {worst} < 11/45, {dt:.1f} s")


def test_criterion_8_bound(tmp_path, capsys):
    t0 = time.monotonic()
    assert main(["bound", "--n", "3", "--volume", "1", "--out", str(tmp_path / "b1")]) == 0
    assert main(["bound", "--n", "3", "--volume", "pi^3", "--out", str(tmp_path / "b2")]) == 0
    dt = time.monotonic() - t0
    b1 = dict(line.split(" = ", 1) for line in (tmp_path / "b1").read_text().splitlines())
    b2 = dict(line.split(" = ", 1) for line in (tmp_path / "b2").read_text().splitlines())
    ok = (
        Context(prec=12, rounding=ROUND_HALF_EVEN).plus(Decimal(b1["lower_bound"])) == Decimal("0.131938095409")
        and b1["symbolic"] == "45/(11*pi^3)"
        and b2["exact"] == "45/11"
        and dt < 1
    )
    report(capsys, 8, ok, f"volume 1 -> {b1['lower_bound']} ({b1['symbolic']}); volume pi^3 -> {b2['exact']}; {dt:.2f} s")


def test_criterion_9_determinism(tmp_path, capsys):
    runs = []
    for i, threads in enumerate(("1", "1", "2")):
        out = tmp_path / f"v{i}.json"
        code = main(["verify", "--suite", "all", "--rng-seed", "5", "--threads", threads, "--out", str(out)])
        runs.append((code, out.read_bytes()))
    same = runs[0][1] == runs[1][1] == runs[2][1]
    ok = same and all(code == 0 for code, _ in runs)
    report(capsys, 9, ok, f"verify --suite all: byte-identical across 2 runs and threads 1/2: {same}; exit codes {[c for c, _ in runs]}")
