import csv
import io as stdio
import shutil
import subprocess
import sys

import pytest

from fsi import io
from fsi.baselines import merge_intersect
from fsi.cli import main


@pytest.fixture
def gen_pair(tmp_path, capsys):
    prefix = str(tmp_path / "s")
    assert main(["gen", "--k", "2", "--sizes", "1000,1000", "--r", "10", "--seed", "3",
                 "--out-prefix", prefix]) == 0
    out = capsys.readouterr().out
    assert "intersection size: 10" in out
    return tmp_path / "s1.set", tmp_path / "s2.set"


def _build(src, dst, *extra):
    return main(["build", "--in", str(src), "--out", str(dst), *extra])


def test_gen_verify_and_determinism(gen_pair, tmp_path, capsys):
    a, b = gen_pair
    assert len(merge_intersect([io.read_set(a), io.read_set(b)]).elements) == 10
    first = a.read_bytes()
    main(["gen", "--sizes", "1000,1000", "--r", "10", "--seed", "3", "--out-prefix", str(tmp_path / "s")])
    assert a.read_bytes() == first
    main(["gen", "--sizes", "50,60", "--r", "0", "--seed", "1", "--out-prefix", str(tmp_path / "d")])
    assert not set(io.read_set(tmp_path / "d1.set")) & set(io.read_set(tmp_path / "d2.set"))


def test_fsi_seed_env(tmp_path, monkeypatch):
    monkeypatch.setenv("FSI_SEED", "17")
    main(["gen", "--sizes", "30", "--out-prefix", str(tmp_path / "e")])
    main(["gen", "--sizes", "30", "--seed", "17", "--out-prefix", str(tmp_path / "f")])
    assert (tmp_path / "e1.set").read_bytes() == (tmp_path / "f1.set").read_bytes()


def test_build_ranscan_ratio(tmp_path, capsys):
    src = tmp_path / "x.set"
    main(["gen", "--sizes", "6400", "--k", "1", "--seed", "4", "--out-prefix", str(tmp_path / "x")])
    src = tmp_path / "x1.set"
    capsys.readouterr()
    assert _build(src, tmp_path / "x.idx", "--algo", "ranscan", "--m", "2") == 0
    out = capsys.readouterr().out
    ratio = float(out.split("ratio: ")[1].split()[0])
    # 1 + (m+1)/sqrt(w) = 1.375 with 800 ideal blocks; the power-of-two count is 1024
    assert ratio == pytest.approx(1 + 3 * 1024 / 6400, abs=1e-4)
    rounding = 1024 / 800
    assert 1 <= rounding < 2
    assert ratio - 1 == pytest.approx(3 / 8 * rounding, abs=1e-4)


@pytest.mark.parametrize("algo,extra", [("ranscan", []), ("ranscan", ["--compressed"]),
                                        ("multires", []), ("intgroup", [])])
def test_build_round_trip(tmp_path, gen_pair, algo, extra):
    a, _ = gen_pair
    out = tmp_path / "a.idx"
    assert _build(a, out, "--algo", algo, *extra) == 0
    data = out.read_bytes()
    assert io.encode_index(io.read_index(out)) == data


def test_build_empty_set(tmp_path):
    src = tmp_path / "empty.set"
    io.write_set(src, [])
    for algo in ("ranscan", "multires", "intgroup"):
        assert _build(src, tmp_path / f"{algo}.idx", "--algo", algo) == 0
        assert io.read_index(tmp_path / f"{algo}.idx").n == 0


def test_build_corrupt_input(tmp_path, capsys):
    bad = tmp_path / "bad.set"
    bad.write_bytes(b"FSI1garbage")
    assert _build(bad, tmp_path / "o.idx", "--algo", "ranscan") == 2


@pytest.mark.parametrize("algo,compressed", [("ranscan", False), ("ranscan", True)])
def test_intersect_indexes_verify(tmp_path, gen_pair, capsys, algo, compressed):
    a, b = gen_pair
    flag = ["--compressed"] if compressed else []
    _build(a, tmp_path / "a.idx", "--algo", algo, *flag)
    _build(b, tmp_path / "b.idx", "--algo", algo, *flag)
    capsys.readouterr()
    assert main(["intersect", "--algo", "ranscan", str(tmp_path / "a.idx"), str(tmp_path / "b.idx"),
                 "--verify", "--out", str(tmp_path / "r.set")]) == 0
    err = capsys.readouterr().err
    assert "verify: ok" in err and "tuples_filtered=" in err
    assert len(io.read_set(tmp_path / "r.set")) == 10


def test_intersect_sets_stdout(gen_pair, capsys):
    a, _ = gen_pair
    assert main(["intersect", "--algo", "galloping", str(a), str(a)]) == 0
    lines = capsys.readouterr().out.split()
    assert [int(v) for v in lines] == io.read_set(a)


def test_hashbin_matches_merge_on_skew(tmp_path, capsys):
    main(["gen", "--sizes", "20,20000", "--r", "4", "--seed", "5", "--out-prefix", str(tmp_path / "k")])
    paths = [str(tmp_path / "k1.set"), str(tmp_path / "k2.set")]
    capsys.readouterr()
    assert main(["intersect", "--algo", "hashbin", *paths, "--verify"]) == 0
    hb = capsys.readouterr().out
    assert main(["intersect", "--algo", "merge", *paths]) == 0
    assert capsys.readouterr().out == hb


def test_incompatible_indexes(tmp_path, gen_pair, capsys):
    a, b = gen_pair
    _build(a, tmp_path / "a.idx", "--algo", "ranscan", "--seed", "1")
    _build(b, tmp_path / "b.idx", "--algo", "ranscan", "--seed", "2")
    capsys.readouterr()
    assert main(["intersect", str(tmp_path / "a.idx"), str(tmp_path / "b.idx")]) == 2
    assert "seed differs" in capsys.readouterr().err


def test_usage_errors(tmp_path, gen_pair, capsys):
    a, b = gen_pair
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    assert main(["intersect", "--algo", "nope", str(a), str(b)]) == 1
    assert main(["bench", "--suite", "k", "--algos", "nope"]) == 1
    assert main(["intersect", "--algo", "intgroup", str(a), str(a), str(b)]) == 1
    _build(a, tmp_path / "a.idx", "--algo", "multires")
    assert main(["intersect", "--algo", "ranscan", str(tmp_path / "a.idx"), str(tmp_path / "a.idx")]) == 1
    assert main(["intersect", str(a), str(tmp_path / "a.idx")]) == 1
    assert main(["gen", "--sizes", "5,3", "--r", "4"]) == 2


def test_verify_mismatch_exit_code(gen_pair, monkeypatch, capsys):
    from fsi import engine
    a, b = gen_pair
    from fsi.result import Counters, IntersectionResult
    broken = engine.Algorithm("merge", engine.ALGORITHMS["merge"].prepare,
                              lambda sets: IntersectionResult([1], Counters()))
    monkeypatch.setitem(engine.ALGORITHMS, "merge", broken)
    assert main(["intersect", "--algo", "merge", str(a), str(b), "--verify"]) == 3


def test_bench_csv(capsys):
    assert main(["bench", "--suite", "k", "--sizes", "600", "--repeats", "2",
                 "--algos", "merge,ranscan,rangroup,intgroup"]) == 0
    rows = list(csv.DictReader(stdio.StringIO(capsys.readouterr().out)))
    assert {"suite", "algo", "n1", "n4", "r", "repeat", "wall_ns", "result_size",
            "tuples_filtered", "comparisons"} <= set(rows[0])
    assert len({r["result_size"] for r in rows if r["n3"] == ""}) == 1
    medians = [r for r in rows if r["repeat"] == "median"]
    # intgroup is two-set only
    assert len(medians) == 3 * 3 + 1
    # counters do not depend on the repeat
    by_algo = {}
    for r in rows:
        key = (r["algo"], r["n3"], r["n4"])
        counters = {k: v for k, v in r.items() if k not in ("repeat", "wall_ns")}
        by_algo.setdefault(key, counters)
        assert by_algo[key] == counters


@pytest.mark.parametrize("exp,extra", [("filterprob", ["--m", "4"]), ("groupsize", ["--n", "4096", "--trials", "20"]),
                                       ("collisions", [])])
def test_stats_csv(capsys, exp, extra):
    args = ["stats", "--exp", exp, *extra]
    if exp != "groupsize":
        args += ["--trials", "2000"]
    assert main(args) == 0
    rows = list(csv.DictReader(stdio.StringIO(capsys.readouterr().out)))
    assert {"value", "sigma", "ci95"} <= set(rows[0])
    if exp == "filterprob":
        vals = [float(r["value"]) for r in rows]
        assert len(vals) == 4 and vals == sorted(vals)
    if exp == "groupsize":
        assert 4 <= float(rows[0]["value"]) <= 8
    if exp == "collisions":
        assert float(rows[0]["value"]) <= 1.5


@pytest.mark.skipif(shutil.which("fsi") is None, reason="console script not installed")
def test_console_script(tmp_path):
    proc = subprocess.run(["fsi", "gen", "--sizes", "10,10", "--r", "2", "--out-prefix", str(tmp_path / "c")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "intersection size: 2" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "fsi.cli", "intersect"], capture_output=True, text=True)
    assert proc.returncode == 1
