import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from frobmoments import cli
from frobmoments.hurwitz import MAGIC, build_table, load_table


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_deuring_example():
    code, out, _ = run(["identity", "deuring", "--p", "5", "--r", "1", "--M", "1", "--nu-max", "3"])
    assert code == 0
    table = rows(out)
    assert [(r["nu"], r["m"]) for r in table] == [("0", "0"), ("1", "0"), ("2", "0"), ("3", "0")]
    assert table[0]["two_s"] == "10/1" and table[0]["h_flat"] == "8/1" and table[0]["e"] == "2/1"
    assert all(r["status"] == "ok" for r in table)


def test_hurwitz_writes_cache(tmp_path):
    code, out, _ = run(["hurwitz", "--max", "20000", "--cache", str(tmp_path)])
    assert code == 0
    (row,) = rows(out)
    path = tmp_path / "hurwitz_20000.bin"
    assert path.read_bytes()[:8] == MAGIC
    assert row["sha256"] == build_table(20000).checksum() == load_table(path).checksum()
    # warm cache: same bytes out
    assert run(["hurwitz", "--n-max", "20000", "--cache", str(tmp_path)])[1] == out


def test_env_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.ENV_CACHE, str(tmp_path))
    assert run(["hurwitz", "--n-max", "500"])[0] == 0
    assert (tmp_path / "hurwitz_500.bin").exists()


def test_satotate_csv():
    code, out, _ = run(["satotate", "--p", "1009", "--r", "1", "--M", "3", "--m", "1"])
    assert code == 0
    moments, disc = out.split("\n\n")
    table = rows(moments.split("\n", 1)[1])
    assert list(table[0]) == ["nu", "empirical", "sato_tate", "abs_error"]
    assert [int(r["nu"]) for r in table] == list(range(7))
    assert all(float(r["abs_error"]) < 0.05 for r in table)
    (d,) = rows(disc.split("\n", 1)[1])
    assert 0 <= float(d["ks_decimal"]) < 0.08


def test_moments_csv_and_json():
    code, out, _ = run(["moments", "--nu", "1", "--m", "1", "--M", "3", "--n-range", "1:9:2"])
    assert code == 0
    table = rows(out)
    assert [r["n"] for r in table] == ["1", "3", "5", "7", "9"]
    assert Fraction(int(table[0]["value_num"]), int(table[0]["value_den"])) == Fraction(1, 2)
    code, out, _ = run(["moments", "--nu", "0", "--m", "0", "--M", "1", "--n-range", "25:25",
                        "--p", "5", "--out", "json"])
    doc = json.loads(out)
    assert doc["moments"][0]["value_num"] == 48


def test_census_json_schema():
    code, out, _ = run(["census", "--p", "5", "--r", "2", "--mode", "exhaustive", "--out", "json"])
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"p", "r", "q", "mode", "classes"}
    assert doc["mode"] == "exhaustive" and doc["q"] == 25
    assert sum(Fraction(1, c["omega"]) for c in doc["classes"]) == 25
    assert all(isinstance(c["a"], str) and isinstance(c["t"], int) for c in doc["classes"])


def test_census_csv():
    code, out, _ = run(["census", "--p", "7"])
    assert code == 0
    assert rows(out)[0].keys() == {"j", "a", "b", "t", "omega"}


@pytest.mark.parametrize("which, extra", [
    ("kronecker", ["--n-range", "1:200"]),
    ("osaka", ["--k", "2", "--n-max", "12"]),
    ("hgtilde", ["--k", "2", "--M", "3", "--n-range", "1:40"]),
    ("deuring", ["--p", "7", "--r", "2", "--M", "4"]),
])
def test_identities_pass(which, extra):
    code, out, err = run(["identity", which] + extra)
    assert code == 0, err
    assert all(r["status"] == "ok" for r in rows(out))


def test_identity_failure_exit_1(monkeypatch):
    monkeypatch.setattr(cli, "osaka_check", lambda k, t, s: (Fraction(1), Fraction(2)))
    code, out, err = run(["identity", "osaka", "--k", "0", "--n-max", "3"])
    assert code == 1
    report = json.loads(err)
    assert report["failures"][0] == {"k": 0, "t": 2, "s": 1, "lhs": "1/1", "rhs": "2/1"}
    assert "FAIL" in out


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["census", "--p", "5", "--frobnicate"],
    ["census", "--p", "4"],
    ["census", "--p", "5", "--threads", "0"],
    ["moments", "--nu", "1", "--m", "0", "--M", "0", "--n-range", "1:2"],
    ["moments", "--nu", "1", "--m", "0", "--M", "3", "--n-range", "1-2"],
    ["identity", "deuring"],
    ["ratio-scan", "--M", "2", "--m", "0", "--j", "2", "--n-range", "100:200"],
    [],
])
def test_usage_errors(argv):
    code, _, err = run(argv)
    assert code == 2
    assert "usage" in err


def test_ratio_scan_cli():
    code, out, _ = run(["ratio-scan", "--M", "3", "--m", "1", "--j", "5", "--n-range", "100:2000"])
    assert code == 0
    body, summary = out.split("\n\n")
    table = rows(body.split("\n", 1)[1])
    assert list(table[0]) == ["p", "ratio_num", "ratio_den", "ratio_decimal"]
    assert all(int(r["p"]) % 36 == 5 for r in table)


@pytest.mark.parametrize("argv", [
    ["satotate", "--p", "1009", "--M", "2", "--m", "1"],
    ["ratio-scan", "--M", "3", "--m", "2", "--j", "7", "--n-range", "100:3000"],
    ["moments", "--nu", "3", "--m", "1", "--M", "4", "--n-range", "1:300"],
    ["census", "--p", "7", "--r", "2", "--out", "json"],
])
def test_deterministic_across_threads(argv, tmp_path):
    cache = ["--cache", str(tmp_path)]
    first = run(argv + cache + ["--threads", "1"])
    second = run(argv + cache + ["--threads", "4"])
    assert first[0] == 0 and first == second


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "frobmoments", "census", "--p", "5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("j,a,b,t,omega")
