import csv
import io
import json
import math
import shutil
import subprocess

import pytest

from subshift_lab.cli import ConfigError, jsonable, main, parse_config

FIB = {"type": "substitution", "rules": {"0": "1", "1": "10"}, "seed": "1"}
STURM = {"type": "sturmian", "cf": [2, 1, 3], "cyclic": True}


def write(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


@pytest.fixture(scope="module")
def fib_report(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("analyze")
    cfg = write(tmp, {"subshift": FIB, "depth": 60, "analyses": "all"})
    outs = []
    for i in range(2):
        out = tmp / f"report{i}.json"
        assert main(["analyze", cfg, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    return outs


def test_fibonacci_pipeline(fib_report):
    report = json.loads(fib_report[0])
    assert report["verdicts"]["bounded_powers"]["verdict"] == "bounded"
    assert set(report["sections"]) == {"structure", "balance", "powers", "metrics", "lipschitz", "zeta"}
    prov = report["provenance"]
    assert len(prov["config_sha256"]) == 64 and prov["certified_depth"] >= 61
    assert report["sections"]["metrics"]["sandwich_violations"] == 0
    assert report["sections"]["zeta"]["inequalities"]["failures"] == []
    assert report["sections"]["powers"]["trend"][-1]["ell"] == {"exact": "13/32", "float": 13 / 32}


def test_reports_are_byte_identical(fib_report):
    assert fib_report[0] == fib_report[1]


def test_sections_carry_depth(fib_report):
    report = json.loads(fib_report[0])
    for section in report["sections"].values():
        assert "depth" in section


def test_empty_config(tmp_path, capsys):
    assert main(["analyze", write(tmp_path, "{}")]) == 1
    assert "missing subshift spec" in capsys.readouterr().err
    assert main(["analyze", write(tmp_path, "")]) == 1


def test_depth_beyond_certification(tmp_path, capsys):
    sample = {"type": "sample", "text": "0100101001001010010100100101", "depth": 100}
    assert main(["analyze", write(tmp_path, {"subshift": sample, "depth": 50})]) == 1
    assert "uncertified depth" in capsys.readouterr().err
    pinned = dict(FIB, depth=10)
    assert main(["analyze", write(tmp_path, {"subshift": pinned, "depth": 50})]) == 1
    assert "uncertified depth" in capsys.readouterr().err


@pytest.mark.parametrize(
    "doc,key",
    [
        ({"subshift": FIB, "depth": 5, "colour": 1}, "colour"),
        ({"subshift": FIB, "depth": 5, "zeta": {"q": 1}}, "zeta.q"),
        ({"subshift": FIB, "depth": 0}, "depth"),
        ({"subshift": FIB, "depth": 5, "analyses": []}, "analyses"),
        ({"subshift": FIB, "depth": 5, "analyses": ["astrology"]}, "analyses"),
        ({"subshift": FIB, "depth": 5, "zeta": {"s": []}}, "zeta.s"),
    ],
)
def test_schema_violations_name_the_key(doc, key):
    with pytest.raises(ConfigError, match=key):
        parse_config(doc)


def test_unknown_subshift_key(tmp_path, capsys):
    assert main(["analyze", write(tmp_path, {"subshift": dict(FIB, colour=1), "depth": 5})]) == 1
    assert "subshift.colour" in capsys.readouterr().err


def test_strict_flag(tmp_path):
    cfg = write(tmp_path, {"subshift": FIB, "depth": 4, "analyses": ["lipschitz"]})
    assert main(["analyze", cfg, "--out", str(tmp_path / "r.json")]) == 0
    assert main(["analyze", cfg, "--strict", "--out", str(tmp_path / "r.json")]) == 2


def test_figures(tmp_path):
    cfg = write(tmp_path, {"subshift": FIB, "depth": 40, "analyses": ["structure", "lipschitz", "zeta"],
                           "lipschitz": {"profile_depth": 1024}})
    assert main(["analyze", cfg, "--out", str(tmp_path / "r.json"), "--figures", str(tmp_path / "figs")]) == 0
    names = sorted(p.name for p in (tmp_path / "figs").iterdir())
    assert names == ["complexity.png", "lipschitz_profile.png", "rank_profile.png", "zeta_partial_sums.png"]
    assert (tmp_path / "figs" / "complexity.png").read_bytes()[:4] == b"\x89PNG"


def test_graph_export(tmp_path):
    cfg = write(tmp_path, {"subshift": FIB})
    out1, out2 = tmp_path / "a.dot", tmp_path / "b.dot"
    assert main(["graph", cfg, "--kind", "priv", "--depth", "3", "--out", str(out1)]) == 0
    assert main(["graph", cfg, "--kind", "priv", "--depth", "3", "--out", str(out2)]) == 0
    dot = out1.read_text()
    assert dot == out2.read_text()
    merged = set()
    for line in dot.splitlines():
        if "generators=" in line:
            merged |= set(line.split('generators="')[1].split('"')[0].split(","))
    assert merged == {"ε", "0", "1", "11", "101", "010"}
    assert main(["graph", cfg, "--kind", "priv", "--depth", "0", "--out", str(out1)]) == 0
    assert out1.read_text().count("label=\"ε\"") == 1 and "->" not in out1.read_text()


def test_zeta_scan(tmp_path):
    cfg = write(tmp_path, {"subshift": STURM})
    out = tmp_path / "z.csv"
    assert main(["zeta", cfg, "--family", "zeta1", "--k", "1", "--s", "1.5,2", "--N", "500", "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 2
    for row in rows:
        s = float(row["s"])
        direct = math.fsum((1 / (n + 1)) ** s for n in range(501))
        assert abs(float(row["partial_sum"]) - direct) <= 1e-12 * direct


def test_zeta_identity_column(tmp_path):
    cfg = write(tmp_path, {"subshift": STURM})
    out = tmp_path / "z.csv"
    assert main(["zeta", cfg, "--family", "zeta_D", "--s", "1.5,2", "--N", "200", "--identity-check", "--out", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [r["identity_ok"] for r in rows] == ["true", "true"]


def test_zeta_empty_grid(tmp_path):
    assert main(["zeta", write(tmp_path, {"subshift": STURM}), "--s", "", "--N", "10"]) == 1


def test_jsonable_fractions():
    from fractions import Fraction

    assert jsonable({"x": Fraction(1, 3), 2: (Fraction(2),)}) == {"x": {"exact": "1/3", "float": 1 / 3}, "2": [{"exact": "2", "float": 2.0}]}


@pytest.mark.skipif(shutil.which("subshift-lab") is None, reason="console script not installed")
def test_console_script(tmp_path):
    cfg = write(tmp_path, {"subshift": FIB})
    done = subprocess.run(["subshift-lab", "graph", cfg, "--depth", "2"], capture_output=True, text=True)
    assert done.returncode == 0 and done.stdout.startswith("digraph")
