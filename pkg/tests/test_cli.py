import json
import subprocess
import sys
import time

import pytest

from vpfair.cli import main, read_ranking_file
from vpfair.config import ConfigError, parse_config
from vpfair.metrics import measure


@pytest.fixture
def ranking_file(tmp_path):
    def make(lines):
        path = tmp_path / "ranking.txt"
        path.write_text("\n".join(str(v) for v in lines) + "\n")
        return path

    return make


def test_measure_ndd(ranking_file, capsys):
    path = ranking_file([-2, 1, -1, 3])
    assert main(["measure", "--input", str(path), "--protected", "-3,-2,-1", "--metric", "ndd", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    (res,) = out["results"]
    assert res["metric"] == "nDD"
    assert res["value"] == pytest.approx(0.6490, abs=1e-4)


def test_measure_matches_library(ranking_file, capsys):
    labels = [3, -1, 0, 0, -3, 2, -2, 1, 1]
    path = ranking_file(["label"] + labels)
    assert main(["measure", "--input", str(path), "--protected=-3,-2,-1", "--json"]) == 0
    got = json.loads(capsys.readouterr().out)["results"]
    assert got == [r.as_dict() for r in measure(labels)]


def test_measure_table_output(ranking_file, capsys):
    path = ranking_file([0, 0, 0])
    assert main(["measure", "--input", str(path), "--multinomial"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["metric", "value", "raw_sum", "z"]
    assert out.splitlines()[1].split()[:2] == ["nDJS", "0.000000"]


def test_measure_bad_token(ranking_file, capsys):
    path = ranking_file([1, 2, 9, 0])
    assert main(["measure", "--input", str(path)]) == 2
    assert ":3:" in capsys.readouterr().err


def test_measure_non_integer(ranking_file, capsys):
    path = ranking_file([1, "pro"])
    assert main(["measure", "--input", str(path)]) == 2
    assert ":2:" in capsys.readouterr().err


def test_measure_empty_file(tmp_path):
    path = tmp_path / "e.txt"
    path.write_text("label\n")
    assert main(["measure", "--input", str(path)]) == 2


def test_measure_missing_file(tmp_path):
    assert main(["measure", "--input", str(tmp_path / "nope.txt")]) == 1


def test_measure_default_protected_warns(ranking_file, caplog):
    path = ranking_file([-2, 1])
    assert main(["measure", "--input", str(path), "--metric", "ndd"]) == 0
    assert "no --protected" in caplog.text


def test_measure_binomial_metric_without_group_is_usage_error(ranking_file):
    path = ranking_file([-2, 1])
    assert main(["measure", "--input", str(path), "--multinomial", "--metric", "ndd"]) == 2


def test_measure_bad_protected(ranking_file):
    assert main(["measure", "--input", str(ranking_file([1])), "--protected", "-3,8"]) == 2


def test_unknown_metric_flag(ranking_file):
    with pytest.raises(SystemExit) as exc:
        main(["measure", "--input", str(ranking_file([1])), "--metric", "ndcg"])
    assert exc.value.code == 2


def test_read_ranking_file_header(ranking_file):
    assert read_ranking_file(ranking_file(["label", -3, 3])) == [-3, 3]


SMOKE = """
seed = 5
replicates = 10
sets = ["S1", "S2", "S3"]

[binomial]
metrics = ["nDD", "nDR", "nDKL"]

[multinomial]
metrics = ["nDJS"]

[output]
dir = "out"
"""


def test_simulate_smoke(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(SMOKE)
    start = time.perf_counter()
    assert main(["simulate", "--config", str(cfg)]) == 0
    assert time.perf_counter() - start < 10
    out = tmp_path / "out"
    assert len((out / "binomial.csv").read_text().splitlines()) == 1 + 63 * 3
    assert len((out / "multinomial.csv").read_text().splitlines()) == 1 + 63
    assert sorted(p.name for p in out.glob("*.svg")) == [
        "binomial_nDD.svg", "binomial_nDKL.svg", "binomial_nDR.svg", "multinomial_nDJS.svg",
    ]
    assert "binomial: 189 cells" in capsys.readouterr().out


def test_simulate_unknown_set(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(SMOKE.replace('"S3"', '"S9"'))
    assert main(["simulate", "--config", str(cfg)]) == 2
    assert "sets/2" in capsys.readouterr().err


def test_simulate_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(SMOKE.replace("[output]", "[output]\nformat = 'png'"))
    assert main(["simulate", "--config", str(cfg)]) == 2
    assert "output" in capsys.readouterr().err


def test_simulate_malformed_toml(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("seed = = 3")
    assert main(["simulate", "--config", str(cfg)]) == 2


@pytest.mark.parametrize(
    "doc, field",
    [
        ({"replicates": 0, "binomial": {}}, "replicates"),
        ({"alphas": [2.0], "binomial": {}}, "alphas/0"),
        ({"binomial": {"metrics": ["nDX"]}}, "binomial/metrics/0"),
        ({"binomial": {"protected": [4]}}, "binomial/protected/0"),
        ({"custom_sets": {"S4": [1, 2]}, "binomial": {}}, "custom_sets/S4"),
        ({"seed": 1}, "<root>"),
        ({"typo": 1, "binomial": {}}, "<root>"),
    ],
)
def test_config_errors_name_the_field(doc, field):
    with pytest.raises(ConfigError, match=field):
        parse_config(doc)


def test_config_custom_set_and_defaults(tmp_path):
    cfg = parse_config({"sets": ["S4"], "custom_sets": {"S4": [1, 1, 1, 1, 1, 1, 1]}, "multinomial": {}}, tmp_path)
    grid = cfg.grids["multinomial"]
    assert grid.metrics == ("nDJS",) and grid.replicates == 1000 and len(grid.alphas) == 21
    assert grid.label_sets["S4"].total == 7
    assert cfg.output_dir == tmp_path / "results"


def test_reproduce_small(tmp_path, capsys):
    out = tmp_path / "rep"
    assert main(["reproduce", "--seed", "3", "--out", str(out), "--replicates", "3"]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["binomial.csv", "checks.txt", "multinomial.csv", "nDD.svg", "nDJS.svg", "nDKL.svg", "nDR.svg"]
    checks = (out / "checks.txt").read_text()
    assert "tolerance bands doubled" in checks
    assert checks.count("PASS") + checks.count("FAIL") == 25


def test_reproduce_is_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert main(["reproduce", "--seed", "8", "--out", str(tmp_path / name), "--replicates", "2"]) == 0
    for f in ("binomial.csv", "multinomial.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_reproduce_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["reproduce", "--out", str(blocker / "sub"), "--replicates", "1"]) == 1


def test_reproduce_rejects_zero_replicates():
    with pytest.raises(SystemExit) as exc:
        main(["reproduce", "--replicates", "0"])
    assert exc.value.code == 2


def test_console_script_exit_codes(ranking_file):
    ok = ranking_file([-2, 1, -1, 3])
    run = lambda *a: subprocess.run([sys.executable, "-m", "vpfair.cli", *a], capture_output=True, text=True)
    good = run("measure", "--input", str(ok), "--protected", "-3,-2,-1", "--metric", "ndd")
    assert good.returncode == 0 and "0.649015" in good.stdout
    assert run("measure").returncode == 2
    assert run("bogus").returncode == 2
