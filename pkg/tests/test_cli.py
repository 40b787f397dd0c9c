import json

import pytest

from corrlogdet.cli import main


@pytest.fixture()
def config_file(tmp_path):
    cfg = {
        "law": {"family": "gaussian"},
        "p": 15,
        "n": 45,
        "reps": 120,
        "seed": 11,
        "statistic": "corr_logdet",
        "parallelism": 1,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def test_simulate_writes_outputs(tmp_path, config_file, capsys):
    csv_path = tmp_path / "stats.csv"
    json_path = tmp_path / "report.json"
    svg_path = tmp_path / "fig.svg"
    code = main(
        [
            "simulate",
            "--config",
            str(config_file),
            "--out-csv",
            str(csv_path),
            "--out-json",
            str(json_path),
            "--out-svg",
            str(svg_path),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "KS statistic" in out
    assert csv_path.read_text().startswith("rep_index,logdet_raw,standardized,flagged")
    report = json.loads(json_path.read_text())
    assert report["config"]["p"] == 15
    assert svg_path.read_text().startswith("<svg ")


def test_simulate_overrides(tmp_path, config_file):
    csv_a = tmp_path / "a.csv"
    csv_b = tmp_path / "b.csv"
    assert main(["simulate", "--config", str(config_file), "--reps", "40", "--out-csv", str(csv_a)]) == 0
    assert main(["simulate", "--config", str(config_file), "--reps", "40", "--out-csv", str(csv_b)]) == 0
    assert csv_a.read_text() == csv_b.read_text()
    assert len(csv_a.read_text().splitlines()) == 41


def test_simulate_missing_config(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.json")]) == 2


def test_simulate_invalid_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"law": {"family": "gaussian"}, "p": 50, "n": 50, "reps": 5, "seed": 0}))
    assert main(["simulate", "--config", str(path)]) == 2


def test_verify_moments_small(capsys):
    code = main(["verify-moments", "--nmax", "3", "--vectors", "2", "--trials", "1"])
    assert code == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out
    assert "FAIL" not in out


def test_verify_girko_small(capsys):
    code = main(["verify-girko", "--cases", "4", "--seed", "3"])
    assert code == 0
    assert "log-det agreement" in capsys.readouterr().out


def test_asymptotics_unit_exponent(tmp_path, capsys):
    out_csv = tmp_path / "diag.csv"
    code = main(
        [
            "asymptotics",
            "--alpha",
            "3.5",
            "--k",
            "1",
            "--grid",
            "64,128",
            "--reps",
            "2000",
            "--out-csv",
            str(out_csv),
        ]
    )
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "n,estimate,limit,ratio,mom_blocks"
    assert len(lines) == 3
    assert all(line.split(",")[3] == "1.0" for line in lines[1:])


def test_asymptotics_bad_alpha():
    assert main(["asymptotics", "--alpha", "4.5", "--k", "2", "--grid", "64", "--reps", "2000"]) == 2


def test_plot_round_trip(tmp_path, config_file):
    json_path = tmp_path / "report.json"
    svg_path = tmp_path / "fig.svg"
    assert main(["simulate", "--config", str(config_file), "--out-json", str(json_path)]) == 0
    assert main(["plot", "--in", str(json_path), "--out", str(svg_path)]) == 0
    assert svg_path.read_text().startswith("<svg ")


def test_plot_missing_report(tmp_path):
    assert main(["plot", "--in", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x.svg")]) == 2
