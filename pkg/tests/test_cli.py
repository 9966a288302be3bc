import csv
import json
from fractions import Fraction as F
from pathlib import Path

import pytest

from fracdim.cli import main
from fracdim.config import dump_resolved, parse_config
from fracdim.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(tmp_path, sub, name, capsys=None):
    out = tmp_path / name
    code = main([sub, "--config", str(CONFIGS / f"{name}.yaml"), "--out", str(out)])
    return code, out


def test_dims_uniform_cantor(tmp_path):
    code, out = run(tmp_path, "dims", "cantor_dims")
    assert code == 0
    report = (out / "report.txt").read_text()
    assert "similarity dimension s = 0.630930" in report
    assert "[projection] predicted dimension = 0.630930" in report
    assert "hypothesis exponential_separation_evidence: True" in report
    rows = list(csv.DictReader(open(out / "dimension_reports.csv")))
    assert rows[0]["name"] == "projection"
    assert abs(float(rows[0]["predicted"]) - 0.6309297535714575) < 1e-12


def test_separation_exact_overlap_is_a_finding(tmp_path):
    code, out = run(tmp_path, "separation", "overlap_013_separation")
    assert code == 0
    report = (out / "report.txt").read_text()
    assert "FINDING: exact overlap at level 2" in report
    rows = list(csv.DictReader(open(out / "separation.csv")))
    assert [r["min_gap"] for r in rows] == ["1", "0", "0", "0"]
    assert {rows[1]["witness_1"], rows[1]["witness_2"]} == {"0 2", "1 0"}


def test_parse_error_exit_code(tmp_path, capsys):
    code, out = run(tmp_path, "dims", "bad_rational")
    assert code == ConfigError.exit_code == 2
    rec = json.loads(capsys.readouterr().err)
    assert rec["error"] == "parse_error"
    assert rec["position"] == "line 2, column 8"
    assert json.loads((out / "error.json").read_text()) == rec


def test_tau_and_coarse_tables(tmp_path):
    code, out = run(tmp_path, "tau", "biased_cantor_tau")
    assert code == 0
    rows = list(csv.DictReader(open(out / "lq.csv")))
    q2 = next(r for r in rows if r["q"] == "2")
    assert abs(float(q2["lq_dim"]) - 0.4958320428966492) < 1e-12
    code, out = run(tmp_path, "coarse", "biased_cantor_coarse")
    assert code == 0
    rows = list(csv.DictReader(open(out / "coarse_weights.csv")))
    assert len(rows) == 1024
    assert abs(sum(float(r["weight"]) for r in rows) - 1) < 1e-12


def test_subcommand_must_match_config(tmp_path, capsys):
    code = main(["tau", "--config", str(CONFIGS / "cantor_dims.yaml"), "--out", str(tmp_path)])
    assert code == 2


def test_budget_error_exit_code(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: separation\nifs: [[1/3, 0], [1/3, 1], [1/3, 3]]\nparams: {max_level: 9, budget: 1000}\n")
    assert main(["separation", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3


def test_guard_error_exit_code(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: estimate\nseed: 1\nifs: [[1/3, 0], [1/3, 2/3]]\n"
                   "measure: {bernoulli: [1/2, 1/2]}\nparams: {depth: 5, count: 20000}\n")
    assert main(["estimate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 4


def test_sampling_needs_seed():
    with pytest.raises(ConfigError, match="seed"):
        parse_config("experiment: sample\nifs: [[1/3, 0], [1/3, 2/3]]\nmeasure: {bernoulli: [1/2, 1/2]}\n")


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown key 'colour'"):
        parse_config("experiment: dims\ncolour: red\n")
    with pytest.raises(ConfigError, match="line 4"):
        parse_config("experiment: dims\nifs: [[1/3, 0], [1/3, 2/3]]\nmeasure: {bernoulli: [1/2, 1/2]}\n"
                     "params: {mm: 3}\n")


def test_rationals_exact_and_round_trip():
    text = ("experiment: coarse\nifs: [[1/3, 0], [0.333, 2/3]]\nmeasure: {bernoulli: [0.9, 1/10]}\n"
            "params: {delta: 0.05}\n")
    cfg = parse_config(text)
    assert cfg.ifs.ratios == (F(1, 3), F(333, 1000))
    assert cfg.params["delta"] == F(1, 20)
    again = parse_config(dump_resolved(cfg))
    assert again.resolved == cfg.resolved
    assert again.params == cfg.params


def test_sample_round_trip_bit_exact(tmp_path):
    cfg = tmp_path / "s.yaml"
    cfg.write_text("experiment: sample\nseed: 42\nifs: [[1/3, 0], [1/3, 2/3]]\n"
                   "measure: {bernoulli: [0.7, 0.3]}\nparams: {count: 500, depth: 20}\n")
    assert main(["sample", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    report = (tmp_path / "a" / "report.txt").read_text()
    block = report.split("reproduce):\n", 1)[1].split("\n\n", 1)[0]
    resolved = "\n".join(line[4:] for line in block.splitlines())
    (tmp_path / "r.yaml").write_text(resolved)
    assert main(["sample", "--config", str(tmp_path / "r.yaml"), "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "samples.csv").read_bytes() == (tmp_path / "b" / "samples.csv").read_bytes()


def test_help_documents_csv_schemas(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    text = capsys.readouterr().out
    for name in ("separation.csv", "lq.csv", "coarse_weights.csv", "samples.csv", "scales.csv", "estimates.csv"):
        assert name in text
