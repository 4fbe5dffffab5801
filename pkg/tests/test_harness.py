import subprocess
import sys

import pytest

from rejsamp.cli import main
from rejsamp.functions import TableFunction, write_table_hex
from rejsamp.graphs import GraphFamily, build_graph, sample_partition, write_partition
from rejsamp.harness import ConfigError, ExperimentConfig, parse_config_text, run
from rejsamp.oracle import OracleSession, write_transcript


def test_config_parsing():
    assert parse_config_text("# c\nn = 8\n\ntrials=40  # x\n") == {"n": "8", "trials": "40"}
    with pytest.raises(ConfigError):
        parse_config_text("oops\n")
    cfg = ExperimentConfig.build("advantage", {"n": "16", "trials": "30"})
    assert cfg["n"] == 16 and cfg["min_advantage"] == 0.9


def test_config_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig.build("nope")
    with pytest.raises(ConfigError):
        ExperimentConfig.build("advantage", {"trials": "0"})
    with pytest.raises(ConfigError):
        ExperimentConfig.build("advantage", {"bogus": "1"})


def test_chi_table_rows():
    rep = run(ExperimentConfig.build("chi-table"))
    assert rep.passed
    got = {(r["n"], r["family"]): (r["chi_junta"], r["chi_unate"]) for r in rep.rows}
    for n in (8, 12, 16, 20):
        assert got[(n, "g1")][0] == "1/2" and got[(n, "g2")] == ("3/4", "0")


def test_reports_are_deterministic():
    cfg = ExperimentConfig.build("advantage", {"n": "16", "trials": "30", "seed": "3"})
    a, b = run(cfg).to_csv(), run(cfg).to_csv()
    assert a == b
    assert "# prng " in a and "# config trials=30" in a and "trial,family,verdict,cost,odd_cycle_found" in a


def test_pool_matches_serial():
    cfg = ExperimentConfig.build("distance-trend", {"junta_n": "8", "unate_n": "", "trials": "4"})
    assert run(cfg, jobs=1).rows == run(cfg, jobs=2).rows


def test_event_frequency_small():
    rep = run(ExperimentConfig.build("event-frequency", {"n": "64", "trials": "5", "budget": "200"}))
    assert all(r["cost"] == 200 for r in rep.rows)
    assert rep.summary["prob_C"] == 1.0


def test_cli_suite_exit_codes(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["chi-table", "--out", str(out)]) == 0 and out.read_text().startswith("# rejsamp")
    assert main(["chi-table", "--set", "n=6"]) == 1
    assert main(["chi-table", "--set", "zzz=1"]) == 2
    cfg = tmp_path / "c.txt"
    cfg.write_text("n=8\n")
    assert main(["chi-table", "--config", str(cfg)]) == 0
    with pytest.raises(SystemExit) as e:
        main(["not-a-suite"])
    assert e.value.code == 2


def test_cli_distance(tmp_path, capsys):
    p = tmp_path / "f.hex"
    write_table_hex(TableFunction(2, [0, 1, 1, 0]), p)
    assert main(["distance", "--op", "unate", "--table", str(p)]) == 0
    assert capsys.readouterr().out.strip() == "1/4"
    assert main(["distance", "--op", "junta", "--table", str(p), "--k", "1"]) == 0
    assert capsys.readouterr().out.strip() == "1/2"
    assert main(["distance", "--op", "junta", "--table", str(p)]) == 2


def test_cli_reduce_and_analyze(tmp_path, capsys):
    batch = tmp_path / "b.txt"
    batch.write_text("1010010110100101\n1010010110100111\n")
    for kind in ("junta", "unate-adaptive", "unate-nonadaptive"):
        out = tmp_path / f"{kind}.csv"
        assert main(["reduce", "--kind", kind, "--batch", str(batch), "--family", "g1", "--n", "8",
                     "--trials", "3", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "trial,answers,cost" and len(lines) == 4
    assert main(["reduce", "--kind", "junta", "--batch", str(batch), "--family", "g1", "--n", "4"]) == 2
    p = sample_partition(8, 0)
    s = OracleSession(build_graph(p, GraphFamily.TWO_CLIQUES), 0)
    for _ in range(5):
        s.query([1, 2, 3])
    write_transcript(s, tmp_path / "t.log")
    write_partition(p, tmp_path / "p.txt")
    assert main(["analyze", "--transcript", str(tmp_path / "t.log"), "--partition", str(tmp_path / "p.txt"),
                 "--family", "g1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("cost,nonempty,e_T") and out[1].split(",")[0] == "15"


def test_console_script_usage_error():
    r = subprocess.run([sys.executable, "-m", "rejsamp.cli", "distinguish"], capture_output=True)
    assert r.returncode == 2
