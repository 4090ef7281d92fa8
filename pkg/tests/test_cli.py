import csv
import io
import json

import numpy as np
import pytest

from oprelay.channel import save_matrix_csv
from oprelay.cli import load_config_file, main, parse_args
from oprelay.harness import SWEEP_COLUMNS


def run(capsys, *argv):
    assert main(list(argv)) == 0
    return capsys.readouterr().out


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_simulate_csv(capsys):
    [r] = rows(run(capsys, "simulate", "--n", "50", "--m", "3", "--trials", "100", "--seed", "1"))
    assert int(r["n"]) == 50 and int(r["m"]) == 3
    assert float(r["r_mean"]) == pytest.approx(min(float(r["r1_mean"]), float(r["r2_mean"])) / 2)


def test_simulate_json_single_trial(capsys):
    [r] = json.loads(run(capsys, "simulate", "--n", "5", "--m", "2", "--trials", "1", "--format", "json"))
    assert r["r1_stderr"] is None


def test_simulate_needs_sizes():
    with pytest.raises(SystemExit):
        main(["simulate", "--n", "5"])


def test_sweep_schema_and_out_file(tmp_path):
    out = tmp_path / "sweep.csv"
    main(["sweep", "--n-list", "20,30", "--trials", "50", "--m-grid", "1,2,3", "--out", str(out)])
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert [int(r["n"]) for r in rows(out.read_text())] == [20, 30]


def test_optimize_m(capsys):
    [r] = rows(run(capsys, "optimize-m", "--n", "30", "--trials", "50", "--m-grid", "1,2"))
    assert r["m_star"] in {"1", "2"}


def test_analytic_rows(capsys):
    out = rows(run(capsys, "analytic", "--n-list", "100,1000", "--m", "3"))
    assert [int(r["n"]) for r in out] == [100, 1000]
    assert float(out[0]["r2_closed"]) == pytest.approx(3.0, abs=1e-6)
    assert float(out[1]["genie_upper"]) == pytest.approx(11.965784, abs=1e-6)
    assert float(out[0]["s"]) == pytest.approx(3.0779906, abs=1e-7)
    assert int(out[0]["fb_bits_hop1"]) == 21


def test_analytic_db_conversion(capsys):
    [r] = rows(run(capsys, "analytic", "--n", "10", "--m", "1", "--snr2-db", "0"))
    assert float(r["rho_R"]) == 1.0
    assert float(r["p_dest_success"]) == pytest.approx(np.exp(-1))


def test_genie_from_csv(tmp_path, capsys):
    p = tmp_path / "g.csv"
    save_matrix_csv(p, np.full((3, 3), 0.01) + np.diag([9.99] * 3))
    [r] = rows(run(capsys, "genie", "--gamma-csv", str(p), "--method", "exhaustive"))
    assert int(r["k_max"]) == 3 and r["witness"] == "0->0 1->1 2->2"


def test_genie_monte_carlo(capsys):
    [r] = rows(run(capsys, "genie", "--n", "8", "--m", "3", "--trials", "40"))
    assert float(r["k_max_mean"]) >= float(r["opportunistic_mean"])


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nn = 40\nm = 3\ntrials = 77\nsnr1-db = 5\n")
    a = parse_args(["simulate", "--config", str(cfg), "--trials", "12"])
    assert (a.n, a.m, a.trials, a.snr1_db) == (40, 3, 12, 5.0)
    js = tmp_path / "run.json"
    js.write_text(json.dumps({"n_list": "10,20", "seed": 4}))
    a = parse_args(["sweep", "--config", str(js)])
    assert a.n_list == [10, 20] and a.seed == 4


def test_config_file_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(SystemExit):
        parse_args(["simulate", "--config", str(cfg)])
    cfg.write_text("just words\n")
    with pytest.raises(ValueError):
        load_config_file(cfg)
