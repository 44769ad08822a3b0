import csv

from hpobench.cli import main

TINY = ["--synthetic", "--lags", "6", "--max-trials", "10", "--patience", "10", "--clock", "work"]


def write_grid_config(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("schema_version: 1\ngrids:\n  n_estimators: [5, 10]\n  max_depth: [2, 3]\n")
    return str(path)


def test_run_stats_plot_cycle(tmp_path, capsys):
    out = tmp_path / "out"
    cfg = write_grid_config(tmp_path)
    code = main(["run", "--config", cfg, *TINY, "--sizes", "1000,2000", "--algos", "random,pso",
                 "--variate", "univariate", "--out", str(out)])
    assert code == 0
    with open(out / "results.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 4

    assert main(["stats", str(out / "results.csv"), "--out", str(tmp_path / "again")]) == 0
    assert (tmp_path / "again" / "summary.txt").read_bytes() == (out / "summary.txt").read_bytes()
    assert (tmp_path / "again" / "stats.txt").read_bytes() == (out / "stats.txt").read_bytes()

    assert main(["plot", str(out / "results.csv"), "--out", str(tmp_path / "plots")]) == 0
    for svg in (out / "plots").glob("*.svg"):
        assert (tmp_path / "plots" / svg.name).read_bytes() == svg.read_bytes()


def test_unknown_flag_exits_2(capsys):
    assert main(["run", "--frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err


def test_invalid_config_exits_2(capsys):
    assert main(["run", "--synthetic", "--sizes", "20", "--lags", "6"]) == 2


def test_failed_cell_exits_1(tmp_path):
    # the univariate design has no exogenous column to drop, multivariate asks for a missing one
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("exog: [no_such_column]\ngrids:\n  n_estimators: [5]\n")
    code = main(["run", "--config", str(cfg), *TINY, "--sizes", "200", "--algos", "pso",
                 "--variate", "multivariate", "--out", str(tmp_path / "o"), "--no-plots"])
    assert code == 1


def test_describe_synthetic(capsys):
    assert main(["describe", "--synthetic", "100"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["Variable", "Min", "Max", "Mean", "SD"]
    assert "T2M_toc" in out


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out
