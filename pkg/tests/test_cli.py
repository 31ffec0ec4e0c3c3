import csv

import pytest

from quarterplane.cli import RunConfig, main, parse_config, window_converged
from quarterplane.core import ConfigError


def _rows(path):
    return list(csv.DictReader(open(path)))


def test_parse_config_types_and_errors():
    cfg = parse_config("eps = 0.1  # comment\nsource=zero\nwindow=1\n")
    assert cfg.eps == 0.1 and cfg.source == "zero" and cfg.window == 1
    with pytest.raises(ConfigError, match="<config>:2"):
        parse_config("eps=0.1\nfoo=1\n")
    with pytest.raises(ConfigError, match="bad value"):
        parse_config("eps=abc\n")
    with pytest.raises(ConfigError):
        parse_config("source=file\n")
    assert RunConfig().wavenumber.h == 1 + 0.2j


def test_window_predicate():
    h = 1 + 0.2j
    assert window_converged(0.5 + 0.5j, h, 60.0)
    assert not window_converged(0.99 + 0.05j, h, 60.0)      # decay too slow near zeta = 1
    assert not window_converged(-0.5 + 0.5j, h, 60.0)       # outside the convergence set


def test_bad_key_exit_3(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense=1\n")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path)]) == 3
    assert "unknown key" in capsys.readouterr().err


def test_missing_config_exit_3(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "none.cfg")]) == 3


def test_point_outside_domain_exit_3(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("source=zero\npoints=0.1,3\n")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path)]) == 3


def test_solve_oracle(tmp_path):
    assert main(["solve", "--out", str(tmp_path), "--threads", "2"]) == 0
    sol = _rows(tmp_path / "solution.csv")
    assert len(sol) == 5
    assert all(float(r["rel_err"]) < 1e-2 for r in sol)
    checks = {r["check"] for r in _rows(tmp_path / "diagnostics.csv")}
    assert {"stencil", "corner_rel_err", "corner_spread", "consistency_at_i"} <= checks


def test_solve_zero_data(tmp_path):
    cfg = tmp_path / "z.cfg"
    cfg.write_text("source=zero\n")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert all(float(r["abs_u"]) == 0 for r in _rows(tmp_path / "solution.csv"))


def test_density_zero(tmp_path):
    cfg = tmp_path / "z.cfg"
    cfg.write_text("source=zero\n")
    assert main(["density", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "density.csv")
    assert list(rows[0]) == ["piece", "t", "re_zeta", "im_zeta", "re_r", "im_r"]
    assert all(float(r["re_r"]) == 0 and float(r["im_r"]) == 0 for r in rows)


def test_verify_reports_every_suite(tmp_path):
    # the default run fails: |F(1)+F(-1)| is the pole residue, not zero
    assert main(["verify", "--out", str(tmp_path)]) == 2
    summary = {r["suite"]: r["status"] for r in _rows(tmp_path / "verify_summary.csv")}
    for s in ("global", "sym_neginv", "sym_inv", "sym_neg"):
        assert summary[s] == "pass"
    assert summary["consistency"] == "FAIL"
    assert summary["radiation"] == "pass"


def test_verify_needs_oracle(tmp_path):
    cfg = tmp_path / "z.cfg"
    cfg.write_text("source=zero\n")
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path)]) == 3


def test_farfield(tmp_path):
    assert main(["farfield", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "farfield.csv")
    assert [float(r["Rh"]) for r in rows] == [50.0, 100.0, 200.0]


def test_audit_matches_shipped_table(tmp_path):
    assert main(["audit", "--out", str(tmp_path)]) == 0
    from quarterplane.global_relation import load_default_table
    assert (tmp_path / "conventions.txt").read_text() == load_default_table().to_text()
