import json

import numpy as np
import pytest

from cascade_sim import cli
from cascade_sim.sweep import read_result


def test_figure_command(tmp_path, capsys):
    assert cli.main(["fig2", "--out", str(tmp_path), "--no-metadata-timestamp"]) == 0
    printed = capsys.readouterr().out.split()
    assert str(tmp_path / "fig2_S0.csv") in printed
    assert "timestamp" not in read_result(tmp_path / "fig2_S0.csv").metadata


def test_sweep_command_with_flags(tmp_path):
    out = tmp_path / "s.json"
    rc = cli.main(["sweep", "--axis", "phi:0.1:3:4", "--tau", "pi/4",
                   "--format", "json", "--output", str(out)])
    assert rc == 0
    res = read_result(out)
    np.testing.assert_allclose(res.rows[:, 1], 1.0, atol=1e-12)


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[params]\nfss = 2.0\nphi = 1.0\nsigma = 0.3\n[sweep]\nobservable = "N_bar"\naxes = ["tau:0:1:3"]\n')
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--config", str(cfg), "--fss", "3", "--output", str(out)]) == 0
    meta = read_result(out).metadata
    assert meta["params"]["fss"] == 3.0  # CLI beats config
    assert meta["params"]["phi"] == 1.0  # config beats defaults
    assert meta["params"]["gamma_x_exciton"] == 1.0  # default
    assert meta["observable"] == "N_bar"
    assert meta["fixed"]["sigma"] == 0.3


def test_json_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"epsilon": 0.2}))
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--config", str(cfg), "--axis", "tau:0:1:2", "--output", str(out)]) == 0
    assert read_result(out).metadata["params"]["epsilon"] == 0.2


@pytest.mark.parametrize("argv", [
    [],
    ["fig9"],
    ["sweep"],
    ["sweep", "--axis", "phi:1:1:3"],
    ["sweep", "--axis", "phi:0:1:3", "--observable", "nope"],
    ["fig2", "--epsilon", "1.5"],
    ["fig2", "--phi", "abc"],
    ["fig2", "--config", "/nonexistent/c.toml"],
])
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    assert cli.main(argv + (["--out", str(tmp_path)] if argv[:1] == ["fig2"] else [])) == 2
    assert "error" in capsys.readouterr().err


def test_regime_warning_logged(tmp_path, caplog):
    with caplog.at_level("WARNING"):
        cli.main(["sweep", "--fss", "1", "--axis", "tau:0:1:2", "--output", str(tmp_path / "x.csv")])
    assert any("2*gamma_X" in r.message for r in caplog.records)


def test_verify_exit_code_reflects_checks(monkeypatch, capsys):
    from cascade_sim import verification
    from cascade_sim.verification import CheckResult

    monkeypatch.setattr(verification, "CHECKS", [lambda: CheckResult("ok", 1, True, 0.0, 1.0)])
    assert cli.main(["verify"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] and report["checks"][0]["name"] == "ok"
    monkeypatch.setattr(verification, "CHECKS", [lambda: CheckResult("bad", 2, False, 1.0, 0.0)])
    assert cli.main(["verify"]) == 1


def test_verify_report_is_json_with_numpy_values(monkeypatch, tmp_path, capsys):
    import numpy as np

    from cascade_sim import verification
    from cascade_sim.verification import CheckResult

    monkeypatch.setattr(verification, "CHECKS", [lambda: CheckResult("np", 3, np.bool_(True), np.float64(1e-12), 1e-9)])
    report_path = tmp_path / "r.json"
    assert cli.main(["verify", "--report", str(report_path)]) == 0
    entry = json.loads(report_path.read_text())["checks"][0]
    assert entry == {"name": "np", "criterion": 3, "passed": True, "value": 1e-12, "tolerance": 1e-9, "detail": ""}
