import json
import math

import numpy as np
import pytest

from cascade_sim.exceptions import InvalidParameterError
from cascade_sim.params import PhysicalParams
from cascade_sim.sweep import SweepAxis, SweepSpec, parse_number, read_result, run_sweep


@pytest.mark.parametrize("text, value", [
    ("1.5", 1.5), ("pi", math.pi), ("pi/2", math.pi / 2), ("3pi/4", 3 * math.pi / 4),
    ("-pi", -math.pi), ("2*pi", 2 * math.pi),
])
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value)


def test_axis_parse_and_values():
    ax = SweepAxis.parse("phi:0:pi:5")
    assert ax.name == "phi" and ax.count == 5
    np.testing.assert_allclose(ax.values, np.linspace(0, math.pi, 5))


@pytest.mark.parametrize("text", ["phi:1:1:5", "phi:0:1:1", "gamma:0:1:3", "phi:0:1", "tau:0:nan:3"])
def test_axis_validation(text):
    with pytest.raises((InvalidParameterError, ValueError)):
        SweepAxis.parse(text)


def test_spec_validation():
    phi = SweepAxis("phi", 0.1, 1, 3)
    with pytest.raises(InvalidParameterError):
        SweepSpec([], "C")
    with pytest.raises(InvalidParameterError):
        SweepSpec([phi] * 2, "C")
    with pytest.raises(InvalidParameterError):
        SweepSpec([phi, SweepAxis("S", 1, 2, 2), SweepAxis("tau", 0, 1, 2), SweepAxis("sigma", 0.1, 1, 2)])
    with pytest.raises(InvalidParameterError):
        SweepSpec([phi], "g2")
    with pytest.raises(InvalidParameterError):
        SweepSpec([SweepAxis("tau", 0, 1, 3)], "C_bar", fixed={"sigma": 1})
    with pytest.raises(InvalidParameterError):
        SweepSpec([phi], "C", fixed={"beta": 1})


def test_revival_sweep_is_unity():
    spec = SweepSpec([SweepAxis("phi", 0.05, math.pi - 0.05, 41)], "C", fixed={"tau": math.pi / 4})
    res = run_sweep(spec, timestamp=False)
    assert res.columns == ["phi", "concurrence"]
    np.testing.assert_allclose(res.rows[:, 1], 1.0, atol=1e-12)


def test_row_major_order_and_count():
    spec = SweepSpec([SweepAxis("phi", 0.2, 1.0, 3), SweepAxis("tau", 0, 2, 4)], "P_nm")
    res = run_sweep(spec, timestamp=False)
    assert res.rows.shape == (12, 6)
    assert res.columns == ["phi", "tau", "P_AA", "P_AB", "P_BA", "P_BB"]
    np.testing.assert_allclose(res.rows[:4, 0], 0.2)
    np.testing.assert_allclose(res.rows[:4, 1], np.linspace(0, 2, 4))


def test_threads_do_not_change_output():
    spec = SweepSpec([SweepAxis("sigma", 0.1, 1.0, 4), SweepAxis("tau", -1, 3, 5)], "C_jittered")
    a = run_sweep(spec, timestamp=False, jobs=1).to_csv()
    b = run_sweep(spec, timestamp=False, jobs=4).to_csv()
    assert a == b


def test_cbar_epsilon_symmetry():
    spec = SweepSpec([SweepAxis("epsilon", -0.6, 0.6, 5)], "C_bar", fixed={"sigma": 3.0, "phi": math.pi / 2})
    c = run_sweep(spec, timestamp=False).rows[:, 1]
    np.testing.assert_allclose(c, c[::-1], atol=1e-6)
    assert np.argmax(c) == 2


def test_n_bar_and_unconditioned():
    spec = SweepSpec([SweepAxis("tau", -1, 2, 4)], "N_bar", fixed={"sigma": 0.3})
    assert np.all(run_sweep(spec, timestamp=False).rows[:, 1] > 0)
    cond = run_sweep(SweepSpec([SweepAxis("tau", 0, 2, 3)], "P_nm"), timestamp=False).rows
    un = run_sweep(SweepSpec([SweepAxis("tau", 0, 2, 3)], "P_nm", fixed={"unconditioned": 1, "t_XX": 0.5}),
                   timestamp=False).rows
    np.testing.assert_allclose(un[:, 1:], cond[:, 1:] * 2 * math.exp(-1.0))


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_write_and_read_roundtrip(tmp_path, fmt):
    spec = SweepSpec([SweepAxis("phi", 0.1, 1.0, 3)], "C", fixed={"tau": 0.3})
    res = run_sweep(spec, PhysicalParams(S=3.0), timestamp=True)
    paths = res.write(tmp_path / f"out.{fmt}", fmt)
    back = read_result(paths[0])
    assert back.columns == res.columns
    np.testing.assert_allclose(back.rows, res.rows, rtol=1e-11)
    assert back.metadata == json.loads(json.dumps(res.metadata))
    assert back.metadata["params"]["fss"] == 3.0
    assert "timestamp" in back.metadata


def test_csv_format():
    spec = SweepSpec([SweepAxis("tau", 0, 1, 2)], "C", fixed={"phi": 1.0})
    text = run_sweep(spec, timestamp=False).to_csv()
    lines = text.splitlines()
    assert lines[0] == "tau,concurrence"
    assert lines[1].split(",")[0] == "0"
    assert "\r" not in text
