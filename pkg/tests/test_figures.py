import math

import numpy as np
import pytest

from cascade_sim.figures import FIGURES, figure_tables, revival_grid, run_figure
from cascade_sim.sweep import read_result


@pytest.fixture(scope="module")
def tables():
    return {name: figure_tables(name, timestamp=False) for name in FIGURES if name != "fig5c"}


def test_fig2_no_aa_coincidences_without_splitting(tables):
    t = tables["fig2"]["fig2_S0"]
    assert t.columns == ["tau", "P_AA", "P_AB", "P_BA", "P_BB"]
    assert np.max(np.abs(t.rows[:, 1])) == 0.0
    assert np.max(np.abs(t.rows[:, 4])) < 1e-16
    np.testing.assert_allclose(tables["fig2"]["fig2_inset_S4"].rows[:, 2], 1.0, atol=1e-12)


def test_fig3a_parameters(tables):
    t = tables["fig3a"]["fig3a"]
    assert t.metadata["params"]["phi"] == pytest.approx(math.pi / 3)
    assert t.metadata["params"]["fss"] == 4.0
    assert t.rows[0, 0] == 0.0 and t.rows[-1, 0] == pytest.approx(6.0)


def test_fig3b_revivals_are_unity(tables):
    t = tables["fig3b"]["fig3b"]
    assert t.columns == ["phi", "tau", "concurrence"]
    phase = 4.0 * t.rows[:, 1] / math.pi
    odd = np.isclose(phase, np.round(phase)) & (np.round(phase) % 2 == 1)
    assert odd.sum() > 100
    np.testing.assert_allclose(t.rows[odd, 2], 1.0, atol=1e-9)


def test_revival_grid_hits_multiples():
    g = revival_grid(4.0, 6.0)
    assert g[100] == pytest.approx(math.pi / 4, abs=1e-15)
    assert g[-1] <= 6.0


def test_fig4_schemas(tables):
    assert tables["fig4a"]["fig4a"].columns == ["sigma", "phi", "tau", "concurrence"]
    b = tables["fig4b"]["fig4b"]
    assert b.columns == ["tau", "phi", "concurrence", "n_bar"]
    assert b.rows[:, 0].min() == pytest.approx(-2.0)
    assert np.all(b.rows[:, 3] > 0)
    assert np.all((b.rows[:, 2] >= 0) & (b.rows[:, 2] <= 1))


def test_fig4a_jitter_washes_out_revival(tables):
    rows = tables["fig4a"]["fig4a"].rows
    sel = np.isclose(rows[:, 2], math.pi / 4) & np.isclose(rows[:, 1], math.pi / 4)
    c = rows[sel, 3]
    assert c[0] == pytest.approx(1.0, abs=5e-3)
    assert c[-1] < 0.6


def test_fig5a_interior_maximum(tables):
    rows = tables["fig5a"]["fig5a"].rows
    half = rows[np.isclose(rows[:, 0], math.pi / 2)]
    i = np.argmax(half[:, 2])
    assert 0 < i < len(half) - 1


@pytest.mark.slow
def test_fig5c_peaks_at_symmetric_decay():
    t = figure_tables("fig5c", timestamp=False)["fig5c"]
    assert t.columns == ["phi", "epsilon", "avg_concurrence"]
    for phi in np.unique(t.rows[:, 0]):
        block = t.rows[t.rows[:, 0] == phi]
        assert block[np.argmax(block[:, 2]), 1] == 0.0


def test_run_figure_writes_deterministic_files(tmp_path):
    a = run_figure("fig3a", tmp_path / "a", timestamp=False)
    b = run_figure("fig3a", tmp_path / "b", timestamp=False)
    assert [p.name for p in a] == [p.name for p in b]
    for x, y in zip(a, b):
        assert x.read_bytes() == y.read_bytes()
    back = read_result(a[0])
    assert "timestamp" not in back.metadata


def test_json_output(tmp_path):
    paths = run_figure("fig5a", tmp_path, fmt="json")
    assert [p.name for p in paths] == ["fig5a.json"]
    assert "timestamp" in read_result(paths[0]).metadata


def test_unconditioned_scaling():
    cond = figure_tables("fig3a", timestamp=False)["fig3a"].rows
    un = figure_tables("fig3a", timestamp=False, unconditioned=True, t_XX=0.25)["fig3a"].rows
    np.testing.assert_allclose(un[:, 1:], cond[:, 1:] * 2 * math.exp(-0.5))


def test_unknown_figure():
    with pytest.raises(ValueError):
        figure_tables("fig6")
