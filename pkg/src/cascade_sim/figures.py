"""Data for the figure panels: fixed parameter sets, emitted as CSV/JSON tables.

All grids are in units of ``gamma_X`` taken from the base parameters, so
``S = 4`` below means ``S = 4 gamma_X``.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Callable

import numpy as np

from .correlations import coincidence_general, first_photon_density
from .entanglement import pure_state_concurrence, wootters_concurrence
from .amplitudes import two_photon_amplitudes
from .jitter import average_concurrence_map, smeared_states
from .params import PhysicalParams, build_couplings
from .sweep import SweepResult, make_metadata

FIGURES = ("fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig5a", "fig5b", "fig5c")

P_COLUMNS = ["tau", "P_AA", "P_AB", "P_BA", "P_BB"]
MAP_COLUMNS = ["phi", "tau", "concurrence"]

# phi = k pi / 96 for k = 1..95: contains pi/8, pi/4, pi/3, 3pi/8, pi/2 and skips the
# non-chiral endpoints where the state vanishes at S tau = pi
MAP_PHIS = np.arange(1, 96) * math.pi / 96
LINE_PHIS = (math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2)
JITTER_PHIS = (math.pi / 8, math.pi / 4, math.pi / 2)


def tau_grid(gamma_X: float, points: int = 1200, span: float = 6.0) -> np.ndarray:
    return np.linspace(0.0, span / gamma_X, points)


def revival_grid(S: float, span: float, per_half_period: int = 100) -> np.ndarray:
    """Uniform delays on [0, span] that hit every odd multiple of pi / S exactly."""
    step = math.pi / (S * per_half_period)
    return np.arange(0, int(span / step) + 1) * step


def _coincidence_table(params: PhysicalParams, taus: np.ndarray, unconditioned: bool, t_XX: float) -> np.ndarray:
    P = coincidence_general(taus, params).P
    if unconditioned:
        P = P * first_photon_density(t_XX, params)
    return np.column_stack([taus, P])


def _concurrence_rows(params: PhysicalParams, phis, taus: np.ndarray) -> np.ndarray:
    blocks = []
    for phi in phis:
        psi = two_photon_amplitudes(taus, params.replace(phi=phi)).psi
        blocks.append(np.column_stack([np.full(taus.shape, phi), taus, pure_state_concurrence(psi)]))
    return np.vstack(blocks)


def _fig2(base, opts):
    g = base.gamma_X
    taus = tau_grid(g)
    out = {}
    for S in (0.0, 4.0):
        p = base.replace(S=S * g, phi=math.pi / 2, epsilon=0.0)
        tag = f"S{S:g}"
        out[f"fig2_{tag}"] = (P_COLUMNS, _coincidence_table(p, taus, opts["unconditioned"], opts["t_XX"]), p)
        out[f"fig2_inset_{tag}"] = (MAP_COLUMNS, _concurrence_rows(p, [math.pi / 2], taus), p)
    return out


def _fig3a(base, opts):
    g = base.gamma_X
    p = base.replace(S=4 * g, phi=math.pi / 3, epsilon=0.0)
    taus = tau_grid(g)
    return {
        "fig3a": (P_COLUMNS, _coincidence_table(p, taus, opts["unconditioned"], opts["t_XX"]), p),
        "fig3a_inset": (MAP_COLUMNS, _concurrence_rows(p, [math.pi / 3], taus), p),
    }


def _fig3b(base, opts):
    g = base.gamma_X
    p = base.replace(S=4 * g, epsilon=0.0)
    taus = revival_grid(p.S, 6.0 / g)
    return {"fig3b": (MAP_COLUMNS, _concurrence_rows(p, MAP_PHIS, taus), p)}


def _fig4a(base, opts):
    g = base.gamma_X
    p = base.replace(S=4 * g, epsilon=0.0)
    sigmas = np.geomspace(0.01, 10.0, 61) / g
    marker_taus = np.array([0.5 / g, math.pi / p.S, 2.0 / g])
    rows = []
    for sigma in sigmas:
        couplings = [build_couplings(p.replace(phi=phi)) for phi in JITTER_PHIS]
        rho, _ = smeared_states(marker_taus, sigma, couplings)
        C = wootters_concurrence(rho).value
        for j, phi in enumerate(JITTER_PHIS):
            for i, tau in enumerate(marker_taus):
                rows.append([sigma, phi, tau, C[i, j]])
    return {"fig4a": (["sigma", "phi", "tau", "concurrence"], np.array(rows), p)}


def _fig4bc(base, name):
    g = base.gamma_X
    p = base.replace(S=4 * g, epsilon=0.0)
    sigma = 0.3 / g
    taus = np.linspace(-2.0 / g, 6.0 / g, 801)
    couplings = [build_couplings(p.replace(phi=phi)) for phi in JITTER_PHIS]
    rho, N = smeared_states(taus, sigma, couplings)
    C = wootters_concurrence(rho).value
    blocks = [np.column_stack([taus, np.full(taus.shape, phi), C[:, j], N[:, j]]) for j, phi in enumerate(JITTER_PHIS)]
    return {name: (["tau", "phi", "concurrence", "n_bar"], np.vstack(blocks), p.replace(phi=math.pi / 2))}


def _fig5a(base, opts):
    g = base.gamma_X
    p = base.replace(S=4 * g, epsilon=-0.4)
    return {"fig5a": (MAP_COLUMNS, _concurrence_rows(p, LINE_PHIS, tau_grid(g)), p)}


def _fig5b(base, opts):
    g = base.gamma_X
    p = base.replace(S=4 * g, epsilon=-0.4)
    return {"fig5b": (MAP_COLUMNS, _concurrence_rows(p, MAP_PHIS, tau_grid(g, 600)), p)}


def _fig5c(base, opts):
    g = base.gamma_X
    p = base.replace(S=4 * g, epsilon=0.0)
    sigma = 3.0 / g
    phis = np.arange(1, 16) * math.pi / 16
    epsilons = np.round(np.linspace(-0.8, 0.8, 17), 12)
    rows = []
    for eps in epsilons:
        cbar = average_concurrence_map(sigma, [p.replace(phi=phi, epsilon=eps) for phi in phis])
        rows.extend([phi, eps, c] for phi, c in zip(phis, cbar))
    rows.sort(key=lambda r: (r[0], r[1]))
    return {"fig5c": (["phi", "epsilon", "avg_concurrence"], np.array(rows), p)}


_BUILDERS: dict[str, Callable] = {
    "fig2": _fig2,
    "fig3a": _fig3a,
    "fig3b": _fig3b,
    "fig4a": _fig4a,
    "fig4b": lambda base, opts: _fig4bc(base, "fig4b"),
    "fig4c": lambda base, opts: _fig4bc(base, "fig4c"),
    "fig5a": _fig5a,
    "fig5b": _fig5b,
    "fig5c": _fig5c,
}


def figure_tables(name: str, base: PhysicalParams | None = None, *, unconditioned: bool = False, t_XX: float = 0.0,
                  timestamp: bool = True) -> dict[str, SweepResult]:
    if name not in _BUILDERS:
        raise ValueError(f"unknown figure {name!r}; expected one of {FIGURES}")
    base = base or PhysicalParams()
    tables = _BUILDERS[name](base, {"unconditioned": unconditioned, "t_XX": t_XX})
    out = {}
    for stem, (columns, rows, params) in tables.items():
        meta = make_metadata(params, {"figure": name, "table": stem, "unconditioned": unconditioned}, timestamp)
        out[stem] = SweepResult(list(columns), np.asarray(rows, dtype=float), meta)
    return out


def run_figure(
    name: str,
    out_dir: str | Path,
    base: PhysicalParams | None = None,
    *,
    fmt: str = "csv",
    timestamp: bool = True,
    unconditioned: bool = False,
    t_XX: float = 0.0,
) -> list[Path]:
    """Compute one figure's data and write it below ``out_dir``; returns the written paths."""
    out_dir = Path(out_dir)
    written = []
    for stem, table in figure_tables(name, base, unconditioned=unconditioned, t_XX=t_XX, timestamp=timestamp).items():
        written.extend(table.write(out_dir / f"{stem}.{fmt}", fmt))
    return written
