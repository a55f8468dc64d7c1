"""Gaussian detection-timing jitter.

The measured delay is modelled as the true delay plus Gaussian noise of
RMS width ``sigma``. Averaging the (unnormalised) pure-state projector
``psi psi^dagger`` against the Gaussian kernel gives a mixed path state
``rho_bar(tau)`` whose trace ``N_bar(tau)`` is the density of measured
delays. The true delay is never negative, so the integrals start at 0 even
though the measured ``tau`` may be negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amplitudes import amplitude_terms, two_photon_amplitudes
from .entanglement import PathDensityMatrix, pure_state_concurrence, wootters_concurrence
from .exceptions import DegenerateStateError, QuadratureError
from .params import CouplingTable, PhysicalParams, build_couplings
from .quadrature import composite_gauss_legendre

_IU = np.triu_indices(4, k=1)
_trapezoid = getattr(np, "trapezoid", None) or np.trapz
_CHUNK_BUDGET = 2_000_000


@dataclass(frozen=True)
class JitterConfig:
    """Quadrature settings for the jitter average.

    ``quad_points`` is the minimum number of Gauss-Legendre nodes placed in
    each integration window; the panel width is further capped at
    ``sigma / 10`` and at ``pi / (20 * fastest_rate)``.
    """

    quad_points: int = 64
    order: int = 4
    window_sigmas: float = 8.0
    tol: float = 1e-8
    check_convergence: bool = True

    def __post_init__(self):
        if self.quad_points < 64:
            raise ValueError("quad_points must be >= 64")
        if self.order < 2:
            raise ValueError("order must be >= 2")


@dataclass(frozen=True)
class JitteredState:
    rho_bar: PathDensityMatrix
    N_bar: np.ndarray | float
    tau: np.ndarray | float


def _panel_width(sigma: float, couplings: list[CouplingTable], config: JitterConfig) -> float:
    fastest = max(
        max(c.params.S, c.params.gamma_X, *c.exciton_rates) for c in couplings
    )
    width = min(sigma / 10, math.pi / (20 * fastest))
    window = 2 * config.window_sigmas * sigma
    return min(width, window * config.order / config.quad_points)


def _moment_columns(psi: np.ndarray) -> np.ndarray:
    """Real columns of ``psi psi^dagger``: 4 diagonal, then Re and Im of the upper triangle."""
    outer = psi[:, _IU[0]] * np.conj(psi[:, _IU[1]])
    return np.concatenate([np.abs(psi) ** 2, outer.real, outer.imag], axis=1)


def _assemble(cols: np.ndarray) -> np.ndarray:
    """Inverse of :func:`_moment_columns` for arrays ``(..., 16)``."""
    rho = np.zeros(cols.shape[:-1] + (4, 4), dtype=complex)
    idx = np.arange(4)
    rho[..., idx, idx] = cols[..., :4]
    upper = cols[..., 4:10] + 1j * cols[..., 10:16]
    rho[..., _IU[0], _IU[1]] = upper
    rho[..., _IU[1], _IU[0]] = np.conj(upper)
    return rho


def _chunks(lo_idx: np.ndarray, hi_idx: np.ndarray, order: int):
    """Group consecutive (sorted) windows so each block stays within the work budget."""
    start = 0
    n = len(lo_idx)
    while start < n:
        stop = start + 1
        lo, hi = lo_idx[start], hi_idx[start]
        while stop < n:
            new_lo = min(lo, lo_idx[stop])
            new_hi = max(hi, hi_idx[stop])
            if (stop - start + 1) * (new_hi - new_lo) * order > _CHUNK_BUDGET:
                break
            lo, hi = new_lo, new_hi
            stop += 1
        yield start, stop, lo, hi
        start = stop


def _smeared_moments(
    taus: np.ndarray,
    sigma: float,
    couplings: list[CouplingTable],
    width: float,
    config: JitterConfig,
) -> np.ndarray:
    """Kernel-averaged moments ``(len(taus), len(couplings), 16)`` on panels of ``width``.

    Panels are anchored at 0 so all windows share one global grid.
    """
    reach = config.window_sigmas * sigma
    # exp(-rate * tau') pulls the integrand's peak down to tau - rate * sigma^2
    pull = max(float(c.exciton_rates.max()) for c in couplings) * sigma**2
    lo = np.maximum(0.0, taus - pull - reach)
    hi = np.maximum(taus, 0.0) + reach
    lo_idx = np.floor(lo / width).astype(np.int64)
    hi_idx = np.maximum(np.ceil(hi / width).astype(np.int64), lo_idx + 1)

    order = config.order
    norm = 1.0 / (sigma * math.sqrt(2 * math.pi))
    terms = [amplitude_terms(c) for c in couplings]
    first_rate = [c.biexciton_rates.sum() for c in couplings]

    sort = np.argsort(taus, kind="stable")
    out = np.empty((len(taus), len(couplings), 16))
    for a, b, j0, j1 in _chunks(lo_idx[sort], hi_idx[sort], order):
        nodes, weights = composite_gauss_legendre(j0 * width, j1 * width, int(j1 - j0), order)
        cols = []
        for (coeff, k), rate in zip(terms, first_rate):
            psi = np.exp(-np.multiply.outer(nodes, k)) @ coeff
            cols.append(_moment_columns(psi) / rate)
        M = np.concatenate(cols, axis=1)
        t = taus[sort[a:b]]
        K = np.exp(-((nodes[None, :] - t[:, None]) ** 2) / (2 * sigma**2)) * (weights * norm)[None, :]
        out[sort[a:b]] = (K @ M).reshape(b - a, len(couplings), 16)
    return out


def _normalized(cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    N = cols[..., :4].sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho_cols = cols / N[..., None]
    return rho_cols, N


def smeared_states(
    taus,
    sigma: float,
    couplings: list[CouplingTable],
    config: JitterConfig | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Jittered density matrices for several parameter sets on a shared delay grid.

    Returns ``(rho_bar, N_bar)`` with shapes ``(n_tau, n_sets, 4, 4)`` and
    ``(n_tau, n_sets)``. Entries of ``rho_bar`` where ``N_bar`` underflows to
    zero are NaN. Raises :class:`QuadratureError` if halving the panel width
    moves any normalised matrix entry by more than ``config.tol``.
    """
    config = config or JitterConfig()
    if not sigma > 0:
        raise ValueError("sigma must be > 0 for the jitter average")
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    width = _panel_width(sigma, couplings, config)
    fine = _smeared_moments(taus, sigma, couplings, width / 2, config)
    rho_fine, N = _normalized(fine)
    if config.check_convergence:
        coarse = _smeared_moments(taus, sigma, couplings, width, config)
        rho_coarse, _ = _normalized(coarse)
        ok = N > 0
        diff = np.abs(rho_fine[ok] - rho_coarse[ok])
        if diff.size and np.nanmax(diff) > config.tol:
            raise QuadratureError(
                f"jitter quadrature not converged: refinement changed rho_bar by {np.nanmax(diff):.3g}"
            )
    rho = _assemble(rho_fine)
    rho[N == 0] = np.nan
    return rho, N


def jittered_density(
    tau,
    sigma: float,
    params: PhysicalParams,
    couplings: CouplingTable | None = None,
    config: JitterConfig | None = None,
) -> JitteredState:
    couplings = couplings or build_couplings(params)
    scalar = np.ndim(tau) == 0
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    if sigma == 0:
        if np.any(taus < 0):
            raise DegenerateStateError("without jitter no state is detected at tau < 0")
        psi = two_photon_amplitudes(taus, couplings=couplings).psi
        N = np.sum(np.abs(psi) ** 2, axis=-1)
        if np.any(N == 0):
            raise DegenerateStateError("all two-photon amplitudes vanish")
        rho = np.einsum("...i,...j->...ij", psi, np.conj(psi)) / N[:, None, None]
        N = N / couplings.biexciton_rates.sum()
    elif sigma < 0:
        raise ValueError("sigma must be >= 0")
    else:
        rho, N = smeared_states(taus, sigma, [couplings], config)
        rho, N = rho[:, 0], N[:, 0]
        if np.any(N == 0):
            raise DegenerateStateError("detection density underflows at the requested delay")
    if scalar:
        return JitteredState(PathDensityMatrix(rho[0]), float(N[0]), float(taus[0]))
    return JitteredState(PathDensityMatrix(rho), N, taus)


def jittered_concurrence(
    tau,
    sigma: float,
    params: PhysicalParams,
    couplings: CouplingTable | None = None,
    config: JitterConfig | None = None,
):
    state = jittered_density(tau, sigma, params, couplings, config)
    return wootters_concurrence(state.rho_bar).value


def _safe_concurrence(rho: np.ndarray) -> np.ndarray:
    c = np.zeros(rho.shape[:-2])
    ok = np.all(np.isfinite(rho), axis=(-2, -1))
    if np.any(ok):
        c[ok] = wootters_concurrence(rho[ok]).value
    return c


def averaging_window(sigma: float, couplings: CouplingTable, n_tau: int = 2000, span: float = 15.0) -> np.ndarray:
    """Delay grid for the time-averaged concurrence.

    Runs from ``-8 sigma`` to ``span / slowest_exciton_rate + 8 sigma`` so the
    slow channel has decayed by ``exp(-span)`` at the upper end.
    """
    slowest = float(couplings.exciton_rates.min())
    return np.linspace(-8 * sigma, span / slowest + 8 * sigma, n_tau)


def average_concurrence_map(
    sigma: float,
    params_list: list[PhysicalParams],
    *,
    n_tau: int = 2000,
    span: float = 15.0,
    jittered_concurrence: bool = True,
    config: JitterConfig | None = None,
) -> np.ndarray:
    """Time-averaged concurrence for each parameter set.

    Parameter sets sharing an averaging window are evaluated together.
    With ``jittered_concurrence=False`` the weights still come from the
    jittered density but the concurrence is the jitter-free one at
    ``max(tau, 0)``.
    """
    return _average(sigma, [build_couplings(p) for p in params_list], n_tau, span, jittered_concurrence, config)


def _average(sigma, couplings, n_tau, span, jittered_concurrence, config) -> np.ndarray:
    out = np.empty(len(couplings))
    groups: dict[tuple, list[int]] = {}
    for i, c in enumerate(couplings):
        grid = averaging_window(sigma, c, n_tau, span)
        key = (grid[0], grid[-1], c.params.S)
        groups.setdefault(key, []).append(i)
    for key, idx in groups.items():
        grid = averaging_window(sigma, couplings[idx[0]], n_tau, span)
        members = [couplings[i] for i in idx]
        if sigma == 0:
            N = np.empty((n_tau, len(members)))
            C = np.empty((n_tau, len(members)))
            for j, c in enumerate(members):
                psi = two_photon_amplitudes(grid, couplings=c).psi
                N[:, j] = np.sum(np.abs(psi) ** 2, axis=-1)
                C[:, j] = _pure_or_zero(psi)
        else:
            rho, N = smeared_states(grid, sigma, members, config)
            if jittered_concurrence:
                C = _safe_concurrence(rho)
            else:
                C = np.stack(
                    [_pure_or_zero(two_photon_amplitudes(np.maximum(grid, 0), couplings=c).psi) for c in members],
                    axis=1,
                )
        weight = _trapezoid(N, grid, axis=0)
        out[idx] = _trapezoid(N * C, grid, axis=0) / weight
    return out


def _pure_or_zero(psi: np.ndarray) -> np.ndarray:
    norm = np.sum(np.abs(psi) ** 2, axis=-1)
    c = np.zeros(norm.shape)
    ok = norm > 0
    c[ok] = pure_state_concurrence(psi[ok])
    return c


def average_concurrence(
    sigma: float,
    params: PhysicalParams,
    couplings: CouplingTable | None = None,
    **kwargs,
) -> float:
    couplings = couplings or build_couplings(params)
    opts = {"n_tau": 2000, "span": 15.0, "jittered_concurrence": True, "config": None}
    unknown = set(kwargs) - set(opts)
    if unknown:
        raise TypeError(f"unexpected keyword arguments {sorted(unknown)}")
    opts.update(kwargs)
    return float(_average(sigma, [couplings], **opts)[0])
