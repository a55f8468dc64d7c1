"""Fixed-step RK4 integration of the exciton amplitude equations.

This is an independent route to the emission amplitudes: it integrates the
coupled linear equations for ``(psi_x,n, psi_y,n)`` directly, including the
exciton cross coupling ``Gamma``. The delta-function source at the first
emission is applied as an exact jump, and the second emission is a
projection of the exciton amplitudes onto the exciton-photon couplings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import amplitudes
from .exceptions import StepSizeError
from .params import CouplingTable, PhysicalParams, build_couplings
from .quadrature import integrate


@dataclass(frozen=True)
class IntegratorConfig:
    step: float = 1e-3
    t_max: float = 20.0
    method: str = "rk4"

    def __post_init__(self):
        if not self.step > 0:
            raise StepSizeError(f"step must be > 0, got {self.step}")
        if not self.t_max > 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if self.method != "rk4":
            raise ValueError(f"unsupported method {self.method!r}; only 'rk4' is available")


@dataclass(frozen=True)
class OdeTrajectory:
    """Sampled solution. ``psi[k, alpha, n]`` is the exciton amplitude at ``t[k]``."""

    t: np.ndarray
    psi: np.ndarray
    c_XX: complex
    t_XX: float

    @property
    def tau(self) -> np.ndarray:
        return self.t - self.t_XX


def exciton_generator(params: PhysicalParams, Gamma: float | None = None) -> np.ndarray:
    """Matrix ``M`` with ``d/dt (psi_x, psi_y) = M @ (psi_x, psi_y)``.

    Rates are taken from the epsilon parameterisation, not from the
    coupling table, so this stays independent of the closed forms.
    """
    G = params.Gamma if Gamma is None else float(Gamma)
    eps, gX, S = params.epsilon, params.gamma_X, params.S
    gpx, gpy = (1 + eps) * gX, (1 - eps) * gX
    return -0.5 * np.array(
        [[gpx + 1j * S, G], [np.conj(G), gpy - 1j * S]],
        dtype=complex,
    )


def max_stable_step(params: PhysicalParams, Gamma: float | None = None) -> float:
    G = params.Gamma if Gamma is None else float(Gamma)
    eps, gX = params.epsilon, params.gamma_X
    fastest = max((1 + eps) * gX, (1 - eps) * gX, params.S, G)
    return 0.05 / fastest


def rk4_propagator(M: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for ``y' = M y`` written as a matrix.

    The four stages are evaluated on the identity, so ``R @ y`` is exactly
    the RK4 update of ``y``. ``M`` may be batched on leading axes.
    """
    eye = np.broadcast_to(np.eye(M.shape[-1], dtype=complex), M.shape)
    k1 = M
    k2 = M @ (eye + 0.5 * h * k1)
    k3 = M @ (eye + 0.5 * h * k2)
    k4 = M @ (eye + h * k3)
    return eye + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _rk4_scalar(rate: complex, y0: complex, t_end: float, step: float) -> complex:
    """Integrate ``y' = rate * y`` from 0 to ``t_end`` with RK4."""
    if t_end <= 0:
        return y0
    n = max(1, math.ceil(t_end / step - 1e-9))
    h = t_end / n
    y = y0
    for _ in range(n):
        k1 = rate * y
        k2 = rate * (y + 0.5 * h * k1)
        k3 = rate * (y + 0.5 * h * k2)
        k4 = rate * (y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def iter_propagate(R: np.ndarray, y0: np.ndarray, n_steps: int, chunk: int = 4096):
    """Yield ``(start_index, states)`` blocks of the sequence ``y_{k+1} = R y_k``.

    ``states`` has shape ``(len_block,) + y0.shape`` and block ``j`` covers
    indices ``start .. start+len_block-1`` (index 0 is ``y0``).
    """
    y = np.array(y0, dtype=complex)
    k = 0
    total = n_steps + 1
    while k < total:
        size = min(chunk, total - k)
        block = np.empty((size,) + y.shape, dtype=complex)
        start = 0
        if k == 0:
            block[0] = y
            start = 1
        for i in range(start, size):
            y = R @ y
            block[i] = y
        yield k, block
        k += size


def _jump_state(couplings: CouplingTable, c_XX: complex) -> np.ndarray:
    # psi_{alpha,n}(t_XX+) = -i conj(g_{n,alpha}) c_XX(t_XX); layout [alpha, n]
    return (-1j * np.conj(couplings.g) * c_XX).T


def integrate_exciton_pair(
    t_XX: float,
    params: PhysicalParams,
    couplings: CouplingTable | None = None,
    config: IntegratorConfig | None = None,
    Gamma: float | None = None,
) -> OdeTrajectory:
    """Integrate the exciton amplitudes from the first emission at ``t_XX`` to ``t_max``."""
    config = config or IntegratorConfig()
    couplings = couplings or build_couplings(params)
    if not config.t_max > t_XX:
        raise ValueError("t_max must exceed t_XX")
    if t_XX < 0:
        raise ValueError("t_XX must be >= 0")
    limit = max_stable_step(params, Gamma)
    if config.step > limit:
        raise StepSizeError(f"step {config.step:g} exceeds the stability limit {limit:g}")

    biexciton_rate = -0.5 * 2.0 * params.gamma_X
    c_XX = _rk4_scalar(biexciton_rate, 1.0 + 0j, t_XX, config.step)

    M = exciton_generator(params, Gamma)
    R = rk4_propagator(M, config.step)
    n_steps = math.ceil((config.t_max - t_XX) / config.step - 1e-9)
    y0 = _jump_state(couplings, c_XX)
    blocks = [b for _, b in iter_propagate(R, y0, n_steps)]
    psi = np.concatenate(blocks, axis=0)
    t = t_XX + config.step * np.arange(n_steps + 1)
    return OdeTrajectory(t=t, psi=psi, c_XX=complex(c_XX), t_XX=float(t_XX))


def project_two_photon(psi: np.ndarray, couplings: CouplingTable) -> np.ndarray:
    """Second emission: ``psi_nm = -i sum_alpha conj(g'_{m,alpha}) psi_{alpha,n}``.

    ``psi`` has trailing axes ``[alpha, n]``; the result has a trailing axis
    over paths AA, AB, BA, BB.
    """
    gp = np.conj(couplings.g_prime)  # [m, alpha]
    out = -1j * np.einsum("...an,ma->...nm", psi, gp)
    return out.reshape(out.shape[:-2] + (4,))


def two_photon_trajectory(traj: OdeTrajectory, couplings: CouplingTable) -> np.ndarray:
    return project_two_photon(traj.psi, couplings)


def norm_deficit(
    params: PhysicalParams,
    couplings: CouplingTable | None = None,
    tau_max: float | None = None,
) -> float:
    """``|1 - sum_nm int_0^tau_max |psi_nm|^2 dtau|`` with ``t_XX`` integrated out.

    Integrating the biexciton factor over ``t_XX`` divides by ``gamma_x + gamma_y``.
    """
    couplings = couplings or build_couplings(params)
    slowest = couplings.exciton_rates.min()
    if tau_max is None:
        tau_max = max(20.0 / params.gamma_X, 40.0 / slowest)
    if tau_max < 20.0 / params.gamma_X:
        raise ValueError("tau_max must be >= 20 / gamma_X")
    width = min(0.05 / params.gamma_X, np.pi / (20 * max(params.S, params.gamma_X)))

    def density(tau):
        return amplitudes.two_photon_amplitudes(tau, couplings=couplings).norm

    total = integrate(density, 0.0, tau_max, width, order=6)
    total /= couplings.biexciton_rates.sum()
    return float(abs(1.0 - total))
