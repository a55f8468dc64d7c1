"""Closed-form emission amplitudes of the cascade with Gamma = 0.

The global rotating-frame factor is dropped. Two-photon amplitudes are
functions of the delay ``tau = t_X - t_XX``; the common biexciton decay
factor ``exp(-(gamma_x + gamma_y) t_XX / 2)`` is left out unless a ``t_XX``
is passed explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .params import DIRECTIONS, PATH_LABELS, POLARISATIONS, CouplingTable, PhysicalParams, build_couplings, derive_rates


@dataclass(frozen=True)
class TwoPhotonAmplitudes:
    """Amplitudes ``psi[..., k]`` for paths ``PATH_LABELS[k]`` (AA, AB, BA, BB)."""

    psi: np.ndarray
    tau: np.ndarray | float
    t_XX_factored: bool = True

    def __getitem__(self, label: str) -> np.ndarray:
        return self.psi[..., PATH_LABELS.index(label)]

    @property
    def norm(self) -> np.ndarray:
        return np.sum(np.abs(self.psi) ** 2, axis=-1)


@dataclass(frozen=True)
class SinglePhotonAmplitude:
    alpha: str
    n: str
    value: complex


def _resolve(params: PhysicalParams | None, couplings: CouplingTable | None) -> CouplingTable:
    if couplings is None:
        if params is None:
            raise TypeError("either params or couplings is required")
        couplings = build_couplings(params)
    return couplings


def exciton_decay_constants(couplings: CouplingTable) -> np.ndarray:
    """Complex decay constants ``[k_x, k_y]`` of the exciton amplitudes.

    ``k_x = (gamma'_x + iS)/2`` and ``k_y = (gamma'_y - iS)/2``; the x exciton
    sits S/2 above the y exciton.
    """
    S = couplings.params.S
    gp = couplings.exciton_rates
    return np.array([(gp[0] + 1j * S) / 2, (gp[1] - 1j * S) / 2])


def amplitude_terms(couplings: CouplingTable) -> tuple[np.ndarray, np.ndarray]:
    """Expansion ``psi_nm(tau) = sum_alpha coeff[alpha, nm] * exp(-k[alpha] * tau)``.

    Returns ``(coeff, k)`` with ``coeff`` of shape (2, 4) ordered as
    PATH_LABELS and ``k`` from :func:`exciton_decay_constants`.
    """
    g, gp = couplings.g, couplings.g_prime
    coeff = np.empty((2, 4), dtype=complex)
    for n in range(2):
        for m in range(2):
            coeff[:, 2 * n + m] = -np.conj(g[n, :]) * np.conj(gp[m, :])
    return coeff, exciton_decay_constants(couplings)


def biexciton_amplitude(t, params: PhysicalParams):
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise DomainError("biexciton amplitude is defined for t >= 0 only")
    r = derive_rates(params)
    out = np.exp(-(r.gamma_x + r.gamma_y) * t_arr / 2)
    return out if out.ndim else float(out)


def exciton_amplitude(alpha: str, n: str, t, t_XX, couplings: CouplingTable):
    """Amplitude of having emitted one biexciton photon into ``n`` at ``t_XX``
    while the dot sits in exciton ``alpha`` at time ``t``. Zero before ``t_XX``.
    """
    a = POLARISATIONS.index(alpha)
    d = DIRECTIONS.index(n)
    t = np.asarray(t, dtype=float)
    t_XX = np.asarray(t_XX, dtype=float)
    k = exciton_decay_constants(couplings)[a]
    gamma_sum = couplings.biexciton_rates.sum()
    dt = t - t_XX
    support = dt >= 0
    dt = np.where(support, dt, 0.0)
    value = -1j * np.conj(couplings.g[d, a]) * np.exp(-gamma_sum * t_XX / 2 - k * dt)
    value = np.where(support, value, 0.0)
    return value if value.ndim else complex(value)


def two_photon_amplitudes(
    tau,
    params: PhysicalParams | None = None,
    couplings: CouplingTable | None = None,
    t_XX: float | None = None,
) -> TwoPhotonAmplitudes:
    couplings = _resolve(params, couplings)
    tau_arr = np.asarray(tau, dtype=float)
    if not np.all(np.isfinite(tau_arr)):
        raise DomainError("tau must be finite")
    coeff, k = amplitude_terms(couplings)
    support = tau_arr >= 0
    t_pos = np.where(support, tau_arr, 0.0)
    psi = np.exp(-np.multiply.outer(t_pos, k)) @ coeff
    psi = np.where(support[..., None], psi, 0.0)
    factored = t_XX is None
    if not factored:
        psi = psi * np.exp(-couplings.biexciton_rates.sum() * t_XX / 2)
    return TwoPhotonAmplitudes(psi=psi, tau=tau if np.ndim(tau) else float(tau), t_XX_factored=factored)
