"""Path-resolved two-photon coincidence densities.

All densities here are conditioned on the first (biexciton) detection: the
modulus squared of the two-photon amplitude is divided by the first-photon
rate ``gamma_x + gamma_y``, so ``sum_nm P_nm`` is a density in ``tau`` whose
integral is close to one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import PATH_LABELS, CouplingTable, PhysicalParams, build_couplings, derive_rates


@dataclass(frozen=True)
class CoincidenceRecord:
    tau: np.ndarray | float
    P: np.ndarray  # trailing axis ordered as PATH_LABELS
    conditioned: bool = True

    def __getitem__(self, label: str) -> np.ndarray:
        return self.P[..., PATH_LABELS.index(label)]

    @property
    def total(self) -> np.ndarray:
        return self.P.sum(axis=-1)

    def unconditioned(self, t_XX: float, params: PhysicalParams) -> "CoincidenceRecord":
        if not self.conditioned:
            return self
        return CoincidenceRecord(self.tau, self.P * first_photon_density(t_XX, params), conditioned=False)


def coincidence_general(
    tau,
    params: PhysicalParams,
    couplings: CouplingTable | None = None,
) -> CoincidenceRecord:
    """Interference form of the coincidence densities for arbitrary rates and phases."""
    couplings = couplings or build_couplings(params)
    tau_arr = np.asarray(tau, dtype=float)
    support = tau_arr >= 0
    t = np.where(support, tau_arr, 0.0)[..., None]

    gam = couplings.partial_rates  # [n, alpha]
    gam_p = couplings.partial_rates_prime  # [m, alpha]
    dphi = couplings.phases[:, 0] - couplings.phases[:, 1]
    dphi_p = couplings.phases_prime[:, 0] - couplings.phases_prime[:, 1]
    gpx, gpy = couplings.exciton_rates
    S = params.S

    n_idx = np.array([0, 0, 1, 1])
    m_idx = np.array([0, 1, 0, 1])
    ax = gam[n_idx, 0] * gam_p[m_idx, 0]
    ay = gam[n_idx, 1] * gam_p[m_idx, 1]
    phase = dphi[n_idx] + dphi_p[m_idx]
    P = (
        ax * np.exp(-gpx * t)
        + ay * np.exp(-gpy * t)
        + 2 * np.sqrt(ax * ay) * np.exp(-(gpx + gpy) * t / 2) * np.cos(S * t + phase)
    )
    P = np.where(support[..., None], P, 0.0) / couplings.biexciton_rates.sum()
    return CoincidenceRecord(tau=tau, P=P)


def coincidence_symmetric(tau, gamma_X: float, S: float, Phi: float) -> CoincidenceRecord:
    """Coincidence densities for equal x/y rates and equal chiral phases."""
    tau_arr = np.asarray(tau, dtype=float)
    support = tau_arr >= 0
    t = np.where(support, tau_arr, 0.0)
    env = gamma_X / 4 * np.exp(-gamma_X * t)
    P_AA = env * (1 + np.cos(S * t + 2 * Phi))
    P_BB = env * (1 + np.cos(S * t - 2 * Phi))
    P_AB = env * (1 + np.cos(S * t))
    P = np.stack([P_AA, P_AB, P_AB, P_BB], axis=-1)
    P = np.where(support[..., None], P, 0.0)
    return CoincidenceRecord(tau=tau, P=P)


def first_photon_density(t_XX, params: PhysicalParams):
    """Density of the biexciton photon detection time, ``(gamma_x + gamma_y) exp(-(gamma_x + gamma_y) t_XX)``."""
    t = np.asarray(t_XX, dtype=float)
    if np.any(t < 0):
        raise ValueError("t_XX must be >= 0")
    r = derive_rates(params)
    rate = r.gamma_x + r.gamma_y
    out = rate * np.exp(-rate * t)
    return out if out.ndim else float(out)
