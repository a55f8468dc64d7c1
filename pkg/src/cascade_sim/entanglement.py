"""Path density matrices and Wootters concurrence.

Basis order is (AA, AB, BA, BB): the first factor is the biexciton-photon
path, the second the exciton-photon path.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .amplitudes import TwoPhotonAmplitudes, two_photon_amplitudes
from .exceptions import DegenerateStateError, NumericalError
from .params import CouplingTable, PhysicalParams

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)

EIG_IMAG_TOL = 1e-8
EIG_NEG_TOL = 1e-8


@dataclass(frozen=True)
class PathDensityMatrix:
    rho: np.ndarray
    normalized: bool = True

    @property
    def trace(self) -> np.ndarray:
        return np.trace(self.rho, axis1=-2, axis2=-1).real

    @property
    def purity(self) -> np.ndarray:
        return np.einsum("...ij,...ji->...", self.rho, self.rho).real

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - np.conj(np.swapaxes(self.rho, -1, -2)))))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.rho + np.conj(np.swapaxes(self.rho, -1, -2)))
        return float(np.min(np.linalg.eigvalsh(herm)))


@dataclass(frozen=True)
class ConcurrenceValue:
    value: np.ndarray | float
    lambdas: np.ndarray  # trailing axis sorted descending


def _as_array(rho) -> np.ndarray:
    if isinstance(rho, PathDensityMatrix):
        rho = rho.rho
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise ValueError(f"expected 4x4 density matrices, got shape {rho.shape}")
    return rho


def density_from_amplitudes(amps: TwoPhotonAmplitudes | np.ndarray) -> PathDensityMatrix:
    """Normalised projector onto the post-selected two-photon path state."""
    psi = amps.psi if isinstance(amps, TwoPhotonAmplitudes) else np.asarray(amps, dtype=complex)
    norm = np.sum(np.abs(psi) ** 2, axis=-1)
    if np.any(norm == 0):
        raise DegenerateStateError("all two-photon amplitudes vanish (tau < 0?)")
    rho = np.einsum("...i,...j->...ij", psi, np.conj(psi)) / norm[..., None, None]
    return PathDensityMatrix(rho=rho)


def spin_flip(rho: np.ndarray) -> np.ndarray:
    return SPIN_FLIP @ np.conj(rho) @ SPIN_FLIP


def _wootters_lambdas(rho: np.ndarray) -> np.ndarray:
    # With rho = X X^dagger the eigenvalues of rho rho_tilde are the squared singular
    # values of X^T Y X (Y the spin flip). Taking singular values directly avoids the
    # square root of round-off that would otherwise cap accuracy near 1e-8.
    herm = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))
    w, v = np.linalg.eigh(herm)
    X = v * np.sqrt(np.clip(w, 0.0, None))[..., None, :]
    A = np.swapaxes(X, -1, -2) @ SPIN_FLIP @ X
    return np.linalg.svd(A, compute_uv=False)


def wootters_concurrence(rho) -> ConcurrenceValue:
    """Concurrence ``max(0, l1 - l2 - l3 - l4)`` from the spectrum of ``rho @ rho_tilde``.

    Works on a single matrix or a stack. Eigenvalues of ``rho @ rho_tilde``
    with an imaginary part above 1e-8 or a real part below -1e-8 indicate a
    malformed input and raise :class:`NumericalError`. The ``l_i`` themselves
    come from an equivalent singular-value problem, which keeps them accurate
    to machine precision for pure states.
    """
    rho = _as_array(rho)
    ev = np.linalg.eigvals(rho @ spin_flip(rho))
    if np.any(np.abs(ev.imag) > EIG_IMAG_TOL):
        raise NumericalError(f"complex eigenvalue in rho*rho_tilde (|imag| = {np.abs(ev.imag).max():.3g})")
    if np.any(ev.real < -EIG_NEG_TOL):
        raise NumericalError(f"negative eigenvalue in rho*rho_tilde ({ev.real.min():.3g})")
    lam = _wootters_lambdas(rho)  # already sorted descending
    value = np.maximum(0.0, lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3])
    return ConcurrenceValue(value=value if value.ndim else float(value), lambdas=lam)


def concurrence_closed_form(Phi, S, tau):
    """Concurrence for equal decay rates and equal chiral phases.

    ``sin^2(Phi) / (1 + cos(S tau) cos^2(Phi))``; NaN where the state itself
    vanishes (Phi = 0 or pi with S tau an odd multiple of pi).
    """
    Phi, S, tau = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (Phi, S, tau)))
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.sin(Phi) ** 2 / (1 + np.cos(S * tau) * np.cos(Phi) ** 2)
    return c if c.ndim else float(c)


def pure_state_concurrence(psi: np.ndarray) -> np.ndarray:
    """``2 |psi_AA psi_BB - psi_AB psi_BA| / N`` for (stacks of) unnormalised amplitudes."""
    psi = np.asarray(psi)
    norm = np.sum(np.abs(psi) ** 2, axis=-1)
    if np.any(norm == 0):
        raise DegenerateStateError("all two-photon amplitudes vanish")
    return 2 * np.abs(psi[..., 0] * psi[..., 3] - psi[..., 1] * psi[..., 2]) / norm


def concurrence_of_delay(
    tau,
    params: PhysicalParams,
    couplings: CouplingTable | None = None,
):
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise DegenerateStateError("the jitter-free state exists only for tau >= 0")
    amps = two_photon_amplitudes(tau_arr, params, couplings)
    c = pure_state_concurrence(amps.psi)
    return c if c.ndim else float(c)
