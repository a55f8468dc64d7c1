"""Physical parameters, decay rates and waveguide coupling constants.

Natural units throughout: hbar = 1, both group velocities = 1, and every
rate (including the fine-structure splitting ``S`` and the cross coupling
``Gamma``) is expressed in units of the exciton decay rate ``gamma_X``.
Delays are measured in units of ``1 / gamma_X``.

Index conventions used by :class:`CouplingTable` arrays::

    axis 0: propagation direction n  (0 -> A, 1 -> B)
    axis 1: dipole polarisation alpha (0 -> x, 1 -> y)
"""
from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .exceptions import InvalidParameterError

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

DIRECTIONS = ("A", "B")
POLARISATIONS = ("x", "y")
PATH_LABELS = ("AA", "AB", "BA", "BB")

# config-file key -> PhysicalParams field
CONFIG_KEYS = {
    "gamma_x_exciton": "gamma_X",
    "epsilon": "epsilon",
    "fss": "S",
    "phi": "phi",
    "phi_prime": "phi_prime",
    "cross_gamma": "Gamma",
}


@dataclass(frozen=True)
class PhysicalParams:
    """Immutable parameter set for one simulation run.

    ``phi_prime`` defaults to ``phi`` (equal biexciton and exciton chiral
    phases). ``Gamma`` is only honoured by the ODE oracle; every closed-form
    quantity assumes ``Gamma = 0``.
    """

    gamma_X: float = 1.0
    epsilon: float = 0.0
    S: float = 4.0
    phi: float = math.pi / 2
    phi_prime: float | None = None
    Gamma: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise InvalidParameterError(f"{f.name} must be a finite real number, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        if self.phi_prime is None:
            object.__setattr__(self, "phi_prime", self.phi)
        if self.gamma_X <= 0:
            raise InvalidParameterError(f"gamma_X must be > 0, got {self.gamma_X}")
        if not abs(self.epsilon) < 1:
            raise InvalidParameterError(f"|epsilon| must be < 1, got {self.epsilon}")
        if self.S < 0:
            raise InvalidParameterError(f"S must be >= 0, got {self.S}")
        if self.Gamma < 0:
            raise InvalidParameterError(f"Gamma must be >= 0, got {self.Gamma}")

    def replace(self, **changes) -> "PhysicalParams":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        # a changed phi drags phi_prime along unless it was given explicitly
        if "phi" in changes and "phi_prime" not in changes and self.phi_prime == self.phi:
            data["phi_prime"] = None
        data.update(changes)
        return PhysicalParams(**data)

    def to_config(self) -> dict[str, float]:
        return {key: getattr(self, attr) for key, attr in CONFIG_KEYS.items()}


@dataclass(frozen=True)
class Rates:
    gamma_x: float
    gamma_y: float
    gamma_px: float
    gamma_py: float
    gamma_XX: float

    @property
    def epsilon(self) -> float:
        return (self.gamma_x - self.gamma_y) / (self.gamma_x + self.gamma_y)

    @property
    def exciton(self) -> np.ndarray:
        return np.array([self.gamma_px, self.gamma_py])

    @property
    def biexciton(self) -> np.ndarray:
        return np.array([self.gamma_x, self.gamma_y])


@dataclass(frozen=True)
class CouplingTable:
    """Complex coupling constants ``g[n, alpha]`` and ``g_prime[n, alpha]``.

    ``g`` drives the biexciton transition, ``g_prime`` the exciton one. The
    per-direction partial rate is ``|g|**2`` and the phase is ``angle(g)``.
    """

    g: np.ndarray
    g_prime: np.ndarray
    params: PhysicalParams = field(repr=False)

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.g)

    @property
    def phases_prime(self) -> np.ndarray:
        return np.angle(self.g_prime)

    @property
    def partial_rates(self) -> np.ndarray:
        return np.abs(self.g) ** 2

    @property
    def partial_rates_prime(self) -> np.ndarray:
        return np.abs(self.g_prime) ** 2

    @property
    def biexciton_rates(self) -> np.ndarray:
        """``[gamma_x, gamma_y]`` recovered by summing over directions."""
        return self.partial_rates.sum(axis=0)

    @property
    def exciton_rates(self) -> np.ndarray:
        return self.partial_rates_prime.sum(axis=0)

    def shifted_gauge(self, shift_A: float, shift_B: float) -> "CouplingTable":
        """Return a copy with every phase of direction A (B) shifted by a constant."""
        shift = np.exp(1j * np.array([shift_A, shift_B]))[:, None]
        return CouplingTable(self.g * shift, self.g_prime * shift, self.params)


@dataclass(frozen=True)
class RegimeReport:
    warnings: tuple[str, ...]
    norm_deviation: float


def derive_rates(params: PhysicalParams) -> Rates:
    """Channel decay rates for the biexciton (unprimed) and exciton (primed) transitions."""
    if not isinstance(params, PhysicalParams):
        raise InvalidParameterError("derive_rates expects a PhysicalParams instance")
    eps = params.epsilon
    gamma_XX = 2.0 * params.gamma_X
    return Rates(
        gamma_x=(1 + eps) * gamma_XX / 2,
        gamma_y=(1 - eps) * gamma_XX / 2,
        gamma_px=(1 + eps) * params.gamma_X,
        gamma_py=(1 - eps) * params.gamma_X,
        gamma_XX=gamma_XX,
    )


def build_couplings(params: PhysicalParams) -> CouplingTable:
    """Coupling constants in the gauge phi_{A,y} = phi_{B,y} = 0.

    Each channel rate is split evenly between the two directions, and the
    x-phases are +Phi for A and -Phi for B (primed: Phi').
    """
    rates = derive_rates(params)
    mod = np.sqrt(rates.biexciton / 2)
    mod_p = np.sqrt(rates.exciton / 2)
    phase = np.array([[params.phi, 0.0], [-params.phi, 0.0]])
    phase_p = np.array([[params.phi_prime, 0.0], [-params.phi_prime, 0.0]])
    g = mod[None, :] * np.exp(1j * phase)
    g_prime = mod_p[None, :] * np.exp(1j * phase_p)
    return CouplingTable(g=g, g_prime=g_prime, params=params)


def validate_regime(params: PhysicalParams) -> RegimeReport:
    """Flag parameter regimes where the Gamma = 0 closed forms are unreliable.

    The returned ``norm_deviation`` is the predicted excess of the integrated
    two-photon probability over unity, ``cos^2(Phi) gamma_X^2 / (gamma_X^2 + S^2)``.
    """
    notes = []
    g, S, phi = params.gamma_X, params.S, params.phi
    if params.Gamma == 0 and S < 2 * g:
        notes.append(
            f"S={S:g} < 2*gamma_X: neglecting the exciton cross coupling "
            "leaves a noticeable normalisation error"
        )
    if S == 0 and not math.isclose(phi, math.pi / 2, abs_tol=1e-12):
        notes.append(
            "S=0 with phi != pi/2 implies a non-zero cross coupling; "
            "closed-form results only hold for perfect chirality"
        )
    deviation = math.cos(phi) ** 2 * g**2 / (g**2 + S**2)
    return RegimeReport(warnings=tuple(notes), norm_deviation=deviation)


def params_from_mapping(data: Mapping[str, Any], base: PhysicalParams | None = None) -> PhysicalParams:
    """Build parameters from a config block; unknown keys are rejected.

    Keys that are not physical parameters (``sigma``) are ignored here and
    handled by the caller.
    """
    base = base or PhysicalParams()
    changes = {}
    for key, value in data.items():
        if key in CONFIG_KEYS:
            changes[CONFIG_KEYS[key]] = value
        elif key != "sigma":
            raise InvalidParameterError(f"unknown parameter key {key!r}")
    return base.replace(**changes)


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a TOML or JSON config file into a plain dict.

    Parameters may sit at top level or inside a ``params`` table; see
    :func:`config_params` to pull them out.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return dict(json.loads(text))
    return dict(tomllib.loads(text))


def config_params(config: Mapping[str, Any]) -> dict[str, Any]:
    """The parameter block of a loaded config: its ``params`` table, else its scalar top-level keys."""
    if isinstance(config.get("params"), dict):
        return dict(config["params"])
    return {k: v for k, v in config.items() if not isinstance(v, (dict, list))}
