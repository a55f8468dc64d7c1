"""Entangled photon pairs from a quantum-dot biexciton cascade in a chiral waveguide."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    CouplingTable,
    PhysicalParams,
    Rates,
    build_couplings,
    derive_rates,
    validate_regime,
)
from .amplitudes import biexciton_amplitude, exciton_amplitude, two_photon_amplitudes  # noqa: E402
from .correlations import coincidence_general, coincidence_symmetric, first_photon_density  # noqa: E402
from .entanglement import (  # noqa: E402
    concurrence_closed_form,
    concurrence_of_delay,
    density_from_amplitudes,
    wootters_concurrence,
)
from .jitter import average_concurrence, jittered_concurrence, jittered_density  # noqa: E402
from .oracle import IntegratorConfig, integrate_exciton_pair, norm_deficit  # noqa: E402

__all__ = [
    "CouplingTable",
    "IntegratorConfig",
    "PhysicalParams",
    "Rates",
    "average_concurrence",
    "biexciton_amplitude",
    "build_couplings",
    "coincidence_general",
    "coincidence_symmetric",
    "concurrence_closed_form",
    "concurrence_of_delay",
    "density_from_amplitudes",
    "derive_rates",
    "exciton_amplitude",
    "first_photon_density",
    "integrate_exciton_pair",
    "jittered_concurrence",
    "jittered_density",
    "norm_deficit",
    "two_photon_amplitudes",
    "validate_regime",
    "wootters_concurrence",
]
