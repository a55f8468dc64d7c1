"""Exception hierarchy for cascade_sim."""


class CascadeError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(CascadeError, ValueError):
    pass


class DomainError(CascadeError, ValueError):
    """An argument lies outside the domain of a time-dependent quantity."""


class StepSizeError(CascadeError, ValueError):
    pass


class DegenerateStateError(CascadeError):
    """All two-photon amplitudes vanish, so no state can be normalised."""


class NumericalError(CascadeError):
    """Eigenvalues of the Wootters product are not real and non-negative."""


class QuadratureError(CascadeError):
    """Successive quadrature refinements disagree beyond tolerance."""
