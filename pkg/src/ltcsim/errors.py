"""Exception hierarchy shared across the package."""


class LtcError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(LtcError):
    """State, trajectory or matrix shape does not match the network."""


class TopologyError(LtcError):
    """Network wiring violates the feed-forward output rule."""


class UnsupportedTopologyError(LtcError):
    """Operation is undefined for this network class (e.g. gap junctions)."""


class IntegrationDivergedError(LtcError):
    """A solver step produced a non-finite state.

    The partial trajectory accumulated up to the failing step is attached
    as ``trajectory``.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class RankDeficiencyError(LtcError):
    """Normal equations of the ridge solve are singular (ridge == 0)."""


class ConditionsViolatedError(LtcError):
    """Assembly parameters violate the tau * w_l smallness requirement."""


class RealizationError(LtcError):
    """Augmented system contains a parameter no synapse can represent."""


class DomainError(LtcError):
    """A point lies outside the vector field's domain box."""


class ExprError(LtcError):
    """Expression parse or evaluation failure; carries a column position."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class FormatError(LtcError):
    """Network document or trajectory CSV failed to parse or validate."""
