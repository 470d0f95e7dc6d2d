"""
Exception hierarchy for logit-mp.
"""


class LogitMPError(Exception):
    """Base exception for all logit-mp errors"""

    pass


class InvalidInput(LogitMPError):
    """Error for invalid function arguments"""

    pass


class TooLarge(LogitMPError):
    """Instance exceeds an enumeration guard"""

    pass


# Hypergraph


class HypergraphError(LogitMPError):
    """Error building or querying a hypergraph"""

    pass


class EmptyBundle(HypergraphError):
    pass


class DuplicateBundle(HypergraphError):
    pass


class NonPositiveAttraction(HypergraphError):
    pass


class ItemOutOfRange(HypergraphError):
    pass


class MissingSingleton(HypergraphError):
    pass


class UnknownBundle(HypergraphError):
    pass


class ZeroReference(HypergraphError):
    pass


class UtilityOverflow(HypergraphError):
    """Utility magnitude too large to exponentiate safely"""

    pass


# Separation


class SeparationError(LogitMPError):
    pass


class NegativeWeight(SeparationError):
    """Shortest-path weight below the clamping tolerance"""

    pass


# Formulations


class FormulationError(LogitMPError):
    pass


class MissingRmc(FormulationError):
    """Oracle cuts do not link every multi-item bundle to its items"""

    pass


class BadBounds(FormulationError):
    pass


class NotBigM(FormulationError):
    pass


class WeightsNotSimplex(FormulationError):
    pass


class EmptyUncertainty(FormulationError):
    pass


# Backends


class BackendError(LogitMPError):
    pass


class ConeUnsupported(BackendError):
    """Model carries cone rows but the backend cannot solve them"""

    pass


class BackendFailure(BackendError):
    pass


# Instances


class InstanceError(LogitMPError):
    pass


class InfeasibleCounts(InstanceError):
    pass


class ParseError(InstanceError):
    pass


class SchemaVersionMismatch(InstanceError):
    pass


# Estimation


class EstimationError(LogitMPError):
    pass


class NoTransactions(EstimationError):
    pass


class PerfectSeparation(EstimationError):
    """A bundle's utility diverges because the data separates it perfectly"""

    pass


class NotConverged(EstimationError):
    pass


class DegenerateFold(EstimationError):
    pass
