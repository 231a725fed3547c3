"""Exception hierarchy shared by every module.

Each exception carries a stable ``code`` (its class name) so the CLI can emit
machine-readable ``{"error": code, "detail": ...}`` objects.
"""


class HilbertFlowError(Exception):
    """Base class; ``degenerate`` marks numerical-degeneracy failures."""

    degenerate = False

    @property
    def code(self) -> str:
        return type(self).__name__


class DegenerateNumerics(HilbertFlowError):
    degenerate = True


# projective core
class NotCollinear(HilbertFlowError):
    pass


class DegeneratePair(HilbertFlowError):
    pass


class NotConcurrent(HilbertFlowError):
    pass


class NotInPlane(HilbertFlowError):
    pass


class EmptyInput(HilbertFlowError):
    pass


# domains and metric
class NotInterior(HilbertFlowError):
    pass


class ZeroDirection(HilbertFlowError):
    pass


class NotOnBoundary(HilbertFlowError):
    pass


class UnsupportedVariant(HilbertFlowError):
    pass


class InvalidDomain(HilbertFlowError):
    pass


# linear dynamics
class Singular(HilbertFlowError):
    pass


class NearDegenerate(DegenerateNumerics):
    pass


class NotAnAutomorphism(HilbertFlowError):
    pass


class NotBiproximal(HilbertFlowError):
    pass


class NotProximal(HilbertFlowError):
    pass


class CrosscheckMismatch(HilbertFlowError):
    pass


class DisagreementDetected(HilbertFlowError):
    pass


class NotConverged(HilbertFlowError):
    pass


# schottky
class ExhaustedTries(HilbertFlowError):
    pass


class OverlappingNeighborhoods(HilbertFlowError):
    pass


class NoNFound(HilbertFlowError):
    pass


class NotCertified(HilbertFlowError):
    pass


class NoneFound(HilbertFlowError):
    pass


# stable manifolds
class EndpointsDiffer(HilbertFlowError):
    pass


class PreconditionAxisMeetsDomain(HilbertFlowError):
    pass


class NotSmoothEndpoint(HilbertFlowError):
    pass


class PreconditionViolated(HilbertFlowError):
    pass


# symmetric cone
class RankAmbiguous(DegenerateNumerics):
    pass


class BadIndex(HilbertFlowError):
    pass


class WrongStratum(HilbertFlowError):
    pass


class NotPositiveDefinite(HilbertFlowError):
    pass


# cli
class UnknownSuite(HilbertFlowError):
    pass


class BadConfig(HilbertFlowError):
    pass


class NotPlanar(HilbertFlowError):
    pass
