"""Exception hierarchy shared by every computation module."""


class NovikovAinfError(Exception):
    """Base class for all library errors."""


class DomainError(NovikovAinfError):
    """Argument outside the domain where an exact series is defined."""


class DivergenceError(NovikovAinfError):
    """A support generator without positive energy makes a sum infinite."""


class SpaceMismatch(NovikovAinfError):
    pass


class DegreeError(NovikovAinfError):
    pass


class MissingBoundaryMap(NovikovAinfError):
    pass


class PartialHomError(NovikovAinfError):
    """Input to an obstruction fails its own partial relation."""


class ConditionError(NovikovAinfError):
    pass


class NotQuasiIso(NovikovAinfError):
    pass


class Inconsistent(NovikovAinfError):
    """An obstruction class has no coboundary witness."""

    def __init__(self, message: str, level=None):
        super().__init__(message)
        self.level = level


class DataError(NovikovAinfError):
    pass


class Unbounded(NovikovAinfError):
    pass


class EmptyPolyhedron(NovikovAinfError):
    pass


class NonUnimodular(NovikovAinfError):
    pass


class NegativeEnergy(NovikovAinfError):
    pass


class ZeroCoordinate(NovikovAinfError):
    pass


class CertificateError(NovikovAinfError):
    """Convergence margin fails on some vertex of an overlap polyhedron."""


class MissingWitness(NovikovAinfError):
    pass


class DegreeLeak(NovikovAinfError):
    """A curvature term sits outside degrees 0 and 2."""


class WRescueError(NovikovAinfError):
    """Superpotentials do not match across an overlap."""


class FixtureError(NovikovAinfError):
    """Fixture file is unreadable or fails schema validation."""
