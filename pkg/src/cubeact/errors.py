"""Exception hierarchy shared by every module.

All errors derive from :class:`CubeActError` so the CLI can map them to
exit code 2 in one place.
"""


class CubeActError(Exception):
    """Base class for input and precondition failures."""


class DuplicateVertex(CubeActError):
    pass


class UnknownEndpoint(CubeActError):
    pass


class Disconnected(CubeActError):
    pass


class SelfLoop(CubeActError):
    pass


class NotMedian(CubeActError):
    pass


class UnknownHyperplane(CubeActError):
    pass


class UnknownCube(CubeActError):
    pass


class NotGeodesic(CubeActError):
    pass


class NotConvex(CubeActError):
    pass


class ThetaNotTransitive(CubeActError):
    pass


class TooFewHyperplanes(CubeActError):
    pass


class NotPairwiseCrossing(CubeActError):
    pass


class NotParallel(CubeActError):
    pass


class NotStronglySeparated(CubeActError):
    pass


class NotUberSeparated(CubeActError):
    pass


class NotAdjacencyPreserving(CubeActError):
    pass


class NotInjective(CubeActError):
    pass


class Overflow(CubeActError):
    def __init__(self, bound):
        super().__init__(f"group closure exceeded {bound} elements")
        self.bound = bound


class DomainTooSmall(CubeActError):
    pass


class NotDoubleSkewered(CubeActError):
    pass


class NotFCType(CubeActError):
    def __init__(self, clique):
        super().__init__(f"not FC type: clique {sorted(clique)} is not spherical")
        self.clique = clique


class NoOracle(CubeActError):
    pass


class UnknownGenerator(CubeActError):
    pass


class BadParameters(CubeActError):
    pass


class FormatError(CubeActError):
    pass
