"""Exception types shared across the package.

CLI exit-code mapping: InputError -> 2, CapExceeded -> 3, verification
failures are reports (exit 1), everything unexpected propagates.
"""


class BottomforgeError(Exception):
    pass


class InputError(BottomforgeError):
    """Malformed or mathematically inadmissible input."""


class CapExceeded(BottomforgeError):
    """An enumeration or search exceeded the configured cap."""


class ZeroVector(InputError):
    pass


class ZeroDim(InputError):
    pass


class NotPointed(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotASimplex(InputError):
    pass


class OriginOnHyperplane(InputError):
    pass


class NotInMonoid(InputError):
    pass


class NotInCone(InputError):
    pass


class NotIsomorphicFacets(InputError):
    pass


class NotStacked(InputError):
    pass


class NonNormalFacet(InputError):
    pass


class InvalidCoefficient(InputError):
    pass


class NotADisc(InputError):
    pass


class PatternViolation(InputError):
    pass


class InconsistentPropagation(InputError):
    pass


class NonIntegralRelation(InputError):
    pass


class NotInSpan(InputError):
    pass


class DegenerateAdjacency(InputError):
    pass


class NotInSFPlus(InputError):
    pass


class NotAMonomial(InputError):
    pass


class NotSupporting(InputError):
    pass


class ReducednessLost(BottomforgeError):
    """Gluing reached the cap without the glued bottom passing the reduced checks."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
