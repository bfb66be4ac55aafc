"""Exception hierarchy.

Every failure mode has its own class so callers (and the CLI) can tell input
problems from numerical ones. ``exit_code`` is what the command line tool
returns when the error escapes.
"""


class AsymptoteError(Exception):
    """Base class; numerical failures unless stated otherwise."""

    exit_code = 3


class InputError(AsymptoteError):
    """Invalid user input (bad curve spec, impossible parameter)."""

    exit_code = 2


class UnsupportedOrder(InputError):
    pass


class ImaginaryComponent(InputError):
    pass


class IrregularCurve(AsymptoteError):
    pass


class QuadratureFailure(AsymptoteError):
    pass


class InflectionPoint(AsymptoteError):
    pass


class NoDarbouxFraming(AsymptoteError):
    pass


class NotAsymptotic(AsymptoteError):
    pass


class InconsistentFraming(AsymptoteError):
    pass


class InvalidFraming(AsymptoteError):
    pass


class DegeneratePatch(AsymptoteError):
    pass


class SphericalSingularity(AsymptoteError):
    pass


class NonGenericDirection(AsymptoteError):
    pass


class EpsilonResolutionFailure(AsymptoteError):
    pass


class ResolutionFailure(AsymptoteError):
    pass


class SamplingFailure(AsymptoteError):
    pass


class IllConditionedLinking(AsymptoteError):
    pass


class InconsistencyError(AsymptoteError):
    pass


class TheoremViolation(AsymptoteError):
    pass


class NoSelfLinking(AsymptoteError):
    pass


class InapplicableDirection(AsymptoteError):
    pass


class NotImmersed(AsymptoteError):
    pass


class ClosureInfeasible(AsymptoteError):
    pass


class ClosureFailure(AsymptoteError):
    pass
