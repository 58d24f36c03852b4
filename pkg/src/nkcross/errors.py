"""Exception hierarchy. Every error raised by the toolkit derives from NKCrossError."""


class NKCrossError(Exception):
    pass


# geometry
class InvalidBase(NKCrossError, ValueError):
    pass


class UnsupportedMap(NKCrossError, ValueError):
    pass


class OutsideDomain(NKCrossError, ValueError):
    pass


# extremal
class NoClosedForm(NKCrossError, LookupError):
    pass


class NoConvergence(NKCrossError, RuntimeError):
    pass


class EmptyInput(NKCrossError, ValueError):
    pass


# cross
class BadOrder(NKCrossError, ValueError):
    pass


class LengthMismatch(NKCrossError, ValueError):
    pass


class OutsideAmbient(NKCrossError, ValueError):
    pass


class NotMember(NKCrossError, ValueError):
    pass


# singular
class DimensionMismatch(NKCrossError, ValueError):
    pass


class UnsupportedSigmaKind(NKCrossError, ValueError):
    pass


# hull
class NotInHull(NKCrossError, ValueError):
    pass


class SamplingExhausted(NKCrossError, RuntimeError):
    pass


class UnsupportedComposite(NKCrossError, ValueError):
    pass


# extend
class UndefinedValue(NKCrossError, ValueError):
    pass


class IllConditioned(NKCrossError, RuntimeError):
    pass


class InsufficientSamples(NKCrossError, ValueError):
    pass


class DenominatorVanishesIdentically(NKCrossError, ValueError):
    pass


# scene / cli
class SceneError(NKCrossError, ValueError):
    pass
