"""Exception hierarchy.

Input problems (malformed data, unsupported fields) derive from
:class:`InputError`; mathematical checks that come out negative derive from
:class:`CheckFailure` and carry the witness that made them fail.
"""


class DulacError(Exception):
    pass


class InputError(DulacError):
    pass


class CheckFailure(DulacError):
    """A definite negative answer to a verification.

    ``residual`` is a human readable witness (usually a rendered series) and
    ``degree`` the lowest degree at which the identity breaks, when known.
    """

    def __init__(self, message, residual=None, degree=None):
        super().__init__(message)
        self.residual = residual
        self.degree = degree


# scalars
class ReducibleMinPoly(InputError):
    pass


class IotaSquareMismatch(InputError):
    pass


class FieldMismatch(InputError):
    pass


# series
class DimensionMismatch(InputError):
    pass


class NonInvertibleLinearPart(InputError):
    pass


class NonvanishingAtOrigin(InputError):
    pass


class NotDivisible(DulacError):
    pass


# resonance / normal form
class MissingIota(InputError):
    pass


class LinearPartNotJordanSplit(InputError):
    pass


class NotInNormalForm(CheckFailure):
    pass


# walcher / darboux
class NotASemiInvariant(CheckFailure):
    pass


class MixedTorusWeights(CheckFailure):
    pass


class NotAFirstIntegral(CheckFailure):
    pass


class FactorNotSemiInvariant(CheckFailure):
    pass


class NotCommuting(CheckFailure):
    pass


class DenominatorNotSemiInvariant(CheckFailure):
    pass


class NoWitnessFound(DulacError):
    """Independence sampling exhausted its grid; the result is inconclusive."""


# problem files
class ParseError(InputError):
    def __init__(self, message, where=None):
        if where:
            message = f"{where}: {message}"
        super().__init__(message)
        self.where = where


class ValidationError(InputError):
    def __init__(self, message, where=None):
        if where:
            message = f"{where}: {message}"
        super().__init__(message)
        self.where = where
