"""Exception types raised by the verifier.

All of them derive from ``ValueError`` so callers that only care about
"bad input" can catch that.
"""


class AdversaryError(ValueError):
    pass


class DimensionCapExceeded(AdversaryError):
    pass


class LengthMismatch(AdversaryError):
    pass


class InvalidPermutation(AdversaryError):
    pass


class DimensionMismatch(AdversaryError):
    pass


class IndexOutOfRange(AdversaryError):
    pass


class TupleTooLarge(AdversaryError):
    pass


class NotOrbitInvariant(AdversaryError):
    pass


class NotDensityMatrix(AdversaryError):
    pass


class IndexInTuple(AdversaryError):
    pass


class EmptySubspace(AdversaryError):
    pass


class ParameterOutOfRange(AdversaryError):
    pass


class NotNormalized(AdversaryError):
    pass


class NotUnitary(AdversaryError):
    pass


class NormDrift(AdversaryError):
    pass


class ReadoutUndefined(AdversaryError):
    pass


class UnsupportedK(AdversaryError):
    pass


class ProfileTooShort(AdversaryError):
    pass


class NotAPOVM(AdversaryError):
    pass


class IncompleteMeasurement(AdversaryError):
    pass
