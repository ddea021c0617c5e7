"""Exception types. All derive from :class:`CosymError`."""


class CosymError(ValueError):
    """Base class; carries an optional ``witness`` for debugging."""

    def __init__(self, message: str = "", witness=None):
        super().__init__(message)
        self.witness = witness


class IndexOutOfRange(CosymError):
    pass


class DuplicateEntry(CosymError):
    pass


class DiagonalBracket(CosymError):
    pass


class DimensionMismatch(CosymError):
    pass


class NotASubalgebra(CosymError):
    pass


class LinearlyDependentBasis(CosymError):
    pass


class DegreeZero(CosymError):
    pass


class ArityMismatch(CosymError):
    pass


class WrongDegree(CosymError):
    pass


class NotVolume(CosymError):
    pass


class EvenDimension(CosymError):
    pass


class OddDimension(CosymError):
    pass


class SingularSystem(CosymError):
    pass


class NotSymplectic(CosymError):
    pass


class NotAcm(CosymError):
    def __init__(self, identity: str, witness=None):
        super().__init__(f"not an almost contact metric structure: {identity} fails", witness)
        self.identity = identity


class NumericalFailure(CosymError):
    pass


class NotADerivation(CosymError):
    pass


class NotNondegenerate(CosymError):
    pass


class EtaNotClosed(CosymError):
    pass


class NotAlmostKahler(CosymError):
    pass


class NoValidAlpha(CosymError):
    pass


class PreconditionFailed(CosymError):
    pass


class InternalInconsistency(CosymError):
    pass


class UnknownEntry(CosymError):
    pass


class InadmissibleParams(CosymError):
    pass


class MissingExternalData(CosymError):
    pass


class MismatchReport(CosymError):
    def __init__(self, message: str, expected=None, computed=None):
        super().__init__(message, witness={"expected": expected, "computed": computed})
        self.expected = expected
        self.computed = computed
