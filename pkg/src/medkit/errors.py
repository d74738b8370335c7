"""Exception hierarchy.

Every failure the library signals derives from :class:`MedkitError` so the
CLI can map them to exit codes in one place.
"""


class MedkitError(Exception):
    pass


class NonHermitian(MedkitError, ValueError):
    pass


class ConvergenceFailure(MedkitError, RuntimeError):
    pass


class DimensionTooLarge(MedkitError, ValueError):
    pass


class DimensionMismatch(MedkitError, ValueError):
    pass


class OutsideFamily(MedkitError, ValueError):
    pass


class ZeroRadius(MedkitError, ValueError):
    pass


class PriorMismatch(MedkitError, ValueError):
    pass


class InvalidEnsemble(MedkitError, ValueError):
    pass


class NonHermitianExponent(MedkitError, ValueError):
    pass


class NotIrreducible(MedkitError, ValueError):
    pass


class GeometryUnsupported(MedkitError, ValueError):
    pass


class Infeasible(MedkitError, ValueError):
    """No nonnegative weight vector satisfies the completeness equations."""


class WeightInfeasible(Infeasible):
    pass


class NoBranchCertifies(MedkitError, RuntimeError):
    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class ConditionAmbiguous(MedkitError, ValueError):
    def __init__(self, message, values=()):
        super().__init__(message)
        self.values = list(values)


class CoefficientMismatch(MedkitError, ArithmeticError):
    def __init__(self, message, printed=None, derived=None):
        super().__init__(message)
        self.printed = printed
        self.derived = derived


class SingularL(MedkitError, RuntimeError):
    pass


class InvalidDistribution(MedkitError, ValueError):
    pass


class SchemaError(MedkitError, ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
