'''
Exceptions raised by treealg. Each one names a failure a caller can act on;
the CLI maps input problems to exit code 2 and verification failures to 1.
'''


class TreealgError(Exception):
    pass


class VariableMismatchError(TreealgError, ValueError):
    pass


class IndexRangeError(TreealgError, IndexError):
    pass


class UndefinedDegreeError(TreealgError, ValueError):
    pass


class UnsupportedSubstitutionError(TreealgError, ValueError):
    pass


class PoleError(TreealgError, ZeroDivisionError):
    pass


class PartitionError(TreealgError, ValueError):
    pass


class ExpansionNotNeededError(TreealgError, ValueError):
    pass


class NotFlatError(TreealgError, ValueError):
    pass


class NotInvertibleError(TreealgError, ValueError):
    pass


class NotInvariantError(TreealgError, ValueError):
    pass


class NotALieAlgebraError(TreealgError, ValueError):
    pass


class NotSemisimpleError(TreealgError, ValueError):
    pass


class NotIrreducibleError(TreealgError, ValueError):
    pass


class SingularLevelError(TreealgError, ValueError):
    pass


class DegreeIdentityError(TreealgError, AssertionError):
    pass


class PoleProximityError(TreealgError, ArithmeticError):
    def __init__(self, message, segment=None):
        super().__init__(message)
        self.segment = segment


class IncompleteDataError(TreealgError, KeyError):
    pass


class ShapeMismatchError(TreealgError, ValueError):
    pass


class FormatError(TreealgError, ValueError):
    "Malformed input file; `position` locates the offending element"

    def __init__(self, message, position=""):
        super().__init__(f"{position}: {message}" if position else message)
        self.position = position
