"""Exception hierarchy shared by every flagcalc module."""


class FlagCalcError(Exception):
    """Base class for all engine errors."""


class InputError(FlagCalcError):
    """Malformed or inconsistent user input (CLI exit code 2)."""


class VerificationError(FlagCalcError):
    """An identity that should hold symbolically did not (CLI exit code 1)."""


class DivisionByZero(InputError, ZeroDivisionError):
    pass


class UnknownSymbol(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NonTerminatingReduction(InputError):
    pass


class InvalidRelation(InputError):
    pass


class FrameMismatch(InputError):
    pass


class DegreeMismatch(InputError):
    pass


class FrameInconsistent(VerificationError):
    pass


class JacobiViolation(FrameInconsistent):
    pass


class NotAPseudoFlag(InputError):
    pass


class DegenerateContact(NotAPseudoFlag):
    pass


class NotSupported(InputError):
    pass


class NonInvertible(InputError):
    pass


class IllFormedInvolution(InputError):
    pass


class ShapeViolation(VerificationError):
    pass


class CrossCheckMismatch(VerificationError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, column=None, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: "
        tail = ""
        if self.expected:
            tail = " (expected one of: " + ", ".join(self.expected) + ")"
        super().__init__(where + message + tail)


class UndeclaredName(ParseError):
    pass


class DuplicateDeclaration(ParseError):
    pass
