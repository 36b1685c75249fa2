"""
Engine exceptions.
Every failure the engine can report is an EngineError subclass, so callers
(and the command-line driver) can tell engine errors from programming errors.
"""


class EngineError(Exception):
    """Base class for all engine errors."""


# core
class ArityMismatch(EngineError):
    pass


class UnknownGenerator(EngineError):
    pass


class PositionOutOfRange(EngineError):
    pass


class DegreeMismatch(EngineError):
    pass


# ainfty
class MissingUnit(EngineError):
    pass


class NotNilpotent(EngineError):
    pass


class WrongDegree(EngineError):
    pass


class RelationFailure(EngineError):
    """An identity that follows from the A-infinity relations failed to hold."""


# modcat
class NotDG(EngineError):
    pass


class NotUnital(EngineError):
    pass


# mc
class NotStrictlyCompatible(EngineError):
    pass


class NotIsomorphism(EngineError):
    pass


class NotFiltrationPreserving(EngineError):
    pass


class N0DoesNotIncrease(EngineError):
    pass


class NoSolution(EngineError):
    pass


class Divergence(EngineError):
    pass


# trees
class MalformedTree(EngineError):
    pass


class ColorMismatch(EngineError):
    pass


class BadConnection(EngineError):
    pass


# homology
class NotAComplex(EngineError):
    pass


class NotChainMap(EngineError):
    pass


class NonFreeCohomology(EngineError):
    """Cohomology has torsion where a free basis is required."""


# limits
class SystemNotCommuting(EngineError):
    pass


# text format
class StructureSyntaxError(EngineError):
    """
    Malformed structure document.

    Args:
        message: Description of the problem
        line: 1-based line number
        column: 1-based column number
    """

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SemanticError(EngineError):
    """Well-formed document whose content is inconsistent (unknown generator, wrong degree)."""

    def __init__(self, message: str, line: int = 0, text: str = ""):
        where = f"line {line}: " if line else ""
        suffix = f" [{text}]" if text else ""
        super().__init__(f"{where}{message}{suffix}")
        self.line = line
        self.text = text
