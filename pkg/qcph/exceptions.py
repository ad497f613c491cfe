"""
Error hierarchy for the quotient-complex descriptor pipeline.
"""

from typing import Iterable, Optional, Sequence, Tuple


class QCPHError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(QCPHError, ValueError):
    """A run configuration field violates a downstream precondition."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")


# Structure input

class StructureError(QCPHError, ValueError):
    """Crystal structure input could not be read."""


class MissingCellParameter(StructureError):
    def __init__(self, tag: str):
        self.tag = tag
        super().__init__(tag)


class MalformedLoop(StructureError):
    def __init__(self, line: int, detail: str = ""):
        self.line = line
        message = f"malformed loop at line {line}"
        super().__init__(f"{message}: {detail}" if detail else message)


class NonNumericCoordinate(StructureError):
    def __init__(self, value: str, line: Optional[int] = None):
        self.value = value
        self.line = line
        where = f" at line {line}" if line is not None else ""
        super().__init__(f"non-numeric coordinate {value!r}{where}")


class SchemaViolation(StructureError):
    def __init__(self, pointer: str, detail: str = ""):
        self.pointer = pointer
        super().__init__(f"{pointer}: {detail}" if detail else pointer)


# Periodic model

class DegenerateCell(QCPHError, ValueError):
    """Cell angles imply a non-positive or non-real volume."""


class UnknownAtomSet(QCPHError, ValueError):
    def __init__(self, tag: str):
        self.tag = tag
        super().__init__(f"unknown atom set {tag!r}")


class EmptyMotif(QCPHError, ValueError):
    """A motif with no points cannot be extended."""


# Filtrations and homology

class FiltrationError(QCPHError, ValueError):
    """An explicit filtration is not a valid filtration."""


class NotFaceClosed(FiltrationError):
    def __init__(self, simplex: Sequence[int], face: Optional[Sequence[int]] = None):
        self.simplex = tuple(simplex)
        self.face = tuple(face) if face is not None else None
        detail = f" (missing face {self.face})" if self.face is not None else ""
        super().__init__(f"simplex {self.simplex} is not face-closed{detail}")


class ValueInversion(FiltrationError):
    def __init__(self, face: Tuple[int, ...], coface: Tuple[int, ...]):
        self.face = face
        self.coface = coface
        super().__init__(f"face {face} enters after its coface {coface}")


class DimensionUnavailable(QCPHError, ValueError):
    """Degree-2 homology requested from a filtration without 3-simplices."""


class ComplexTooLarge(QCPHError, ValueError):
    def __init__(self, count: int, limit: int):
        self.count = count
        self.limit = limit
        super().__init__(f"complex has {count} simplices, oracle limit is {limit}")


# Regression

class RegressionError(QCPHError, ValueError):
    """Inputs to the regressor or its metrics are inconsistent."""


class ShapeMismatch(RegressionError):
    pass


class LengthMismatch(RegressionError):
    pass


class TooFewRows(RegressionError):
    pass


class IdMismatch(QCPHError, ValueError):
    def __init__(self, missing_labels: Iterable[str], missing_features: Iterable[str]):
        self.missing_labels = sorted(missing_labels)
        self.missing_features = sorted(missing_features)
        parts = []
        if self.missing_labels:
            parts.append(f"no label for: {', '.join(self.missing_labels)}")
        if self.missing_features:
            parts.append(f"no feature row for: {', '.join(self.missing_features)}")
        super().__init__("; ".join(parts))
