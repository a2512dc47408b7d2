"""Evaluation modes for formulas whose printed form disagrees with quadrature."""
import enum


class Mode(str, enum.Enum):
    """``ORACLE_VALIDATED`` uses the closed forms that match the numerical
    references; ``PAPER_LITERAL`` evaluates the published displays verbatim."""

    ORACLE_VALIDATED = "oracle-validated"
    PAPER_LITERAL = "paper-literal"

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value))


DEFAULT_GAMMA = 1.001
