"""Exception types shared across the package."""


class PhaseLabError(Exception):
    """Base class for all package-specific errors."""


class ParseError(PhaseLabError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class WidthError(ParseError):
    """Clause does not have exactly two literals over distinct variables."""


class TautologyError(ParseError):
    """Clause contains a literal and its negation."""


class EnumerationTooLarge(PhaseLabError):
    pass


class NotAMatchingFormula(PhaseLabError):
    pass


class NotMatchingSubformula(PhaseLabError):
    pass


class TooManyClauses(PhaseLabError):
    pass


class NotEnoughVariables(PhaseLabError):
    pass


class IndexOutOfRange(PhaseLabError, IndexError):
    pass


class GraphTooLarge(PhaseLabError):
    pass


class GraphTooSmall(PhaseLabError):
    pass


class PartsOverlap(PhaseLabError):
    pass


class EdgeWithoutClause(PhaseLabError):
    pass


class CapacityExceeded(PhaseLabError):
    """OBDD node table hit its configured limit.

    Recoverable: carries the peak node count so sweeps can record a
    blow-up row instead of aborting.
    """

    def __init__(self, peak):
        self.peak = peak
        super().__init__(f"node table exceeded capacity (peak {peak})")


class PartialAssignment(PhaseLabError):
    pass


class UnknownStrategy(PhaseLabError):
    pass


class TooManyVariables(PhaseLabError):
    pass


class NotMonotone(PhaseLabError):
    pass


class SchemaError(PhaseLabError):
    pass


class ConfigError(PhaseLabError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"config field {field!r}: {message}")


class IoError(PhaseLabError):
    pass
