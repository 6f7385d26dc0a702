"""Exception hierarchy shared by all entvec modules."""


class EntvecError(Exception):
    """Base class for every error raised by entvec."""


class InvariantViolation(EntvecError, ValueError):
    """A value violates one of its stated invariants (trace, hermiticity, ...).

    ``invariant`` names the failing check so callers can report it.
    """

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class SingularMarginal(EntvecError, ArithmeticError):
    """A single-party marginal (or operator) has an eigenvalue below tolerance."""


class NoAdmissiblePairs(EntvecError, ValueError):
    """No coherence survives the admissibility rules for the requested family."""


class ParseError(EntvecError, ValueError):
    """Malformed textual input (subset syntax, pair syntax, state files)."""
