"""Exception hierarchy for the engine.

Everything a user program can trigger derives from ``StableRelError`` so the
CLI can report it as a diagnostic (exit code 1). ``ParseError`` is separate
because it maps to exit code 2.
"""


class StableRelError(Exception):
    """Base class for engine diagnostics."""


class ParseError(StableRelError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class DefinitionError(StableRelError):
    """Malformed or duplicate relation definition."""


class UndefinedRelationError(StableRelError):
    def __init__(self, name, arity, caller=None):
        self.key = (name, arity)
        msg = f"undefined relation {name}/{arity}"
        if caller is not None:
            msg += f" (called from {caller[0]}/{caller[1]})"
        super().__init__(msg)


class GroundingError(StableRelError):
    """A relation in a negation cone is not Datalog-like and cannot be grounded."""

    def __init__(self, name, arity, reason=""):
        self.key = (name, arity)
        msg = f"negation over non-Datalog relation {name}/{arity}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class FlounderingError(StableRelError):
    """A negated goal was reached with arguments that are not ground."""


class TooLargeError(StableRelError):
    def __init__(self, n_atoms):
        self.n_atoms = n_atoms
        super().__init__(
            f"ground program too large for contradiction check ({n_atoms} atoms)"
        )


class BudgetExhausted(StableRelError):
    def __init__(self, steps):
        self.steps = steps
        super().__init__(f"search budget exhausted after {steps} steps")
