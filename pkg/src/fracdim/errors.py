"""Exception types raised across the package.

Each class carries the process exit code the CLI maps it to.
"""


class FracdimError(Exception):
    exit_code = 1
    kind = "error"


class ConfigError(FracdimError, ValueError):
    """Malformed or unknown configuration; ``position`` names where."""

    exit_code = 2
    kind = "parse_error"

    def __init__(self, message, position=None):
        self.position = position
        if position:
            message = f"{position}: {message}"
        super().__init__(message)


class BudgetError(FracdimError):
    """An enumeration would exceed the configured budget."""

    exit_code = 3
    kind = "resource_budget"


class GuardError(FracdimError, ValueError):
    """Estimator resolution guard or sampling depth requirement violated."""

    exit_code = 4
    kind = "guard_violation"


class DomainError(FracdimError, ValueError):
    """Inputs outside an operation's mathematical domain."""

    exit_code = 5
    kind = "domain_error"


class NumberModeError(DomainError):
    """Exact-rational and float objects were combined."""


class InvalidWordError(DomainError, IndexError):
    pass


class CrossCheckError(FracdimError, ArithmeticError):
    """Two independent computation routes disagree beyond tolerance."""

    exit_code = 6
    kind = "cross_check_failure"
