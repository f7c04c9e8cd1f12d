from collections import namedtuple

# Result of every validate_* operation. `witness` carries the offending
# indices (a triple, an element, an edge ...) or None when passed is True.
ValidationReport = namedtuple("ValidationReport", "passed message witness")
ValidationReport.__new__.__defaults__ = ("ok", None)


def passed():
    return ValidationReport(True, "ok", None)


def failed(message, witness=None):
    return ValidationReport(False, message, witness)


class OrbiError(Exception):
    """Base class for everything orbicli raises on purpose."""

    exit_code = 2


class GroupValidationError(OrbiError):
    exit_code = 2

    def __init__(self, report):
        super(GroupValidationError, self).__init__(report.message)
        self.report = report


class ActionValidationError(OrbiError):
    exit_code = 2

    def __init__(self, report):
        super(ActionValidationError, self).__init__(report.message)
        self.report = report


class AutomorphismError(OrbiError):
    exit_code = 2

    def __init__(self, report):
        super(AutomorphismError, self).__init__(report.message)
        self.report = report


class DomainError(OrbiError, ValueError):
    pass


class ChartMismatchError(OrbiError, ValueError):
    pass


class UnknownSectorError(OrbiError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown sector"


class GuardExceededError(OrbiError):
    exit_code = 3

    def __init__(self, message, bound):
        super(GuardExceededError, self).__init__(
            "%s (limit: %s)" % (message, bound)
        )
        self.bound = bound


class HeatFitError(OrbiError):
    pass


class ScenarioError(OrbiError):
    """Collects every violation found while loading a scenario."""

    exit_code = 2

    def __init__(self, violations, source=None):
        self.violations = list(violations)
        self.source = source
        header = "Invalid scenario"
        if source:
            header += " %s" % source
        super(ScenarioError, self).__init__(
            header + ":\n" + "\n".join("  - %s" % v for v in self.violations)
        )
