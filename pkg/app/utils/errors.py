"""
Exception hierarchy shared by the services, the CLI and the HTTP routes
"""
from typing import Optional


class GrskError(Exception):
    """Base class for every error raised by the package"""


class DomainError(GrskError, ValueError):
    """Input outside the domain of a map or measure (nonpositive entry, bad parameters)"""


class UsageError(GrskError, ValueError):
    """Bad index, mismatched dimensions or a size guard tripped"""


class VerificationFailure(GrskError, AssertionError):
    """An identity that must hold exactly did not"""


class QuadratureBudgetError(GrskError, RuntimeError):
    """Refinement budget exhausted before reaching the requested tolerance"""

    def __init__(self, message: str, achieved: Optional[float] = None):
        super().__init__(message)
        self.achieved = achieved
