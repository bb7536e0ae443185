"""
Error Types
Exceptions raised across the fKdV toolkit
"""


class FkdvError(Exception):
    """Base class for all toolkit errors"""


class InvalidParametersError(FkdvError, ValueError):
    """Bad coefficients, malformed rational text, unknown preset or family"""


class BranchError(FkdvError, ValueError):
    """Riccati branch incompatible with the sign of k"""


class NoRealSolutionError(FkdvError, ValueError):
    """Negative discriminant (2α+β)² − 40γω, so A is not real"""


class VerificationFailedError(FkdvError):
    """A certificate or residual check did not pass"""
