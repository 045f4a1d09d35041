"""Exception types raised across the package."""


class HyperwalkError(Exception):
    """Base class for all package errors."""


class CapabilityError(HyperwalkError):
    """Requested size exceeds what the chosen representation supports."""


class PoleError(HyperwalkError, ValueError):
    """A phase sits on (or numerically at) a pole of a secular sum."""


class BranchError(HyperwalkError):
    """A bracketed root search found no sign change on the requested branch."""


class NoCrossingError(HyperwalkError):
    """No avoided crossing could be located for the requested mode."""


class TrackingError(HyperwalkError):
    """Eigenphase tracks cannot be stitched at the current grid resolution."""


class NumericError(HyperwalkError):
    """An iterative numeric routine failed to converge or to meet its tolerance."""
