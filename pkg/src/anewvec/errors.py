"""Exception types shared across the package."""


class PoleError(ValueError):
    """An argument landed on a pole of a gamma-type factor."""


class ContourTailError(ValueError):
    """A truncated vertical-line integral has a non-negligible tail."""


class RegimeError(ValueError):
    """Inputs fall outside the regime where a routine is valid."""


class CalibrationError(ValueError):
    """A fitted normalization constant is not stable across its grid."""


class TruncationError(ValueError):
    """A series truncation cannot meet the requested tolerance."""


class DegenerateFitError(ValueError):
    """A least-squares fit has too little usable data."""
