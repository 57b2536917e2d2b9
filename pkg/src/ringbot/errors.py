"""Exception types shared across the toolkit."""


class RingbotError(Exception):
    """Base class for all toolkit errors."""


class DegenerateForceCancellation(RingbotError):
    """The two radial friction forces cancel; moving direction is undefined."""


class StraightLineMotion(RingbotError):
    """Per-period turning angle is (numerically) zero; orbit radius is infinite."""


class CollinearPoints(RingbotError):
    """Circle fit input points are collinear; the normal system is singular."""


class NoPeriodsFound(RingbotError):
    """Period segmentation found fewer than two speed minima."""


class InsufficientData(RingbotError):
    """Too few distinct samples to fit the requested curve family."""


class MalformedHeader(RingbotError):
    """Track file header does not declare the required t, x, y columns."""


class NonMonotonicTime(RingbotError):
    """Track file timestamps are not strictly increasing."""


class EmptyFile(RingbotError):
    """Track file contains no data rows."""
