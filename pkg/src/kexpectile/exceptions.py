"""Exception types raised by kexpectile."""


class ShapeError(ValueError):
    """Array shapes or lengths are inconsistent with each other."""


class OneSidedClusterError(ValueError):
    """All values of a sample lie on one side of a candidate center.

    ``side`` is ``"above"`` when no value lies strictly below the center and
    ``"below"`` when no value lies strictly above it.
    """

    def __init__(self, message, side):
        super().__init__(message)
        self.side = side


class DegeneratePartitionError(ValueError):
    """A partition is unusable for the requested index (e.g. coincident means)."""


class FileFormatError(ValueError):
    """An input file does not follow the expected format."""
