"""Exception hierarchy shared by all modules."""


class PackchromError(Exception):
    """Base class for every error raised by this package."""


class DuplicateLabel(PackchromError):
    pass


class UnknownVertex(PackchromError):
    pass


class SelfLoop(PackchromError):
    pass


class Disconnected(PackchromError):
    pass


class ParamTooSmall(PackchromError):
    pass


class ColumnOutOfRange(PackchromError):
    pass


class BadParam(PackchromError):
    pass


class ColorOutOfRange(PackchromError):
    pass


class LiftConditionViolated(PackchromError):
    pass


class InvalidBase(PackchromError):
    pass


class InvalidWalk(PackchromError):
    pass


class FormatError(PackchromError):
    """Raised when a graph, coloring or digraph file cannot be parsed."""
