"""Exception hierarchy shared by every module."""


class PGroupError(Exception):
    """Base class for all errors raised by pgtower."""


class MalformedSpec(PGroupError):
    pass


class InvalidUnit(PGroupError):
    pass


class OrderCapExceeded(PGroupError):
    def __init__(self, order, cap, what="group"):
        super().__init__(f"{what} of order {order} exceeds cap {cap}")
        self.order = order
        self.cap = cap


class NotNilpotent(PGroupError):
    pass


class NotAPGroup(PGroupError):
    pass


class NotNormal(PGroupError):
    pass


class CenterNotCyclic(PGroupError):
    pass


class AbelianBase(PGroupError):
    pass


class SearchExhausted(PGroupError):
    pass


class ClassTooHigh(PGroupError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class EquivarianceFailure(PGroupError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotSurjective(PGroupError):
    pass


class WorkCapExceeded(PGroupError):
    def __init__(self, work, cap):
        super().__init__(f"work estimate {work} exceeds cap {cap}")
        self.work = work
        self.cap = cap


class ConfigError(PGroupError):
    pass
