"""Exception hierarchy shared by every walktime module."""


class WalktimeError(Exception):
    """Base class for domain errors (CLI maps these to exit code 1)."""


class GraphFormatError(WalktimeError):
    pass


class InvalidGraphError(WalktimeError):
    pass


class DisconnectedGraph(InvalidGraphError):
    def __init__(self, components):
        self.components = [sorted(c) for c in components]
        parts = ", ".join("{" + ",".join(map(str, c)) + "}" for c in self.components)
        super().__init__(f"graph is disconnected; components: {parts}")


class EmptyGraph(InvalidGraphError):
    pass


class NotUnweighted(WalktimeError):
    pass


class SingularMatrix(WalktimeError):
    pass


class NoBoundary(WalktimeError):
    pass


class FloatingComponent(WalktimeError):
    pass


class StateLimitExceeded(WalktimeError):
    pass


class StepCapExceeded(WalktimeError):
    pass
