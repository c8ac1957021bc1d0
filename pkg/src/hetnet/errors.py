"""Exception hierarchy shared by every analysis module."""


class HetnetError(Exception):
    """Base class for all errors raised by hetnet."""


class DimensionMismatch(HetnetError, ValueError):
    pass


class MismatchedNodeCount(DimensionMismatch):
    pass


class InvalidGraph(HetnetError, ValueError):
    pass


class EigenFailure(HetnetError, ArithmeticError):
    pass


class NotControllable(HetnetError):
    pass


class AgentNotControllable(NotControllable):
    def __init__(self, agent):
        self.agent = agent
        super().__init__(f"agent {agent} fails the Kalman rank test")


class MissingGains(HetnetError, ValueError):
    pass


class MissingBetas(HetnetError, ValueError):
    pass


class NoGainExists(HetnetError):
    """No diagonal gain can help: some component contains no leader."""

    def __init__(self, component):
        self.component = sorted(component)
        super().__init__(f"leaderless component {self.component}")


class SearchExhausted(HetnetError):
    def __init__(self, trials, diagnostics=None):
        self.trials = trials
        self.diagnostics = diagnostics or {}
        super().__init__(f"no controlling gain found in {trials} trials")


class LBNotControllable(HetnetError):
    pass


class GramianSingular(HetnetError, ArithmeticError):
    def __init__(self, condition):
        self.condition = condition
        super().__init__(f"Gramian numerically singular (condition {condition:.3e})")


class ParseError(HetnetError, ValueError):
    pass
