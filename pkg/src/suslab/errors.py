"""Exception types raised across the package."""


class SuslabError(Exception):
    """Base class for domain errors surfaced by the command line."""


class ParityError(SuslabError, ValueError):
    """A degree sequence has an odd total degree."""


class TruncationError(SuslabError, ArithmeticError):
    """A series did not converge to tolerance within the truncation limit."""


class ConvergenceError(SuslabError, ArithmeticError):
    """An iterative solver hit its iteration cap or lost its bracket."""


class CriticalityError(SuslabError, ValueError):
    """An operation is undefined (or meaningless) for a critical law."""


class SamplingExhausted(SuslabError, RuntimeError):
    """Rejection sampling did not produce a simple graph within the attempt budget."""

    def __init__(self, attempts: int, loops_seen: int, multi_seen: int):
        self.attempts = attempts
        self.rejection_rate = 1.0
        self.mean_loops = loops_seen / attempts if attempts else 0.0
        self.mean_multi_pairs = multi_seen / attempts if attempts else 0.0
        super().__init__(
            f"no simple graph after {attempts} attempts (rejection rate {self.rejection_rate:.3f}, "
            f"mean loops {self.mean_loops:.3g}, mean extra parallel edges {self.mean_multi_pairs:.3g})"
        )
