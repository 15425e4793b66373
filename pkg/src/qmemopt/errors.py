"""Exception types shared across the package."""


class QmemoptError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidProcessError(QmemoptError):
    """A process violates stochasticity or unifilarity and cannot be analysed."""


class ReducibleProcessError(QmemoptError):
    """No unique stationary distribution: the state graph is not strongly connected."""


class TooLargeError(QmemoptError):
    """A word enumeration would exceed the configured size guard."""


class NotConvergedError(QmemoptError):
    """The overlap fixed-point iteration did not converge.

    Usually signals a non-synchronizing process (or a tolerance that is too
    tight); callers should consult ``process.synchronization_entropy``.
    """

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no fixed point after {iterations} iterations (residual {residual:.3e})"
        )


class NotMarkovError(QmemoptError):
    """Operation requires a Markov process (symbol index equal to destination index)."""


class NotPSDError(QmemoptError):
    """An overlap matrix has an eigenvalue below the allowed negative floor."""


class WrongArityError(QmemoptError):
    """Operation is defined for three-state processes only."""


class NoBranchError(QmemoptError):
    """No sign branch of the phase-recovery formulas yields a consistent certificate."""


class InconsistentGramError(QmemoptError):
    """Source and target Gram matrices disagree: overlaps are not a fixed point."""
