"""Exception types shared across the toolkit.

The command-line driver maps these onto exit codes: validation problems
(malformed files, inconsistent shapes, unknown tags) exit with 2, numerical
failures (non-converged solves, stagnating greedy selection) with 3.
"""


class ValidationError(ValueError):
    """Input data violates a documented contract."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or produced an invalid state."""
