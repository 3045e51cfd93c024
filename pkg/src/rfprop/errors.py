"""Exception types shared across the package.

Grouping matters for the command-line layer, which maps whole families of
errors onto process exit codes. Anything that signals a breakdown of the
arithmetic itself (overflow, rank collapse, vanishing columns) derives from
NumericFaultError; anything caused by malformed input files derives from
EdgeListError.
"""


class RfpropError(Exception):
    """Base class for all package-specific errors."""


class EdgeListError(RfpropError, ValueError):
    """Malformed or inconsistent edge-list input.

    Parameters
    ----------
    message : str
        Human-readable description.
    line : int, optional
        One-based line number in the source stream, when known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericFaultError(RfpropError, ArithmeticError):
    """A numeric invariant failed at run time."""


class DegenerateColumnError(NumericFaultError):
    """A feature column has (numerically) zero Euclidean norm."""

    def __init__(self, column: int, norm: float):
        super().__init__(
            f"column {column} has near-zero norm {norm:.3e}; cannot normalize"
        )
        self.column = column
        self.norm = norm


class RankCollapseError(NumericFaultError):
    """A feature block lost column rank during orthonormalization."""

    def __init__(self, column: int, pivot: float, threshold: float):
        super().__init__(
            f"rank collapse at column {column}: |R[{column},{column}]| = "
            f"{pivot:.3e} below threshold {threshold:.3e}"
        )
        self.column = column
        self.pivot = pivot
        self.threshold = threshold


class PropagationOverflowError(NumericFaultError):
    """Propagated features left the finite float64 range."""

    def __init__(self, step: int):
        super().__init__(
            f"non-finite values after propagation step {step}; "
            "consider a normalized operator or a smaller interval between "
            "normalizations"
        )
        self.step = step


class ZeroTraceError(NumericFaultError):
    """The trace in the denominator of a spectral ratio is numerically zero."""


class OracleCapError(RfpropError, ValueError):
    """A dense reference computation was requested above its size cap."""

    def __init__(self, n: int, cap: int, what: str = "dense oracle"):
        super().__init__(f"{what} requested for n = {n}, above the cap of {cap}")
        self.n = n
        self.cap = cap
