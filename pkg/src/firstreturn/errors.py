"""Exception types shared across the package."""


class FirstReturnError(Exception):
    """Base class for every error raised by this package."""


# --- chain construction / file ingestion ---

class TooSmall(FirstReturnError):
    """Chain has fewer than two states."""


class NegativeProbability(FirstReturnError):
    """A transition probability is negative (or otherwise outside (0, 1])."""


class IndexOutOfRange(FirstReturnError):
    """A row or column index falls outside [0, n_states)."""


class DuplicateEntry(FirstReturnError):
    """The same (row, col) position appears more than once."""


class RowSumError(FirstReturnError):
    """A row of the transition matrix does not sum to 1 within tolerance."""


class NotStronglyConnected(FirstReturnError):
    """The directed graph of nonzero transitions is not strongly connected."""


class ParseError(FirstReturnError):
    """A graph file is malformed or violates the JSON schema."""


# --- grid generation ---

class SpecInvalid(FirstReturnError):
    """A grid specification violates its invariants."""


class Overflow(FirstReturnError):
    """The grid's state count exceeds the configured cap."""


class OutOfRange(FirstReturnError):
    """A grid point or flat index is out of range for its spec."""


# --- numerical kernels ---

class DenseCapExceeded(FirstReturnError):
    """A dense-only operation was asked for a chain above the dense cap."""


class SingularSystem(FirstReturnError):
    """A pivot collapsed; the linear system is numerically singular."""


class NoConvergence(FirstReturnError):
    """An iteration failed to converge within its budget."""


# --- simulation ---

class AllTruncated(FirstReturnError):
    """Every simulated episode hit the step cap; no statistics available."""


# --- output ---

class IoError(FirstReturnError):
    """Writing an output document failed."""
