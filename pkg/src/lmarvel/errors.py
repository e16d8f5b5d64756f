"""Exception hierarchy shared across the package."""


class LmarvelError(Exception):
    """Base class for all package-specific errors."""


class UnknownVertex(LmarvelError, KeyError):
    """A vertex label was queried that is not in the graph."""


class InvalidQuery(LmarvelError, ValueError):
    """An m-separation / CI query violates its preconditions."""


class InvalidPartition(LmarvelError, ValueError):
    """Observed/selection/latent sets overlap or are not subsets of the DAG."""


class InvalidDag(LmarvelError, ValueError):
    """Edge set contains a directed cycle or non-directed edges."""


class InvalidFormat(LmarvelError, ValueError):
    """Graph text file could not be parsed."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class OracleSizeExceeded(LmarvelError, ValueError):
    """A brute-force oracle was asked to run on a graph larger than it supports."""


class ChordalityViolated(LmarvelError, ValueError):
    """The undirected part of the MAG is not chordal."""


class InternalInvariantBroken(LmarvelError, RuntimeError):
    """A condition that theory guarantees was observed to fail; indicates a bug."""


class InsufficientSamples(LmarvelError, ValueError):
    """Too few samples for the requested conditional independence test."""


class SelectionTooRestrictive(LmarvelError, RuntimeError):
    """Rejection sampling acceptance probability is effectively zero."""


class ConstraintUnsatisfiable(LmarvelError, ValueError):
    """Role assignment could not satisfy its constraints within the retry cap."""


class InvalidComparison(LmarvelError, ValueError):
    """Two graphs with different vertex sets were compared."""
