"""Exception hierarchy shared by every netdim module."""


class NetdimError(Exception):
    """Base class for all errors raised by netdim."""


class DomainError(NetdimError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidationError(NetdimError, ValueError):
    """A matrix or graph violates a type invariant (symmetry, zero diagonal, sign)."""


class ParseError(NetdimError, ValueError):
    """A file could not be parsed. ``line`` is 1-based, or None if not line-specific."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class DegenerateInputError(NetdimError, ValueError):
    """Input has coincident points or zero dissimilarities where ratios are needed."""


class DisconnectedGraphError(NetdimError, ValueError):
    """Spectral embedding requires a connected graph."""

    def __init__(self, n_components):
        self.n_components = n_components
        super().__init__(
            f"graph is disconnected: {n_components} components "
            "(extract the giant component first)"
        )


class EigensolverError(NetdimError, RuntimeError):
    """The iterative eigensolver did not converge."""

    def __init__(self, iterations, residual, message="eigensolver did not converge"):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"{message} after {iterations} iterations (residual {residual:.3e})")


class EstimationError(NetdimError, ValueError):
    """The twoNN estimate cannot be formed (for example all ratios tied at 1)."""
