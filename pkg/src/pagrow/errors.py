"""Exception and warning types shared across the package."""


class PagrowError(Exception):
    """Base class for all pagrow errors."""


class DomainError(PagrowError):
    """Argument outside the mathematical domain of an operation."""


class ZeroDenominator(PagrowError):
    """A falling-factorial denominator evaluated to zero."""


class EmptyGraph(PagrowError):
    """Operation requires a graph with at least one edge end."""


class UnknownVertex(PagrowError):
    """Referenced vertex id does not exist in the graph."""


class InsufficientDegree(PagrowError):
    """Requested more incident slots than the vertex has."""


class StateSpaceTooLarge(PagrowError):
    """Exhaustive enumeration would exceed the configured budget."""


class NonIntegralParameters(PagrowError):
    """Generating-function expansion needs integral initial ball counts."""


class ParameterOutOfRange(PagrowError):
    """Urn or adapter parameters violate their constraints."""


class InsufficientSamples(PagrowError):
    """Too few conditioning events to report a conditional rate."""


class CancellationWarning(RuntimeWarning):
    """Float-mode alternating sum lost precision beyond the configured threshold."""


class MismatchedSupport(RuntimeWarning):
    """Empirical observations fall outside the exact support; mass counts toward TV."""
