"""Exception and warning types raised across topospec."""


class TopoSpecError(Exception):
    """Base class for every error raised by topospec."""


class NonFiniteEvaluation(TopoSpecError):
    """A field returned NaN or infinity at a stencil or quadrature point."""


class DegreeOverflow(TopoSpecError):
    """A wedge product would exceed the chart dimension."""


class EmptyDomain(TopoSpecError):
    """No quadrature node passes the chart's region predicate."""


class NoConvergence(TopoSpecError):
    """Quadrature refinement did not reach the requested tolerance.

    The unconverged result is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DegenerateMetric(TopoSpecError):
    """Metric is singular or has the wrong signature at an evaluation point."""


class MissingTransition(TopoSpecError):
    """A transition check was requested on a single-chart connection."""


class InvalidParameter(TopoSpecError, ValueError):
    """A configuration or operation parameter is outside its admissible range."""


class NoTurningPoint(TopoSpecError):
    """The potential stays below the energy along the whole search ray."""


class DimensionTooLow(TopoSpecError):
    """The chart dimension is too small for the requested characteristic class."""


class UnknownGroup(TopoSpecError, ValueError):
    """The structure group name is not recognised."""


class ParseError(TopoSpecError):
    """A run configuration file is malformed or fails the strict schema."""

    def __init__(self, message, key=None, line=None):
        where = ""
        if key is not None:
            where += f" key '{key}'"
        if line is not None:
            where += f" (line {line})"
        super().__init__(f"{message}{':' if where else ''}{where}")
        self.key = key
        self.line = line


class BracketAmbiguity(UserWarning):
    """More than ten roots were found for a single spectrum level."""
