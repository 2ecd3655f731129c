"""Exception hierarchy used across the package."""


class CoarsekitError(Exception):
    """Base class for all package errors."""


class InvalidGraph(CoarsekitError):
    """Graph data violates a structural invariant (asymmetry, self loops, ...)."""


class MissingLabels(CoarsekitError):
    """An operation requiring node labels was called on an unlabeled graph."""


class EmptyGraph(CoarsekitError):
    """An operation requiring at least one edge was called on an edgeless graph."""


class InvalidDimension(CoarsekitError):
    """A dimension or projector count is zero or negative."""


class DimensionMismatch(CoarsekitError):
    """Projection and input dimensions do not line up."""


class InvalidRatio(CoarsekitError):
    """A coarsening ratio lies outside (0, 1]."""


class RatioBelowSchedule(CoarsekitError):
    """Requested ratio is finer than the schedule was built for."""


class SizeMismatch(CoarsekitError):
    """A partition does not cover the graph it is applied to."""


class EmptyType(CoarsekitError):
    """A heterogeneous node type has zero nodes."""


class MissingTargetLabels(CoarsekitError):
    """Heterogeneous coarsening needs labels for the target type."""


class UnknownType(CoarsekitError):
    """Referenced node type is not declared."""


class TooLarge(CoarsekitError):
    """Dense eigensolver refused; enable the iterative path for this size."""


class AllZeroEigenvalues(CoarsekitError):
    """No eigenvalue above the zero threshold remains to compare."""


class DegenerateFeatures(CoarsekitError):
    """Feature matrix lies in the Laplacian null space; metric undefined."""


class InvalidParams(CoarsekitError):
    """Analytic-bound parameters outside their valid range."""


class ZeroDistance(CoarsekitError):
    """Two points that must be distinct coincide."""


class DegenerateInput(CoarsekitError):
    """Monte-Carlo validator inputs are degenerate (e.g. identical vectors)."""


class MalformedInput(CoarsekitError):
    """An input file or manifest could not be parsed or validated.

    Carries enough context (path, line number when known) to print a
    usable diagnostic from the command line.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}: " if line is None else f"{path}:{line}: "
        super().__init__(prefix + message)


class ConfigError(CoarsekitError):
    """Command-line or run configuration violates its invariants."""
