"""Exception and warning types shared across the package."""


class PTUError(Exception):
    """Base class for all errors raised by this package."""

    #: pipeline stage that raised, used by the CLI diagnostics
    stage = "ptu"


class InvalidParam(PTUError, ValueError):
    stage = "config"


class ParseError(PTUError, ValueError):
    stage = "io"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonFiniteError(PTUError, ValueError):
    stage = "io"


class DegenerateInput(PTUError, ValueError):
    stage = "graph"


class GraphDisconnected(PTUError):
    stage = "graph"

    def __init__(self, sizes):
        self.sizes = list(sizes)
        super().__init__(
            f"proximity graph has {len(self.sizes)} connected components "
            f"(sizes {self.sizes}); increase k or split the input"
        )


class RankDeficient(PTUError):
    stage = "tangent"


class NeighborhoodTooSmall(PTUError):
    stage = "tangent"


class NotAPath(PTUError, ValueError):
    stage = "transport"


class ZeroProjection(PTUError):
    stage = "transport"


class UnreachedVertex(PTUError):
    stage = "transport"


class EigFailure(PTUError):
    stage = "mds"


class DegenerateSpectrum(PTUError):
    stage = "landmark"


class DegenerateConfig(PTUError, ValueError):
    stage = "metrics"


class PTUWarning(UserWarning):
    pass


class IllConditionedWarning(PTUWarning):
    """Adjacent tangent frames are close to orthogonal subspaces."""


class NegativeEigenvalueWarning(PTUWarning):
    pass


class NonEuclideanWarning(PTUWarning):
    pass


class AsymmetryWarning(PTUWarning):
    pass


class IsolatedVertexWarning(PTUWarning):
    pass


class SmallComponentWarning(PTUWarning):
    pass
