class CapaError(ValueError):
    """Base class for invalid inputs to the secrecy computations."""


class GeometryError(CapaError):
    pass


class DegenerateGeometryError(CapaError):
    """Bob and Eve responses are parallel, or a user sits on the aperture."""


class InfeasibleTargetError(CapaError):
    """The requested secrecy rate cannot be met by the chosen scheme.

    ``ceiling`` carries the largest rate the scheme can reach, when finite.
    """

    def __init__(self, message, ceiling=None):
        super().__init__(message)
        self.ceiling = ceiling
