"""Exception types shared across the package."""


class GeometryError(Exception):
    """Base class for every error this package raises deliberately."""


class ZeroSize(GeometryError):
    """Both rescaled Jacobi vectors vanish: the triple collision carries no chart point."""


class CollisionPole(GeometryError):
    """Evaluation requested at (or numerically on top of) a two-body collision."""

    def __init__(self, pair=(0, 0), message=None):
        self.pair = tuple(pair)
        if message is None:
            message = f"pairwise collision of bodies {self.pair[0]} and {self.pair[1]}"
        super().__init__(message)


class ChartSingular(GeometryError):
    """Polar-type chart degeneracy: an azimuth is undefined at this point.

    When the singularity is the pole of the (theta, phi) sphere chart the
    well-defined latitude is attached as ``phi``.
    """

    def __init__(self, message, phi=None):
        self.phi = phi
        super().__init__(message)


class OutsideHill(GeometryError):
    """Point lies outside the classically allowed region E - V >= 0."""


class InvalidQuotient(GeometryError):
    """The requested quotient metric does not exist for this potential/energy."""


class DegeneratePlane(GeometryError):
    """Vectors supplied for a sectional curvature span a numerically degenerate plane."""
