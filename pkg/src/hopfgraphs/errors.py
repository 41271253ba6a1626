"""Exception types raised by the geometry routines."""


class GeometryError(Exception):
    """Base class for all library errors."""


class ChartDegenerate(GeometryError):
    """A chart was used outside its guard band (a coordinate factor vanishes)."""


class NumericalBreakdown(GeometryError):
    """Two derivative estimates that should agree do not."""


class RankDeficient(GeometryError):
    """The differential has no nonzero singular value at the point."""


class NearConformalAmbiguity(GeometryError):
    """The two nonzero singular values coincide, so the frame is not unique."""


class DenominatorUnderflow(GeometryError):
    """A denominator of the minimality equation is numerically zero."""


class BlowUp(GeometryError):
    """An integrated profile left the admissible band."""


class Stiffness(GeometryError):
    """The adaptive integrator could not make progress."""


class NoBracket(GeometryError):
    """A root scan found no sign change."""


class NotMinimal(GeometryError):
    """A routine that assumes a minimal graph was handed a non-minimal one."""


class PoleSwapExhausted(GeometryError):
    """Neither stereographic chart is usable at the point."""
