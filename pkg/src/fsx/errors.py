"""Exception hierarchy shared by every module."""


class FsxError(Exception):
    """Base class for all toolkit errors."""


class GridError(FsxError, ValueError):
    """Invalid grid description or mismatched grids."""


class RangeError(FsxError, ValueError):
    """An annulus, block or dilation index outside the resolvable range."""


class TruncationError(FsxError, ValueError):
    """A function has significant mass where the periodic grid would wrap it."""


class ResolutionError(FsxError, ValueError):
    """A requested scale is finer than the grid can resolve."""


class SingularMultiplierError(FsxError, ValueError):
    """A negative-order homogeneous multiplier was applied to a function with nonzero mean."""


class ParameterError(FsxError, ValueError):
    """Space parameters outside the domain where a quasi-norm is defined."""


class SpecificationError(FsxError, ValueError):
    """A parameter tuple is missing entries required by a hypothesis table."""


class FormatError(FsxError, ValueError):
    """Malformed binary grid file or JSON descriptor."""


class GatedError(FsxError):
    """An experiment was refused because its certificate is not admissible."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate
