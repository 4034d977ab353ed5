"""Exception types shared across the package."""


class AligntexError(Exception):
    """Base class for all package-specific errors."""


class EmptyImageError(AligntexError):
    """Raised when an operation needs visible pixels but every pixel is fully transparent."""


class DimensionMismatchError(AligntexError):
    """Raised when images/masks that must share dimensions do not."""


class DecodeError(AligntexError):
    """Raised when a file exists but cannot be decoded as an image."""


class NonConvexPolygonError(AligntexError):
    """Raised by primitives that are only well defined on convex polygons."""


class DegenerateInputError(AligntexError):
    """Raised when a point set is too degenerate for the requested construction."""


class MissingAssetError(AligntexError):
    """Raised when a scene has no asset for the requested visualization mode."""
