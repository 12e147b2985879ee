"""Exception types raised across the package."""


class EquitensorError(Exception):
    """Base class for all package errors."""


class InvalidPartition(EquitensorError, ValueError):
    pass


class DiagramKindError(EquitensorError, ValueError):
    pass


class CompositionArityError(EquitensorError, ValueError):
    pass


class UnsupportedTensorError(EquitensorError, ValueError):
    pass


class UnsupportedCompositionError(EquitensorError, ValueError):
    pass


class OddDimensionError(EquitensorError, ValueError):
    pass


class FreeVertexCountError(EquitensorError, ValueError):
    pass


class NotPlanarError(EquitensorError, ValueError):
    pass


class ShapeError(EquitensorError, ValueError):
    pass
