"""Exception hierarchy shared by every module of the toolkit."""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class. ``kind`` is the stable machine-readable tag used by the CLI."""

    kind = "error"


class InvalidGeometryError(ToolkitError, ValueError):
    kind = "invalid_geometry"


class ResolutionError(ToolkitError, ValueError):
    """A grid projection left Fourier tail mass above tolerance."""

    kind = "resolution"


class TruncationDepthError(ToolkitError, ValueError):
    kind = "truncation_depth"

    def __init__(self, order: float, message: str | None = None):
        self.order = order
        super().__init__(message or f"symbol component of order {order:g} is not available")


class EllipticityError(ToolkitError, ValueError):
    kind = "ellipticity"


class PreconditionError(ToolkitError, ValueError):
    kind = "precondition"


class SelfAdjointnessError(ToolkitError, ValueError):
    kind = "self_adjointness"


class ConventionError(ToolkitError, RuntimeError):
    """Engine output disagrees with the closed forms."""

    kind = "convention_inconsistency"


class CommensurabilityError(ToolkitError, ValueError):
    kind = "commensurability"


class FitError(ToolkitError, ValueError):
    kind = "fit"


class ModelMismatchError(ToolkitError, ValueError):
    kind = "model_mismatch"
