"""Shared bookkeeping for the transport schemes."""

from typing import NamedTuple


class TimeStepError(RuntimeError):
    """Transport step asked to run past its stability limit."""


class TransportBlowUp(RuntimeError):
    """Non-finite saturation values appeared during a transport update."""

    def __init__(self, message, stage=None, extremes=None):
        super().__init__(message)
        self.stage = stage
        self.extremes = extremes


class EdgeFluxes(NamedTuple):
    """Outward water volumes through each domain edge over one step."""

    left: float
    right: float
    bottom: float
    top: float

    @property
    def net_outward(self) -> float:
        return self.left + self.right + self.bottom + self.top

    @property
    def inward(self) -> float:
        """Total volume that entered (sum of negative outward components)."""
        return sum(-v for v in self if v < 0.0)

    @property
    def outward(self) -> float:
        """Total volume that left (sum of positive outward components)."""
        return sum(v for v in self if v > 0.0)
