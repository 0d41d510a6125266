"""Exact-integer handle calculus for knot-surgered and log-transformed elliptic surfaces."""
from handlecalc.framedlink import (
    AddCancelingPair,
    BlowDown,
    BlowUp,
    Cancel12,
    FramedLink,
    HandleError,
    IntegerOverflow,
    InvariantSummary,
    Kind,
    MoveScript,
    SelectSublink,
    Slide,
    invariants,
    replay,
)

__version__ = "0.1.0"

__all__ = [
    "AddCancelingPair", "BlowDown", "BlowUp", "Cancel12", "FramedLink", "HandleError",
    "IntegerOverflow", "InvariantSummary", "Kind", "MoveScript", "SelectSublink", "Slide",
    "invariants", "replay",
]
