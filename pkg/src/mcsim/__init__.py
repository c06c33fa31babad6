"""Baseband Monte Carlo link simulator for wavelet-based MC-CDMA with
selectable antenna diversity (none, MRC 1x2, Alamouti 2x1)."""

from .channel import ChannelSpec
from .engine import (
    BerRecord,
    SchemeConfig,
    StoppingRule,
    SweepConfig,
    run_point,
    run_sweep,
)

__all__ = [
    "ChannelSpec",
    "BerRecord",
    "SchemeConfig",
    "StoppingRule",
    "SweepConfig",
    "run_point",
    "run_sweep",
]

__version__ = "0.1.0"
