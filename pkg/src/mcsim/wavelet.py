"""M-channel wavelet-packet transmultiplexer.

The transmitter runs the synthesis bank (upsample + filter per branch),
the receiver the analysis bank (filter + downsample). A full balanced
packet tree of depth log2(M) on length-M blocks with periodic extension
gives all M branches equal rate and makes the block transform unitary,
so white channel noise stays white through the receiver bank.
"""

from dataclasses import dataclass, field
import math

import numpy as np

__all__ = [
    "WaveletFilterPair",
    "TransmuxPlan",
    "make_filter_pair",
    "make_plan",
    "synthesis_transform",
    "analysis_transform",
]

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)

# Orthonormal lowpass prototypes (unit energy, sum = sqrt(2)).
_FAMILIES = {
    "haar": np.array([1.0 / _SQRT2, 1.0 / _SQRT2]),
    # 4-tap Daubechies from its closed form, not tabulated decimals.
    "db4": np.array([1.0 + _SQRT3, 3.0 + _SQRT3, 3.0 - _SQRT3, 1.0 - _SQRT3])
    / (4.0 * _SQRT2),
}


@dataclass(frozen=True)
class WaveletFilterPair:
    """Orthonormal lowpass/highpass pair related by g[n] = (-1)^n h[L-1-n]."""

    lowpass: np.ndarray
    highpass: np.ndarray


@dataclass(frozen=True)
class TransmuxPlan:
    """Immutable plan for one block transform: M = 2**depth subchannels.

    ``analysis_matrix`` is the orthogonal M x M matrix of the full packet
    analysis (built once from the filter stages); its transpose is the
    synthesis bank. Extension is periodic.
    """

    channels: int
    depth: int
    filters: WaveletFilterPair
    analysis_matrix: np.ndarray = field(repr=False)


def make_filter_pair(family: str) -> WaveletFilterPair:
    """Return the orthonormal filter pair for a supported family (haar, db4)."""
    try:
        h = _FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown wavelet family {family!r}; supported: {sorted(_FAMILIES)}"
        ) from None
    signs = (-1.0) ** np.arange(h.shape[0])
    return WaveletFilterPair(lowpass=h.copy(), highpass=signs * h[::-1])


def _stage_analysis_matrix(n: int, filters: WaveletFilterPair) -> np.ndarray:
    """One analysis stage on a length-n periodic block.

    Row k of the top half computes a[k] = sum_j h[j] x[(2k+j) mod n]; the
    bottom half does the same with the highpass. += folds wrapped taps when
    the filter is longer than the block.
    """
    stage = np.zeros((n, n))
    half = n // 2
    for k in range(half):
        for j, coef in enumerate(filters.lowpass):
            stage[k, (2 * k + j) % n] += coef
        for j, coef in enumerate(filters.highpass):
            stage[half + k, (2 * k + j) % n] += coef
    return stage


def _packet_analysis_matrix(n: int, depth: int, filters: WaveletFilterPair) -> np.ndarray:
    """Full balanced packet tree: split, then recurse into both subbands."""
    if depth == 0:
        return np.eye(n)
    stage = _stage_analysis_matrix(n, filters)
    sub = _packet_analysis_matrix(n // 2, depth - 1, filters)
    half = n // 2
    full = np.zeros((n, n))
    full[:half] = sub @ stage[:half]
    full[half:] = sub @ stage[half:]
    return full


def make_plan(channels: int, family: str = "haar") -> TransmuxPlan:
    """Build a transmultiplexer plan for a power-of-two channel count."""
    if channels < 1 or channels & (channels - 1):
        raise ValueError(f"channel count must be a power of two, got {channels}")
    depth = channels.bit_length() - 1
    filters = make_filter_pair(family)
    matrix = _packet_analysis_matrix(channels, depth, filters)
    return TransmuxPlan(
        channels=channels, depth=depth, filters=filters, analysis_matrix=matrix
    )


def synthesis_transform(plan: TransmuxPlan, subsymbols) -> np.ndarray:
    """Inverse packet transform: M subchannel symbols -> M time samples.

    Accepts any leading batch shape; the block axis is last. Energy
    preserving (the bank is unitary).
    """
    blocks = np.asarray(subsymbols)
    if blocks.shape[-1] != plan.channels:
        raise ValueError(
            f"block length {blocks.shape[-1]} != plan channels {plan.channels}"
        )
    # flatten the batch axes so the whole call is one GEMM
    flat = blocks.reshape(-1, plan.channels)
    return (flat @ plan.analysis_matrix).reshape(blocks.shape)


def analysis_transform(plan: TransmuxPlan, samples) -> np.ndarray:
    """Forward packet transform; exact inverse of synthesis_transform."""
    blocks = np.asarray(samples)
    if blocks.shape[-1] != plan.channels:
        raise ValueError(
            f"block length {blocks.shape[-1]} != plan channels {plan.channels}"
        )
    flat = blocks.reshape(-1, plan.channels)
    return (flat @ plan.analysis_matrix.T).reshape(blocks.shape)
