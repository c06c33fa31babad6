"""Antenna diversity schemes: Alamouti 2x1 STBC, MRC 1x2, and no diversity.

The Alamouti encoder sends (x0, x1) from the two antennas in the first
block period and (-conj(x1), conj(x0)) in the second; the channel stays
constant across the pair. The combiner's conjugate cross-weighting then
returns (a0^2 + a1^2) times each source block plus rotated noise, i.e.
two decoupled branches with the diversity gain exposed as a positive
real scale.

All operations are elementwise over the block samples, so channel gains
may be scalars or arrays broadcastable against the blocks (one gain per
batched pair) and everything vectorises across trial batches.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelRealization",
    "AlamoutiPair",
    "DegenerateChannelError",
    "alamouti_encode",
    "alamouti_receive",
    "alamouti_combine",
    "mrc_combine",
    "ml_detect",
    "no_diversity_equalize",
]


class DegenerateChannelError(ValueError):
    """All receive paths faded to exactly zero; the trial carries no information."""


@dataclass(frozen=True)
class ChannelRealization:
    """Complex gains h0, h1, constant across one Alamouti pair, plus the
    total complex noise variance at the receiver."""

    h0: complex
    h1: complex
    noise_variance: float

    def __post_init__(self):
        if not (np.all(np.isfinite(self.h0)) and np.all(np.isfinite(self.h1))):
            raise ValueError("channel gains must be finite")
        if np.any(np.asarray(self.noise_variance) < 0):
            raise ValueError("noise variance must be non-negative")

    @property
    def alpha_sq_sum(self):
        """a0^2 + a1^2, the post-combining diversity scale."""
        return np.abs(self.h0) ** 2 + np.abs(self.h1) ** 2


@dataclass(frozen=True)
class AlamoutiPair:
    """Per-antenna transmit blocks for the two periods of one Alamouti pair."""

    ant0: tuple
    ant1: tuple


def _as_blocks(*arrays):
    out = [np.asarray(a) for a in arrays]
    shapes = {a.shape[-1] for a in out}
    if len(shapes) > 1:
        raise ValueError(f"block lengths differ: {sorted(shapes)}")
    return out


def alamouti_encode(x0, x1, power_split: bool = True) -> AlamoutiPair:
    """Space-time encode two source blocks across two antennas.

    Antenna 0 sends (x0, -conj(x1)), antenna 1 sends (x1, conj(x0)), each
    scaled by 1/sqrt(2) when power_split is on so the pair radiates the
    same total energy as two single-antenna block periods.
    """
    x0, x1 = _as_blocks(x0, x1)
    gain = 1.0 / np.sqrt(2.0) if power_split else 1.0
    return AlamoutiPair(
        ant0=(gain * x0, -gain * np.conj(x1)),
        ant1=(gain * x1, gain * np.conj(x0)),
    )


def alamouti_receive(pair: AlamoutiPair, ch: ChannelRealization, noise) -> tuple:
    """Flat-fade both antennas' blocks onto the single receive antenna.

    r0 = h0*ant0[0] + h1*ant1[0] + n0 and likewise for the second period,
    which with the encoder above is r1 = -h0*conj(x1) + h1*conj(x0) + n1.
    """
    n0, n1 = noise
    a00, a01 = pair.ant0
    a10, a11 = pair.ant1
    _as_blocks(a00, a10, np.asarray(n0), np.asarray(n1))
    r0 = ch.h0 * a00 + ch.h1 * a10 + n0
    r1 = ch.h0 * a01 + ch.h1 * a11 + n1
    return r0, r1


def alamouti_combine(r0, r1, ch: ChannelRealization) -> tuple:
    """Build the two combined decision blocks from the received pair.

    s0~ = conj(h0) r0 + h1 conj(r1)
    s1~ = conj(h1) r0 - h0 conj(r1)

    Noiselessly each equals (a0^2 + a1^2) times the matching source block.
    """
    r0, r1 = _as_blocks(r0, r1)
    s0 = np.conj(ch.h0) * r0 + ch.h1 * np.conj(r1)
    s1 = np.conj(ch.h1) * r0 - ch.h0 * np.conj(r1)
    return s0, s1


def mrc_combine(r0, r1, h0, h1) -> np.ndarray:
    """Maximal-ratio combine two receive branches: conj(h0) r0 + conj(h1) r1.

    Raises DegenerateChannelError if every branch pair faded to exactly
    zero; the caller redraws the trial.
    """
    r0, r1 = _as_blocks(r0, r1)
    power = np.abs(np.asarray(h0)) ** 2 + np.abs(np.asarray(h1)) ** 2
    if np.any(power == 0.0):
        raise DegenerateChannelError("both MRC branch gains are zero")
    return np.conj(h0) * r0 + np.conj(h1) * r1


def ml_detect(combined, constellation, alpha_sq_sum: float):
    """Maximum-likelihood symbol decision on one combined value.

    Picks argmin_i (a0^2 + a1^2 - 1)|s_i|^2 + d^2(s~, s_i) with
    d^2(x, y) = (x - y)(x* - y*); ties break to the lowest constellation
    index. For equal-energy constellations the energy term is constant, so
    this reduces to the nearest-neighbour rule.
    """
    points = np.asarray(constellation)
    if points.size == 0:
        raise ValueError("constellation is empty")
    z = np.asarray(combined)
    dist = np.abs(z[..., None] - points) ** 2
    metric = (alpha_sq_sum - 1.0) * np.abs(points) ** 2 + dist
    return points[np.argmin(metric, axis=-1)]


def no_diversity_equalize(r, h) -> np.ndarray:
    """Matched-filter the single-antenna path: s~ = conj(h) r.

    The positive |h|^2 scale left on the signal does not move BPSK
    decisions. h exactly zero is rejected for redraw.
    """
    gains = np.asarray(h)
    if not np.all(np.isfinite(gains)):
        raise ValueError("channel gain must be finite")
    if np.any(gains == 0.0):
        raise DegenerateChannelError("channel gain is zero")
    return np.conj(gains) * np.asarray(r)
