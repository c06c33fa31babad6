"""Complex baseband channel models: AWGN, flat Rayleigh, flat Rician.

Fading is quasi-static block fading: one gain draw per Alamouti pair
(per block period for the single-antenna schemes), i.i.d. across draws,
E|h|^2 = 1 for every kind so Eb/N0 accounting is channel-independent.
SNR is Eb/N0 per receive antenna.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelSpec",
    "CHANNEL_KINDS",
    "noise_variance",
    "draw_awgn",
    "draw_fading_gain",
]

CHANNEL_KINDS = ("awgn", "rayleigh", "rician", "ideal")


@dataclass(frozen=True)
class ChannelSpec:
    """Channel kind plus its parameters.

    ``rician_k_db`` is the LOS-to-scatter power ratio in dB (rician only);
    ``snr_db`` is the Eb/N0 operating point this spec describes (the sweep
    engine supplies per-grid-point values explicitly). ``ideal`` means unit
    gain and zero noise.
    """

    kind: str
    rician_k_db: float = 6.0
    snr_db: float = 0.0

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(
                f"unknown channel kind {self.kind!r}; expected one of {CHANNEL_KINDS}"
            )
        if self.kind == "rician" and not np.isfinite(self.rician_k_db):
            raise ValueError("rician_k_db must be finite")


def noise_variance(snr_db: float, energy_per_bit: float) -> float:
    """Total complex noise variance N0 for a given Eb/N0 in dB.

    N0 = Eb / 10^(snr_db/10); half of it sits in each real dimension.
    """
    if energy_per_bit <= 0:
        raise ValueError(f"energy per bit must be positive, got {energy_per_bit}")
    return energy_per_bit / 10.0 ** (snr_db / 10.0)


def draw_awgn(shape, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with E|n|^2 = variance.

    ``shape`` may be an int (one block) or a tuple for batched blocks.
    """
    if variance < 0:
        raise ValueError(f"noise variance must be non-negative, got {variance}")
    if variance == 0:
        return np.zeros(shape, dtype=np.complex128)
    dims = (shape,) if isinstance(shape, (int, np.integer)) else tuple(shape)
    # one interleaved re/im draw, viewed as complex, is one pass instead of three
    raw = rng.standard_normal(dims + (2,))
    return raw.view(np.complex128)[..., 0] * np.sqrt(variance / 2.0)


def draw_fading_gain(spec: ChannelSpec, rng: np.random.Generator, size=None):
    """Draw complex channel gains for one spec; E|h|^2 = 1 for every kind.

    rayleigh: h = (x + jy)/sqrt(2) with x, y standard normal.
    rician:   h = sqrt(K/(K+1)) + sqrt(1/(K+1)) * h_rayleigh, K linear from
              rician_k_db, LOS phase fixed at 0.
    awgn/ideal: h = 1 exactly.

    ``size=None`` returns a scalar; an int returns that many i.i.d. draws.
    """
    if spec.kind in ("awgn", "ideal"):
        if size is None:
            return 1.0 + 0.0j
        return np.ones(size, dtype=np.complex128)
    raw = rng.standard_normal((1 if size is None else size, 2))
    scatter = raw.view(np.complex128)[:, 0] / np.sqrt(2.0)
    if spec.kind == "rayleigh":
        gains = scatter
    else:
        k_lin = 10.0 ** (spec.rician_k_db / 10.0)
        gains = np.sqrt(k_lin / (k_lin + 1.0)) + np.sqrt(1.0 / (k_lin + 1.0)) * scatter
    return gains[0] if size is None else gains
