"""Closed-form reference BER expressions used as Monte Carlo oracles.

All take the mean Eb/N0 per receive antenna in dB, with unit-energy
fading (E|h|^2 = 1), matching the simulator's SNR accounting.
"""

import numpy as np
from scipy.special import erfc

__all__ = [
    "q_function",
    "awgn_bpsk_ber",
    "rayleigh_bpsk_ber",
    "rayleigh_mrc2_ber",
    "rayleigh_alamouti21_ber",
    "binomial_sigma",
]


def q_function(x):
    """Gaussian tail probability Q(x)."""
    return 0.5 * erfc(np.asarray(x) / np.sqrt(2.0))


def awgn_bpsk_ber(ebn0_db):
    """BPSK over AWGN: Q(sqrt(2*gamma))."""
    gamma = 10.0 ** (np.asarray(ebn0_db) / 10.0)
    return q_function(np.sqrt(2.0 * gamma))


def rayleigh_bpsk_ber(ebn0_db):
    """BPSK over flat Rayleigh, single branch: (1 - sqrt(g/(1+g)))/2."""
    gamma = 10.0 ** (np.asarray(ebn0_db) / 10.0)
    return 0.5 * (1.0 - np.sqrt(gamma / (1.0 + gamma)))


def rayleigh_mrc2_ber(ebn0_db):
    """Two-branch MRC over i.i.d. Rayleigh: p^2 (1 + 2(1-p)) with the
    single-branch p evaluated at the per-branch mean SNR."""
    p = rayleigh_bpsk_ber(ebn0_db)
    return p * p * (1.0 + 2.0 * (1.0 - p))


def rayleigh_alamouti21_ber(ebn0_db, power_split: bool = True):
    """Alamouti 2x1 over i.i.d. Rayleigh: the MRC formula at half the SNR
    when the transmit power is split across the two antennas."""
    shift = 10.0 * np.log10(2.0) if power_split else 0.0
    return rayleigh_mrc2_ber(np.asarray(ebn0_db) - shift)


def binomial_sigma(p, n):
    """Standard deviation of a BER estimate from n Bernoulli trials."""
    return np.sqrt(np.asarray(p) * (1.0 - np.asarray(p)) / np.asarray(n))
