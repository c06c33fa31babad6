"""Bit-stream framing (TDM multiplex) and BPSK mapping/demapping."""

import numpy as np

__all__ = ["tdm_multiplex", "tdm_demultiplex", "bpsk_map", "bpsk_demap"]


def tdm_multiplex(streams) -> np.ndarray:
    """Round-robin interleave equal-length user bit streams into one serial stream.

    output[k*U + u] = streams[u][k].
    """
    arrays = [np.asarray(s) for s in streams]
    lengths = {a.shape[0] for a in arrays}
    if len(lengths) > 1:
        raise ValueError(f"streams have unequal lengths {sorted(lengths)}")
    if not arrays:
        raise ValueError("no streams to multiplex")
    return np.stack(arrays, axis=1).reshape(-1)


def tdm_demultiplex(serial, n_users: int) -> np.ndarray:
    """Inverse of tdm_multiplex: split a serial stream back into U user streams.

    Returns an array of shape (U, len(serial)//U); row u is user u's stream.
    """
    data = np.asarray(serial)
    if n_users < 1:
        raise ValueError(f"user count must be positive, got {n_users}")
    if data.shape[0] % n_users != 0:
        raise ValueError(
            f"serial length {data.shape[0]} not divisible by {n_users} users"
        )
    return data.reshape(-1, n_users).T


def bpsk_map(bits) -> np.ndarray:
    """Map bits to BPSK symbols: 0 -> +1+0j, 1 -> -1+0j. Elementwise on arrays."""
    return (1.0 - 2.0 * np.asarray(bits, dtype=np.float64)).astype(np.complex128)


def bpsk_demap(values) -> np.ndarray:
    """Hard BPSK decision: Re(z) >= 0 -> bit 0, Re(z) < 0 -> bit 1.

    The tie at Re(z) == 0 resolves to bit 0 so replays are deterministic.
    This sign rule is the minimum-distance detector for BPSK.
    """
    z = np.asarray(values)
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite value passed to BPSK demapper")
    return (z.real < 0).astype(np.int64)
