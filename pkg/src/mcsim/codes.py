"""Walsh-Hadamard spreading codes and the MC-CDMA copier/despreader.

The code matrix is the Sylvester Hadamard matrix: row u is user u's
spreading sequence, one +/-1 chip per subchannel. Rows are mutually
orthogonal, so superposed users separate exactly at the despreader.
"""

import numpy as np
from scipy.linalg import hadamard

__all__ = ["generate_walsh_hadamard", "spread", "despread"]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def generate_walsh_hadamard(order: int) -> np.ndarray:
    """Return the Sylvester-construction Hadamard matrix of a power-of-two order.

    Row u serves as user u's spreading code. Entries are +1/-1 integers,
    H @ H.T == order * I exactly.
    """
    if not isinstance(order, (int, np.integer)) or not _is_power_of_two(int(order)):
        raise ValueError(f"code order must be a positive power of two, got {order!r}")
    return hadamard(int(order), dtype=np.int64)


def spread(user_symbols, codes: np.ndarray) -> np.ndarray:
    """Superpose user symbols onto the subchannels: X[m] = sum_u s_u * c_u[m].

    ``user_symbols`` has the user axis last, so batches of symbol frames
    spread in one call. Users take code rows 0..U-1 in index order.
    """
    symbols = np.asarray(user_symbols)
    n_users = symbols.shape[-1]
    if n_users > codes.shape[0]:
        raise ValueError(
            f"{n_users} user symbols but only {codes.shape[0]} code rows"
        )
    rows = codes[:n_users].astype(np.float64)
    flat = symbols.reshape(-1, n_users)
    return (flat @ rows).reshape(symbols.shape[:-1] + (rows.shape[1],))


def despread(block, code_row) -> np.ndarray:
    """Correlate a subchannel block with one user's code: (1/M) sum_m X[m] c[m].

    For a noiseless composite of orthogonal users this recovers the targeted
    user's symbol exactly. The block axis is last, so batches despread in
    one call.
    """
    blocks = np.asarray(block)
    row = np.asarray(code_row, dtype=np.float64)
    if blocks.shape[-1] != row.shape[0]:
        raise ValueError(
            f"block length {blocks.shape[-1]} != code length {row.shape[0]}"
        )
    flat = blocks.reshape(-1, row.shape[0])
    return (flat @ (row / row.shape[0])).reshape(blocks.shape[:-1])
