"""Dense GF(2) linear algebra on uint64-packed rows."""

from __future__ import annotations

import numpy as np

__all__ = ["pack_rows", "unpack_rows", "rank", "rref"]


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack an (m, n) 0/1 array into (m, ceil(n/64)) uint64 words.

    Bit k of a row lives in word k // 64 at position k % 64.
    """
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if bits.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {bits.shape}")
    m, n = bits.shape
    packed8 = np.packbits(bits & 1, axis=1, bitorder="little")
    words = -(-n // 64)
    padded = np.zeros((m, words * 8), dtype=np.uint8)
    padded[:, : packed8.shape[1]] = packed8
    return padded.view(np.uint64)


def unpack_rows(words: np.ndarray, n_cols: int) -> np.ndarray:
    """Inverse of pack_rows, trimming back to n_cols columns."""
    bits = np.unpackbits(
        np.ascontiguousarray(words).view(np.uint8), axis=1, bitorder="little"
    )
    return bits[:, :n_cols]


def _eliminate(words: np.ndarray, n_cols: int, full: bool) -> tuple[int, list[int]]:
    """In-place row reduction; returns (rank, pivot column list).

    full=False leaves echelon form (rows above a pivot untouched),
    full=True reduces to RREF.
    """
    m = words.shape[0]
    r = 0
    pivots: list[int] = []
    for col in range(n_cols):
        if r == m:
            break
        w, b = divmod(col, 64)
        mask = np.uint64(1) << np.uint64(b)
        below = np.nonzero(words[r:, w] & mask)[0]
        if below.size == 0:
            continue
        piv = r + int(below[0])
        if piv != r:
            words[[r, piv]] = words[[piv, r]]
        sel = (words[:, w] & mask).astype(bool)
        sel[r] = False
        if not full:
            sel[:r] = False
        if sel.any():
            words[sel] ^= words[r]
        pivots.append(col)
        r += 1
    return r, pivots


def rank(bits: np.ndarray) -> int:
    """GF(2) rank of a dense 0/1 matrix."""
    bits = np.asarray(bits)
    if bits.size == 0:
        return 0
    words = pack_rows(bits)
    r, _ = _eliminate(words, bits.shape[1], full=False)
    return r


def rref(bits: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2).

    Returns (R, pivot_cols) where R has the same shape as the input and
    exactly rank nonzero leading rows, each with a lone 1 in its pivot
    column.
    """
    bits = np.asarray(bits)
    words = pack_rows(bits)
    _, pivots = _eliminate(words, bits.shape[1], full=True)
    return unpack_rows(words, bits.shape[1]), pivots
