"""Deterministic low-discrepancy sampling for constant estimation.

Halton points cover a box far more evenly than a pseudo-random draw of
the same size, and being deterministic they keep every estimate (and
therefore every report and CSV byte) reproducible across runs.
"""

from __future__ import annotations

import numpy as np

__all__ = ["halton_points"]

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _van_der_corput(count: int, base: int, skip: int) -> np.ndarray:
    out = np.empty(count)
    for i in range(count):
        k = i + skip
        value = 0.0
        denom = 1.0
        while k > 0:
            denom *= base
            k, digit = divmod(k, base)
            value += digit / denom
        out[i] = value
    return out


def halton_points(count: int, dims: int, skip: int = 20) -> np.ndarray:
    """First ``count`` Halton points in the unit cube ``[0, 1)**dims``.

    Args:
        count: number of points, ``>= 1``.
        dims: dimension, at most 12.
        skip: leading sequence elements to discard (the very first Halton
            points cluster near the origin).

    Returns:
        Array of shape ``(count, dims)``.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    if not (1 <= dims <= len(_PRIMES)):
        raise ValueError(f"dims must lie in [1, {len(_PRIMES)}], got {dims}")
    cols = [_van_der_corput(count, _PRIMES[d], skip) for d in range(dims)]
    return np.column_stack(cols)
