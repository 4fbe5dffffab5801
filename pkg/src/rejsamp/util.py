"""Integer helpers for the log and square-root roundings used throughout."""

from math import isqrt


def ceil_log2(n: int) -> int:
    """``ceil(log2 n)`` for ``n >= 2``; 1 for ``n <= 2`` so it can divide."""
    if n <= 2:
        return 1
    return (n - 1).bit_length()


def ceil_sqrt(n: int) -> int:
    r = isqrt(n)
    return r if r * r == n else r + 1


def floor_sqrt(n: int) -> int:
    return isqrt(n)
