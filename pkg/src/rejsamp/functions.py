"""Queryable Boolean functions and the truth-table conventions.

Inputs are bit sequences ``x`` with ``x[j-1]`` the value of variable ``x_j``.
A truth table is a ``uint8`` array of length ``2**n`` indexed so that
variable ``x_j`` is bit ``j-1`` of the index. The hex dump encodes the table
as the integer ``sum(f(idx) << idx)`` in lowercase hex.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import CapacityError

MAX_TABLE_BITS = 24


def check_table_size(n: int, cap: int = MAX_TABLE_BITS) -> None:
    if n > cap:
        raise CapacityError(f"truth tables are capped at {cap} input bits, got {n}")


def index_bits(n: int) -> np.ndarray:
    """``(n+1, 2**n)`` array whose row ``j`` holds ``x_j`` over all inputs (row 0 unused)."""
    check_table_size(n)
    idx = np.arange(1 << n, dtype=np.uint32)
    out = np.zeros((n + 1, 1 << n), dtype=np.uint8)
    for j in range(1, n + 1):
        out[j] = (idx >> (j - 1)) & 1
    return out


def bits_of(idx: int, n: int) -> tuple[int, ...]:
    return tuple((idx >> j) & 1 for j in range(n))


def index_of(x: Sequence[int]) -> int:
    return sum(int(b) << j for j, b in enumerate(x))


class BooleanFunction:
    """Base class: subclasses implement ``__call__`` and may vectorise ``truth_table``."""

    n: int

    def __call__(self, x: Sequence[int]) -> int:
        raise NotImplementedError

    def _check(self, x: Sequence[int]) -> None:
        if len(x) != self.n:
            raise ValueError(f"input has length {len(x)}, expected {self.n}")

    def truth_table(self) -> np.ndarray:
        check_table_size(self.n)
        return np.array([self(bits_of(i, self.n)) for i in range(1 << self.n)], dtype=np.uint8)


class TableFunction(BooleanFunction):
    def __init__(self, n: int, table):
        table = np.asarray(table, dtype=np.uint8)
        if table.shape != (1 << n,):
            raise ValueError(f"table must have length 2**{n}")
        if table.max(initial=0) > 1:
            raise ValueError("table entries must be bits")
        self.n = n
        self._t = table

    def __call__(self, x):
        self._check(x)
        return int(self._t[index_of(x)])

    def truth_table(self):
        return self._t


class CallableFunction(BooleanFunction):
    def __init__(self, n: int, fn: Callable[[Sequence[int]], int]):
        self.n = n
        self._fn = fn

    def __call__(self, x):
        self._check(x)
        return int(self._fn(x)) & 1


def as_table(f) -> np.ndarray:
    if isinstance(f, BooleanFunction):
        return f.truth_table()
    return np.asarray(f, dtype=np.uint8)


class _Padded(BooleanFunction):
    def __init__(self, f: BooleanFunction, extra: int, parity: bool):
        if extra < 0:
            raise ValueError("extra must be nonnegative")
        self.f, self.extra, self.parity = f, extra, parity
        self.n = f.n + extra

    def __call__(self, x):
        self._check(x)
        v = self.f(x[: self.f.n])
        if self.parity:
            v ^= sum(int(b) for b in x[self.f.n:]) & 1
        return v

    def truth_table(self):
        check_table_size(self.n)
        base = as_table(self.f)
        t = np.tile(base, 1 << self.extra)
        if self.parity and self.extra:
            hi = np.arange(1 << self.n, dtype=np.uint32) >> self.f.n
            t = t ^ (np.bitwise_count(hi) & 1).astype(np.uint8)
        return t


def pad_parity(f: BooleanFunction, extra: int) -> BooleanFunction:
    """``g(x, y) = f(x) xor y_1 xor ... xor y_extra``."""
    return f if extra == 0 else _Padded(f, extra, parity=True)


def pad_dummy(f: BooleanFunction, extra: int) -> BooleanFunction:
    """``g(x, y) = f(x)``."""
    return f if extra == 0 else _Padded(f, extra, parity=False)


# ---------------------------------------------------------------- hex dumps

def table_to_hex(table) -> str:
    t = as_table(table)
    n = int(t.size).bit_length() - 1
    value = int.from_bytes(np.packbits(t, bitorder="little").tobytes(), "little")
    width = max(1, (1 << n) // 4)
    return format(value, f"0{width}x")


def hex_to_table(text: str, n: int | None = None) -> np.ndarray:
    s = text.strip().lower()
    if s.startswith("0x"):
        s = s[2:]
    if n is None:
        # One hex digit covers n <= 2; pass n explicitly for n < 2.
        bits = 4 * len(s)
        if bits & (bits - 1):
            raise ValueError("hex length does not match a power-of-two table")
        n = bits.bit_length() - 1
    check_table_size(n)
    value = int(s, 16)
    if value >> (1 << n):
        raise ValueError(f"hex value has bits beyond 2**{n} entries")
    nbytes = max(1, (1 << n) // 8)
    raw = np.frombuffer(value.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[: 1 << n].astype(np.uint8)


def write_table_hex(f, path: str | Path) -> None:
    Path(path).write_text(table_to_hex(f) + "\n", encoding="ascii")


def read_table_hex(path: str | Path, n: int | None = None) -> TableFunction:
    t = hex_to_table(Path(path).read_text(encoding="ascii"), n)
    return TableFunction(int(t.size).bit_length() - 1, t)
