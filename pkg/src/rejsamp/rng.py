"""Deterministic randomness for every experiment in the package.

Two generators are used, both counter-based:

* Bulk streams (oracle sessions, Monte Carlo loops) are numpy ``Generator``
  objects over ``Philox4x64-10`` keyed directly from a derived 128-bit key.
* Lazily materialised per-index structure (one subfunction per multiplexer
  index) uses :class:`KeyedStream`, which hashes ``(key, counter)`` with
  BLAKE2b. Creating one costs about a microsecond, so millions of
  independent per-index streams are affordable.

Seeds are derived hierarchically: ``derive_seed(master, "trial", 7)`` hashes
a canonical encoding of the path, so any component change yields an
unrelated 64-bit seed.
"""

from __future__ import annotations

import hashlib
import struct
from typing import Sequence

import numpy as np

PRNG_ID = "philox4x64-10+blake2b-ctr/v1"

_MASK64 = (1 << 64) - 1


def _encode(parts: Sequence[object]) -> bytes:
    out = bytearray()
    for p in parts:
        if isinstance(p, bool):
            p = int(p)
        if isinstance(p, (int, np.integer)):
            p = int(p)
            tag, body = b"i", p.to_bytes((p.bit_length() + 8) // 8 + 1, "little", signed=True)
        elif isinstance(p, str):
            tag, body = b"s", p.encode()
        elif isinstance(p, bytes):
            tag, body = b"b", p
        else:
            raise TypeError(f"cannot derive seeds from {type(p).__name__}")
        out += tag + struct.pack("<I", len(body)) + body
    return bytes(out)


def derive_seed(master: int, *path: object) -> int:
    """Return a 64-bit seed derived from ``master`` and a path of labels.

    The derivation is BLAKE2b-64 over a length-prefixed encoding of
    ``(master, *path)``; distinct inputs map to distinct encodings, so
    collisions are only hash collisions.
    """
    h = hashlib.blake2b(_encode((master, *path)), digest_size=8, person=b"rejsamp-seed")
    return int.from_bytes(h.digest(), "little")


def make_rng(seed: int, *path: object) -> np.random.Generator:
    """Philox-backed generator for ``seed`` (optionally refined by ``path``)."""
    h = hashlib.blake2b(_encode((seed, *path)), digest_size=16, person=b"rejsamp-philox")
    d = h.digest()
    key = [int.from_bytes(d[:8], "little"), int.from_bytes(d[8:], "little")]
    return np.random.Generator(np.random.Philox(key=key))


class KeyedStream:
    """Cheap counter-mode stream: word ``k`` is BLAKE2b(key || k).

    Integer draws use rejection so that ``randbelow(m)`` is exactly uniform.
    """

    __slots__ = ("_key", "_ctr", "_buf")

    def __init__(self, seed: int, *path: object):
        self._key = hashlib.blake2b(_encode((seed, *path)), digest_size=32).digest()
        self._ctr = 0
        self._buf: list[int] = []

    def word(self) -> int:
        if not self._buf:
            d = hashlib.blake2b(self._ctr.to_bytes(8, "little"), key=self._key, digest_size=64).digest()
            self._ctr += 1
            self._buf = list(struct.unpack("<8Q", d))
        return self._buf.pop()

    def randbelow(self, m: int) -> int:
        if m <= 0:
            raise ValueError("randbelow requires m >= 1")
        if m == 1:
            return 0
        limit = (1 << 64) - ((1 << 64) % m)
        while True:
            w = self.word()
            if w < limit:
                return w % m

    def bit(self) -> int:
        return self.word() & 1

    def sample(self, population: Sequence, k: int) -> list:
        """Uniform k-subset (as a list in selection order), partial Fisher-Yates."""
        pool = list(population)
        if k > len(pool):
            raise ValueError("sample larger than population")
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
