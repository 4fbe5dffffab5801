"""Hard functions for tolerant junta testing.

An instance fixes a half-size set ``M`` of the ``n`` variables and a graph on
the remaining variables ``Mbar``. Inputs are routed by their projection on
``M`` to one of ``N = 2**(n/2)`` subfunctions. The first half computes the
parity over ``M``; every other subfunction is ``x_j1 xor x_j2 xor r`` for a
uniform edge ``(j1, j2)`` of the graph and a uniform bit ``r``.

Subfunctions are generated lazily from a per-index stream keyed by
``(seed, i)``, so evaluation order never changes the function.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .functions import BooleanFunction, check_table_size, index_bits
from .graphs import Graph, GraphFamily, build_graph_on
from .rng import KeyedStream, make_rng


@dataclass(frozen=True)
class ParityOverM:
    pass


@dataclass(frozen=True)
class EdgeParity:
    j1: int
    j2: int
    r: int


def gamma_M(x: Sequence[int], M: Sequence[int]) -> int:
    """``1 +`` the binary number read off ``x`` on ``M``, smallest element first (MSB)."""
    Ms = sorted(M)
    if 2 * len(Ms) != len(x):
        raise ValueError(f"|M| must be n/2: got |M|={len(Ms)} for n={len(x)}")
    v = 0
    for j in Ms:
        v = (v << 1) | (int(x[j - 1]) & 1)
    return v + 1


class JuntaInstance(BooleanFunction):
    def __init__(self, n: int, M: Iterable[int], A: Iterable[int], family: GraphFamily, seed: int):
        if n < 4 or n % 4:
            raise ValueError(f"n must be a positive multiple of 4, got {n}")
        self.n = n
        self.M = tuple(sorted(M))
        self.A = frozenset(A)
        self.family = family
        self.seed = seed
        if len(self.M) != n // 2 or len(set(self.M)) != n // 2 or not all(1 <= j <= n for j in self.M):
            raise ValueError("M must be an n/2-subset of [n]")
        self.Mbar = tuple(j for j in range(1, n + 1) if j not in set(self.M))
        if not self.A <= set(self.Mbar) or len(self.A) != n // 4:
            raise ValueError("A must be an n/4-subset of Mbar")
        self.m = n // 2
        self.N = 1 << self.m
        self.k = 3 * n // 4
        self.graph: Graph = build_graph_on(self.Mbar, self.A, family, n)
        self._memo: dict[int, object] = {}
        self._lock = threading.Lock()

    # -- structure

    def subfunction(self, i: int):
        if not 1 <= i <= self.N:
            raise ValueError(f"index {i} outside [1, {self.N}]")
        if 2 * i <= self.N:
            return ParityOverM()
        spec = self._memo.get(i)
        if spec is None:
            with self._lock:
                spec = self._memo.get(i)
                if spec is None:
                    s = KeyedStream(self.seed, "junta-h", i)
                    edges = self.graph.edge_list
                    j1, j2 = edges[s.randbelow(len(edges))]
                    spec = EdgeParity(j1, j2, s.bit())
                    self._memo[i] = spec
        return spec

    def gamma(self, x: Sequence[int]) -> int:
        return gamma_M(x, self.M)

    def __call__(self, x: Sequence[int]) -> int:
        self._check(x)
        spec = self.subfunction(self.gamma(x))
        if isinstance(spec, ParityOverM):
            return sum(int(x[j - 1]) for j in self.M) & 1
        return (int(x[spec.j1 - 1]) ^ int(x[spec.j2 - 1]) ^ spec.r) & 1

    # -- vectorised tables

    def _tables(self, bits: np.ndarray):
        gamma = np.ones(bits.shape[1], dtype=np.int64)
        for t, j in enumerate(self.M):
            gamma += bits[j].astype(np.int64) << (self.m - 1 - t)
        parity = np.bitwise_xor.reduce(bits[list(self.M)], axis=0)
        J1 = np.zeros(self.N + 1, dtype=np.int64)
        J2 = np.zeros(self.N + 1, dtype=np.int64)
        R = np.zeros(self.N + 1, dtype=np.uint8)
        for i in range(self.N // 2 + 1, self.N + 1):
            sp = self.subfunction(i)
            J1[i], J2[i], R[i] = sp.j1, sp.j2, sp.r
        cols = np.arange(bits.shape[1])
        edge_val = bits[J1[gamma], cols] ^ bits[J2[gamma], cols] ^ R[gamma]
        first = 2 * gamma <= self.N
        return gamma, np.where(first, parity, edge_val).astype(np.uint8)

    def truth_table(self) -> np.ndarray:
        check_table_size(self.n)
        return self._tables(index_bits(self.n))[1]

    def gamma_table(self) -> np.ndarray:
        return self._tables(index_bits(self.n))[0]

    def edge_hits(self, S: Iterable[int]) -> dict[int, int]:
        """``X_i`` for every ``i > N/2``: 1 iff the edge of ``h_i`` touches ``S``."""
        S = frozenset(S)
        out = {}
        for i in range(self.N // 2 + 1, self.N + 1):
            sp = self.subfunction(i)
            out[i] = int(sp.j1 in S or sp.j2 in S)
        return out

    # -- descriptor

    def descriptor(self) -> str:
        return "\n".join([
            "kind junta", f"n {self.n}",
            "M " + " ".join(map(str, self.M)),
            "A " + " ".join(map(str, sorted(self.A))),
            f"family {self.family.value}", f"seed {self.seed}",
        ]) + "\n"


def sample_junta_instance(n: int, family: GraphFamily, seed: int) -> JuntaInstance:
    if n < 4 or n % 4:
        raise ValueError(f"n must be a positive multiple of 4, got {n}")
    rng = make_rng(seed, "junta-instance", n)
    perm = rng.permutation(np.arange(1, n + 1))
    M = sorted(int(v) for v in perm[: n // 2])
    Mbar = sorted(int(v) for v in perm[n // 2:])
    A = sorted(int(v) for v in rng.choice(Mbar, size=n // 4, replace=False))
    return JuntaInstance(n, M, A, family, seed)


def read_junta_descriptor(text_or_path) -> JuntaInstance:
    text = Path(text_or_path).read_text() if isinstance(text_or_path, Path) else str(text_or_path)
    kv = {}
    for line in text.splitlines():
        parts = line.split()
        if parts:
            kv[parts[0]] = parts[1:]
    return JuntaInstance(int(kv["n"][0]), [int(v) for v in kv["M"]], [int(v) for v in kv["A"]],
                         GraphFamily.parse(kv["family"][0]), int(kv["seed"][0]))


class JuntaWitness(BooleanFunction):
    """Agrees with the instance except on subfunctions whose edge meets ``S``, where it is 0."""

    def __init__(self, inst: JuntaInstance, S: Iterable[int]):
        S = frozenset(S)
        if not S <= set(inst.Mbar):
            raise ValueError("S must lie inside Mbar")
        if 4 * len(S) < inst.n:
            raise ValueError(f"|S| must be at least n/4 = {inst.n // 4}")
        self.inst, self.S, self.n = inst, S, inst.n
        self.hits = inst.edge_hits(S)

    def __call__(self, x):
        self._check(x)
        i = self.inst.gamma(x)
        if self.hits.get(i, 0):
            return 0
        return self.inst(x)

    def truth_table(self):
        check_table_size(self.n)
        gamma, t = self.inst._tables(index_bits(self.n))
        hit = np.zeros(self.inst.N + 1, dtype=bool)
        for i, v in self.hits.items():
            hit[i] = bool(v)
        return np.where(hit[gamma], 0, t).astype(np.uint8)

    def predicted_distance(self) -> Fraction:
        return Fraction(sum(self.hits.values()), 2 * self.inst.N)


def witness_junta(inst: JuntaInstance, S: Iterable[int]) -> JuntaWitness:
    return JuntaWitness(inst, S)
