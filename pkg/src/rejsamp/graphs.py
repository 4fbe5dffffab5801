"""Graphs on ``[n]``, the two hard families and the two cut parameters.

Vertices are the integers ``1..n``. Edges are stored as sorted pairs
``(u, v)`` with ``u < v``.

Both cut parameters are exact :class:`fractions.Fraction` values. The
brute-force path enumerates all ``2**n`` vertex subsets with a vectorised
subset recurrence (``n <= 24``); graphs recognised as one of the two
families take a closed-form path instead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import CapacityError, EmptyGraphError
from .rng import make_rng

BRUTE_FORCE_MAX_VERTICES = 24


class GraphFamily(enum.Enum):
    TWO_CLIQUES = "g1"
    COMPLETE_BIPARTITE = "g2"

    @classmethod
    def parse(cls, s: "str | GraphFamily") -> "GraphFamily":
        if isinstance(s, GraphFamily):
            return s
        key = s.strip().lower()
        aliases = {
            "g1": cls.TWO_CLIQUES, "twocliques": cls.TWO_CLIQUES, "two_cliques": cls.TWO_CLIQUES,
            "g2": cls.COMPLETE_BIPARTITE, "completebipartite": cls.COMPLETE_BIPARTITE,
            "complete_bipartite": cls.COMPLETE_BIPARTITE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown graph family {s!r}") from None


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValueError("a graph needs at least one vertex")
        norm = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if u > v:
                u, v = v, u
            if u < 1 or v > self.n_vertices:
                raise ValueError(f"edge {e} outside [1, {self.n_vertices}]")
            norm.add((int(u), int(v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        return cls(n, frozenset(edges))

    @cached_property
    def edge_list(self) -> tuple[tuple[int, int], ...]:
        """Edges in lexicographic order; index into this for uniform draws."""
        return tuple(sorted(self.edges))

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.array(self.edge_list, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def adjacency(self) -> dict[int, frozenset]:
        adj: dict[int, set] = {v: set() for v in range(1, self.n_vertices + 1)}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: frozenset(s) for v, s in adj.items()}

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Partition:
    n_vertices: int
    A: frozenset

    def __post_init__(self):
        A = frozenset(int(a) for a in self.A)
        if any(a < 1 or a > self.n_vertices for a in A):
            raise ValueError("partition side outside [1, n]")
        object.__setattr__(self, "A", A)

    @property
    def complement(self) -> frozenset:
        return frozenset(range(1, self.n_vertices + 1)) - self.A


def sample_partition(n: int, seed: int) -> Partition:
    """Uniform ``n/2``-subset of ``[n]``, deterministic in ``seed``."""
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and >= 2 to split in half, got {n}")
    rng = make_rng(seed, "partition", n)
    A = rng.choice(np.arange(1, n + 1), size=n // 2, replace=False)
    return Partition(n, frozenset(int(a) for a in A))


def build_graph(partition: Partition, family: GraphFamily) -> Graph:
    A = sorted(partition.A)
    B = sorted(partition.complement)
    if family is GraphFamily.TWO_CLIQUES:
        edges = [(u, v) for side in (A, B) for i, u in enumerate(side) for v in side[i + 1:]]
    elif family is GraphFamily.COMPLETE_BIPARTITE:
        edges = [(min(a, b), max(a, b)) for a in A for b in B]
    else:
        raise ValueError(f"unknown family {family!r}")
    return Graph(partition.n_vertices, frozenset(edges))


def _check_vertices(g: Graph, S: Iterable[int]) -> frozenset:
    S = frozenset(S)
    bad = [v for v in S if not 1 <= v <= g.n_vertices]
    if bad:
        raise ValueError(f"vertices {sorted(bad)} outside [1, {g.n_vertices}]")
    return S


def edges_between(g: Graph, S1: Iterable[int], S2: Iterable[int]) -> int:
    """Number of edges with one endpoint in ``S1`` and the other in ``S2``.

    Each unordered edge is counted at most once.
    """
    S1 = _check_vertices(g, S1)
    S2 = _check_vertices(g, S2)
    return sum(1 for u, v in g.edges if (u in S1 and v in S2) or (v in S1 and u in S2))


def recognize_family(g: Graph) -> tuple[GraphFamily, Partition] | None:
    """Return ``(family, partition)`` if ``g`` is exactly one of the hard graphs."""
    n = g.n_vertices
    if n < 2 or n % 2 or not g.edges:
        return None
    h = n // 2
    adj = g.adjacency
    v1 = 1
    # TwoCliques: the closed neighbourhood of vertex 1 is one side.
    side = frozenset(adj[v1] | {v1})
    if len(side) == h:
        p = Partition(n, side)
        if build_graph(p, GraphFamily.TWO_CLIQUES).edges == g.edges:
            return GraphFamily.TWO_CLIQUES, p
    # CompleteBipartite: the neighbourhood of vertex 1 is the other side.
    other = frozenset(adj[v1])
    if len(other) == h:
        p = Partition(n, frozenset(range(1, n + 1)) - other)
        if build_graph(p, GraphFamily.COMPLETE_BIPARTITE).edges == g.edges:
            return GraphFamily.COMPLETE_BIPARTITE, p
    return None


def inside_edge_counts(g: Graph) -> np.ndarray:
    """``out[mask]`` = number of edges with both endpoints in the subset ``mask``.

    Bit ``v-1`` of ``mask`` stands for vertex ``v``. Built by the recurrence
    ``out[mask] = out[mask ^ top] + |N_<(top) & mask|`` where ``top`` is the
    highest set bit, doubling the table one vertex at a time.
    """
    n = g.n_vertices
    if n > BRUTE_FORCE_MAX_VERTICES:
        raise CapacityError(f"subset enumeration capped at {BRUTE_FORCE_MAX_VERTICES} vertices, got {n}")
    lower_nbrs = np.zeros(n, dtype=np.uint32)
    for u, v in g.edges:
        lower_nbrs[v - 1] |= np.uint32(1 << (u - 1))
    out = np.zeros(1 << n, dtype=np.int32)
    idx = np.arange(1 << n, dtype=np.uint32)
    for v in range(n):
        lo, hi = 1 << v, 1 << (v + 1)
        low_masks = idx[:lo]
        out[lo:hi] = out[:lo] + np.bitwise_count(low_masks & lower_nbrs[v]).astype(np.int32)
    return out


def _popcounts(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint32))


def _chi_junta_bipartite_closed_form(h: int) -> Fraction:
    # Best complement of size <= h inside K_{h,h} takes floor/ceil halves of h.
    return 1 - Fraction((h // 2) * ((h + 1) // 2), h * h)


def chi_junta(g: Graph, min_size: int, method: str = "auto") -> Fraction:
    """Minimum fraction of edges touching a vertex set of size ``>= min_size``.

    ``method`` is ``"brute"``, ``"fast"`` (recognised family with
    ``min_size == n/2`` only) or ``"auto"`` (fast when possible).
    """
    if not g.edges:
        raise EmptyGraphError("chi is undefined on an edgeless graph")
    if min_size < 1 or min_size > g.n_vertices:
        raise ValueError(f"min_size must lie in [1, {g.n_vertices}]")
    if method not in ("auto", "brute", "fast"):
        raise ValueError(f"unknown method {method!r}")
    if method != "brute":
        rec = recognize_family(g) if 2 * min_size == g.n_vertices else None
        if rec is not None:
            family, _ = rec
            h = g.n_vertices // 2
            if family is GraphFamily.TWO_CLIQUES:
                return Fraction(1, 2)
            return _chi_junta_bipartite_closed_form(h)
        if method == "fast":
            raise ValueError("fast path needs a recognised family and min_size == n/2")
    inside = inside_edge_counts(g)
    # Edges touching S = |E| - edges inside the complement of S.
    comp_size_ok = _popcounts(g.n_vertices) <= g.n_vertices - min_size
    best_inside = int(inside[comp_size_ok].max())
    m = len(g.edges)
    return Fraction(m - best_inside, m)


def chi_unate(g: Graph, method: str = "auto") -> Fraction:
    """One minus the maximum-cut fraction of ``g``."""
    if not g.edges:
        raise EmptyGraphError("chi is undefined on an edgeless graph")
    if method not in ("auto", "brute", "fast"):
        raise ValueError(f"unknown method {method!r}")
    if method != "brute":
        rec = recognize_family(g)
        if rec is not None:
            family, _ = rec
            if family is GraphFamily.COMPLETE_BIPARTITE:
                return Fraction(0)
            h = g.n_vertices // 2
            return 1 - Fraction(2 * (h // 2) * ((h + 1) // 2), 2 * comb(h, 2))
        if method == "fast":
            raise ValueError("fast path needs a recognised family")
    inside = inside_edge_counts(g)
    uncut = inside + inside[::-1]
    return Fraction(int(uncut.min()), len(g.edges))


# ---------------------------------------------------------------- file formats

def write_edge_list(g: Graph, path: str | Path) -> None:
    lines = [f"{g.n_vertices} {len(g.edges)}"] + [f"{u} {v}" for u, v in g.edge_list]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_edge_list(path: str | Path) -> Graph:
    tokens = Path(path).read_text(encoding="ascii").split()
    n, m = int(tokens[0]), int(tokens[1])
    nums = [int(t) for t in tokens[2:]]
    if len(nums) != 2 * m:
        raise ValueError(f"edge list declares {m} edges but holds {len(nums) // 2}")
    edges = list(zip(nums[::2], nums[1::2]))
    if any(u >= v for u, v in edges):
        raise ValueError("edge lines must satisfy u < v")
    g = Graph(n, frozenset(edges))
    if len(g.edges) != m:
        raise ValueError("duplicate edges in edge list")
    return g


def write_partition(p: Partition, path: str | Path) -> None:
    A = sorted(p.A)
    Path(path).write_text("\n".join([f"{p.n_vertices} {len(A)}"] + [str(a) for a in A]) + "\n", encoding="ascii")


def read_partition(path: str | Path) -> Partition:
    tokens = Path(path).read_text(encoding="ascii").split()
    n, k = int(tokens[0]), int(tokens[1])
    A = [int(t) for t in tokens[2:]]
    if len(A) != k:
        raise ValueError(f"partition declares {k} vertices but lists {len(A)}")
    return Partition(n, frozenset(A))


def build_graph_on(vertices: Iterable[int], A: Iterable[int], family: GraphFamily, n_total: int) -> Graph:
    """Family graph on a vertex subset of ``[n_total]``; other vertices stay isolated."""
    V = frozenset(vertices)
    A = frozenset(A)
    if not A <= V:
        raise ValueError("A must lie inside the vertex subset")
    B = sorted(V - A)
    A = sorted(A)
    if family is GraphFamily.TWO_CLIQUES:
        edges = [(u, v) for side in (A, B) for i, u in enumerate(side) for v in side[i + 1:]]
    else:
        edges = [(min(a, b), max(a, b)) for a in A for b in B]
    return Graph(n_total, frozenset(edges))
