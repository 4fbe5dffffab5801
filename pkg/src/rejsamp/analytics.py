"""Measurable statistics over transcripts: components of the observed graph,
tree/size and few-responses events, consistency with a hidden partition,
and the lone-vertex balance and layer statistics."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .graphs import GraphFamily, Partition
from .oracle import Empty, EdgePair, Lone, Transcript
from .util import ceil_log2


@dataclass(frozen=True)
class Component:
    root: int
    vertices: frozenset
    edges: frozenset
    layers: tuple  # layers[0] = {root}; the root layer counts as layer 1 (odd)
    acyclic: bool

    @property
    def odd(self) -> frozenset:
        return frozenset().union(*self.layers[0::2])

    @property
    def even(self) -> frozenset:
        return frozenset().union(*self.layers[1::2]) if len(self.layers) > 1 else frozenset()


@dataclass(frozen=True)
class ComponentDecomposition:
    components: tuple

    @property
    def V(self) -> int:
        return sum(len(c.vertices) for c in self.components)


def decompose(transcript: Transcript) -> ComponentDecomposition:
    adj: dict[int, set] = {}
    edges = set()
    for _, r in transcript.entries:
        if isinstance(r, EdgePair):
            edges.add((r.u, r.v))
            adj.setdefault(r.u, set()).add(r.v)
            adj.setdefault(r.v, set()).add(r.u)
    seen: set[int] = set()
    comps = []
    for root in sorted(adj):
        if root in seen:
            continue
        layers = [{root}]
        seen.add(root)
        verts = {root}
        dq = deque([root])
        depth = {root: 0}
        while dq:
            u = dq.popleft()
            for w in adj[u]:
                if w not in depth:
                    depth[w] = depth[u] + 1
                    if depth[w] == len(layers):
                        layers.append(set())
                    layers[depth[w]].add(w)
                    verts.add(w)
                    seen.add(w)
                    dq.append(w)
        cedges = frozenset(e for e in edges if e[0] in verts)
        comps.append(Component(root, frozenset(verts), cedges,
                               tuple(frozenset(s) for s in layers), len(cedges) == len(verts) - 1))
    return ComponentDecomposition(tuple(comps))


def event_ET(d: ComponentDecomposition, n: int) -> bool:
    lim = ceil_log2(n)
    return all(c.acyclic and len(c.vertices) < lim for c in d.components)


def nonempty_count(transcript: Transcript) -> int:
    return sum(1 for _, r in transcript.entries if not isinstance(r, Empty))


def event_EF(transcript: Transcript, n: int) -> bool:
    return nonempty_count(transcript) <= n // ceil_log2(n) ** 4


def consistency(d: ComponentDecomposition, partition: Partition, family: GraphFamily) -> bool:
    A = partition.A
    for c in d.components:
        if family is GraphFamily.TWO_CLIQUES:
            inside = c.vertices & A
            if inside and inside != c.vertices:
                return False
        else:
            # Sides must alternate along every edge, which also rules out odd cycles.
            for u, v in c.edges:
                if (u in A) == (v in A):
                    return False
    return True


def balance_statistic(transcript: Transcript, partition: Partition, n: int | None = None,
                      c: float = 1.0) -> tuple[int, bool]:
    A = partition.A
    n = partition.n_vertices if n is None else n
    B = 0
    for L, r in transcript.entries:
        if isinstance(r, Lone):
            inA = len(L & A)
            diff = inA - (len(L) - inA)
            B += -diff if r.v in A else diff
    return B, abs(B) <= c * n / ceil_log2(n)


def w_statistic(d: ComponentDecomposition, partition: Partition, n: int | None = None) -> tuple[int, int, bool]:
    A = partition.A
    n = partition.n_vertices if n is None else n
    W = 0
    for comp in d.components:
        W += len(comp.odd) if comp.root in A else len(comp.even)
    V = d.V
    band = math.sqrt(V) * ceil_log2(n)
    return W, V, abs(W - V / 2) <= band


@dataclass
class EventReport:
    e_T: bool
    e_F: bool
    e_B: bool
    B: int
    e_C_yes: bool
    e_C_no: bool
    W_A_no: int
    V: int
    e_W: bool
    nonempty: int
    cost: int


def event_report(transcript: Transcript, partition: Partition, c: float = 1.0) -> EventReport:
    n = partition.n_vertices
    d = decompose(transcript)
    B, eB = balance_statistic(transcript, partition, n, c)
    W, V, eW = w_statistic(d, partition, n)
    return EventReport(
        e_T=event_ET(d, n), e_F=event_EF(transcript, n), e_B=eB, B=B,
        e_C_yes=consistency(d, partition, GraphFamily.COMPLETE_BIPARTITE),
        e_C_no=consistency(d, partition, GraphFamily.TWO_CLIQUES),
        W_A_no=W, V=V, e_W=eW, nonempty=nonempty_count(transcript), cost=transcript.total_cost,
    )
