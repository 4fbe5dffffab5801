"""Odd-cycle distinguisher between two-cliques and complete-bipartite graphs."""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from typing import Callable

from .graphs import Graph, GraphFamily, build_graph, sample_partition
from .oracle import EdgePair, OracleSession, Transcript
from .rng import derive_seed
from .stats import wilson_half_width


class Verdict(enum.Enum):
    OutputG1 = "G1"
    OutputG2 = "G2"


def default_repetitions(n: int) -> int:
    return math.ceil(8 * n * math.log2(n))


def observed_graph(transcript: Transcript, n_vertices: int | None = None) -> Graph:
    edges = {(r.u, r.v) for _, r in transcript.entries if isinstance(r, EdgePair)}
    if n_vertices is None:
        n_vertices = max([v for e in edges for v in e] + [1])
    return Graph(n_vertices, frozenset(edges))


def find_odd_cycle(g: Graph) -> list[int] | None:
    """Odd cycle as a closed vertex list ``[v0, ..., v_{k-1}]`` (``k`` odd), or None."""
    adj = g.adjacency
    color: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    depth: dict[int, int] = {}
    for s in sorted(adj):
        if s in color or not adj[s]:
            continue
        color[s], parent[s], depth[s] = 0, None, 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for w in sorted(adj[u]):
                if w not in color:
                    color[w], parent[w], depth[w] = 1 - color[u], u, depth[u] + 1
                    dq.append(w)
                elif color[w] == color[u]:
                    return _cycle_through(u, w, parent, depth)
    return None


def _cycle_through(u, w, parent, depth) -> list[int]:
    # Walk both endpoints up the BFS tree to their common ancestor.
    left, right = [u], [w]
    a, b = u, w
    while depth[a] > depth[b]:
        a = parent[a]
        left.append(a)
    while depth[b] > depth[a]:
        b = parent[b]
        right.append(b)
    while a != b:
        a, b = parent[a], parent[b]
        left.append(a)
        right.append(b)
    return left + right[-2::-1]


def is_valid_odd_cycle(g: Graph, cyc: list[int]) -> bool:
    k = len(cyc)
    if k < 3 or k % 2 == 0 or len(set(cyc)) != k:
        return False
    return all((min(a, b), max(a, b)) in g.edges for a, b in zip(cyc, cyc[1:] + cyc[:1]))


def run_odd_cycle_distinguisher(session: OracleSession, repetitions: int | None = None) -> Verdict:
    n = session.graph.n_vertices
    if repetitions is None:
        repetitions = default_repetitions(n)
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    start = len(session.transcript)
    session.full_queries(repetitions)
    sub = Transcript(session.transcript.entries[start:])
    return Verdict.OutputG1 if find_odd_cycle(observed_graph(sub, n)) else Verdict.OutputG2


@dataclass
class AdvantageReport:
    p1: float
    p2: float
    advantage: float
    half_width_p1: float
    half_width_p2: float
    half_width: float
    trials: int
    rows: list


Algorithm = Callable[[OracleSession], Verdict]


def _resolve(algorithm, repetitions) -> Algorithm:
    if callable(algorithm):
        return algorithm
    if algorithm == "odd-cycle":
        return lambda s: run_odd_cycle_distinguisher(s, repetitions)
    if algorithm == "always-g1":
        return lambda s: Verdict.OutputG1
    if algorithm == "always-g2":
        return lambda s: Verdict.OutputG2
    raise ValueError(f"unknown algorithm {algorithm!r}")


def run_trial(algorithm, n: int, family: GraphFamily, repetitions, seed: int, trial: int) -> dict:
    alg = _resolve(algorithm, repetitions)
    s = derive_seed(seed, "advantage", family.value, trial)
    g = build_graph(sample_partition(n, derive_seed(s, "partition")), family)
    session = OracleSession(g, derive_seed(s, "oracle"))
    v = alg(session)
    return {"trial": trial, "family": family.value, "verdict": v.value,
            "cost": session.transcript.total_cost, "odd_cycle_found": int(v is Verdict.OutputG1)}


def estimate_advantage(algorithm, n: int, repetitions: int | None, trials: int, seed: int) -> AdvantageReport:
    if trials < 30:
        raise ValueError("advantage estimation needs at least 30 trials")
    rows = []
    hits = {}
    for fam in (GraphFamily.TWO_CLIQUES, GraphFamily.COMPLETE_BIPARTITE):
        fam_rows = [run_trial(algorithm, n, fam, repetitions, seed, t) for t in range(trials)]
        rows += fam_rows
        hits[fam] = sum(r["verdict"] == Verdict.OutputG1.value for r in fam_rows)
    p1 = hits[GraphFamily.TWO_CLIQUES] / trials
    p2 = hits[GraphFamily.COMPLETE_BIPARTITE] / trials
    h1 = wilson_half_width(hits[GraphFamily.TWO_CLIQUES], trials)
    h2 = wilson_half_width(hits[GraphFamily.COMPLETE_BIPARTITE], trials)
    return AdvantageReport(p1, p2, p1 - p2, h1, h2, math.hypot(h1, h2), trials, rows)
