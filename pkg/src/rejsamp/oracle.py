"""Rejection sampling oracle with cost metering and transcripts.

A query is a vertex set ``L``. The oracle draws an edge of the hidden graph
uniformly and reveals its intersection with ``L``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

from .errors import EmptyGraphError
from .graphs import Graph
from .rng import make_rng


@dataclass(frozen=True)
class Empty:
    def __str__(self):
        return "EMPTY"


@dataclass(frozen=True)
class Lone:
    v: int

    def __str__(self):
        return f"LONE {self.v}"


@dataclass(frozen=True)
class EdgePair:
    u: int
    v: int

    def __post_init__(self):
        if not self.u < self.v:
            raise ValueError("EdgePair needs u < v")

    def __str__(self):
        return f"EDGE {self.u} {self.v}"


Response = Union[Empty, Lone, EdgePair]
EMPTY = Empty()


def intersect(edge: tuple[int, int], L: frozenset) -> Response:
    u, v = edge
    iu, iv = u in L, v in L
    if iu and iv:
        return EdgePair(u, v)
    if iu:
        return Lone(u)
    if iv:
        return Lone(v)
    return EMPTY


@dataclass
class Transcript:
    entries: list = field(default_factory=list)
    total_cost: int = 0

    def append(self, L: frozenset, r: Response) -> None:
        self.entries.append((L, r))
        self.total_cost += len(L)

    def __len__(self):
        return len(self.entries)

    def responses(self) -> list:
        return [r for _, r in self.entries]


def cost(transcript: Transcript) -> int:
    return sum(len(L) for L, _ in transcript.entries)


def graph_hash(g: Graph) -> str:
    body = f"{g.n_vertices};" + ";".join(f"{u},{v}" for u, v in g.edge_list)
    return hashlib.blake2b(body.encode(), digest_size=8).hexdigest()


class OracleSession:
    """Oracle bound to a hidden graph; single-threaded."""

    def __init__(self, graph: Graph, seed: int, rng=None):
        if not graph.edges:
            raise EmptyGraphError("the oracle needs a graph with at least one edge")
        self.graph = graph
        self.seed = seed
        self.rng = rng if rng is not None else make_rng(seed, "oracle")
        self.transcript = Transcript()
        self._edges = graph.edge_list

    def _check(self, L: Iterable[int]) -> frozenset:
        L = frozenset(int(v) for v in L)
        n = self.graph.n_vertices
        for v in L:
            if not 1 <= v <= n:
                raise ValueError(f"query vertex {v} outside [1, {n}]")
        return L

    def query(self, L: Iterable[int]) -> Response:
        L = self._check(L)
        e = self._edges[int(self.rng.integers(len(self._edges)))]
        r = intersect(e, L)
        self.transcript.append(L, r)
        return r

    def batch_query(self, queries: Iterable[Iterable[int]]) -> list:
        Ls = [self._check(L) for L in queries]
        if not Ls:
            return []
        idx = self.rng.integers(len(self._edges), size=len(Ls))
        out = []
        for L, i in zip(Ls, idx):
            r = intersect(self._edges[int(i)], L)
            self.transcript.append(L, r)
            out.append(r)
        return out

    def full_queries(self, count: int) -> list:
        """``count`` queries of ``[n]``; a fast path that skips per-query set checks."""
        full = frozenset(range(1, self.graph.n_vertices + 1))
        idx = self.rng.integers(len(self._edges), size=count) if count else []
        out = []
        for i in idx:
            u, v = self._edges[int(i)]
            r = EdgePair(u, v)
            self.transcript.append(full, r)
            out.append(r)
        return out


def query(session: OracleSession, L: Iterable[int]) -> Response:
    return session.query(L)


def batch_query(session: OracleSession, queries) -> list:
    return session.batch_query(queries)


# ---------------------------------------------------------------- dump format

def dump_transcript(session: OracleSession) -> str:
    lines = [f"# seed {session.seed} graph {graph_hash(session.graph)}"]
    for L, r in session.transcript.entries:
        vs = " ".join(str(v) for v in sorted(L))
        lines.append(f"Q {len(L)} {vs} | R {r}".replace("  ", " "))
    return "\n".join(lines) + "\n"


def write_transcript(session: OracleSession, path: str | Path) -> None:
    Path(path).write_text(dump_transcript(session), encoding="ascii")


def parse_transcript(text: str) -> Transcript:
    t = Transcript()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        q, r = line.split("|")
        qt = q.split()
        if qt[0] != "Q":
            raise ValueError(f"bad transcript line {line!r}")
        size = int(qt[1])
        L = frozenset(int(v) for v in qt[2:])
        if len(L) != size:
            raise ValueError(f"query size {size} disagrees with {len(L)} listed vertices")
        rt = r.split()
        if rt[0] != "R":
            raise ValueError(f"bad transcript line {line!r}")
        kind = rt[1]
        if kind == "EMPTY":
            resp: Response = EMPTY
        elif kind == "LONE":
            resp = Lone(int(rt[2]))
        elif kind == "EDGE":
            resp = EdgePair(int(rt[2]), int(rt[3]))
        else:
            raise ValueError(f"unknown response {kind!r}")
        t.append(L, resp)
    return t


def read_transcript(path: str | Path) -> Transcript:
    return parse_transcript(Path(path).read_text(encoding="ascii"))
