"""Reductions from Boolean-function testers to rejection sampling.

Each reduction answers the queries of a function tester over ``2n``
variables using rejection sampling queries to a hidden ``n``-vertex graph.
Half of the variables (``M``) are sampled locally; the other half (``Mbar``)
is identified with the graph's vertices in sorted order, so vertex ``k`` is
variable ``Mbar[k-1]``.

Queries are bit sequences (``z[j-1]`` is variable ``j``) or strings of
``0``/``1`` in the same order.
"""

from __future__ import annotations

import math
import warnings
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .distinguisher import Verdict
from .errors import DegenerateGroupError
from .functions import BooleanFunction, pad_dummy, pad_parity
from .junta import gamma_M
from .oracle import EdgePair, Lone, OracleSession
from .rng import make_rng
from .unate import (ExplicitTerms, OneStar, UnateCore, ZeroStar, band_value)
from .util import ceil_log2


def parse_query(z) -> tuple[int, ...]:
    if isinstance(z, str):
        s = z.strip()
        if set(s) - {"0", "1"}:
            raise ValueError(f"query {z!r} is not a bitstring")
        return tuple(int(c) for c in s)
    return tuple(int(b) & 1 for b in z)


@dataclass
class QueryBatch:
    queries: list

    def __post_init__(self):
        self.queries = [parse_query(z) for z in self.queries]
        if len({len(z) for z in self.queries}) > 1:
            raise ValueError("all queries must have the same length")

    @property
    def nvars(self) -> int:
        return len(self.queries[0]) if self.queries else 0

    def __len__(self):
        return len(self.queries)


def read_batch(path) -> QueryBatch:
    with open(path, encoding="ascii") as fh:
        return QueryBatch([ln.strip() for ln in fh if ln.strip()])


def _bstr(z) -> str:
    return "".join(map(str, z))


def _vertex_maps(Mbar: Sequence[int]):
    to_vertex = {j: k for k, j in enumerate(sorted(Mbar), start=1)}
    to_var = {k: j for j, k in to_vertex.items()}
    return to_vertex, to_var


@dataclass
class SimulatedAnswers:
    bits: list
    cost: int
    responses: list = field(default_factory=list)


# ---------------------------------------------------------------- juntas

@dataclass
class JuntaGroup:
    key: tuple
    members: list
    L: frozenset
    gamma: int


def group_queries_junta(batch: QueryBatch, M: Iterable[int]) -> list[JuntaGroup]:
    """Group by the projection on ``M``; ``L`` collects ``Mbar`` coordinates where members disagree."""
    M = tuple(sorted(M))
    nv = batch.nvars
    Ms = set(M)
    Mbar = [j for j in range(1, nv + 1) if j not in Ms]
    buckets: OrderedDict = OrderedDict()
    for a, z in enumerate(batch.queries):
        buckets.setdefault(tuple(z[j - 1] for j in M), []).append(a)
    groups = []
    for key, members in buckets.items():
        L = frozenset(j for j in Mbar if len({batch.queries[a][j - 1] for a in members}) > 1)
        groups.append(JuntaGroup(key, members, L, gamma_M(batch.queries[members[0]], M)))
    return groups


def simulate_junta_answers(groups: list[JuntaGroup], batch: QueryBatch, session: OracleSession,
                           M: Iterable[int], seed: int | None = None, rng=None) -> SimulatedAnswers:
    M = tuple(sorted(M))
    nv = batch.nvars
    N = 1 << len(M)
    Mbar = [j for j in range(1, nv + 1) if j not in set(M)]
    to_vertex, to_var = _vertex_maps(Mbar)
    rng = rng if rng is not None else make_rng(seed, "junta-sim")
    bits = [0] * len(batch)
    cost0 = session.transcript.total_cost
    responses = []
    for g in groups:
        zs = [batch.queries[a] for a in g.members]
        if 2 * g.gamma <= N:
            for a, z in zip(g.members, zs):
                bits[a] = sum(z[j - 1] for j in M) & 1
            continue
        v = session.query(to_vertex[j] for j in g.L)
        responses.append(v)
        r = int(rng.integers(2))
        for a, z in zip(g.members, zs):
            if isinstance(v, EdgePair):
                bits[a] = r ^ z[to_var[v.u] - 1] ^ z[to_var[v.v] - 1]
            elif isinstance(v, Lone):
                bits[a] = r ^ z[to_var[v.v] - 1]
            else:
                bits[a] = r
    return SimulatedAnswers(bits, session.transcript.total_cost - cost0, responses)


@dataclass
class ReductionResult:
    verdict: Verdict
    answers: list
    cost: int


def run_junta_reduction(tester: Callable[[tuple], bool], batch: QueryBatch, session: OracleSession,
                        M: Iterable[int], seed: int | None = None) -> ReductionResult:
    """Accepting testers map to ``OutputG1`` (the junta-close side is the two-cliques side)."""
    groups = group_queries_junta(batch, M)
    ans = simulate_junta_answers(groups, batch, session, M, seed)
    accept = bool(tester(tuple(ans.bits)))
    return ReductionResult(Verdict.OutputG1 if accept else Verdict.OutputG2, ans.bits, ans.cost)


def sample_M(nvars: int, seed: int) -> tuple[int, ...]:
    rng = make_rng(seed, "reduction-M", nvars)
    return tuple(sorted(int(v) for v in rng.choice(np.arange(1, nvars + 1), size=nvars // 2, replace=False)))


# ---------------------------------------------------------------- unate, adaptive

class _Coins:
    """Adapter giving a numpy generator the ``bit``/``randbelow`` interface."""

    def __init__(self, rng):
        self.rng = rng

    def bit(self) -> int:
        return int(self.rng.integers(2))

    def randbelow(self, m: int) -> int:
        return int(self.rng.integers(m))


def run_unate_adaptive_reduction(tester: Callable[[Callable], bool], session: OracleSession, q: int,
                                 seed: int, core: UnateCore | None = None) -> ReductionResult:
    """All ``q`` queries of ``Mbar`` are issued up front, so the cost is exactly ``q * n``.

    ``tester(ask)`` calls ``ask(z)`` at most ``q`` times and returns True to accept.
    Accepting maps to ``OutputG2`` (the unate-close side is complete bipartite).
    """
    n = session.graph.n_vertices
    nvars = 2 * n
    rng = make_rng(seed, "unate-adaptive")
    if core is None:
        from .unate import sample_unate_core
        core = sample_unate_core(nvars, int(rng.integers(1 << 62)), lazy=False)
    if not isinstance(core.terms, ExplicitTerms):
        raise ValueError("the adaptive reduction needs an explicit term list")
    _, to_var = _vertex_maps(core.Mbar)
    cost0 = session.transcript.total_cost
    edges, j3s, js = [], [], []
    full = range(1, n + 1)
    for _ in range(q):
        v = session.query(full)
        edges.append((to_var[v.u], to_var[v.v]))
        j3s.append(core.m1 if rng.integers(2) == 0 else core.m2)
        js.append(core.m1 if rng.integers(2) == 0 else core.m2)
    p1: dict[int, int] = {}
    p2: dict[int, int] = {}
    answers: list[int] = []

    def ask(z) -> int:
        if len(answers) >= q:
            raise RuntimeError(f"tester exceeded its budget of {q} queries")
        z = parse_query(z)
        if len(z) != nvars:
            raise ValueError(f"query length {len(z)} != {nvars}")
        xm = sum(b << j for j, b in enumerate(z))
        r = core.route(xm)
        if isinstance(r, tuple):
            out = r[1]
        elif r is ZeroStar:
            out = 0
        elif r is OneStar:
            out = 1
        elif core.first_block(r):
            t = p1.setdefault(r, len(p1))
            j = js[t]
            out = z[j - 1] if j == core.m1 else 1 - z[j - 1]
        else:
            t = p2.setdefault(r, len(p2))
            j1, j2 = edges[t]
            j3 = j3s[t]
            # Same sign convention as the function definition: negate when j3 = m2.
            out = z[j1 - 1] ^ z[j2 - 1] ^ z[j3 - 1] ^ int(j3 == core.m2)
        answers.append(out)
        return out

    accept = bool(tester(ask))
    cost = session.transcript.total_cost - cost0
    return ReductionResult(Verdict.OutputG2 if accept else Verdict.OutputG1, answers, cost)


# ---------------------------------------------------------------- unate, non-adaptive

@dataclass
class UnateGroup:
    index: int
    members: list
    L: frozenset
    Lbar0: frozenset
    Lbar1: frozenset


@dataclass
class UnateGroups:
    minus: list
    plus: list
    zero: list
    one: list
    indexed: list

    def all_members(self) -> list:
        out = self.minus + self.plus + self.zero + self.one
        for g in self.indexed:
            out += g.members
        return out


def group_queries_unate(batch: QueryBatch, core: UnateCore) -> UnateGroups:
    nv = batch.nvars
    if nv != core.nvars:
        raise ValueError("batch length does not match the core")
    masks = [sum(b << j for j, b in enumerate(z)) for z in batch.queries]
    Mmask = core.M_mask
    minus, plus, band_idx = [], [], []
    for a, xm in enumerate(masks):
        b = band_value(bin(xm & Mmask).count("1"), nv)
        if b == 0:
            minus.append(a)
        elif b == 1:
            plus.append(a)
        else:
            band_idx.append(a)
    gam = core.terms.gamma_batch([masks[a] for a in band_idx])
    zero, one = [], []
    buckets: OrderedDict = OrderedDict()
    for a, g in zip(band_idx, gam):
        if g is ZeroStar:
            zero.append(a)
        elif g is OneStar:
            one.append(a)
        else:
            buckets.setdefault(g, []).append(a)
    Mbar = core.Mbar
    indexed = []
    for i, members in buckets.items():
        L = frozenset(j for j in Mbar if len({batch.queries[a][j - 1] for a in members}) > 1)
        z0 = batch.queries[members[0]]
        rest = [j for j in Mbar if j not in L]
        indexed.append(UnateGroup(i, members, L,
                                  frozenset(j for j in rest if z0[j - 1] == 0),
                                  frozenset(j for j in rest if z0[j - 1] == 1)))
    return UnateGroups(minus, plus, zero, one, indexed)


def simulate_unate_answers(groups: UnateGroups, batch: QueryBatch, session: OracleSession, core: UnateCore,
                           seed: int | None = None, rng=None) -> SimulatedAnswers:
    n = session.graph.n_vertices
    to_vertex, to_var = _vertex_maps(core.Mbar)
    rng = rng if rng is not None else make_rng(seed, "unate-sim")
    bits = [0] * len(batch)
    for a in groups.plus + groups.one:
        bits[a] = 1
    cost0 = session.transcript.total_cost
    gate = n // ceil_log2(n)
    m1, m2 = core.m1, core.m2
    responses = []
    for g in groups.indexed:
        zs = [batch.queries[a] for a in g.members]
        if core.first_block(g.index):
            j = m1 if rng.integers(2) == 0 else m2
            for a, z in zip(g.members, zs):
                bits[a] = z[j - 1] if j == m1 else 1 - z[j - 1]
            continue
        Lq = g.L if len(g.L) <= gate else frozenset(core.Mbar)
        v = session.query(to_vertex[j] for j in Lq)
        responses.append(v)
        j3 = m1 if rng.integers(2) == 0 else m2
        neg = int(j3 == m2)
        z1 = min(zs, key=_bstr)
        if isinstance(v, EdgePair):
            j1, j2 = to_var[v.u], to_var[v.v]
            for a, z in zip(g.members, zs):
                bits[a] = z[j1 - 1] ^ z[j2 - 1] ^ z[j3 - 1] ^ neg
            continue
        lbar = len(g.Lbar0) + len(g.Lbar1)
        if lbar == 0:
            raise DegenerateGroupError(f"group for index {g.index} has no fixed coordinates")
        if isinstance(v, Lone):
            j2 = to_var[v.v]
            w = 1 - z1[j2 - 1]
            p = len(g.Lbar1 if w else g.Lbar0) / lbar
            b = int(rng.random() < p)
            c = b ^ z1[j2 - 1] ^ neg
            for a, z in zip(g.members, zs):
                bits[a] = c ^ z[j2 - 1] ^ z[j3 - 1]
        else:
            p = 2 * len(g.Lbar0) * len(g.Lbar1) / (lbar * lbar)
            b = int(rng.random() < p)
            for a, z in zip(g.members, zs):
                bits[a] = b ^ neg ^ z[j3 - 1]
    return SimulatedAnswers(bits, session.transcript.total_cost - cost0, responses)


def nonadaptive_query_cap(n: int) -> float:
    return n ** 1.5 / ceil_log2(n) ** 8


def run_unate_nonadaptive_reduction(tester: Callable[[tuple], bool], batch: QueryBatch, session: OracleSession,
                                    core: UnateCore, seed: int | None = None) -> ReductionResult:
    """Accepting maps to ``OutputG2``."""
    n = session.graph.n_vertices
    if len(batch) > nonadaptive_query_cap(n):
        warnings.warn(f"{len(batch)} queries exceed n^1.5/log^8 n = {nonadaptive_query_cap(n):.3g}", stacklevel=2)
    groups = group_queries_unate(batch, core)
    ans = simulate_unate_answers(groups, batch, session, core, seed)
    accept = bool(tester(tuple(ans.bits)))
    return ReductionResult(Verdict.OutputG2 if accept else Verdict.OutputG1, ans.bits, ans.cost)


# ---------------------------------------------------------------- tester lifting

def _as_fraction(alpha) -> Fraction:
    return Fraction(str(alpha)) if isinstance(alpha, float) else Fraction(alpha)


def lift_padding(alpha, n: int) -> int:
    """Number of parity variables ``max(ceil((4a - 3) n / (4 (1 - a))), 0)``."""
    a = _as_fraction(alpha)
    if a >= 1:
        raise ValueError("alpha must be < 1")
    return max(math.ceil((4 * a - 3) * n / (4 * (1 - a))), 0)


def lift_junta_tester(tester: Callable[[BooleanFunction, int], bool], alpha, f: BooleanFunction,
                      tester_size: int | None = None) -> bool:
    """Run a tester for ``ceil(alpha m)``-juntas on ``m`` variables against ``f``.

    ``f`` gets ``lift_padding`` parity variables, then dummy variables up to
    ``tester_size`` (default: no dummies).
    """
    extra = lift_padding(alpha, f.n)
    g = pad_parity(f, extra)
    m = g.n if tester_size is None else tester_size
    if m < g.n:
        raise ValueError(f"tester size {m} is below the padded arity {g.n}")
    g = pad_dummy(g, m - g.n)
    k = math.ceil(_as_fraction(alpha) * m)
    return bool(tester(g, k))
