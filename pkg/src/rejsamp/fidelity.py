"""Two-sided sampling of answer laws for the reduction TV suites.

For each reduction the simulated side runs the reduction against a fresh
hidden graph, and the direct side evaluates a freshly drawn hard function
on the same queries. Both sides share the conditioning data (``M`` and
``A`` for juntas; the core ``M, m1, m2, T`` for unateness).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graphs import GraphFamily, build_graph, build_graph_on, Partition
from .junta import gamma_M
from .oracle import OracleSession
from .reductions import (QueryBatch, _Coins, _vertex_maps, group_queries_junta, group_queries_unate,
                         run_unate_adaptive_reduction, simulate_junta_answers,
                         simulate_unate_answers)
from .rng import KeyedStream, derive_seed, make_rng
from .stats import TVEstimate, tv_with_bootstrap
from .unate import OneStar, UnateCore, apply_spec, draw_unate_spec, sample_unate_core


def local_batch(nvars: int, q: int, seed: int, cluster: int = 4, keep_base=None) -> QueryBatch:
    """Balanced queries in clusters: a uniform base of weight ``nvars/2``
    followed by copies with one 1 and one 0 swapped.

    ``keep_base(z)`` optionally rejects bases (e.g. to stay off deterministic regions).
    """
    rng = make_rng(seed, "local-batch", nvars, q)
    out = []
    while len(out) < q:
        base = np.zeros(nvars, dtype=np.uint8)
        base[rng.choice(nvars, size=nvars // 2, replace=False)] = 1
        if keep_base is not None and not keep_base(tuple(int(b) for b in base)):
            continue
        out.append(tuple(int(b) for b in base))
        for _ in range(cluster - 1):
            if len(out) >= q:
                break
            z = base.copy()
            i = int(rng.choice(np.flatnonzero(z == 1)))
            j = int(rng.choice(np.flatnonzero(z == 0)))
            z[i], z[j] = 0, 1
            out.append(tuple(int(b) for b in z))
    return QueryBatch(out)


class LocalAdaptiveTester:
    """A fixed adaptive decision tree: each query swaps one 1 and one 0 of the
    previous query, with the swap keyed by the answers so far."""

    def __init__(self, nvars: int, q: int, seed: int, keep_base=None):
        self.nvars, self.q, self.seed = nvars, q, seed
        self.base = local_batch(nvars, 1, derive_seed(seed, "adaptive-tester"), 1, keep_base).queries[0]

    @lru_cache(maxsize=None)
    def query_after(self, answers: tuple) -> tuple:
        if not answers:
            return self.base
        z = list(self.query_after(answers[:-1]))
        s = KeyedStream(self.seed, "adaptive-tester-node", "".join(map(str, answers)))
        ones = [i for i, b in enumerate(z) if b]
        zeros = [i for i, b in enumerate(z) if not b]
        i, j = ones[s.randbelow(len(ones))], zeros[s.randbelow(len(zeros))]
        z[i], z[j] = 0, 1
        return tuple(z)

    def transcript(self, ask) -> tuple:
        answers: tuple = ()
        for _ in range(self.q):
            answers += (int(ask(self.query_after(answers))),)
        return answers

    def __call__(self, ask) -> bool:
        return sum(self.transcript(ask)) % 2 == 0


@dataclass
class FidelityResult:
    tv: TVEstimate
    runs: int
    simulated: Counter
    direct: Counter


def _finish(sim: Counter, direct: Counter, runs: int, seed: int, bootstrap: int) -> FidelityResult:
    return FidelityResult(tv_with_bootstrap(sim, direct, bootstrap=bootstrap, seed=seed), runs, sim, direct)


def triparity_region(core: UnateCore):
    """Predicate: the query routes to an index whose subfunction is a 3-parity."""
    def keep(z) -> bool:
        r = core.route(sum(b << j for j, b in enumerate(z)))
        return isinstance(r, int) and not core.first_block(r)
    return keep


def reachable_triparity(core: UnateCore) -> bool:
    """Whether some 3-parity index is the unique satisfied term of some input."""
    masks = core.terms.masks
    for i in range(3 * core.N // 4 + 1, core.N + 1):
        if all(m & masks[i - 1] != masks[i - 1] for k, m in enumerate(masks, 1) if k != i):
            return True
    return False


def fidelity_core(nvars: int, seed: int, tries: int = 1000) -> UnateCore:
    """First core (by derived seed) with a reachable 3-parity region."""
    for t in range(tries):
        core = sample_unate_core(nvars, derive_seed(seed, "fidelity-core", t), lazy=False)
        if reachable_triparity(core):
            return core
    raise RuntimeError("no core with a reachable 3-parity region")


# ---------------------------------------------------------------- juntas

def junta_fidelity(batch: QueryBatch, M, A, family: GraphFamily, runs: int, seed: int,
                   bootstrap: int = 200) -> FidelityResult:
    """``A`` is a subset of ``Mbar`` (variables), ``|A| = |Mbar|/2``."""
    nv = batch.nvars
    M = tuple(sorted(M))
    Mbar = [j for j in range(1, nv + 1) if j not in set(M)]
    to_vertex, _ = _vertex_maps(Mbar)
    n = len(Mbar)
    graph_vars = build_graph_on(Mbar, A, family, nv)
    graph_verts = build_graph(Partition(n, frozenset(to_vertex[j] for j in A)), family)

    groups = group_queries_junta(batch, M)
    rng = make_rng(seed, "junta-fidelity-sim")
    sim = Counter()
    for _ in range(runs):
        session = OracleSession(graph_verts, 0, rng=rng)
        sim[tuple(simulate_junta_answers(groups, batch, session, M, rng=rng).bits)] += 1

    # Direct side: a fresh H per run, drawn only at the indices the batch touches.
    N = 1 << len(M)
    drng = make_rng(seed, "junta-fidelity-direct")
    edges = np.array(graph_vars.edge_list)
    Z = np.array(batch.queries, dtype=np.int64)
    cols = np.zeros((runs, len(batch)), dtype=np.int64)
    gammas = [gamma_M(z, M) for z in batch.queries]
    par = Z[:, [j - 1 for j in M]].sum(axis=1) & 1
    draws = {}
    for g in sorted(set(gammas)):
        if 2 * g > N:
            draws[g] = (edges[drng.integers(len(edges), size=runs)], drng.integers(2, size=runs))
    for a, g in enumerate(gammas):
        if 2 * g <= N:
            cols[:, a] = par[a]
        else:
            e, r = draws[g]
            cols[:, a] = Z[a, e[:, 0] - 1] ^ Z[a, e[:, 1] - 1] ^ r
    direct = Counter(map(tuple, cols.tolist()))
    return _finish(sim, direct, runs, seed, bootstrap)


# ---------------------------------------------------------------- unateness

@lru_cache(maxsize=4096)
def _graph_cached(n: int, A: frozenset, family: GraphFamily):
    return build_graph(Partition(n, A), family)


def _random_half(rng, items) -> frozenset:
    items = np.array(sorted(items))
    return frozenset(int(v) for v in rng.choice(items, size=len(items) // 2, replace=False))


class _DirectUnate:
    """A fresh unate hard function over a fixed core with lazily drawn subfunctions."""

    def __init__(self, core: UnateCore, family: GraphFamily, rng):
        Mbar = core.Mbar
        to_vertex, to_var = _vertex_maps(Mbar)
        n = len(Mbar)
        Av = _random_half(rng, range(1, n + 1))
        gv = _graph_cached(n, Av, family)
        self.edges = [(to_var[u], to_var[v]) for u, v in gv.edge_list]
        self.core, self.coins, self.memo = core, _Coins(rng), {}

    def __call__(self, z) -> int:
        xm = sum(b << j for j, b in enumerate(z))
        r = self.core.route(xm)
        if isinstance(r, tuple):
            return r[1]
        if not isinstance(r, int):
            return int(r is OneStar)
        spec = self.memo.get(r)
        if spec is None:
            spec = draw_unate_spec(self.coins, self.core, _EdgeView(self.edges), r)
            self.memo[r] = spec
        return apply_spec(spec, xm)


class _EdgeView:
    def __init__(self, edges):
        self.edge_list = edges


def unate_adaptive_fidelity(tester: LocalAdaptiveTester, core: UnateCore, family: GraphFamily, runs: int,
                            seed: int, bootstrap: int = 200) -> FidelityResult:
    n = len(core.Mbar)
    rng = make_rng(seed, "unate-adaptive-fidelity-sim")
    sim = Counter()
    for t in range(runs):
        g = _graph_cached(n, _random_half(rng, range(1, n + 1)), family)
        session = OracleSession(g, 0, rng=rng)
        out = []
        run_unate_adaptive_reduction(lambda ask: out.append(tester.transcript(ask)) or True,
                                     session, tester.q, derive_seed(seed, "run", t), core=core)
        sim[out[0]] += 1
    drng = make_rng(seed, "unate-adaptive-fidelity-direct")
    direct = Counter()
    for _ in range(runs):
        f = _DirectUnate(core, family, drng)
        direct[tester.transcript(f)] += 1
    return _finish(sim, direct, runs, seed, bootstrap)


def unate_nonadaptive_fidelity(batch: QueryBatch, core: UnateCore, family: GraphFamily, runs: int,
                               seed: int, bootstrap: int = 200) -> FidelityResult:
    n = len(core.Mbar)
    groups = group_queries_unate(batch, core)
    rng = make_rng(seed, "unate-nonadaptive-fidelity-sim")
    sim = Counter()
    for _ in range(runs):
        g = _graph_cached(n, _random_half(rng, range(1, n + 1)), family)
        session = OracleSession(g, 0, rng=rng)
        sim[tuple(simulate_unate_answers(groups, batch, session, core, rng=rng).bits)] += 1
    drng = make_rng(seed, "unate-nonadaptive-fidelity-direct")
    direct = Counter()
    for _ in range(runs):
        f = _DirectUnate(core, family, drng)
        direct[tuple(f(z) for z in batch.queries)] += 1
    return _finish(sim, direct, runs, seed, bootstrap)

