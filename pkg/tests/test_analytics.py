import pytest

from rejsamp.analytics import (balance_statistic, consistency, decompose, event_EF, event_ET, event_report,
                               w_statistic)
from rejsamp.graphs import GraphFamily, Partition, build_graph, sample_partition
from rejsamp.oracle import EMPTY, EdgePair, Lone, OracleSession, Transcript


def tr(*responses, L=frozenset({1})):
    t = Transcript()
    for r in responses:
        t.append(L, r)
    return t


def test_decompose_examples():
    assert decompose(Transcript()).components == ()
    d = decompose(tr(EdgePair(1, 2), EdgePair(2, 3)))
    (c,) = d.components
    assert c.root == 1 and c.layers == (frozenset({1}), frozenset({2}), frozenset({3}))
    assert c.odd == {1, 3} and c.even == {2} and c.acyclic
    d = decompose(tr(EdgePair(1, 2), EdgePair(3, 4)))
    assert [len(c.vertices) for c in d.components] == [2, 2]


def test_event_ET():
    assert event_ET(decompose(Transcript()), 16)
    assert not event_ET(decompose(tr(EdgePair(1, 2), EdgePair(2, 3), EdgePair(1, 3))), 1024)
    path9 = tr(*[EdgePair(i, i + 1) for i in range(1, 9)])
    assert not event_ET(decompose(path9), 256)
    path7 = tr(*[EdgePair(i, i + 1) for i in range(1, 7)])
    assert event_ET(decompose(path7), 256)


def test_event_EF():
    assert event_EF(tr(EMPTY, EMPTY), 16)
    assert not event_EF(tr(Lone(1), Lone(2)), 16)
    # floor(16 / 4**4) = 0, so a single non-empty response already violates the bound.
    assert not event_EF(tr(Lone(1)), 16)
    assert not event_EF(tr(*[Lone(1)] * 10), 1 << 16)
    assert event_EF(tr(Lone(1)), 1 << 16)


def test_consistency_examples():
    A = Partition(4, frozenset({1, 2}))
    d = decompose(tr(EdgePair(1, 2)))
    assert consistency(d, A, GraphFamily.TWO_CLIQUES)
    assert not consistency(d, A, GraphFamily.COMPLETE_BIPARTITE)
    d = decompose(tr(EdgePair(1, 2), EdgePair(2, 3)))
    assert consistency(d, Partition(4, frozenset({1, 3})), GraphFamily.COMPLETE_BIPARTITE)


def test_balance_examples():
    A = Partition(10, frozenset({1, 2, 3, 4, 5}))
    assert balance_statistic(tr(EMPTY), A) == (0, True)
    B, _ = balance_statistic(tr(Lone(1), L=frozenset({1, 2, 3, 4, 5})), A)
    assert B == -5


def test_w_examples():
    A = Partition(4, frozenset({1, 3}))
    assert w_statistic(decompose(Transcript()), A) == (0, 0, True)
    W, V, _ = w_statistic(decompose(tr(EdgePair(1, 2))), A)
    assert (W, V) == (1, 2)


@pytest.mark.parametrize("seed", range(40))
def test_real_partition_always_consistent(seed, family):
    p = sample_partition(12, seed)
    s = OracleSession(build_graph(p, family), seed)
    for k in range(30):
        s.query(range(1, 1 + (seed + k) % 12 + 1))
    rep = event_report(s.transcript, p)
    assert (rep.e_C_no if family is GraphFamily.TWO_CLIQUES else rep.e_C_yes)
