import warnings

import pytest

from rejsamp.distinguisher import Verdict
from rejsamp.fidelity import (LocalAdaptiveTester, fidelity_core, junta_fidelity, local_batch, triparity_region,
                              unate_adaptive_fidelity, unate_nonadaptive_fidelity)
from rejsamp.functions import TableFunction
from rejsamp.graphs import GraphFamily, build_graph, sample_partition
from rejsamp.junta import gamma_M
from rejsamp.oracle import EdgePair, Lone, OracleSession
from rejsamp.reductions import (QueryBatch, group_queries_junta, group_queries_unate, lift_junta_tester,
                                lift_padding, nonadaptive_query_cap, parse_query, run_junta_reduction,
                                run_unate_adaptive_reduction, run_unate_nonadaptive_reduction, sample_M,
                                simulate_junta_answers, simulate_unate_answers)
from rejsamp.unate import sample_unate_core

M8 = (1, 2, 3, 4)  # inside 8 variables; Mbar = 5..8


def session(n=4, family=GraphFamily.TWO_CLIQUES, seed=0):
    return OracleSession(build_graph(sample_partition(n, seed), family), seed)


def test_parse_query():
    assert parse_query("0110") == (0, 1, 1, 0)
    with pytest.raises(ValueError):
        parse_query("01x")
    with pytest.raises(ValueError):
        QueryBatch(["01", "011"])


def test_junta_grouping_examples():
    assert len(group_queries_junta(QueryBatch(["10100101", "10100101"]), M8)) == 1
    g = group_queries_junta(QueryBatch(["10100101", "10100111"]), M8)
    assert len(g) == 1 and g[0].L == frozenset({7})
    assert len(group_queries_junta(QueryBatch(["10100101", "00100101"]), M8)) == 2


def test_junta_groups_partition_batch():
    b = local_batch(16, 24, 3)
    M = sample_M(16, 3)
    groups = group_queries_junta(b, M)
    members = sorted(a for g in groups for a in g.members)
    assert members == list(range(24))


def test_junta_first_half_is_parity_and_free():
    b = QueryBatch(["01100101", "01101010"])  # first M bit 0 -> first half
    s = session()
    ans = simulate_junta_answers(group_queries_junta(b, M8), b, s, M8, seed=0)
    assert ans.bits == [0, 0] and ans.cost == 0 and len(s.transcript) == 0


@pytest.mark.parametrize("seed", range(30))
def test_junta_parity_classes_and_cost(seed):
    # Four queries in one second-half group differing on all of Mbar.
    qs = ["1010" + "".join(map(str, w)) for w in [(0, 0, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0), (1, 1, 1, 1)]]
    b = QueryBatch(qs)
    groups = group_queries_junta(b, M8)
    s = session(seed=seed)
    ans = simulate_junta_answers(groups, b, s, M8, seed=seed)
    assert ans.cost == sum(len(g.L) for g in groups if 2 * g.gamma > 16) == s.transcript.total_cost
    v = ans.responses[0]
    for a, za in enumerate(b.queries):
        for c, zc in enumerate(b.queries):
            if isinstance(v, EdgePair):
                same = za[v.u + 3] ^ za[v.v + 3] == zc[v.u + 3] ^ zc[v.v + 3]
            elif isinstance(v, Lone):
                same = za[v.v + 3] == zc[v.v + 3]
            else:
                same = True
            assert (ans.bits[a] == ans.bits[c]) == same


def test_constant_testers():
    b = QueryBatch(["10100101"])
    assert run_junta_reduction(lambda r: True, b, session(), M8, 0).verdict is Verdict.OutputG1
    assert run_junta_reduction(lambda r: False, b, session(), M8, 0).verdict is Verdict.OutputG2


def test_adaptive_cost_is_q_times_n():
    for q in (0, 1, 5):
        s = session(8)
        res = run_unate_adaptive_reduction(lambda ask: True, s, q, seed=1)
        assert res.cost == q * 8 and res.verdict is Verdict.OutputG2 and res.answers == []
    s = session(8)
    tester = LocalAdaptiveTester(16, 4, 0)
    res = run_unate_adaptive_reduction(lambda ask: tester.transcript(ask) and False, s, 4, seed=2)
    assert res.cost == 32 and len(res.answers) == 4 and res.verdict is Verdict.OutputG1


def test_adaptive_budget_enforced():
    with pytest.raises(RuntimeError):
        run_unate_adaptive_reduction(lambda ask: [ask("0" * 16) for _ in range(3)], session(8), 2, seed=0)


def test_unate_grouping_examples():
    big = sample_unate_core(64, 0)
    g = group_queries_unate(QueryBatch(["1" * 64, "0" * 64]), big)
    assert g.plus == [0] and g.minus == [1]
    core = sample_unate_core(16, 0)
    b = local_batch(16, 12, 0)
    groups = group_queries_unate(b, core)
    assert sorted(groups.all_members()) == list(range(12))
    Mbar = set(core.Mbar)
    for grp in groups.indexed:
        assert grp.L | grp.Lbar0 | grp.Lbar1 == Mbar
        assert not (grp.Lbar0 & grp.Lbar1) and not (grp.L & (grp.Lbar0 | grp.Lbar1))
        if len(grp.members) == 1:
            assert not grp.L


def test_nonadaptive_cost_ledger_and_warning():
    core = fidelity_core(16, 0)
    b = local_batch(16, 8, 0, keep_base=triparity_region(core))
    s = session(8)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        res = run_unate_nonadaptive_reduction(lambda r: True, b, s, core, seed=0)
    assert res.verdict is Verdict.OutputG2
    assert res.cost == s.transcript.total_cost
    assert any("exceed" in str(x.message) for x in w) == (8 > nonadaptive_query_cap(8))


def test_lone_case_with_equal_members_gives_equal_bits():
    core = fidelity_core(16, 1)
    b = local_batch(16, 1, 1, keep_base=triparity_region(core))
    z = b.queries[0]
    b2 = QueryBatch([z, z, z])
    groups = group_queries_unate(b2, core)
    for seed in range(20):
        ans = simulate_unate_answers(groups, b2, session(8, seed=seed), core, seed=seed)
        assert len(set(ans.bits)) == 1


def test_lift_padding():
    assert lift_padding(0.75, 40) == 0
    assert lift_padding(0.5, 40) == 0
    assert lift_padding(0.875, 8) == 8
    with pytest.raises(ValueError):
        lift_padding(1, 8)


def test_lift_tester_passthrough():
    f = TableFunction(2, [0, 1, 1, 0])
    seen = {}

    def tester(g, k):
        seen["n"], seen["k"] = g.n, k
        return True

    assert lift_junta_tester(tester, 0.75, f) is True and seen == {"n": 2, "k": 2}
    lift_junta_tester(tester, 0.875, f, tester_size=8)
    assert seen == {"n": 8, "k": 7}


def test_fidelity_small_runs(family):
    # Quick sanity at small sample sizes; the full-size checks live in the acceptance suite.
    M = sample_M(16, 0)
    Mbar = [j for j in range(1, 17) if j not in M]
    b = local_batch(16, 6, 0, cluster=3, keep_base=lambda z: 2 * gamma_M(z, M) > 256)
    assert junta_fidelity(b, M, Mbar[:4], family, 4000, 0, bootstrap=0).tv.tv < 0.1
    core = fidelity_core(16, 0)
    tester = LocalAdaptiveTester(16, 4, 0, triparity_region(core))
    assert unate_adaptive_fidelity(tester, core, family, 3000, 0, bootstrap=0).tv.tv < 0.08
    b = local_batch(16, 4, 0, keep_base=triparity_region(core))
    assert unate_nonadaptive_fidelity(b, core, family, 3000, 0, bootstrap=0).tv.tv < 0.08
