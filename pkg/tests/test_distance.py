from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from rejsamp.distance import (dist_between, dist_to_kjunta_exact, dist_to_monotone_exact,
                              dist_to_monotone_exhaustive, dist_to_unate_bruteforce, dist_to_unate_exact,
                              is_monotone, kjunta_costs, monotone_functions, relevant_variables, unate_cost)
from rejsamp.errors import CapacityError
from rejsamp.functions import CallableFunction, TableFunction


def xor12(n):
    return CallableFunction(n, lambda x: x[0] ^ x[1])


def test_dist_between_examples():
    a = TableFunction(2, [0, 0, 0, 0])
    b = TableFunction(2, [0, 1, 1, 1])
    assert dist_between(a, b) == Fraction(3, 4)
    with pytest.raises(ValueError):
        dist_between(a, TableFunction(1, [0, 1]))


def test_junta_examples():
    assert dist_to_kjunta_exact(xor12(3), 1) == Fraction(1, 2)
    assert dist_to_kjunta_exact(xor12(3), 2) == 0
    maj = CallableFunction(3, lambda x: int(sum(x) >= 2))
    assert dist_to_kjunta_exact(maj, 1) == Fraction(1, 4)
    assert dist_to_kjunta_exact(maj, 0) == Fraction(1, 2)


def test_kjunta_costs_matches_scalar():
    rng = np.random.default_rng(1)
    tabs = rng.integers(0, 2, size=(200, 16), dtype=np.uint8)
    for k in range(4):
        batch = kjunta_costs(tabs, k)
        for t, c in zip(tabs[:40], batch[:40]):
            assert Fraction(int(c), 16) == dist_to_kjunta_exact(TableFunction(4, t), k)


def test_monotone_counts():
    # Dedekind numbers.
    assert [len(monotone_functions(n)) for n in range(5)] == [2, 3, 6, 20, 168]
    assert all(is_monotone(t) for t in monotone_functions(3))


def test_monotone_examples():
    assert dist_to_monotone_exact(CallableFunction(1, lambda x: 1 - x[0])) == Fraction(1, 2)
    assert dist_to_monotone_exact(CallableFunction(2, lambda x: x[0] & x[1])) == 0
    assert dist_to_monotone_exact(xor12(2)) == Fraction(1, 4)


def test_mincut_equals_exhaustive_n2_n3():
    for n in (1, 2, 3):
        for bits in product((0, 1), repeat=1 << n):
            t = np.array(bits, dtype=np.uint8)
            assert dist_to_monotone_exact(t) == dist_to_monotone_exhaustive(t)


def test_unate_examples():
    assert dist_to_unate_exact(xor12(2)) == Fraction(1, 4)
    assert dist_to_unate_exact(xor12(6)) == Fraction(1, 4)
    assert dist_to_unate_exact(CallableFunction(3, lambda x: 1 - x[2])) == 0


@pytest.mark.parametrize("seed", range(6))
def test_unate_branch_and_bound_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    n = 4 + seed % 3
    t = rng.integers(0, 2, size=1 << n, dtype=np.uint8)
    assert dist_to_unate_exact(t, reduce=False) == dist_to_unate_bruteforce(t)
    cost, r = unate_cost(t)
    oriented = t[np.arange(t.size) ^ r]
    assert Fraction(cost, t.size) == dist_to_monotone_exact(oriented)


def test_relevant_variables():
    f = CallableFunction(5, lambda x: x[1] ^ x[4])
    assert relevant_variables(f) == [2, 5]


def test_caps():
    with pytest.raises(CapacityError):
        dist_to_monotone_exact(np.zeros(1 << 17, dtype=np.uint8))
    with pytest.raises(CapacityError):
        dist_to_monotone_exhaustive(np.zeros(32, dtype=np.uint8))
    with pytest.raises(CapacityError):
        dist_to_unate_bruteforce(np.zeros(1 << 13, dtype=np.uint8))
