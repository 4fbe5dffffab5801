"""Exact distances between Boolean functions and to junta, monotone and unate classes.

All results are :class:`fractions.Fraction` with a power-of-two denominator
before reduction. Functions may be given as :class:`BooleanFunction`
objects or raw truth tables (see :mod:`rejsamp.functions` for the index
convention).

Monotone distance is a minimum closure problem: pick the up-set ``U`` on
which the repaired function is 1. Source arcs of capacity 1 go to points
with ``f = 1``, sink arcs of capacity 1 leave points with ``f = 0``, and
order arcs ``x -> x + e_j`` carry infinite capacity, so a finite cut is
exactly an up-set and its value is the number of disagreements.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .errors import CapacityError
from .functions import as_table, check_table_size

JUNTA_MAX_BITS = 16
MONOTONE_MAX_BITS = 16
UNATE_MAX_BITS = 16


def _table_n(t: np.ndarray) -> int:
    n = int(t.size).bit_length() - 1
    if t.size != (1 << n):
        raise ValueError("truth table length must be a power of two")
    return n


def dist_between(f, g) -> Fraction:
    a, b = as_table(f), as_table(g)
    if a.shape != b.shape:
        raise ValueError("functions have different arity")
    check_table_size(_table_n(a))
    return Fraction(int(np.count_nonzero(a != b)), a.size)


# ---------------------------------------------------------------- juntas

def _as_cube(t: np.ndarray, n: int) -> np.ndarray:
    # Axis a of the reshaped array is variable x_{n-a}.
    return t.reshape((2,) * n) if n else t.reshape(())


def junta_cost(t: np.ndarray, J) -> int:
    """Disagreements of the best junta on variable set ``J`` (1-indexed)."""
    n = _table_n(t)
    cube = _as_cube(t.astype(np.int32), n)
    drop = tuple(n - j for j in range(1, n + 1) if j not in set(J))
    ones = cube.sum(axis=drop) if drop else cube
    size = 1 << len(drop)
    return int(np.minimum(ones, size - ones).sum())


def dist_to_kjunta_exact(f, k: int) -> Fraction:
    t = as_table(f)
    n = _table_n(t)
    if n > JUNTA_MAX_BITS:
        raise CapacityError(f"junta distance capped at {JUNTA_MAX_BITS} variables, got {n}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k >= n:
        return Fraction(0)
    best = min(junta_cost(t, J) for J in combinations(range(1, n + 1), k))
    return Fraction(best, 1 << n)


def kjunta_costs(tables: np.ndarray, k: int) -> np.ndarray:
    """Row-wise best ``k``-junta disagreement counts for a stack of tables."""
    tables = np.asarray(tables)
    F, size = tables.shape
    n = int(size).bit_length() - 1
    if size != (1 << n):
        raise ValueError("truth table length must be a power of two")
    if n > JUNTA_MAX_BITS:
        raise CapacityError(f"junta distance capped at {JUNTA_MAX_BITS} variables, got {n}")
    if k >= n:
        return np.zeros(F, dtype=np.int64)
    cube = tables.astype(np.int32).reshape((F,) + (2,) * n)
    best = None
    for J in combinations(range(1, n + 1), k):
        drop = tuple(1 + n - j for j in range(1, n + 1) if j not in J)
        ones = cube.sum(axis=drop)
        c = np.minimum(ones, (1 << len(drop)) - ones).reshape(F, -1).sum(axis=1)
        best = c if best is None else np.minimum(best, c)
    return best


def relevant_variables(f) -> list[int]:
    t = as_table(f)
    n = _table_n(t)
    idx = np.arange(t.size, dtype=np.int64)
    return [j for j in range(1, n + 1) if np.any(t != t[idx ^ (1 << (j - 1))])]


def restrict_to(t: np.ndarray, keep: list[int]) -> np.ndarray:
    """Table of ``f`` viewed as a function of ``keep`` only (others fixed to 0)."""
    k = len(keep)
    sub = np.arange(1 << k, dtype=np.int64)
    full = np.zeros_like(sub)
    for pos, j in enumerate(keep):
        full |= ((sub >> pos) & 1) << (j - 1)
    return t[full]


# ---------------------------------------------------------------- monotone

@lru_cache(maxsize=64)
def _flow_structure(n: int, dims: frozenset):
    """CSR skeleton for the closure network restricted to order arcs along ``dims``."""
    size = 1 << n
    src, snk = size, size + 1
    pts = np.arange(size, dtype=np.int64)
    rows = [np.full(size, src), pts]
    cols = [pts, np.full(size, snk)]
    for j in sorted(dims):
        lo = pts[(pts >> j) & 1 == 0]
        rows.append(lo)
        cols.append(lo | (1 << j))
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    order = np.lexsort((c, r))
    r, c = r[order], c[order]
    indptr = np.searchsorted(r, np.arange(size + 3)).astype(np.int32)
    # Positions of the source and sink arcs inside the sorted arc list.
    src_pos = np.flatnonzero(r == src)
    snk_pos = np.flatnonzero(c == snk)
    order_mask = (r < size) & (c < size)
    return indptr, c.astype(np.int32), src_pos, c[src_pos], snk_pos, r[snk_pos], order_mask


def _mincut(t: np.ndarray, n: int, dims: frozenset) -> int:
    indptr, indices, src_pos, src_to, snk_pos, snk_from, order_mask = _flow_structure(n, dims)
    size = 1 << n
    data = np.zeros(indices.size, dtype=np.int32)
    data[order_mask] = size + 1
    data[src_pos] = t[src_to]
    data[snk_pos] = 1 - t[snk_from].astype(np.int32)
    # Zero-capacity arcs are harmless to the solver but keep the skeleton fixed.
    g = csr_matrix((data, indices, indptr), shape=(size + 2, size + 2))
    return int(maximum_flow(g, size, size + 1).flow_value)


def monotone_cost(t: np.ndarray) -> int:
    """Minimum number of points to change to make table ``t`` monotone."""
    n = _table_n(t)
    if n == 0:
        return 0
    return _mincut(t.astype(np.int32), n, frozenset(range(n)))


def dist_to_monotone_exact(f) -> Fraction:
    t = as_table(f)
    n = _table_n(t)
    if n > MONOTONE_MAX_BITS:
        raise CapacityError(f"monotone distance capped at {MONOTONE_MAX_BITS} variables, got {n}")
    return Fraction(monotone_cost(t), 1 << n)


@lru_cache(maxsize=None)
def monotone_functions(n: int) -> tuple:
    """All monotone tables on ``n <= 4`` variables (exhaustive filter)."""
    if n > 4:
        raise CapacityError("exhaustive monotone enumeration is capped at 4 variables")
    size = 1 << n
    if n <= 3:
        cands = ((np.arange(1 << size)[:, None] >> np.arange(size)) & 1).astype(np.uint8)
        return tuple(c for c in cands if _is_monotone(c, n))
    # n = 4: build from pairs of monotone 3-variable tables with lower <= upper.
    low = monotone_functions(3)
    return tuple(np.concatenate([a, b]) for a in low for b in low if np.all(a <= b))


@lru_cache(maxsize=None)
def _monotone_matrix(n: int) -> np.ndarray:
    return np.array(monotone_functions(n))


def _is_monotone(t: np.ndarray, n: int) -> bool:
    idx = np.arange(t.size)
    for j in range(n):
        lo = idx[(idx >> j) & 1 == 0]
        if np.any(t[lo] > t[lo | (1 << j)]):
            return False
    return True


def is_monotone(f) -> bool:
    t = as_table(f)
    return _is_monotone(t, _table_n(t))


def dist_to_monotone_exhaustive(f) -> Fraction:
    t = as_table(f)
    n = _table_n(t)
    mons = _monotone_matrix(n)
    return Fraction(int((mons != t).sum(axis=1).min()), 1 << n)


# ---------------------------------------------------------------- unate

def _oriented(t: np.ndarray, r: int) -> np.ndarray:
    return t[np.arange(t.size, dtype=np.int64) ^ r]


def unate_cost_bruteforce(t: np.ndarray) -> int:
    n = _table_n(t)
    return min(monotone_cost(_oriented(t, r)) for r in range(1 << n))


def _violations(t: np.ndarray, n: int, j: int) -> tuple[int, int]:
    idx = np.arange(t.size)
    lo = idx[(idx >> j) & 1 == 0]
    a, b = t[lo], t[lo | (1 << j)]
    return int(np.count_nonzero(a > b)), int(np.count_nonzero(a < b))


def unate_cost(t: np.ndarray) -> tuple[int, int]:
    """``(cost, r)``: least disagreements with a unate function and one optimal orientation.

    Branch and bound over orientations. Fixing the direction of a subset of
    coordinates and dropping the order arcs of the rest relaxes the closure
    problem, so its min cut is a lower bound for every completion.
    """
    n = _table_n(t)
    if n == 0:
        return 0, 0
    t = t.astype(np.int32)
    # Most-constrained coordinates first; greedy orientation seeds the bound.
    viol = [_violations(t, n, j) for j in range(n)]
    order = sorted(range(n), key=lambda j: -abs(viol[j][0] - viol[j][1]) - min(viol[j]))
    r0 = sum(1 << j for j in range(n) if viol[j][0] > viol[j][1])
    best = [monotone_cost(_oriented(t, r0)), r0]

    def visit(depth: int, r: int):
        fixed = frozenset(order[:depth])
        if depth == n:
            c = _mincut(_oriented(t, r), n, fixed)
            if c < best[0]:
                best[0], best[1] = c, r
            return
        j = order[depth]
        prefer = 1 if viol[j][0] > viol[j][1] else 0
        for bit in (prefer, 1 - prefer):
            r2 = r | (bit << j)
            lb = _mincut(_oriented(t, r2), n, fixed | {j}) if depth + 1 < n else None
            if lb is not None and lb >= best[0]:
                continue
            visit(depth + 1, r2)

    visit(0, 0)
    return best[0], best[1]


def dist_to_unate_exact(f, reduce: bool = True) -> Fraction:
    """Exact distance to the unate class.

    With ``reduce`` the table is first restricted to its relevant
    variables, which leaves the distance unchanged.
    """
    t = as_table(f)
    n = _table_n(t)
    if reduce:
        keep = relevant_variables(t)
        t = restrict_to(t, keep)
        k = len(keep)
    else:
        k = n
    if k > UNATE_MAX_BITS:
        raise CapacityError(f"unate distance capped at {UNATE_MAX_BITS} relevant variables, got {k}")
    cost, _ = unate_cost(t)
    return Fraction(cost << (n - k), 1 << n)


def dist_to_unate_bruteforce(f) -> Fraction:
    t = as_table(f)
    n = _table_n(t)
    if n > 12:
        raise CapacityError("orientation brute force capped at 12 variables")
    return Fraction(unate_cost_bruteforce(t), 1 << n)
