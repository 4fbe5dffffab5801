"""Hard functions for tolerant unateness testing.

An instance fixes a half-size set ``M``, two special variables ``m1, m2`` in
``M`` and ``N`` random conjunctive terms over the rest of ``M``. The
multiplexer sends an input to the unique term it satisfies (or to one of two
star values). Inputs with ``|x_M|`` outside a band around ``n/4`` are
decided by that weight alone. Indexed inputs are answered by a dictator
``x_m1``, an anti-dictator ``not x_m2``, or a three-variable parity on an
edge of the hidden graph together with ``m1`` or ``m2``.

Variables are 1-indexed. Internally inputs and terms are integer bitmasks
with bit ``j-1`` for ``x_j``.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .distance import monotone_functions
from .functions import BooleanFunction, check_table_size, index_bits, index_of
from .graphs import Graph, GraphFamily, build_graph_on
from .rng import KeyedStream, make_rng
from .stats import wilson_interval
from .util import ceil_sqrt, floor_sqrt

EXPLICIT_TERMS_MAX = 1 << 22


class Star(enum.Enum):
    ZERO = "0*"
    ONE = "1*"


ZeroStar, OneStar = Star.ZERO, Star.ONE


@dataclass(frozen=True)
class Dictator:
    j: int


@dataclass(frozen=True)
class AntiDictator:
    j: int


@dataclass(frozen=True)
class TriParity:
    j1: int
    j2: int
    j3: int
    negate: int


def mask_of(vars_: Iterable[int]) -> int:
    m = 0
    for j in vars_:
        m |= 1 << (j - 1)
    return m


def vars_of(mask: int) -> list[int]:
    out, j = [], 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


# ---------------------------------------------------------------- terms

def sample_terms(M_core: Iterable[int], count: int, term_size: int, seed: int) -> list[frozenset]:
    """``count`` independent uniform ``term_size``-subsets of ``M_core``."""
    core = np.array(sorted(M_core), dtype=np.int64)
    if term_size > core.size:
        raise ValueError(f"term size {term_size} exceeds |M_core| = {core.size}")
    if term_size < 0 or count < 0:
        raise ValueError("term size and count must be nonnegative")
    rng = make_rng(seed, "terms", count, term_size)
    out: list[frozenset] = []
    chunk = max(1, (1 << 22) // max(1, core.size))
    for start in range(0, count, chunk):
        c = min(chunk, count - start)
        keys = rng.random((c, core.size))
        pick = np.argpartition(keys, term_size - 1, axis=1)[:, :term_size] if term_size else np.zeros((c, 0), int)
        out.extend(frozenset(int(v) for v in core[row]) for row in pick)
    return out


class ExplicitTerms:
    """Materialised term list with a multiplexer over bitmask inputs."""

    def __init__(self, terms: Sequence[Iterable[int]]):
        self.terms = [frozenset(t) for t in terms]
        self.masks = [mask_of(t) for t in self.terms]
        self.N = len(self.terms)

    def gamma(self, x_mask: int):
        hit = None
        for i, t in enumerate(self.masks, start=1):
            if t & x_mask == t:
                if hit is not None:
                    return OneStar
                hit = i
        return ZeroStar if hit is None else hit

    def gamma_batch(self, x_masks: Sequence[int]) -> list:
        return [self.gamma(x) for x in x_masks]


class LazyTerms:
    """Exact term sampling restricted to what a fixed batch of inputs can see.

    Only terms contained in the one-set of some input matter. Candidates come
    from the mixture over inputs (weight ``C(|O_a|, s)``), each slot of the
    ``N`` proposing with probability ``sum_a C(|O_a|, s) / C(|core|, s)``;
    a candidate ``T`` is kept with probability ``1/c(T)`` where ``c(T)``
    counts inputs containing it. Kept terms are then iid uniform over the
    union and their number is ``Binomial(N, |union| / C(|core|, s))``, which
    is the law of the relevant terms among ``N`` independent ones.
    """

    def __init__(self, M_core: Iterable[int], N: int, term_size: int, seed: int):
        self.core = sorted(M_core)
        self.core_mask = mask_of(self.core)
        self.N, self.s, self.seed = N, term_size, seed
        if term_size > len(self.core):
            raise ValueError(f"term size {term_size} exceeds |M_core| = {len(self.core)}")

    def gamma_batch(self, x_masks: Sequence[int]) -> list:
        rng = make_rng(self.seed, "lazy-terms")
        s = self.s
        ones = [x & self.core_mask for x in x_masks]
        weights = [comb(bin(o).count("1"), s) for o in ones]
        total = comb(len(self.core), s)
        wsum = sum(weights)
        if wsum == 0:
            return [ZeroStar] * len(x_masks)
        if wsum > total:
            terms = sample_terms(self.core, self.N, s, self.seed)
            return ExplicitTerms(terms).gamma_batch(x_masks)
        k = int(rng.binomial(self.N, wsum / total))
        p = np.array(weights, dtype=float) / wsum
        kept: list[int] = []
        for _ in range(k):
            a = int(rng.choice(len(ones), p=p))
            pool = vars_of(ones[a])
            T = mask_of(int(v) for v in rng.choice(pool, size=s, replace=False)) if s else 0
            c = sum(1 for o in ones if T & o == T)
            if rng.random() * c < 1:
                kept.append(T)
        idx = _distinct_indices(rng, self.N, len(kept))
        out = []
        for x in ones:
            hits = [i for i, T in zip(idx, kept) if T & x == T]
            out.append(ZeroStar if not hits else OneStar if len(hits) > 1 else hits[0])
        return out


def _distinct_indices(rng, N: int, k: int) -> list[int]:
    seen: set[int] = set()
    out = []
    while len(out) < k:
        i = int(rng.integers(1, N + 1))
        if i not in seen:
            seen.add(i)
            out.append(i)
    return out


def default_term_size(nvars: int) -> int:
    return ceil_sqrt(nvars)


def default_num_terms(nvars: int) -> int:
    return 1 << ceil_sqrt(nvars)


def band_value(weight: int, nvars: int):
    """Clause decided by ``|x_M|`` alone: 1 above the band, 0 below, None inside."""
    r = floor_sqrt(nvars)
    if 4 * weight > nvars + 4 * r:
        return 1
    if 4 * weight < nvars - 4 * r:
        return 0
    return None


@dataclass(frozen=True)
class UnateCore:
    """The part shared by both hard distributions: ``M``, ``m1``, ``m2`` and the terms."""

    nvars: int
    M: tuple
    m1: int
    m2: int
    N: int
    term_size: int
    terms: object  # ExplicitTerms or LazyTerms

    @property
    def Mbar(self) -> tuple:
        Ms = set(self.M)
        return tuple(j for j in range(1, self.nvars + 1) if j not in Ms)

    @property
    def M_core(self) -> tuple:
        return tuple(j for j in self.M if j not in (self.m1, self.m2))

    @property
    def M_mask(self) -> int:
        return mask_of(self.M)

    def route(self, x_mask: int):
        """Band clause (0/1 tagged ``"band"``), a star, or a multiplexer index."""
        w = bin(x_mask & self.M_mask).count("1")
        b = band_value(w, self.nvars)
        if b is not None:
            return ("band", b)
        return self.terms.gamma(x_mask) if isinstance(self.terms, ExplicitTerms) else None

    def first_block(self, i: int) -> bool:
        return 4 * i <= 3 * self.N


def sample_unate_core(nvars: int, seed: int, term_size: int | None = None,
                      num_terms: int | None = None, lazy: bool | None = None) -> UnateCore:
    if nvars < 4 or nvars % 2:
        raise ValueError(f"the variable count must be even and >= 4, got {nvars}")
    s = default_term_size(nvars) if term_size is None else term_size
    N = default_num_terms(nvars) if num_terms is None else num_terms
    if N < 4 or N % 4:
        raise ValueError("the number of terms must be a positive multiple of 4")
    rng = make_rng(seed, "unate-core", nvars)
    perm = rng.permutation(np.arange(1, nvars + 1))
    M = tuple(sorted(int(v) for v in perm[: nvars // 2]))
    m1, m2 = (int(v) for v in rng.choice(M, size=2, replace=False))
    core = [j for j in M if j not in (m1, m2)]
    if s > len(core):
        raise ValueError(f"term size {s} exceeds |M| - 2 = {len(core)}; pass a smaller term_size")
    if lazy is None:
        lazy = N > EXPLICIT_TERMS_MAX
    tseed = int(rng.integers(1 << 62))
    terms = LazyTerms(core, N, s, tseed) if lazy else ExplicitTerms(sample_terms(core, N, s, tseed))
    return UnateCore(nvars, M, m1, m2, N, s, terms)


# ---------------------------------------------------------------- instance

class UnateInstance(BooleanFunction):
    def __init__(self, core: UnateCore, A: Iterable[int], family: GraphFamily, seed: int):
        if not isinstance(core.terms, ExplicitTerms):
            raise ValueError("a queryable instance needs an explicit term list")
        self.core = core
        self.n = core.nvars
        self.M, self.m1, self.m2, self.N = core.M, core.m1, core.m2, core.N
        self.terms = core.terms
        self.Mbar = core.Mbar
        self.A = frozenset(A)
        if not self.A <= set(self.Mbar) or 2 * len(self.A) != len(self.Mbar):
            raise ValueError("A must be a half-size subset of Mbar")
        self.family = family
        self.seed = seed
        self.graph: Graph = build_graph_on(self.Mbar, self.A, family, self.n)
        self._memo: dict[int, object] = {}
        self._lock = threading.Lock()

    def subfunction(self, i: int):
        if not 1 <= i <= self.N:
            raise ValueError(f"index {i} outside [1, {self.N}]")
        spec = self._memo.get(i)
        if spec is None:
            with self._lock:
                spec = self._memo.get(i)
                if spec is None:
                    spec = draw_unate_spec(KeyedStream(self.seed, "unate-h", i), self.core, self.graph, i)
                    self._memo[i] = spec
        return spec

    def gamma(self, x: Sequence[int]):
        self._check(x)
        return self.terms.gamma(index_of(x))

    def __call__(self, x: Sequence[int]) -> int:
        self._check(x)
        return self.eval_mask(index_of(x))

    def eval_mask(self, xm: int) -> int:
        r = self.core.route(xm)
        if isinstance(r, tuple):
            return r[1]
        if r is ZeroStar:
            return 0
        if r is OneStar:
            return 1
        return apply_spec(self.subfunction(r), xm)

    # -- vectorised tables

    def _route_table(self, bits: np.ndarray) -> np.ndarray:
        """Per input: -1 band-0, -2 band-1, -3 zero-star, -4 one-star, else the index."""
        size = bits.shape[1]
        w = bits[list(self.M)].sum(axis=0, dtype=np.int64)
        r = floor_sqrt(self.n)
        above = 4 * w > self.n + 4 * r
        below = 4 * w < self.n - 4 * r
        count = np.zeros(size, dtype=np.int64)
        which = np.zeros(size, dtype=np.int64)
        for i, t in enumerate(self.terms.terms, start=1):
            sat = np.ones(size, dtype=bool)
            for j in t:
                sat &= bits[j].astype(bool)
            count += sat
            which = np.where(sat, i, which)
        route = np.where(count == 0, -3, np.where(count >= 2, -4, which))
        route = np.where(below, -1, np.where(above, -2, route))
        return route

    def _eval_table(self, bits: np.ndarray, route: np.ndarray, spec_of) -> np.ndarray:
        out = np.zeros(bits.shape[1], dtype=np.uint8)
        out[route == -2] = 1
        out[route == -4] = 1
        for i in np.unique(route[route > 0]):
            sel = route == i
            out[sel] = spec_table(spec_of(int(i)), bits[:, sel])
        return out

    def truth_table(self) -> np.ndarray:
        check_table_size(self.n)
        bits = index_bits(self.n)
        return self._eval_table(bits, self._route_table(bits), self.subfunction)

    def route_table(self) -> np.ndarray:
        return self._route_table(index_bits(self.n))

    def descriptor(self) -> str:
        lines = [
            "kind unate", f"n {self.n}",
            "M " + " ".join(map(str, self.M)), f"m1 {self.m1}", f"m2 {self.m2}",
            "A " + " ".join(map(str, sorted(self.A))),
            f"family {self.family.value}", f"seed {self.seed}", f"terms {self.N}",
        ]
        lines += [" ".join(map(str, sorted(t))) for t in self.terms.terms]
        return "\n".join(lines) + "\n"


def read_unate_descriptor(text_or_path) -> UnateInstance:
    text = Path(text_or_path).read_text() if isinstance(text_or_path, Path) else str(text_or_path)
    lines = text.splitlines()
    kv, terms = {}, []
    i = 0
    while i < len(lines):
        parts = lines[i].split()
        i += 1
        if not parts:
            continue
        kv[parts[0]] = parts[1:]
        if parts[0] == "terms":
            count = int(parts[1])
            terms = [frozenset(int(v) for v in lines[i + t].split()) for t in range(count)]
            break
    n = int(kv["n"][0])
    M = tuple(int(v) for v in kv["M"])
    tsize = len(next(iter(terms))) if terms else 0
    core = UnateCore(n, M, int(kv["m1"][0]), int(kv["m2"][0]), len(terms), tsize, ExplicitTerms(terms))
    return UnateInstance(core, [int(v) for v in kv["A"]], GraphFamily.parse(kv["family"][0]), int(kv["seed"][0]))


def draw_unate_spec(stream, core: UnateCore, graph: Graph, i: int):
    """Subfunction ``h_i`` from a stream exposing ``bit()`` and ``randbelow(m)``."""
    if core.first_block(i):
        return Dictator(core.m1) if stream.bit() == 0 else AntiDictator(core.m2)
    edges = graph.edge_list
    j1, j2 = edges[stream.randbelow(len(edges))]
    j3 = core.m1 if stream.bit() == 0 else core.m2
    return TriParity(j1, j2, j3, int(j3 == core.m2))


def apply_spec(spec, xm: int) -> int:
    if isinstance(spec, Dictator):
        return (xm >> (spec.j - 1)) & 1
    if isinstance(spec, AntiDictator):
        return 1 - ((xm >> (spec.j - 1)) & 1)
    if isinstance(spec, TriParity):
        b = (xm >> (spec.j1 - 1)) ^ (xm >> (spec.j2 - 1)) ^ (xm >> (spec.j3 - 1))
        return (b & 1) ^ spec.negate
    if isinstance(spec, RepairedGadget):
        a = (xm >> (spec.j1 - 1)) & 1
        b = (xm >> (spec.j2 - 1)) & 1
        c = (xm >> (spec.j3 - 1)) & 1
        return (spec.table >> (a | (b << 1) | (c << 2))) & 1
    raise TypeError(f"unknown spec {spec!r}")


def spec_table(spec, bits: np.ndarray) -> np.ndarray:
    if isinstance(spec, Dictator):
        return bits[spec.j]
    if isinstance(spec, AntiDictator):
        return 1 - bits[spec.j]
    if isinstance(spec, TriParity):
        return bits[spec.j1] ^ bits[spec.j2] ^ bits[spec.j3] ^ spec.negate
    if isinstance(spec, RepairedGadget):
        code = bits[spec.j1].astype(np.int64) | (bits[spec.j2].astype(np.int64) << 1) | (bits[spec.j3].astype(np.int64) << 2)
        lut = np.array([(spec.table >> c) & 1 for c in range(8)], dtype=np.uint8)
        return lut[code]
    raise TypeError(f"unknown spec {spec!r}")


def sample_unate_instance(n: int, family: GraphFamily, seed: int, term_size: int | None = None,
                          num_terms: int | None = None) -> UnateInstance:
    core = sample_unate_core(n, seed, term_size, num_terms, lazy=False)
    return instance_from_core(core, family, seed)


def instance_from_core(core: UnateCore, family: GraphFamily, seed: int) -> UnateInstance:
    Mbar = core.Mbar
    if len(Mbar) % 2:
        raise ValueError(f"|Mbar| = {len(Mbar)} must be even to split the graph in half")
    rng = make_rng(seed, "unate-A", core.nvars)
    A = sorted(int(v) for v in rng.choice(np.array(Mbar), size=len(Mbar) // 2, replace=False))
    return UnateInstance(core, A, family, seed)


# ---------------------------------------------------------------- gamma

def _in_index_region(core: UnateCore, xm: int) -> bool:
    r = core.route(xm)
    return isinstance(r, int) and not isinstance(r, bool)


def exact_gamma(inst: UnateInstance) -> Fraction:
    """Exact probability that a uniform input is routed to a subfunction index."""
    M = list(inst.M)
    m = len(M)
    if m > 24:
        raise ValueError("exact gamma enumerates 2**(n/2) projections; n/2 is capped at 24")
    hits = 0
    for p in range(1 << m):
        xm = 0
        for t, j in enumerate(M):
            if (p >> t) & 1:
                xm |= 1 << (j - 1)
        hits += _in_index_region(inst.core, xm)
    return Fraction(hits, 1 << m)


@dataclass
class GammaEstimate:
    estimate: float
    ci_low: float
    ci_high: float
    samples: int


def estimate_gamma(inst: UnateInstance, samples: int, seed: int = 0) -> GammaEstimate:
    if samples < 1000:
        raise ValueError("gamma estimation needs at least 1000 samples")
    rng = make_rng(seed, "gamma", inst.n)
    M = np.array(inst.M, dtype=np.int64)
    hits = 0
    for row in rng.integers(0, 2, size=(samples, len(M))):
        xm = 0
        for bit, j in zip(row, M):
            if bit:
                xm |= 1 << (int(j) - 1)
        hits += _in_index_region(inst.core, xm)
    lo, hi = wilson_interval(hits, samples)
    return GammaEstimate(hits / samples, lo, hi, samples)


# ---------------------------------------------------------------- witness

@dataclass(frozen=True)
class RepairedGadget:
    """Three-variable table over ``(x_j1, x_j2, x_j3)``, bit ``a + 2b + 4c``."""

    j1: int
    j2: int
    j3: int
    table: int


_MONO3 = [int(sum(int(v) << k for k, v in enumerate(t))) for t in monotone_functions(3)]


def _gadget_table(negate: int) -> int:
    return sum((((c & 1) ^ ((c >> 1) & 1) ^ ((c >> 2) & 1) ^ negate) << c) for c in range(8))


def repair_gadget(spec: TriParity, orient: tuple[int, int, int]) -> tuple[RepairedGadget, Fraction]:
    """Closest three-variable function that is monotone after flipping the ``orient`` bits.

    Ties go to the smallest table integer. Returns the gadget and its distance
    to the parity it replaces.
    """
    target = _gadget_table(spec.negate)
    flip = orient[0] | (orient[1] << 1) | (orient[2] << 2)
    best = None
    for mono in _MONO3:
        table = sum(((mono >> (c ^ flip)) & 1) << c for c in range(8))
        d = bin(table ^ target).count("1")
        if best is None or (d, table) < best:
            best = (d, table)
    d, table = best
    return RepairedGadget(spec.j1, spec.j2, spec.j3, table), Fraction(d, 8)


class UnateWitness(BooleanFunction):
    """The instance with every parity gadget replaced by its repaired table.

    Orientation: variables of ``M`` other than ``m2`` and the set ``S`` are
    non-decreasing; ``m2`` and ``Mbar \\ S`` are non-increasing.
    """

    def __init__(self, inst: UnateInstance, S: Iterable[int]):
        S = frozenset(S)
        if not S <= set(inst.Mbar):
            raise ValueError("S must lie inside Mbar")
        self.inst, self.S, self.n = inst, S, inst.n
        self._repaired: dict[int, tuple] = {}

    def orientation(self) -> int:
        """Bitmask ``r`` such that ``x -> g(x xor r)`` should be monotone."""
        r = 1 << (self.inst.m2 - 1)
        for j in self.inst.Mbar:
            if j not in self.S:
                r |= 1 << (j - 1)
        return r

    def repaired(self, i: int):
        spec = self.inst.subfunction(i)
        if not isinstance(spec, TriParity):
            return spec, Fraction(0)
        if i not in self._repaired:
            o = (int(spec.j1 not in self.S), int(spec.j2 not in self.S), int(spec.j3 == self.inst.m2))
            self._repaired[i] = repair_gadget(spec, o)
        return self._repaired[i]

    def region_distance(self, i: int) -> Fraction:
        return self.repaired(i)[1]

    def __call__(self, x):
        self._check(x)
        xm = index_of(x)
        r = self.inst.core.route(xm)
        if isinstance(r, tuple):
            return r[1]
        if r is ZeroStar:
            return 0
        if r is OneStar:
            return 1
        return apply_spec(self.repaired(r)[0], xm)

    def truth_table(self):
        check_table_size(self.n)
        bits = index_bits(self.n)
        return self.inst._eval_table(bits, self.inst._route_table(bits), lambda i: self.repaired(i)[0])


def witness_unate(inst: UnateInstance, S: Iterable[int]) -> UnateWitness:
    return UnateWitness(inst, S)
