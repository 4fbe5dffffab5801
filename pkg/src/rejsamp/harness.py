"""Configuration-driven experiment suites with CSV reports.

Configs are flat ``key=value`` text (``#`` starts a comment). Every suite
returns a :class:`Report` whose header echoes the full config, the package
version and the PRNG identifier, so identical configs give identical files.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .analytics import event_report
from .distance import dist_to_kjunta_exact, dist_to_unate_exact
from .distinguisher import Verdict, default_repetitions, run_trial
from .errors import RejsampError
from .fidelity import (LocalAdaptiveTester, fidelity_core, junta_fidelity, local_batch, triparity_region,
                       unate_adaptive_fidelity, unate_nonadaptive_fidelity)
from .graphs import GraphFamily, build_graph, chi_junta, chi_unate, sample_partition
from .junta import gamma_M, sample_junta_instance
from .oracle import OracleSession
from .reductions import sample_M
from .rng import PRNG_ID, derive_seed, make_rng
from .stats import wilson_half_width
from .unate import sample_unate_instance
from .util import ceil_log2

SUITES = ("advantage", "tv-junta", "tv-unate-adaptive", "tv-unate-nonadaptive",
          "distance-trend", "event-frequency", "chi-table")

# Defaults per suite; thresholds default to the acceptance values.
DEFAULTS = {
    "advantage": {"n": 64, "trials": 500, "reps": 0, "family": "auto",
                  "min_advantage": 0.9, "max_half_width": 0.05, "max_g2_false_positives": 0},
    "tv-junta": {"n": 8, "q": 6, "runs": 100000, "bootstrap": 200, "max_tv": 0.02},
    "tv-unate-adaptive": {"n": 8, "q": 4, "runs": 100000, "bootstrap": 200, "max_tv": 0.02},
    "tv-unate-nonadaptive": {"n": 8, "q": 4, "runs": 100000, "bootstrap": 200, "max_tv": 0.05},
    "distance-trend": {"junta_n": "8,12", "unate_n": "16", "trials": 50},
    "event-frequency": {"n": 1024, "trials": 200, "family": "g1", "budget": 0, "c": 1.0,
                        "min_prob_T": 0.9, "min_prob_F": 0.9, "min_prob_B": 0.9},
    "chi-table": {"n": "8,12,16,20"},
}
COMMON = {"seed": 0, "out": ""}


class ConfigError(RejsampError, ValueError):
    pass


def parse_config_text(text: str) -> dict:
    out = {}
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _coerce(default, raw):
    if isinstance(raw, str):
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    return raw


@dataclass
class ExperimentConfig:
    suite: str
    params: dict = field(default_factory=dict)

    @classmethod
    def build(cls, suite: str, overrides: dict | None = None) -> "ExperimentConfig":
        if suite not in DEFAULTS:
            raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
        base = {**COMMON, **DEFAULTS[suite]}
        for k, v in (overrides or {}).items():
            if k == "suite":
                continue
            if k not in base:
                raise ConfigError(f"unknown key {k!r} for suite {suite}")
            try:
                base[k] = _coerce(base[k], v)
            except ValueError as e:
                raise ConfigError(f"bad value for {k}: {v!r}") from e
        for k in ("trials", "runs"):
            if k in base and int(base[k]) < 1:
                raise ConfigError(f"{k} must be >= 1")
        return cls(suite, base)

    def __getitem__(self, k):
        return self.params[k]


@dataclass
class Report:
    config: ExperimentConfig
    columns: list
    rows: list
    summary: dict
    checks: dict  # name -> bool

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# rejsamp {__version__}\n# prng {PRNG_ID}\n# suite {self.config.suite}\n")
        for k in sorted(self.config.params):
            buf.write(f"# config {k}={self.config.params[k]}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in self.columns])
        for k, v in self.summary.items():
            buf.write(f"# summary {k}={_fmt(v)}\n")
        for k, v in self.checks.items():
            buf.write(f"# check {k}={'pass' if v else 'fail'}\n")
        return buf.getvalue()

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def _fmt(v):
    if isinstance(v, float):
        return repr(round(v, 12))
    return str(v)


def _pool_map(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# ---------------------------------------------------------------- suites

def _advantage_task(args):
    n, fam, reps, seed, t = args
    return run_trial("odd-cycle", n, GraphFamily(fam), reps, seed, t)


def suite_advantage(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    n, trials, seed = cfg["n"], cfg["trials"], cfg["seed"]
    reps = cfg["reps"] or default_repetitions(n)
    fams = ([GraphFamily.TWO_CLIQUES, GraphFamily.COMPLETE_BIPARTITE] if cfg["family"] == "auto"
            else [GraphFamily.parse(cfg["family"])])
    rows = []
    for fam in fams:
        rows += _pool_map(_advantage_task, [(n, fam.value, reps, seed, t) for t in range(trials)], jobs)
    hits = {f: sum(r["verdict"] == Verdict.OutputG1.value for r in rows if r["family"] == f.value) for f in fams}
    summary, checks = {"reps": reps}, {}
    for f in fams:
        summary[f"p_{f.value}"] = hits[f] / trials
        summary[f"half_width_{f.value}"] = wilson_half_width(hits[f], trials)
    if GraphFamily.COMPLETE_BIPARTITE in fams:
        checks["one_sided"] = hits[GraphFamily.COMPLETE_BIPARTITE] <= cfg["max_g2_false_positives"]
    if len(fams) == 2:
        adv = summary["p_g1"] - summary["p_g2"]
        hw = math.hypot(summary["half_width_g1"], summary["half_width_g2"])
        summary.update(advantage=adv, half_width=hw)
        checks["advantage"] = adv >= cfg["min_advantage"]
        checks["half_width"] = hw <= cfg["max_half_width"]
    cols = ["trial", "family", "verdict", "cost", "odd_cycle_found"]
    return Report(cfg, cols, rows, summary, checks)


def _tv_rows(res, family: GraphFamily) -> list:
    keys = sorted(set(res.simulated) | set(res.direct))
    return [{"family": family.value, "answers": "".join(map(str, k)),
             "simulated": res.simulated.get(k, 0), "direct": res.direct.get(k, 0)} for k in keys]


def _tv_report(cfg, results) -> Report:
    rows, summary, checks = [], {}, {}
    for fam, res in results:
        rows += _tv_rows(res, fam)
        summary[f"tv_{fam.value}"] = res.tv.tv
        summary[f"tv_ci_low_{fam.value}"] = res.tv.ci_low
        summary[f"tv_ci_high_{fam.value}"] = res.tv.ci_high
        checks[f"tv_{fam.value}"] = res.tv.tv <= cfg["max_tv"]
    return Report(cfg, ["family", "answers", "simulated", "direct"], rows, summary, checks)


def junta_tv_setup(n: int, q: int, seed: int):
    """Fixed ``M``, ``A`` and batch; cluster bases are kept off the parity half."""
    nv = 2 * n
    M = sample_M(nv, seed)
    Mbar = [j for j in range(1, nv + 1) if j not in set(M)]
    A = sorted(int(v) for v in make_rng(seed, "tv-junta-A").choice(Mbar, size=n // 2, replace=False))
    N = 1 << n
    batch = local_batch(nv, q, seed, cluster=3, keep_base=lambda z: 2 * gamma_M(z, M) > N)
    return M, A, batch


def suite_tv_junta(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    M, A, batch = junta_tv_setup(cfg["n"], cfg["q"], cfg["seed"])
    results = [(fam, junta_fidelity(batch, M, A, fam, cfg["runs"], cfg["seed"], cfg["bootstrap"]))
               for fam in GraphFamily]
    return _tv_report(cfg, results)


def suite_tv_unate_adaptive(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    core = fidelity_core(2 * cfg["n"], cfg["seed"])
    tester = LocalAdaptiveTester(2 * cfg["n"], cfg["q"], cfg["seed"], triparity_region(core))
    results = [(fam, unate_adaptive_fidelity(tester, core, fam, cfg["runs"], cfg["seed"], cfg["bootstrap"]))
               for fam in GraphFamily]
    return _tv_report(cfg, results)


def suite_tv_unate_nonadaptive(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    core = fidelity_core(2 * cfg["n"], cfg["seed"])
    batch = local_batch(2 * cfg["n"], cfg["q"], cfg["seed"], keep_base=triparity_region(core))
    results = [(fam, unate_nonadaptive_fidelity(batch, core, fam, cfg["runs"], cfg["seed"], cfg["bootstrap"]))
               for fam in GraphFamily]
    return _tv_report(cfg, results)


def _distance_task(args):
    kind, n, fam, seed, t = args
    s = derive_seed(seed, "distance-trend", kind, n, t)
    family = GraphFamily(fam)
    if kind == "junta":
        d = dist_to_kjunta_exact(sample_junta_instance(n, family, s), 3 * n // 4)
    else:
        d = dist_to_unate_exact(sample_unate_instance(n, family, s))
    return {"kind": kind, "n": n, "family": fam, "trial": t, "distance": str(d), "value": float(d)}


def _int_list(s) -> list[int]:
    return [int(v) for v in str(s).split(",") if v.strip()]


def suite_distance_trend(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    tasks = []
    plan = [("junta", n) for n in _int_list(cfg["junta_n"])] + [("unate", n) for n in _int_list(cfg["unate_n"])]
    for kind, n in plan:
        for fam in GraphFamily:
            tasks += [(kind, n, fam.value, cfg["seed"], t) for t in range(cfg["trials"])]
    rows = _pool_map(_distance_task, tasks, jobs)
    summary, checks = {}, {}
    for kind, n in plan:
        med = {}
        for fam in GraphFamily:
            med[fam] = statistics.median(Fraction(r["distance"]) for r in rows
                                         if r["kind"] == kind and r["n"] == n and r["family"] == fam.value)
            summary[f"median_{kind}_{n}_{fam.value}"] = str(med[fam])
        far = GraphFamily.COMPLETE_BIPARTITE if kind == "junta" else GraphFamily.TWO_CLIQUES
        near = GraphFamily.TWO_CLIQUES if kind == "junta" else GraphFamily.COMPLETE_BIPARTITE
        checks[f"trend_{kind}_{n}"] = med[far] > med[near]
    return Report(cfg, ["kind", "n", "family", "trial", "distance", "value"], rows, summary, checks)


def event_budget(n: int) -> int:
    return max(1, n * n // ceil_log2(n) ** 6)


def _event_task(args):
    n, fam, budget, c, seed, t = args
    s = derive_seed(seed, "event-frequency", t)
    part = sample_partition(n, derive_seed(s, "partition"))
    session = OracleSession(build_graph(part, GraphFamily(fam)), derive_seed(s, "oracle"))
    rng = make_rng(s, "schedule")
    size = max(1, n // ceil_log2(n))
    left = budget
    while left > 0:
        k = min(size, left)
        session.query(int(v) for v in rng.choice(n, size=k, replace=False) + 1)
        left -= k
    rep = event_report(session.transcript, part, c)
    return {"trial": t, "cost": rep.cost, "nonempty": rep.nonempty, "e_T": int(rep.e_T), "e_F": int(rep.e_F),
            "B": rep.B, "e_B": int(rep.e_B), "e_C": int(rep.e_C_no if fam == "g1" else rep.e_C_yes),
            "W": rep.W_A_no, "V": rep.V, "e_W": int(rep.e_W)}


def suite_event_frequency(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    n, trials = cfg["n"], cfg["trials"]
    fam = GraphFamily.parse(cfg["family"]).value
    budget = cfg["budget"] or event_budget(n)
    rows = _pool_map(_event_task, [(n, fam, budget, cfg["c"], cfg["seed"], t) for t in range(trials)], jobs)
    summary = {"budget": budget}
    checks = {}
    for ev in ("T", "F", "B", "C", "W"):
        p = sum(r[f"e_{ev}"] for r in rows) / trials
        summary[f"prob_{ev}"] = p
        if f"min_prob_{ev}" in cfg.params:
            checks[f"prob_{ev}"] = p >= cfg[f"min_prob_{ev}"]
    cols = ["trial", "cost", "nonempty", "e_T", "e_F", "B", "e_B", "e_C", "W", "V", "e_W"]
    return Report(cfg, cols, rows, summary, checks)


def suite_chi_table(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    rows, checks = [], {}
    expected = {GraphFamily.TWO_CLIQUES: Fraction(1, 2), GraphFamily.COMPLETE_BIPARTITE: Fraction(3, 4)}
    for n in _int_list(cfg["n"]):
        part = sample_partition(n, derive_seed(cfg["seed"], "chi", n))
        for fam in GraphFamily:
            g = build_graph(part, fam)
            cj, cu = chi_junta(g, n // 2), chi_unate(g)
            rows.append({"n": n, "family": fam.value, "chi_junta": str(cj), "chi_unate": str(cu)})
            checks[f"chi_junta_{n}_{fam.value}"] = cj == expected[fam]
            if fam is GraphFamily.COMPLETE_BIPARTITE:
                checks[f"chi_unate_{n}_g2"] = cu == 0
    return Report(cfg, ["n", "family", "chi_junta", "chi_unate"], rows, {}, checks)


RUNNERS = {
    "advantage": suite_advantage,
    "tv-junta": suite_tv_junta,
    "tv-unate-adaptive": suite_tv_unate_adaptive,
    "tv-unate-nonadaptive": suite_tv_unate_nonadaptive,
    "distance-trend": suite_distance_trend,
    "event-frequency": suite_event_frequency,
    "chi-table": suite_chi_table,
}


def run(config: ExperimentConfig, jobs: int = 1) -> Report:
    rep = RUNNERS[config.suite](config, jobs)
    if config["out"]:
        rep.write(config["out"])
    return rep
