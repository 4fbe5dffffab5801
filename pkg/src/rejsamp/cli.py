"""Command line entry point: ``rejsamp <suite|command> [flags]``.

Exit codes: 0 when every threshold is met, 1 when one fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import asdict

from .analytics import event_report
from .distance import dist_between, dist_to_kjunta_exact, dist_to_monotone_exact, dist_to_unate_exact
from .errors import RejsampError
from .functions import read_table_hex
from .graphs import GraphFamily, build_graph, read_partition, sample_partition
from .harness import SUITES, ConfigError, ExperimentConfig, parse_config_text, run
from .oracle import OracleSession, read_transcript
from .reductions import (group_queries_junta, group_queries_unate, read_batch, run_unate_adaptive_reduction,
                         sample_M, simulate_junta_answers, simulate_unate_answers)
from .rng import derive_seed
from .unate import sample_unate_core

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _family(s: str) -> GraphFamily:
    try:
        return GraphFamily.parse(s)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rejsamp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUITES:
        s = sub.add_parser(name, help=f"run the {name} suite")
        s.add_argument("--config", help="key=value config file")
        s.add_argument("--jobs", type=int, default=1)
        s.add_argument("--out", help="CSV report path (default: stdout)")
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="config override")

    d = sub.add_parser("distinguish", help="run the odd-cycle distinguisher")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--family", default="auto", choices=["g1", "g2", "auto"])
    d.add_argument("--reps", type=int, default=0)
    d.add_argument("--trials", type=int, default=100)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--jobs", type=int, default=1)
    d.add_argument("--out")

    x = sub.add_parser("distance", help="exact distance of a hex truth table")
    x.add_argument("--op", required=True, choices=["between", "junta", "monotone", "unate"])
    x.add_argument("--table", required=True)
    x.add_argument("--table2")
    x.add_argument("--k", type=int)

    r = sub.add_parser("reduce", help="simulate a query batch through a reduction")
    r.add_argument("--kind", required=True, choices=["junta", "unate-adaptive", "unate-nonadaptive"])
    r.add_argument("--batch", required=True)
    r.add_argument("--family", required=True, type=_family)
    r.add_argument("--n", type=int, required=True, help="number of graph vertices (queries have 2n bits)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--out")

    a = sub.add_parser("analyze", help="event statistics of a transcript")
    a.add_argument("--transcript", required=True)
    a.add_argument("--partition", required=True)
    a.add_argument("--family", required=True, type=_family)
    a.add_argument("--c", type=float, default=1.0)
    a.add_argument("--out")
    return p


def _overrides(args) -> dict:
    ov = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            ov.update(parse_config_text(fh.read()))
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        ov[k.strip()] = v.strip()
    if args.out:
        ov["out"] = args.out
    return ov


def _emit_rows(columns, rows, out) -> None:
    fh = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)
    finally:
        if out:
            fh.close()


def _cmd_suite(args) -> int:
    cfg = ExperimentConfig.build(args.command, _overrides(args))
    rep = run(cfg, jobs=args.jobs)
    if not cfg["out"]:
        sys.stdout.write(rep.to_csv())
    for k, v in rep.checks.items():
        print(f"{k}: {'PASS' if v else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_distinguish(args) -> int:
    ov = {"n": str(args.n), "family": args.family, "reps": str(args.reps), "trials": str(args.trials),
          "seed": str(args.seed), "out": args.out or ""}
    rep = run(ExperimentConfig.build("advantage", ov), jobs=args.jobs)
    if not args.out:
        sys.stdout.write(rep.to_csv())
    return EXIT_OK


def _cmd_distance(args) -> int:
    f = read_table_hex(args.table)
    if args.op == "between":
        if not args.table2:
            raise ConfigError("--op between needs --table2")
        d = dist_between(f, read_table_hex(args.table2))
    elif args.op == "junta":
        if args.k is None:
            raise ConfigError("--op junta needs --k")
        d = dist_to_kjunta_exact(f, args.k)
    elif args.op == "monotone":
        d = dist_to_monotone_exact(f)
    else:
        d = dist_to_unate_exact(f)
    print(f"{d.numerator}/{d.denominator}")
    return EXIT_OK


def _cmd_reduce(args) -> int:
    batch = read_batch(args.batch)
    n = args.n
    if batch.nvars != 2 * n:
        raise ConfigError(f"batch queries have {batch.nvars} bits, expected 2n = {2 * n}")
    rows = []
    for t in range(args.trials):
        s = derive_seed(args.seed, "reduce", args.kind, t)
        g = build_graph(sample_partition(n, derive_seed(s, "partition")), args.family)
        session = OracleSession(g, derive_seed(s, "oracle"))
        if args.kind == "junta":
            M = sample_M(2 * n, derive_seed(s, "M"))
            ans = simulate_junta_answers(group_queries_junta(batch, M), batch, session, M, derive_seed(s, "sim"))
            bits, cost = ans.bits, ans.cost
        elif args.kind == "unate-nonadaptive":
            core = sample_unate_core(2 * n, derive_seed(s, "core"))
            ans = simulate_unate_answers(group_queries_unate(batch, core), batch, session, core,
                                         derive_seed(s, "sim"))
            bits, cost = ans.bits, ans.cost
        else:
            # The batch is replayed in order as an adaptive tester.
            res = run_unate_adaptive_reduction(lambda ask: [ask(z) for z in batch.queries] and True,
                                               session, len(batch), derive_seed(s, "sim"))
            bits, cost = res.answers, res.cost
        rows.append({"trial": t, "answers": "".join(map(str, bits)), "cost": cost})
    _emit_rows(["trial", "answers", "cost"], rows, args.out)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    t = read_transcript(args.transcript)
    part = read_partition(args.partition)
    rep = asdict(event_report(t, part, args.c))
    rep["e_C"] = rep["e_C_no"] if args.family is GraphFamily.TWO_CLIQUES else rep["e_C_yes"]
    cols = ["cost", "nonempty", "e_T", "e_F", "B", "e_B", "e_C", "e_C_yes", "e_C_no", "W_A_no", "V", "e_W"]
    rows = [{k: int(v) if isinstance(v, bool) else v for k, v in rep.items()}]
    _emit_rows(cols, rows, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"distinguish": _cmd_distinguish, "distance": _cmd_distance,
                "reduce": _cmd_reduce, "analyze": _cmd_analyze}
    try:
        return handlers.get(args.command, _cmd_suite)(args)
    except ConfigError as e:
        print(f"rejsamp: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, RejsampError) as e:
        print(f"rejsamp: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
