"""Command-line front end: ``reduce``, ``solve``, ``verify``, ``stats``, ``bench``.

Exit codes: 0 ok, 1 usage, 2 parse/format/I-O error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import random
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .crown import RULE_SETS, kernelize_unweighted, lp_persistency
from .graph import Graph, GraphError, Matching, ValidationError, WeightedGraph, export_perfect_matching_instance, feedback_edge_number
from .io import ParseError, parse_edge_list, read_graph, write_dimacs, write_edge_list, write_matching
from .solvers import OracleGuardError, blossom_mcm, brute_force_mcm, brute_force_mwm, brute_force_vc
from .trace import EVENT_TYPES, Relabel, ReductionTrace, TraceError, dump_trace, lift_matching, load_trace
from .weighted import MODES, weighted_kernel_pipeline

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_VERIFY = 0, 1, 2, 3
EVENT_KINDS = sorted(EVENT_TYPES)


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- shared helpers -----------------------------------------------------------

def permutation(g: Graph, seed: int) -> dict[int, int]:
    """Random bijection of the vertex ids of ``g`` onto themselves."""
    vs = g.vertices()
    shuffled = vs[:]
    random.Random(seed).shuffle(shuffled)
    return dict(zip(vs, shuffled))


def reduce_graph(g: Graph, weighted: bool, rules: str = "all", mode: str = "exhaustive",
                 seed: int | None = None):
    """Kernelize a copy of ``g``; with ``seed`` the ids are permuted first."""
    trace = ReductionTrace()
    if seed is not None:
        g = trace.record(Relabel(permutation(g, seed))).replay(g)
    else:
        g = g.copy()
    if weighted:
        return weighted_kernel_pipeline(g, mode, trace, inplace=True)
    return kernelize_unweighted(g, rules, trace, inplace=True)


def solve_kernel(kernel: Graph, weighted: bool, guard: int = 18) -> Matching:
    if weighted:
        return brute_force_mwm(kernel, guard=guard)[1]
    return blossom_mcm(kernel)


@dataclass
class RunReport:
    input: str
    weighted: bool
    rules: str
    mode: str
    seed: int | None
    n: int
    m: int
    k: int
    kernel_n: int
    kernel_m: int
    cardinality_offset: int
    weight_offset: int
    counts: dict = field(default_factory=dict)
    tau: int | None = None
    matching_size: int | None = None
    matching_weight: int | None = None
    times: dict = field(default_factory=dict)

    PHASES = ("parse", "reduce", "solve", "lift")

    @classmethod
    def header(cls) -> list[str]:
        return (
            ["input", "weighted", "rules", "mode", "seed", "n", "m", "k", "kernel_n", "kernel_m",
             "cardinality_offset", "weight_offset", "tau", "matching_size", "matching_weight"]
            + [f"count_{k}" for k in EVENT_KINDS]
            + [f"{p}_s" for p in cls.PHASES]
        )

    def row(self) -> list:
        def opt(x):
            return "" if x is None else x

        return (
            [self.input, int(self.weighted), self.rules if not self.weighted else "",
             self.mode if self.weighted else "", opt(self.seed), self.n, self.m, self.k,
             self.kernel_n, self.kernel_m, self.cardinality_offset, self.weight_offset,
             opt(self.tau), opt(self.matching_size), opt(self.matching_weight)]
            + [self.counts.get(k, 0) for k in EVENT_KINDS]
            + [_fmt_time(self.times.get(p)) for p in self.PHASES]
        )


def _fmt_time(t) -> str:
    return "" if t is None else f"{t:.6f}"


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write_rows(path, header, rows, append: bool = False) -> None:
    if append and path not in (None, "-"):
        new = not os.path.exists(path) or os.path.getsize(path) == 0
        with open(path, "a", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if new:
                w.writerow(header)
            w.writerows(rows)
        return
    fh, close = _open_out(path)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if close:
            fh.close()


def _read_input(path: str, weighted: bool) -> Graph:
    return read_graph(path, weighted=weighted)


# -- reduce / solve ----------------------------------------------------------

def cmd_reduce(args) -> int:
    t0 = time.perf_counter()
    g = _read_input(args.input, args.weighted)
    t1 = time.perf_counter()
    kernel, trace = reduce_graph(g, args.weighted, args.rules, args.mode, args.seed)
    t2 = time.perf_counter()
    kernel_path = args.kernel or args.input + ".kernel"
    trace_path = args.trace or args.input + ".trace"
    with open(kernel_path, "w") as fh:
        write_edge_list(kernel, fh)
    with open(trace_path, "w") as fh:
        dump_trace(trace, fh)
    report = _report(args, g, kernel, trace, {"parse": t1 - t0, "reduce": t2 - t1})
    _write_rows(args.report, RunReport.header(), [report.row()], append=True)
    return EXIT_OK


def _report(args, g, kernel, trace, times, matching=None) -> RunReport:
    return RunReport(
        input=os.path.basename(args.input),
        weighted=args.weighted,
        rules=args.rules,
        mode=args.mode,
        seed=args.seed,
        n=g.n,
        m=g.m,
        k=feedback_edge_number(g),
        kernel_n=kernel.n,
        kernel_m=kernel.m,
        cardinality_offset=trace.cardinality_offset,
        weight_offset=trace.weight_offset,
        counts=dict(trace.counts()),
        matching_size=None if matching is None else matching.size,
        matching_weight=None if matching is None else matching.weight(g),
        times=times,
    )


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    g = _read_input(args.input, args.weighted)
    t1 = time.perf_counter()
    if args.from_trace:
        if not args.kernel:
            raise UsageError("--from-trace needs --kernel")
        with open(args.from_trace) as fh:
            trace = load_trace(fh)
        kernel = _read_input(args.kernel, args.weighted)
    elif args.no_reduce:
        trace, kernel = ReductionTrace(), g.copy()
    else:
        kernel, trace = reduce_graph(g, args.weighted, args.rules, args.mode, args.seed)
    t2 = time.perf_counter()
    if args.export:
        doubled, _ = export_perfect_matching_instance(kernel)
        with open(args.export, "w") as fh:
            write_dimacs(doubled, fh)
        if not args.from_trace:
            with open(args.export + ".trace", "w") as fh:
                dump_trace(trace, fh)
        print(f"wrote perfect-matching instance of the kernel to {args.export}", file=sys.stderr)
        return EXIT_OK
    try:
        km = solve_kernel(kernel, args.weighted, args.guard)
    except OracleGuardError as exc:
        raise UsageError(
            f"{exc}; the exact weighted solver only handles small kernels, rerun with "
            "--export PATH to hand the kernel to an external solver"
        ) from None
    t3 = time.perf_counter()
    matching = lift_matching(trace, km, kernel)
    t4 = time.perf_counter()
    try:
        matching.validate(g)
    except ValidationError as exc:
        raise VerificationFailure(f"lifted matching is invalid: {exc}") from None
    fh, close = _open_out(args.out)
    try:
        write_matching(matching, fh, g)
    finally:
        if close:
            fh.close()
    if args.report:
        times = {"parse": t1 - t0, "reduce": t2 - t1, "solve": t3 - t2, "lift": t4 - t3}
        report = _report(args, g, kernel, trace, times, matching)
        _write_rows(args.report, RunReport.header(), [report.row()], append=True)
    return EXIT_OK


# -- verify -------------------------------------------------------------------

def random_graph(rng: random.Random, n: int, p: float, weighted: bool, max_weight: int = 10) -> Graph:
    g = WeightedGraph(vertices=range(n)) if weighted else Graph(vertices=range(n))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                if weighted:
                    g.add_edge(u, v, rng.randint(1, max_weight))
                else:
                    g.add_edge(u, v)
    return g


def check_instance(g: Graph, weighted: bool, inject: bool = False) -> list[str]:
    """Oracle-equivalence checks on one graph; returns failure messages."""
    failures = []
    configs = MODES if weighted else RULE_SETS
    opt = brute_force_mwm(g)[0] if weighted else brute_force_mcm(g)[0]
    for cfg in configs:
        kernel, trace = reduce_graph(g, weighted, rules=cfg, mode=cfg)
        offset = trace.weight_offset if weighted else trace.cardinality_offset
        if inject:
            offset += 1
        if weighted:
            kopt, km = brute_force_mwm(kernel)
        else:
            kopt, km = brute_force_mcm(kernel)
        if opt != kopt + offset:
            failures.append(f"{cfg}: optimum {opt} != kernel {kopt} + offset {offset}")
            continue
        try:
            lifted = lift_matching(trace, km, kernel).validate(g)
        except (GraphError, KeyError) as exc:
            failures.append(f"{cfg}: lift failed: {exc}")
            continue
        value = lifted.weight(g) if weighted else lifted.size
        if value != opt:
            failures.append(f"{cfg}: lifted matching has value {value}, expected {opt}")
    return failures


def cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    probabilities = [i / 10 for i in range(1, 10)]
    failed = 0
    for t in range(args.trials):
        g = random_graph(rng, rng.randint(1, args.max_n), rng.choice(probabilities), args.weighted)
        problems = check_instance(g, args.weighted, args.inject_failure)
        if problems:
            failed += 1
            if failed <= 5:
                print(f"trial {t}: FAIL n={g.n} m={g.m}: {'; '.join(problems)}")
    kind = "weighted" if args.weighted else "unweighted"
    print(f"random {kind} trials: {args.trials - failed}/{args.trials} passed")
    for path in args.inputs:
        g = _read_input(path, args.weighted)
        name = os.path.basename(path)
        if g.n > args.guard:
            print(f"{name}: skipped, n={g.n} exceeds the oracle guard {args.guard}")
            continue
        problems = check_instance(g, args.weighted, args.inject_failure)
        note = ""
        if not args.weighted:
            sol = lp_persistency(g)
            note = f" (crown pass removes {len(sol.zero) + len(sol.one)} vertices)"
        if problems:
            failed += 1
            print(f"{name}: FAIL: {'; '.join(problems)}")
        else:
            print(f"{name}: ok{note}")
    if failed:
        raise VerificationFailure(f"{failed} instance(s) failed verification")
    print("verify: pass")
    return EXIT_OK


# -- stats --------------------------------------------------------------------

STATS_UNWEIGHTED = ["input", "n", "m", "k", "bound_n", "bound_m", "degree_n", "degree_m",
                    "crown_n", "crown_m", "all_n", "all_m", "tau", "two_tau"]
STATS_WEIGHTED = ["input", "n", "m", "k", "bound_n", "bound_m", "prescribed_n", "prescribed_m",
                  "exhaustive_n", "exhaustive_m"]


def stats_row(path: str, weighted: bool, guard: int) -> list:
    g = _read_input(path, weighted)
    k = feedback_edge_number(g)
    row = [os.path.basename(path), g.n, g.m, k]
    if weighted:
        row += [7 * k, 9 * k]
        for mode in MODES:
            kernel, _ = weighted_kernel_pipeline(g, mode)
            row += [kernel.n, kernel.m]
        return row
    row += [2 * k, 3 * k]
    for rules in RULE_SETS:
        kernel, _ = kernelize_unweighted(g, rules)
        row += [kernel.n, kernel.m]
    if g.n <= guard:
        tau = brute_force_vc(g, guard=guard)
        row += [tau, 2 * tau]
    else:
        row += ["", ""]
    return row


def cmd_stats(args) -> int:
    header = STATS_WEIGHTED if args.weighted else STATS_UNWEIGHTED
    rows = [stats_row(p, args.weighted, args.guard) for p in args.inputs]
    _write_rows(args.out, header, rows)
    return EXIT_OK


# -- bench --------------------------------------------------------------------

BENCH_HEADER = ["input", "rep", "seed", "n", "m", "kernel_n", "kernel_m", "offset", "value",
                "parse_s", "direct_s", "reduce_s", "kernel_io_s", "kernel_solve_s", "lift_s",
                "reduced_total_s", "speedup"]
TIMED = BENCH_HEADER[9:]


def _solve_value(g: Graph, weighted: bool, guard: int):
    try:
        m = solve_kernel(g, weighted, guard)
    except OracleGuardError:
        return None
    return m


def bench_input(path: str, reps: int, seed: int, weighted: bool, rules: str, mode: str,
                timed: bool, guard: int) -> list[list]:
    """Benchmark rows for one input: one per repetition, then median and mean."""
    clock = time.perf_counter if timed else (lambda: 0.0)
    name = os.path.basename(path)
    rows = []
    timings = []
    for rep in range(reps):
        s = seed + rep
        t0 = clock()
        original = _read_input(path, weighted)
        t1 = clock()
        g = original.relabel(permutation(original, s))
        t2 = clock()
        direct = _solve_value(g, weighted, guard)
        t3 = clock()
        kernel, trace = kernelize_unweighted(g, rules) if not weighted else weighted_kernel_pipeline(g, mode)
        t4 = clock()
        buf = io.StringIO()
        write_edge_list(kernel, buf)
        kernel = parse_edge_list(buf.getvalue(), weighted=weighted)
        t5 = clock()
        km = _solve_value(kernel, weighted, guard)
        t6 = clock()
        lifted = None if km is None else lift_matching(trace, km, kernel).validate(g)
        t7 = clock()
        value = ""
        if lifted is not None:
            value = lifted.weight(g) if weighted else lifted.size
            if direct is not None:
                expected = direct.weight(g) if weighted else direct.size
                if value != expected:
                    raise VerificationFailure(f"{name} rep {rep}: reduced {value} != direct {expected}")
        t = {
            "parse_s": t1 - t0,
            "direct_s": t3 - t2 if direct is not None else None,
            "reduce_s": t4 - t3,
            "kernel_io_s": t5 - t4,
            "kernel_solve_s": t6 - t5 if km is not None else None,
            "lift_s": t7 - t6 if km is not None else None,
        }
        if km is not None:
            t["reduced_total_s"] = t["reduce_s"] + t["kernel_io_s"] + t["kernel_solve_s"] + t["lift_s"]
        else:
            t["reduced_total_s"] = None
        if t["direct_s"] is not None and t["reduced_total_s"]:
            t["speedup"] = t["direct_s"] / t["reduced_total_s"]
        else:
            t["speedup"] = None
        timings.append(t)
        offset = trace.weight_offset if weighted else trace.cardinality_offset
        rows.append([name, rep, s, g.n, g.m, kernel.n, kernel.m, offset, value]
                    + [_bench_time(t[c], timed) for c in TIMED])
    for label, agg in (("median", statistics.median), ("mean", statistics.fmean)):
        cells = []
        for c in TIMED:
            vals = [t[c] for t in timings if t[c] is not None]
            cells.append(_bench_time(agg(vals), timed) if vals and timed else "")
        rows.append([name, label, "", "", "", "", "", "", ""] + cells)
    return rows


def _bench_time(x, timed: bool) -> str:
    if not timed or x is None:
        return ""
    return f"{x:.6f}"


def cmd_bench(args) -> int:
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    job = dict(reps=args.reps, seed=args.seed, weighted=args.weighted, rules=args.rules,
               mode=args.mode, timed=args.timer == "perf", guard=args.guard)
    if args.jobs > 1 and len(args.inputs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(bench_input, p, **job) for p in args.inputs]
            results = [f.result() for f in futures]
    else:
        results = [bench_input(p, **job) for p in args.inputs]
    _write_rows(args.out, BENCH_HEADER, [row for rows in results for row in rows])
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="matchkernel", description="Exact kernelization for maximum matching.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def pipeline_flags(p):
        p.add_argument("--weighted", action="store_true", help="edge lines carry a weight")
        p.add_argument("--rules", choices=RULE_SETS, default="all",
                       help="unweighted rule set (default: all)")
        p.add_argument("--mode", choices=MODES, default="exhaustive",
                       help="weighted pipeline (default: exhaustive)")
        p.add_argument("--seed", type=int, default=None,
                       help="permute vertex ids with this seed before reducing")

    p = sub.add_parser("reduce", help="write kernel and trace files")
    p.add_argument("input")
    pipeline_flags(p)
    p.add_argument("--kernel", help="kernel output (default: INPUT.kernel)")
    p.add_argument("--trace", help="trace output (default: INPUT.trace)")
    p.add_argument("--report", default="-", help="append a CSV row here (default: stdout)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="reduce, solve the kernel, lift, write the matching")
    p.add_argument("input")
    pipeline_flags(p)
    p.add_argument("--no-reduce", action="store_true", help="solve the input directly")
    p.add_argument("--from-trace", metavar="TRACE", help="lift through an existing trace")
    p.add_argument("--kernel", help="kernel file matching --from-trace")
    p.add_argument("--guard", type=int, default=18,
                   help="largest component the exact weighted solver accepts")
    p.add_argument("--export", metavar="PATH",
                   help="write the kernel as a DIMACS perfect-matching instance instead of solving")
    p.add_argument("--out", default="-", help="matching output (default: stdout)")
    p.add_argument("--report", help="append a CSV run report here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="oracle-equivalence checks on random graphs and inputs")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--max-n", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--guard", type=int, default=16, help="skip inputs larger than this")
    p.add_argument("--inject-failure", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="kernel sizes against the theoretical bounds (CSV)")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--guard", type=int, default=20, help="compute tau up to this many vertices")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="timing over random vertex permutations (CSV)")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--rules", choices=RULE_SETS, default="all")
    p.add_argument("--mode", choices=MODES, default="exhaustive")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timer", choices=("perf", "none"), default="perf",
                   help="'none' leaves timing columns empty for byte-identical output")
    p.add_argument("--guard", type=int, default=18)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bench)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "trials", 0) < 0 or getattr(args, "max_n", 1) < 1:
            raise UsageError("--trials must be >= 0 and --max-n >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, TraceError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
