"""Command-line surface: one subcommand per claim cluster.

Exit codes:
  0   completed, expectations met
  1   a checked claim found a counterexample (a reportable finding)
  2   unresolved items remain (work budget or horizon)
  64  usage error

Diagnostics go to stderr; data goes to --out or stdout.  Output is
deterministic: identical config and starting cache state give identical
bytes, whatever --jobs says.
"""

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from sigmalab import __version__
from sigmalab.arith import Budget, BudgetExhausted, DigitLimit, is_prime
from sigmalab.congruence import (
    ReportStatus,
    ctr_scan,
    metaperfect_first_failure,
    conjecture_structure_check,
    periodicity_probe,
    powersum_residue,
)
from sigmalab.iterate import (
    AliquotStatus,
    TraceStatus,
    erdos_sampler,
    iterate_aliquot,
    iterate_sigma,
    lenstra_chain_search,
)
from sigmalab.multiperfect import lprime_filter, multiperfect_scan
from sigmalab.store import FactorCache, cached_factor, emit_csv, emit_jsonl
from sigmalab.verify import VerifyConfig, claim_ids, render_text, run_claims

CACHE_ENV = "SIGMA_LAB_CACHE"

EXIT_OK = 0
EXIT_FINDING = 1
EXIT_UNRESOLVED = 2
EXIT_USAGE = 64


@dataclass
class RunConfig:
    """Resolved invocation parameters: shared flags plus the subject of the
    subcommand (a single n, or a scan range, or neither)."""

    subcommand: str
    budget: Budget
    jobs: int
    cache_path: str | None
    format: str
    out_path: str | None
    n: int | None = None
    lo: int | None = None
    hi: int | None = None
    k_max: int | None = None

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.lo is not None and self.hi is not None and self.hi < self.lo:
            raise ValueError("empty range")
        if self.k_max is not None and self.k_max < 1:
            raise ValueError("k_max must be >= 1")

    def open_cache(self):
        return FactorCache(self.cache_path)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction_arg(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser() -> _Parser:
    parser = _Parser(prog="sigma-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sigma-lab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-work", type=_positive_int, default=10_000_000,
                        help="factorization probe-step budget per task (default 1e7)")
    common.add_argument("--digit-limit", type=_positive_int, default=2000,
                        help="decimal-digit cap on values accepted for factoring")
    common.add_argument("--jobs", type=_positive_int, default=None,
                        help="worker count for range scans (default: CPU count)")
    common.add_argument("--cache", default=None,
                        help=f"factorization cache file (default: ${CACHE_ENV})")
    common.add_argument("--format", choices=("text", "json", "csv"), default=None,
                        help="output format (default text; ctr-scan defaults to csv)")
    common.add_argument("--out", default=None, help="write data here instead of stdout")

    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("factor", parents=[common], help="prime factorization of n")
    p.add_argument("n", type=_positive_int)

    p = sub.add_parser("sigma", parents=[common], help="divisor-sum iteration trace")
    p.add_argument("n", type=_positive_int)
    p.add_argument("--iterate", type=_nonnegative_int, default=0, metavar="K",
                   help="number of sigma steps to take (default 0: just sigma data)")

    p = sub.add_parser("aliquot", parents=[common], help="aliquot sequence trace")
    p.add_argument("n", type=_positive_int)
    p.add_argument("--k-max", type=_positive_int, default=100)

    p = sub.add_parser("ctr-scan", parents=[common],
                       help="smallest k with n | sigma^k(n) over a range of n")
    p.add_argument("--from", dest="lo", type=_positive_int, default=2)
    p.add_argument("--to", dest="hi", type=_positive_int, required=True)
    p.add_argument("--k-max", type=_positive_int, default=100)

    p = sub.add_parser("meta-scan", parents=[common],
                       help="first k with n not dividing sigma^k(n), per multiperfect n")
    p.add_argument("--limit", type=_positive_int, required=True)
    p.add_argument("--k-max", type=_positive_int, default=100)

    p = sub.add_parser("mp-scan", parents=[common], help="multiperfect catalog up to a limit")
    p.add_argument("--limit", type=_positive_int, required=True)

    p = sub.add_parser("lprime", parents=[common],
                       help="multiperfect records whose L invariant is prime")
    p.add_argument("--limit", type=_positive_int, required=True)

    p = sub.add_parser("periodicity", parents=[common],
                       help="power-sum residues mod sigma(n) and their observed period")
    p.add_argument("n", type=_positive_int)
    p.add_argument("--horizon", type=_positive_int, default=None)

    p = sub.add_parser("powersum-check", parents=[common],
                       help="power-sum residue closed form over a (p, e, k) grid")
    p.add_argument("--p-max", type=_positive_int, default=50)
    p.add_argument("--e-max", type=_positive_int, default=6)
    p.add_argument("--k-max", type=_positive_int, default=30)

    p = sub.add_parser("lenstra", parents=[common],
                       help="smallest m whose aliquot iterates strictly increase k times")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--m-max", type=_positive_int, default=1_000_000)

    p = sub.add_parser("erdos-sample", parents=[common],
                       help="exceptions to the two-sided aliquot growth window")
    p.add_argument("--k", type=_positive_int, default=2)
    p.add_argument("--delta", type=_fraction_arg, default=Fraction(9, 10))
    p.add_argument("--from", dest="lo", type=_positive_int, default=2)
    p.add_argument("--to", dest="hi", type=_positive_int, default=100_000)

    p = sub.add_parser("conjecture-scan", parents=[common],
                       help="structure checks on multiperfect n with sigma_2(n) = 2 mod n")
    p.add_argument("--limit", type=_positive_int, required=True)

    p = sub.add_parser("verify-all", parents=[common],
                       help="run every claim check and print one verdict per claim")
    p.add_argument("--claim", action="append", default=None, metavar="ID",
                   help="run only this claim (repeatable); see --list-claims")
    p.add_argument("--list-claims", action="store_true", help="list claim ids and exit")
    p.add_argument("--ctr-to", type=_positive_int, default=400)
    p.add_argument("--ctr-k-max", type=_positive_int, default=300)
    p.add_argument("--mp-limit", type=_positive_int, default=1_000_000)
    p.add_argument("--tau-n-max", type=_positive_int, default=10_000)
    p.add_argument("--erdos-to", type=_positive_int, default=100_000)
    p.add_argument("--periodicity-limit", type=_positive_int, default=10_000)

    return parser


def _config_from(args) -> RunConfig:
    cache_path = args.cache or os.environ.get(CACHE_ENV) or None
    limit = getattr(args, "limit", None)
    return RunConfig(
        subcommand=args.subcommand,
        budget=Budget(max_work=args.budget_work, max_digits=args.digit_limit),
        jobs=args.jobs or os.cpu_count() or 1,
        cache_path=cache_path,
        format=args.format,
        out_path=args.out,
        n=getattr(args, "n", None),
        lo=getattr(args, "lo", None) if limit is None else 2,
        hi=limit if limit is not None else getattr(args, "hi", None),
        k_max=getattr(args, "k_max", None),
    )


def _open_sink(config):
    if config.out_path:
        return open(config.out_path, "w", encoding="utf-8")
    return sys.stdout


def _emit(config, records, text_lines, csv_rows=None, csv_header=None, default="text"):
    """Send records out in the chosen format; returns nothing."""
    fmt = config.format or default
    sink = _open_sink(config)
    try:
        if fmt == "json":
            emit_jsonl(records, sink)
        elif fmt == "csv":
            if csv_rows is None:
                raise SystemExit2("this subcommand has no CSV shape", EXIT_USAGE)
            emit_csv(csv_rows, csv_header, sink)
        else:
            for line in text_lines:
                sink.write(line + "\n")
    finally:
        if sink is not sys.stdout:
            sink.close()


class SystemExit2(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# --- subcommand handlers -------------------------------------------------


def _cmd_factor(args, config):
    cache = config.open_cache()
    try:
        f = cached_factor(args.n, budget=config.budget, cache=cache)
    except (BudgetExhausted, DigitLimit) as exc:
        print(f"UNRESOLVED: {exc}", file=sys.stderr)
        return EXIT_UNRESOLVED
    cache.flush()
    _emit(config, [f], [f"{args.n} = {f}"])
    return EXIT_OK


def _cmd_sigma(args, config):
    cache = config.open_cache()
    trace = iterate_sigma(args.n, args.iterate, budget=config.budget, cache=cache)
    cache.flush()
    lines = [
        f"k={e.k}  value={e.value}  residue={e.residue_mod_start}"
        for e in trace.entries
    ]
    lines.append(f"status: {trace.status.value}")
    _emit(config, [trace], lines)
    if trace.status is not TraceStatus.COMPLETE:
        return EXIT_UNRESOLVED
    return EXIT_OK


def _cmd_aliquot(args, config):
    cache = config.open_cache()
    trace = iterate_aliquot(args.n, args.k_max, budget=config.budget, cache=cache)
    cache.flush()
    lines = [f"k={e.k}  value={e.value}" for e in trace.entries]
    tail = f"status: {trace.status.value}"
    if trace.status is AliquotStatus.CYCLE:
        tail += f"({trace.cycle_length})"
    lines.append(tail)
    _emit(config, [trace], lines)
    if trace.status in (AliquotStatus.BUDGET_EXHAUSTED, AliquotStatus.DIGIT_LIMIT):
        return EXIT_UNRESOLVED
    return EXIT_OK


def _cmd_ctr_scan(args, config):
    if args.lo < 2 or args.hi < args.lo:
        raise SystemExit2("need 2 <= from <= to", EXIT_USAGE)
    cache = config.open_cache()
    reports = ctr_scan(
        args.lo, args.hi, k_max=args.k_max, budget=config.budget,
        jobs=config.jobs, cache=cache,
    )
    cache.flush()
    rows = [(r.n, r.smallest_k, r.status.value) for r in reports]
    lines = [f"n={n}  smallest_k={k}  {s}" for n, k, s in rows]
    _emit(config, reports, lines, csv_rows=rows,
          csv_header=("n", "smallest_k", "status"), default="csv")
    statuses = {r.status for r in reports}
    if ReportStatus.UNRESOLVED_BUDGET in statuses:
        return EXIT_UNRESOLVED
    if ReportStatus.NO_K_WITHIN_HORIZON in statuses:
        return EXIT_FINDING
    return EXIT_OK


def _cmd_meta_scan(args, config):
    cache = config.open_cache()
    records = multiperfect_scan(args.limit, jobs=config.jobs,
                                budget=config.budget, cache=cache)
    reports = [
        metaperfect_first_failure(r.n, k_max=args.k_max,
                                  budget=config.budget, cache=cache)
        for r in records
    ]
    cache.flush()
    rows = [(r.n, r.smallest_k, r.status.value) for r in reports]
    lines = [f"n={n}  first_failure_k={k}  {s}" for n, k, s in rows]
    _emit(config, reports, lines, csv_rows=rows,
          csv_header=("n", "first_failure_k", "status"))
    statuses = {r.status for r in reports}
    if ReportStatus.UNRESOLVED_BUDGET in statuses:
        return EXIT_UNRESOLVED
    if ReportStatus.NO_K_WITHIN_HORIZON in statuses:
        # an iterate chain that never leaves 0 mod n would be a discovery
        return EXIT_FINDING
    return EXIT_OK


def _mp_rows(records):
    return [
        (r.n, str(r.factorization), r.index, r.L, r.L_prime, r.squarefree)
        for r in records
    ]


def _cmd_mp_scan(args, config):
    cache = config.open_cache()
    records = multiperfect_scan(args.limit, jobs=config.jobs,
                                budget=config.budget, cache=cache)
    cache.flush()
    rows = _mp_rows(records)
    lines = [
        f"n={n}  {fstr}  index={idx}  L={L}  L_prime={lp}  squarefree={sf}"
        for n, fstr, idx, L, lp, sf in rows
    ]
    _emit(config, records, lines, csv_rows=rows,
          csv_header=("n", "factorization", "index", "L", "L_prime", "squarefree"))
    return EXIT_OK


def _cmd_lprime(args, config):
    cache = config.open_cache()
    records = lprime_filter(
        multiperfect_scan(args.limit, jobs=config.jobs,
                          budget=config.budget, cache=cache)
    )
    cache.flush()
    rows = _mp_rows(records)
    lines = [
        f"n={n}  {fstr}  index={idx}  L={L}" for n, fstr, idx, L, _, _ in rows
    ]
    _emit(config, records, lines, csv_rows=rows,
          csv_header=("n", "factorization", "index", "L", "L_prime", "squarefree"))
    return EXIT_OK


def _cmd_periodicity(args, config):
    cache = config.open_cache()
    report = periodicity_probe(args.n, horizon=args.horizon,
                               budget=config.budget, cache=cache)
    cache.flush()
    lines = [
        f"n={report.n}  L={report.L}  horizon={report.horizon}",
        f"residues: {report.residues}",
        f"observed_period: {report.observed_period}  divides_L: {report.divides_L}",
    ]
    _emit(config, [report], lines)
    return EXIT_OK


def _cmd_powersum_check(args, config):
    checks = []
    for p in range(2, args.p_max):
        if not is_prime(p):
            continue
        for e in range(1, args.e_max + 1):
            for k in range(1, args.k_max + 1):
                checks.append(powersum_residue(p, e, k))
    mismatches = [c for c in checks if not c.match]
    # divisibility exactly when gcd(k, e+1) = 1
    law_breaks = [c for c in checks if (c.actual == 0) != (c.r == 1)]
    lines = [
        f"grid: p<{args.p_max}, e<={args.e_max}, k<={args.k_max}: {len(checks)} checks",
        f"closed-form mismatches: {len(mismatches)}",
        f"divisible-iff-gcd-1 violations: {len(law_breaks)}",
    ]
    bad = mismatches + law_breaks
    _emit(config, bad if bad else checks[:0], lines)
    return EXIT_FINDING if bad else EXIT_OK


def _cmd_lenstra(args, config):
    cache = config.open_cache()
    m = lenstra_chain_search(args.k, args.m_max, budget=config.budget, cache=cache)
    cache.flush()
    lines = [f"k={args.k}  smallest_m={'NONE' if m is None else m}"]
    _emit(config, [{"k": args.k, "smallest_m": m}], lines)
    return EXIT_OK


def _cmd_erdos_sample(args, config):
    report = erdos_sampler(args.k, args.delta, args.lo, args.hi,
                           budget=config.budget)
    frac = report.violation_fraction
    lines = [
        f"k={report.k}  delta={report.delta}  range=[{report.m_lo},{report.m_hi}]",
        f"applicable={report.applicable}  inapplicable={report.inapplicable}",
        f"violators={report.violators}  fraction={frac} (~{float(frac):.4f})",
        f"per-step (i, lower, upper): {report.per_step_violations}",
    ]
    _emit(config, [report], lines)
    return EXIT_OK


def _cmd_conjecture_scan(args, config):
    cache = config.open_cache()
    records = multiperfect_scan(args.limit, jobs=config.jobs,
                                budget=config.budget, cache=cache)
    reports = [conjecture_structure_check(r.n, budget=config.budget, cache=cache)
               for r in records]
    cache.flush()
    lines = []
    triggered = []
    for rep in reports:
        checks = ", ".join(f"{name}={'ok' if ok else 'FAIL'}" for name, ok in rep.conclusions)
        lines.append(f"n={rep.n}  congruences={rep.satisfies_congruences}  {checks}")
        if rep.triggered:
            triggered.append(rep)
    lines.append(
        f"multiples of 4 with sigma_2 residue 2: "
        f"{[r.n for r in triggered] if triggered else 'none'}"
    )
    _emit(config, reports, lines)
    return EXIT_OK


def _cmd_verify_all(args, config):
    if args.list_claims:
        for cid in claim_ids():
            print(cid)
        return EXIT_OK
    vconfig = VerifyConfig(
        budget=config.budget,
        jobs=config.jobs,
        ctr_to=args.ctr_to,
        ctr_k_max=args.ctr_k_max,
        mp_limit=args.mp_limit,
        tau_n_max=args.tau_n_max,
        erdos_hi=args.erdos_to,
        periodicity_limit=args.periodicity_limit,
    )
    if args.claim:
        missing = [c for c in args.claim if c not in set(claim_ids())]
        if missing:
            raise SystemExit2(f"unknown claim id(s): {missing}", EXIT_USAGE)
    cache = config.open_cache()
    results = run_claims(vconfig, cache=cache, only=args.claim)
    cache.flush()
    _emit(config, results, render_text(results))
    statuses = [r.status for r in results]
    if "FAIL" in statuses:
        return EXIT_FINDING
    if "UNRESOLVED" in statuses:
        return EXIT_UNRESOLVED
    return EXIT_OK


_HANDLERS = {
    "factor": _cmd_factor,
    "sigma": _cmd_sigma,
    "aliquot": _cmd_aliquot,
    "ctr-scan": _cmd_ctr_scan,
    "meta-scan": _cmd_meta_scan,
    "mp-scan": _cmd_mp_scan,
    "lprime": _cmd_lprime,
    "periodicity": _cmd_periodicity,
    "powersum-check": _cmd_powersum_check,
    "lenstra": _cmd_lenstra,
    "erdos-sample": _cmd_erdos_sample,
    "conjecture-scan": _cmd_conjecture_scan,
    "verify-all": _cmd_verify_all,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from(args)
        return _HANDLERS[args.subcommand](args, config)
    except SystemExit2 as exc:
        print(f"sigma-lab: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, BudgetExhausted) as exc:
        print(f"sigma-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ValueError) else EXIT_UNRESOLVED


if __name__ == "__main__":
    sys.exit(main())
