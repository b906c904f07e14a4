"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data or I/O error, 4 numerical or
domain error. Failures print one line ``eurohist: <kind>: <message>`` on
stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .analyses import (
    AnalysisReport,
    AnalysisId,
    PACE_BREAK,
    PACE_WINDOW,
    SHARE_WINDOW,
    Table,
    analyze_champion_dominance,
    analyze_dominance,
    analyze_final_four_randomness,
    analyze_pace,
    analyze_pluralism,
    analyze_scorer_correlation,
)
from .dataset import (
    DEFAULT_LAMBDA,
    REGIONS,
    TABLE2_PERIODS,
    Fork,
    SeasonId,
    TimeSeries,
    load_dataset,
    parse_period_scheme,
)
from .errors import DataError, DomainError
from .plot import render_line_chart
from .render import OutputFormat, OutputSpec, read_csv_section, render_report
from .stats_tests import (
    FinalFourDraw,
    binomial_test_two_sided,
    friedman_test,
    mann_whitney,
    multinomial_mc_gof,
    pearson_test,
    runs_test,
    spearman_test,
    wilcoxon_signed_rank,
    zivot_andrews,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DOMAIN = 0, 2, 3, 4
TEST_NAMES = ("friedman", "wilcoxon", "mann-whitney", "runs", "pearson", "spearman",
              "binomial", "multinomial", "zivot-andrews")

# global flags and their defaults; applied after parsing so they may appear
# before or after the subcommand
GLOBAL_DEFAULTS = {
    "data_dir": None,
    "format": "json",
    "plot": None,
    "output": None,
    "seed": 0,
    "iterations": 100_000,
    "lam": None,
    "window": None,
    "era": "full",
    "break_season": None,
    "period_scheme": None,
    "precision": 4,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _global_flags() -> argparse.ArgumentParser:
    p = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--data-dir", help="directory with the five CSV files (default: bundled data)")
    p.add_argument("--format", choices=[f.value for f in OutputFormat], help="report format")
    p.add_argument("--plot", metavar="SVG", help="also write a line chart to this path")
    p.add_argument("--output", "-o", metavar="PATH", help="write the report here, not stdout")
    p.add_argument("--seed", type=int, help="Monte-Carlo seed (default 0)")
    p.add_argument("--iterations", type=int, help="Monte-Carlo iterations (default 100000)")
    p.add_argument("--lambda", dest="lam", type=float, help=f"free-throw weight (default {DEFAULT_LAMBDA})")
    p.add_argument("--window", type=int, help="moving-average window in seasons")
    p.add_argument("--era", choices=["full", "modern"], help="final-four era")
    p.add_argument("--break-season", type=int, metavar="ORDINAL",
                   help="last season ordinal before the break")
    p.add_argument("--period-scheme", metavar="A-B,C-D,...", help="contiguous season periods")
    p.add_argument("--precision", type=int, help="decimal places for reals (1-12, default 4)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = _Parser(prog="eurohist", parents=[common],
                     description="Historical statistics of the European club basketball championship.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    for name, help_text in (
        ("dominance", "titles and appearances per region and period"),
        ("champion-dominance", "champion versus opponent scoring"),
        ("pluralism", "top-scorer share in the finals"),
        ("pace", "possessions in the finals"),
        ("scorer-correlation", "tournament top scorer against team finish"),
        ("final-four-odds", "final-four titles against equal chances"),
    ):
        sub.add_parser(name, parents=[common], help=help_text)

    test = sub.add_parser("test", parents=[common], help="run one test on columns of a CSV")
    test.add_argument("name", choices=TEST_NAMES)
    test.add_argument("--input", "-i", metavar="CSV", help="input CSV (default stdin)")
    test.add_argument("--section", help="section name when the input is a rendered CSV report")
    test.add_argument("--column", help="single input column")
    test.add_argument("--columns", help="comma-separated input columns")
    test.add_argument("--threshold", type=float, default=0.0, help="runs-test threshold")
    test.add_argument("--alternative", default="two_sided",
                      choices=["two_sided", "less", "greater"])
    test.add_argument("--force-approx", action="store_true",
                      help="use the normal approximation even when exact is available")
    test.add_argument("--successes", type=int, help="binomial successes")
    test.add_argument("--trials", type=int, help="binomial trials")
    test.add_argument("--p0", type=float, default=0.25, help="binomial null probability")
    test.add_argument("--lags", type=int, default=5, help="Zivot-Andrews lag order")
    test.add_argument("--trim", type=float, default=0.15, help="Zivot-Andrews trim fraction")
    return parser


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    args = build_parser().parse_args(list(argv))
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    return args


# ---------------------------------------------------------------------------
# Reading CSV columns for `test`
# ---------------------------------------------------------------------------

def _read_rows(args) -> list[dict[str, str]]:
    if args.input is None or args.input == "-":
        text = sys.stdin.read()
        where = "<stdin>"
    else:
        try:
            text = Path(args.input).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read input: {exc.strerror}", args.input) from None
        where = args.input
    rows = read_csv_section(text, args.section)
    if not rows:
        raise DataError("no data rows", where)
    return rows


def _column_names(args, count: int | None) -> list[str]:
    names = []
    if args.column:
        names.append(args.column)
    if args.columns:
        names.extend(c.strip() for c in args.columns.split(",") if c.strip())
    if count is not None and len(names) != count:
        raise UsageError(f"test {args.name} needs exactly {count} column(s) "
                         f"via --column/--columns")
    if not names:
        raise UsageError(f"test {args.name} needs --column or --columns")
    return names


def _numbers(rows, name: str, skip_blank: bool = False) -> list[float]:
    if name not in rows[0]:
        raise DataError(f"column {name!r} not found; have {', '.join(rows[0])}")
    out = []
    for line, row in enumerate(rows, start=2):
        cell = (row.get(name) or "").strip()
        if not cell:
            if skip_blank:
                continue
            raise DataError(f"row {line}: column {name!r} is empty")
        try:
            value = float(cell)
        except ValueError:
            raise DataError(f"row {line}: column {name!r} is not a number: {cell!r}") from None
        if not math.isfinite(value):
            raise DataError(f"row {line}: column {name!r} is not finite")
        out.append(value)
    return out


def run_test(args) -> AnalysisReport:
    name = args.name
    params: dict[str, object] = {"test": name}
    if name == "binomial" and args.successes is not None:
        if args.trials is None:
            raise UsageError("binomial needs --trials with --successes")
        result = binomial_test_two_sided(args.successes, args.trials, args.p0)
        params.update(successes=args.successes, trials=args.trials, p0=args.p0)
        return _single(name, result, params)

    rows = _read_rows(args)
    if name == "friedman":
        cols = _column_names(args, None)
        table = list(zip(*[_numbers(rows, c) for c in cols]))
        result = friedman_test(table)
    elif name in ("wilcoxon", "pearson", "spearman"):
        a, b = _column_names(args, 2)
        x, y = _numbers(rows, a), _numbers(rows, b)
        if name == "wilcoxon":
            result = wilcoxon_signed_rank(x, y, args.force_approx, args.alternative)
        elif name == "pearson":
            result = pearson_test(x, y, args.alternative)
        else:
            result = spearman_test(x, y, args.alternative)
    elif name == "mann-whitney":
        a, b = _column_names(args, 2)
        result = mann_whitney(_numbers(rows, a, True), _numbers(rows, b, True),
                              args.force_approx, args.alternative)
    elif name == "runs":
        (col,) = _column_names(args, 1)
        result = runs_test(_numbers(rows, col), args.threshold)
        params["threshold"] = args.threshold
    elif name == "binomial":
        (col,) = _column_names(args, 1)
        flags = _numbers(rows, col)
        if any(v not in (0.0, 1.0) for v in flags):
            raise DataError(f"binomial column {col!r} must hold 0/1 outcomes")
        result = binomial_test_two_sided(int(sum(flags)), len(flags), args.p0)
    elif name == "multinomial":
        cols = _column_names(args, None) if (args.column or args.columns) else \
            ["winner", "runner_up", "third", "fourth"]
        if len(cols) != 4:
            raise UsageError("multinomial needs four columns, winner first")
        draws = []
        for row in rows:
            try:
                teams = tuple(row[c].strip() for c in cols)
            except KeyError as exc:
                raise DataError(f"column {exc.args[0]!r} not found") from None
            draws.append(FinalFourDraw(teams, teams[0]))
        result = multinomial_mc_gof(draws, iterations=args.iterations, seed=args.seed)
        params.update(seed=args.seed, iterations=args.iterations)
    elif name == "zivot-andrews":
        (col,) = _column_names(args, 1)
        labels = [r.get("season", str(i + 1)) for i, r in enumerate(rows)]
        result = zivot_andrews(_numbers(rows, col), lags=args.lags, trim=args.trim,
                               labels=labels)
        params.update(lags=args.lags, trim=args.trim)
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(f"unknown test {name}")
    return _single(name, result, params)


def _single(name, result, params) -> AnalysisReport:
    return AnalysisReport(AnalysisId.TEST, tests={name: result}, parameters=params)


# ---------------------------------------------------------------------------
# Analyses
# ---------------------------------------------------------------------------

def _period_chart(table: Table) -> list[TimeSeries]:
    out = []
    for j, region in enumerate(table.columns):
        entries = []
        for label, cells in zip(table.row_labels, table.cells):
            hi = int(label.split("-")[1])
            entries.append((SeasonId(label, hi, Fork.UNIFIED), float(cells[j])))
        out.append(TimeSeries(tuple(entries)))
    return out


def run_analysis(args) -> tuple[AnalysisReport, tuple[list[TimeSeries], list[str], str, str] | None]:
    dataset = load_dataset(args.data_dir)
    cmd = args.command
    if cmd == "dominance":
        scheme = parse_period_scheme(args.period_scheme) if args.period_scheme else TABLE2_PERIODS
        report = analyze_dominance(dataset, scheme)
        chart = (_period_chart(report.tables["appearances_by_region"]),
                 [r.value for r in REGIONS], "Final-four appearances per region",
                 "appearances (period ending)")
    elif cmd == "champion-dominance":
        report = analyze_champion_dominance(dataset)
        chart = ([report.series["champion_ppg"], report.series["opponent_ppg"]],
                 ["champion PPG", "opponent PPG"], "Points per game for and against the champion",
                 "points per game")
    elif cmd == "pluralism":
        report = analyze_pluralism(dataset, break_ordinal=args.break_season,
                                   window=args.window or SHARE_WINDOW)
        w = report.parameters["window"]
        chart = ([report.series["pooled_share_ma"], report.series["share_difference_ma"]],
                 [f"pooled top-scorer share ({w}-yr MA)",
                  f"champion minus runner-up ({w}-yr MA)"],
                 "Top-scorer share of team points in the final", "share")
    elif cmd == "pace":
        lam = DEFAULT_LAMBDA if args.lam is None else args.lam
        brk = PACE_BREAK if args.break_season is None else args.break_season
        report = analyze_pace(dataset, lam, brk, args.window or PACE_WINDOW)
        w = report.parameters["window"]
        chart = ([report.series["possessions_ma"]], [f"possessions ({w}-yr MA)"],
                 "Possessions in the final", "possessions")
    elif cmd == "scorer-correlation":
        report = analyze_scorer_correlation(dataset)
        chart = None
    elif cmd == "final-four-odds":
        report = analyze_final_four_randomness(dataset, args.era, args.iterations, args.seed)
        chart = None
    else:  # pragma: no cover
        raise UsageError(f"unknown command {cmd}")
    return report, chart


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def _fail(kind: str, message: str, code: int) -> int:
    text = " ".join(str(message).split())
    print(f"eurohist: {kind}: {text}", file=sys.stderr)
    return code


def run(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        spec = OutputSpec(args.format, Path(args.plot) if args.plot else None, args.precision)
        if args.command == "test":
            report, chart = run_test(args), None
        else:
            report, chart = run_analysis(args)
        if spec.plot_path is not None:
            if chart is None:
                raise UsageError(f"{args.command} has no chart; drop --plot")
            series, labels, title, y_label = chart
            render_line_chart(series, labels, spec.plot_path, title, y_label)
        payload = render_report(report, spec)
        if args.output:
            Path(args.output).write_bytes(payload)
        else:
            sys.stdout.buffer.write(payload)
            sys.stdout.flush()
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except DataError as exc:
        return _fail("data", exc, EXIT_DATA)
    except OSError as exc:
        where = f"{exc.filename}: " if exc.filename else ""
        return _fail("io", f"{where}{exc.strerror or exc}", EXIT_DATA)
    except DomainError as exc:
        return _fail("domain", exc, EXIT_DOMAIN)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
