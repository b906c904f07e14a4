"""Analysis pipelines combining dataset series with the hypothesis tests.

Each ``analyze_*`` function is a pure function of the dataset and its
parameters and returns an :class:`AnalysisReport`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .dataset import (
    DEFAULT_LAMBDA,
    MODERN_ERA_START,
    REGIONS,
    TABLE2_PERIODS,
    Dataset,
    Fork,
    SeasonId,
    TimeSeries,
    aggregate_by_period,
    appearances_by_region_period,
    collapse_forks,
    country_rollup,
    finals_share_pairs,
    moving_average,
    period_label,
    pooled_share_series,
    possessions_for_final,
    possessions_series,
    scorer_share_series,
    share_difference_series,
    team_tallies,
    titles_by_region_period,
)
from .errors import DomainError
from .stats_tests import (
    BreakResult,
    FinalFourDraw,
    TestResult,
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

SHARE_WINDOW = 10
PACE_WINDOW = 5
PACE_BREAK = 1998
BINOMIAL_FLAG_LEVEL = 0.1
LAMBDA_STEP = 0.1
DIFF_PCT_LEVELS = (0.20, 0.30)


class AnalysisId(str, Enum):
    DOMINANCE = "dominance"
    CHAMPION_DOMINANCE = "champion_dominance"
    PLURALISM = "pluralism"
    PACE = "pace"
    SCORER_CORRELATION = "scorer_correlation"
    FINAL_FOUR_RANDOMNESS = "final_four_randomness"
    TEST = "test"  # a single test run from the command line


@dataclass(frozen=True)
class Table:
    """Labelled matrix; cells may be numbers or short strings."""

    columns: tuple[str, ...]
    row_labels: tuple[str, ...]
    cells: tuple[tuple[object, ...], ...]
    row_header: str = "row"

    def __post_init__(self) -> None:
        if len(self.row_labels) != len(self.cells):
            raise DomainError("table needs one label per row")
        for row in self.cells:
            if len(row) != len(self.columns):
                raise DomainError("table row width does not match its columns")

    def column(self, name: str) -> list[object]:
        j = self.columns.index(name)
        return [row[j] for row in self.cells]

    def row(self, label: str) -> dict[str, object]:
        i = self.row_labels.index(label)
        return dict(zip(self.columns, self.cells[i]))


@dataclass(frozen=True)
class AnalysisReport:
    analysis_id: AnalysisId
    tables: dict[str, Table] = field(default_factory=dict)
    series: dict[str, TimeSeries] = field(default_factory=dict)
    tests: dict[str, TestResult | BreakResult] = field(default_factory=dict)
    notes: tuple[str, ...] = ()
    parameters: dict[str, object] = field(default_factory=dict)

    def test(self, name: str) -> TestResult:
        """The plain TestResult behind ``name`` (unwrapping break results)."""
        result = self.tests[name]
        return result.base if isinstance(result, BreakResult) else result


def _source_notes(dataset: Dataset, *kinds: str) -> tuple[str, ...]:
    notes = [f"data directory: {dataset.source_dir}"] if dataset.source_dir else []
    tags: dict[str, set[str]] = {
        "final_games": {g.source for g in dataset.final_games},
        "champion_scoring": {r.source for r in dataset.champion_scoring},
    }
    for kind in kinds:
        found = sorted(t for t in tags.get(kind, ()) if t)
        if found:
            notes.append(f"{kind} source tags: {', '.join(found)}")
    return tuple(notes)


def _period_series(rows: Sequence[dict], key: str) -> TimeSeries:
    entries = []
    for row in rows:
        lo, hi = (int(p) for p in row["period"].split("-"))
        entries.append((SeasonId(row["period"], hi, Fork.UNIFIED), float(row[key])))
    return TimeSeries(tuple(entries))


# ---------------------------------------------------------------------------
# Geographic dominance
# ---------------------------------------------------------------------------

def analyze_dominance(dataset: Dataset,
                      period_scheme: Sequence[tuple[int, int]] = TABLE2_PERIODS) -> AnalysisReport:
    """Titles and appearances per region and period, with Friedman tests across regions."""
    scheme = tuple(period_scheme)
    periods = tuple(period_label(p) for p in scheme)
    regions = tuple(r.value for r in REGIONS)
    titles = titles_by_region_period(dataset, scheme)
    apps = appearances_by_region_period(dataset, scheme)

    rollup = country_rollup(dataset)
    country = Table(
        ("region", "winner", "runner_up", "appearances", "teams"),
        tuple(c.country for c in rollup),
        tuple((c.region.value, c.winner, c.runner_up, c.appearances, c.teams) for c in rollup),
        row_header="country",
    )
    region_totals = Table(
        ("titles", "appearances"),
        regions,
        tuple((int(titles[:, j].sum()), int(apps[:, j].sum())) for j in range(len(regions))),
        row_header="region",
    )
    return AnalysisReport(
        AnalysisId.DOMINANCE,
        tables={
            "titles_by_region": Table(regions, periods,
                                      tuple(tuple(int(v) for v in r) for r in titles), "period"),
            "appearances_by_region": Table(regions, periods,
                                           tuple(tuple(int(v) for v in r) for r in apps), "period"),
            "country_rollup": country,
            "region_totals": region_totals,
        },
        tests={
            "friedman_titles": friedman_test(titles),
            "friedman_appearances": friedman_test(apps),
        },
        notes=_source_notes(dataset) + (
            "Friedman blocks are periods and treatments are regions",),
        parameters={"period_scheme": [list(p) for p in scheme]},
    )


# ---------------------------------------------------------------------------
# Champion scoring dominance
# ---------------------------------------------------------------------------

def analyze_champion_dominance(dataset: Dataset,
                               periods: Sequence[tuple[int, int]] = TABLE2_PERIODS) -> AnalysisReport:
    """Champion versus opponent points per game, by season and by period."""
    records = sorted(dataset.champion_scoring, key=lambda r: r.season.key)
    if not records:
        raise DomainError("no champion scoring records loaded")

    def series(fn) -> TimeSeries:
        return TimeSeries(tuple((r.season, float(fn(r))) for r in records))

    rows = aggregate_by_period(records, periods)
    table = Table(
        ("champion", "opponent", "per_team", "diff_pct", "seasons"),
        tuple(r["period"] for r in rows),
        tuple((r["champion"], r["opponent"], r["per_team"], r["diff_pct"], r["seasons"])
              for r in rows),
        row_header="period",
    )
    flagged = {}
    for level in DIFF_PCT_LEVELS:
        hits = [r for r in records if r.diff_pct > level]
        flagged[level] = hits
    flag_table = Table(
        ("diff_pct", "above_20pct", "above_30pct"),
        tuple(r.season.label for r in flagged[DIFF_PCT_LEVELS[0]]),
        tuple((r.diff_pct, True, r.diff_pct > DIFF_PCT_LEVELS[1])
              for r in flagged[DIFF_PCT_LEVELS[0]]),
        row_header="season",
    )
    counts = Table(
        ("seasons",),
        tuple(f"diff_pct > {level:g}" for level in DIFF_PCT_LEVELS),
        tuple((len(flagged[level]),) for level in DIFF_PCT_LEVELS),
        row_header="threshold",
    )
    return AnalysisReport(
        AnalysisId.CHAMPION_DOMINANCE,
        tables={"periods": table, "dominant_seasons": flag_table, "dominance_counts": counts},
        series={
            "champion_ppg": series(lambda r: r.champ_ppg),
            "opponent_ppg": series(lambda r: r.opp_ppg),
            "diff_pct": series(lambda r: r.diff_pct),
            "per_team_ppg": series(lambda r: (r.champ_ppg + r.opp_ppg) / 2.0),
            "period_diff_pct": _period_series(rows, "diff_pct"),
        },
        notes=_source_notes(dataset, "champion_scoring"),
        parameters={"periods": [list(p) for p in periods]},
    )


# ---------------------------------------------------------------------------
# Scoring pluralism in the finals
# ---------------------------------------------------------------------------

def analyze_pluralism(dataset: Dataset, break_ordinal: int | None = None,
                      za_on_ma: bool = False, window: int = SHARE_WINDOW,
                      lags: int = 5, trim: float = 0.15) -> AnalysisReport:
    """Top-scorer share of both finalists: trend, paired tests and a break search.

    The full-period Wilcoxon and runs tests use every final game. The break
    search runs on the champion-minus-runner-up difference with the two
    2000-01 finals averaged into one season. The modern-era re-tests take
    the games after the break (the detected one unless ``break_ordinal`` is
    given), keeping the Euroleague branch of the split season.
    """
    if not dataset.final_games:
        raise DomainError("no final games loaded")
    pairs = finals_share_pairs(dataset)
    champ = [p.champion for p in pairs]
    runner = [p.runner_up for p in pairs]
    diffs = [p.difference for p in pairs]

    difference = share_difference_series(dataset)
    annual = collapse_forks(difference)
    diff_ma = moving_average(difference, window)
    za_input = diff_ma if za_on_ma else annual
    za = zivot_andrews(za_input, lags=lags, trim=trim)
    detected = za_input.entries[za.break_position][0].ordinal
    cut = detected if break_ordinal is None else break_ordinal

    modern = [p for p in pairs if p.season.ordinal > cut and p.season.fork != Fork.FIBA_BRANCH]
    tests: dict[str, TestResult | BreakResult] = {
        "wilcoxon_full": wilcoxon_signed_rank(champ, runner),
        "runs_full": runs_test(diffs),
        "zivot_andrews": za,
    }
    notes = list(_source_notes(dataset, "final_games"))
    notes.append(f"break detected after season ordinal {detected}; "
                 f"modern era uses ordinals > {cut}")
    if modern:
        tests["wilcoxon_modern"] = wilcoxon_signed_rank([p.champion for p in modern],
                                                        [p.runner_up for p in modern])
        try:
            tests["runs_modern"] = runs_test([p.difference for p in modern])
        except DomainError as exc:
            notes.append(f"modern runs test not computable: {exc}")
    else:
        notes.append("no finals after the break; modern re-tests skipped")

    return AnalysisReport(
        AnalysisId.PLURALISM,
        series={
            "champion_share": scorer_share_series(dataset, "champion"),
            "runner_up_share": scorer_share_series(dataset, "runner_up"),
            "share_difference": difference,
            "share_difference_annual": annual,
            "pooled_share_ma": moving_average(pooled_share_series(dataset), window),
            "share_difference_ma": diff_ma,
        },
        tests=tests,
        notes=tuple(notes),
        parameters={"break_ordinal": cut, "detected_break_ordinal": detected,
                    "za_on_ma": za_on_ma, "window": window, "lags": lags, "trim": trim},
    )


# ---------------------------------------------------------------------------
# Pace
# ---------------------------------------------------------------------------

def _group_possessions(dataset: Dataset, lam: float, cut: int) -> tuple[list[float], list[float]]:
    before, after = [], []
    for g in dataset.final_games:
        value = possessions_for_final(g, lam)
        if value is None:
            continue
        (before if g.season.ordinal <= cut else after).append(value)
    return before, after


def analyze_pace(dataset: Dataset, lam: float = DEFAULT_LAMBDA,
                 break_ordinal: int = PACE_BREAK, window: int = PACE_WINDOW) -> AnalysisReport:
    """Estimated possessions per final and the shift across ``break_ordinal``."""
    series, excluded = possessions_series(dataset, lam)
    if not len(series):
        raise DomainError("no final has the box-score fields needed for possessions")
    before, after = _group_possessions(dataset, lam, break_ordinal)
    if not before or not after:
        raise DomainError(f"possessions need games on both sides of ordinal {break_ordinal}")

    labels, cells = [], []
    for name, value in (("lambda_low", lam - LAMBDA_STEP), ("lambda", lam),
                        ("lambda_high", lam + LAMBDA_STEP)):
        b, a = _group_possessions(dataset, value, break_ordinal)
        labels.append(name)
        cells.append((value, float(np.mean(b)), float(np.mean(a)),
                      float(np.mean(b + a))))
    sensitivity = Table(("lambda", "mean_before", "mean_after", "mean_all"),
                        tuple(labels), tuple(cells), row_header="setting")
    groups = Table(("games", "mean", "median"), ("before", "after"),
                   ((len(before), float(np.mean(before)), float(np.median(before))),
                    (len(after), float(np.mean(after)), float(np.median(after)))),
                   row_header="group")

    late = series.filter(lambda s: s.ordinal > 2002 - 1)
    below = sum(1 for v in late.values() if v < 70.0)
    notes = list(_source_notes(dataset, "final_games"))
    notes.append(f"{excluded} final games lack box-score fields and are excluded")
    notes.append(f"seasons from 2002 with fewer than 70 possessions: {below}")
    return AnalysisReport(
        AnalysisId.PACE,
        tables={"groups": groups, "lambda_sensitivity": sensitivity},
        series={"possessions": series, "possessions_ma": moving_average(series, window)},
        tests={"mann_whitney": mann_whitney(before, after)},
        notes=tuple(notes),
        parameters={"lambda": lam, "break_ordinal": break_ordinal, "window": window,
                    "excluded_games": excluded},
    )


# ---------------------------------------------------------------------------
# Tournament top scorer versus team performance
# ---------------------------------------------------------------------------

def analyze_scorer_correlation(dataset: Dataset) -> AnalysisReport:
    """Correlation between the top scorer's average and how far the team went."""
    rows = sorted(dataset.top_scorers, key=lambda r: r.season.key)
    if len(rows) < 3:
        raise DomainError("scorer correlation needs at least three seasons")
    ppg = [r.ppg for r in rows]
    score = [r.assigned_score for r in rows]
    table = Table(
        ("player", "ppg", "team", "performance", "assigned_score"),
        tuple(str(r.season) for r in rows),
        tuple((r.player, r.ppg, r.team, r.performance_label.value, r.assigned_score)
              for r in rows),
        row_header="season",
    )
    return AnalysisReport(
        AnalysisId.SCORER_CORRELATION,
        tables={"top_scorers": table},
        tests={"pearson": pearson_test(ppg, score), "spearman": spearman_test(ppg, score)},
        notes=_source_notes(dataset),
    )


# ---------------------------------------------------------------------------
# Were the final fours a lottery?
# ---------------------------------------------------------------------------

def era_final_fours(dataset: Dataset, era: str) -> list:
    if era == "full":
        return list(dataset.final_fours)
    if era == "modern":
        return dataset.final_fours_in(start=MODERN_ERA_START)
    raise DomainError(f"era must be 'full' or 'modern', got {era!r}")


def analyze_final_four_randomness(dataset: Dataset, era: str = "full",
                                  iterations: int = 100_000, seed: int = 0,
                                  workers: int = 1) -> AnalysisReport:
    """Observed titles against equal chances for the four teams of every final four."""
    records = era_final_fours(dataset, era)
    if not records:
        raise DomainError(f"no final fours in era {era!r}")
    tallies = sorted(team_tallies(records).values(),
                     key=lambda t: (-t.titles, -t.appearances, t.team))
    binomials = {t.team: binomial_test_two_sided(t.titles, t.appearances, 0.25)
                 for t in tallies}
    table = Table(
        ("team_name", "titles", "appearances", "expected", "observed", "difference",
         "binomial_p", "flagged"),
        tuple(t.team for t in tallies),
        tuple((dataset.team(t.team).display_names[0], t.titles, t.appearances,
               t.expected_titles, t.titles, t.difference, binomials[t.team].p_value,
               binomials[t.team].p_value < BINOMIAL_FLAG_LEVEL) for t in tallies),
        row_header="team",
    )
    draws = [FinalFourDraw(ff.placed, ff.winner) for ff in records]
    tests: dict[str, TestResult | BreakResult] = {
        "multinomial": multinomial_mc_gof(draws, iterations=iterations, seed=seed,
                                          workers=workers),
    }
    for t in tallies:
        if binomials[t.team].p_value < BINOMIAL_FLAG_LEVEL:
            tests[f"binomial_{t.team}"] = binomials[t.team]
    return AnalysisReport(
        AnalysisId.FINAL_FOUR_RANDOMNESS,
        tables={"teams": table},
        tests=tests,
        notes=_source_notes(dataset) + (
            f"{len(records)} final fours; binomial tests use p0 = 0.25 and are listed "
            f"individually when p < {BINOMIAL_FLAG_LEVEL:g}",),
        parameters={"era": era, "iterations": iterations, "seed": seed},
    )
