"""Euroleague historical record: data model, CSV loading and derived series."""

from __future__ import annotations

import csv
import logging
from collections import Counter, defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError, DomainError

log = logging.getLogger(__name__)

DEFAULT_LAMBDA = 0.44
MODERN_ERA_START = 1999


class Fork(str, Enum):
    UNIFIED = "unified"
    FIBA_BRANCH = "fiba_branch"
    EUROLEAGUE_BRANCH = "euroleague_branch"


_FORK_ORDER = {Fork.UNIFIED: 0, Fork.FIBA_BRANCH: 1, Fork.EUROLEAGUE_BRANCH: 2}


class Region(str, Enum):
    SPAIN = "Spain"
    ITALY = "Italy"
    EX_USSR_YUGOSLAVIA = "ExUSSR_ExYugoslavia"
    OTHER = "Other"


REGIONS = tuple(Region)

# Countries that made up the Soviet Union or Yugoslavia; everything outside
# Spain, Italy and this list is "Other".
_EX_USSR_YUGOSLAVIA = frozenset({
    "Russia", "Latvia", "Lithuania", "Georgia", "Estonia", "Ukraine", "Belarus",
    "Croatia", "Bosnia", "Serbia", "Slovenia", "Montenegro", "North Macedonia",
})


def region_for_country(country: str) -> Region:
    if country == "Spain":
        return Region.SPAIN
    if country == "Italy":
        return Region.ITALY
    if country in _EX_USSR_YUGOSLAVIA:
        return Region.EX_USSR_YUGOSLAVIA
    return Region.OTHER


class Performance(str, Enum):
    REGULAR_SEASON = "regular_season"
    TOP16 = "top16"
    QUARTERFINALS = "quarterfinals"
    FINAL_FOUR = "final_four"
    RUNNER_UP = "runner_up"
    WINNER = "winner"


_PERFORMANCE_SCORES = {
    Performance.REGULAR_SEASON: 1.0,
    Performance.TOP16: 2.0,
    Performance.QUARTERFINALS: 3.0,
    Performance.FINAL_FOUR: 4.0,
    Performance.RUNNER_UP: 4.5,
    Performance.WINNER: 5.0,
}


def performance_score(label: Performance | str) -> float:
    """Numeric value of a team's season outcome (third/fourth place count as final four)."""
    try:
        return _PERFORMANCE_SCORES[Performance(label)]
    except ValueError:
        raise DomainError(f"unknown performance label {label!r}") from None


def expected_titles(appearances: int) -> float:
    """Titles expected from ``appearances`` final fours at a 1-in-4 chance each."""
    if appearances < 0:
        raise DomainError("appearances must be nonnegative")
    return 0.25 * appearances


@dataclass(frozen=True, order=False)
class SeasonId:
    label: str
    ordinal: int
    fork: Fork = Fork.UNIFIED

    @property
    def key(self) -> tuple[int, int]:
        return (self.ordinal, _FORK_ORDER[self.fork])

    def __lt__(self, other: SeasonId) -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.label

    @classmethod
    def merged(cls, ordinal: int) -> SeasonId:
        """Season id used after both forks of one ordinal are pooled."""
        return cls(f"{ordinal - 1}-{ordinal}", ordinal, Fork.UNIFIED)


@dataclass(frozen=True)
class TeamInfo:
    canonical_id: str
    display_names: tuple[str, ...]
    country: str
    region: Region


@dataclass(frozen=True)
class FinalFourRecord:
    season: SeasonId
    placed: tuple[str, str, str, str]

    @property
    def winner(self) -> str:
        return self.placed[0]

    @property
    def runner_up(self) -> str:
        return self.placed[1]


@dataclass(frozen=True)
class FinalSide:
    team: str
    points: int
    top_scorer_points: int
    fga: int | None = None
    fgm: int | None = None
    fta: int | None = None
    ftm: int | None = None
    oreb: int | None = None
    dreb: int | None = None
    to: int | None = None

    @property
    def has_possession_fields(self) -> bool:
        return self.fga is not None

    @property
    def scorer_share(self) -> float:
        if self.points <= 0:
            raise DataError(f"{self.team} scored no points; share undefined")
        return self.top_scorer_points / self.points


@dataclass(frozen=True)
class FinalGame:
    season: SeasonId
    leg: int
    champion: FinalSide
    runner_up: FinalSide
    source: str = ""

    @property
    def sides(self) -> tuple[FinalSide, FinalSide]:
        return (self.champion, self.runner_up)


@dataclass(frozen=True)
class ChampionScoringRecord:
    season: SeasonId
    champ_ppg: float
    opp_ppg: float
    source: str = ""

    @property
    def diff_pct(self) -> float:
        return (self.champ_ppg - self.opp_ppg) / self.opp_ppg


@dataclass(frozen=True)
class TopScorerRecord:
    season: SeasonId
    player: str
    ppg: float
    team: str
    performance_label: Performance

    @property
    def assigned_score(self) -> float:
        return performance_score(self.performance_label)


@dataclass(frozen=True)
class TimeSeries:
    """Values indexed by season, strictly increasing by (ordinal, fork)."""

    entries: tuple[tuple[SeasonId, float], ...] = ()
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        entries = tuple((s, float(v)) for s, v in self.entries)
        object.__setattr__(self, "entries", entries)
        for (a, _), (b, _) in zip(entries, entries[1:]):
            if not a < b:
                raise DomainError(f"series not strictly increasing at {a.label} -> {b.label}")

    def __len__(self) -> int:
        return len(self.entries)

    def values(self) -> list[float]:
        return [v for _, v in self.entries]

    def labels(self) -> list[str]:
        return [s.label for s, _ in self.entries]

    def ordinals(self) -> list[int]:
        return [s.ordinal for s, _ in self.entries]

    def map(self, fn) -> TimeSeries:
        return TimeSeries(tuple((s, fn(v)) for s, v in self.entries), self.flags)

    def filter(self, predicate) -> TimeSeries:
        return TimeSeries(tuple((s, v) for s, v in self.entries if predicate(s)), self.flags)


@dataclass
class Dataset:
    teams: dict[str, TeamInfo]
    aliases: dict[str, str]
    final_fours: list[FinalFourRecord]
    final_games: list[FinalGame]
    champion_scoring: list[ChampionScoringRecord]
    top_scorers: list[TopScorerRecord]
    source_dir: str = ""
    notes: list[str] = field(default_factory=list)

    def resolve(self, name: str) -> str:
        return self.aliases[name]

    def team(self, team_id: str) -> TeamInfo:
        return self.teams[team_id]

    def region_of(self, team_id: str) -> Region:
        return self.teams[team_id].region

    def final_fours_in(self, start: int | None = None, end: int | None = None,
                       forks: Iterable[Fork] | None = None) -> list[FinalFourRecord]:
        allowed = set(forks) if forks is not None else None
        return [
            ff for ff in self.final_fours
            if (start is None or ff.season.ordinal >= start)
            and (end is None or ff.season.ordinal <= end)
            and (allowed is None or ff.season.fork in allowed)
        ]

    @property
    def first_ordinal(self) -> int:
        return min(ff.season.ordinal for ff in self.final_fours)

    @property
    def last_ordinal(self) -> int:
        return max(ff.season.ordinal for ff in self.final_fours)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

SCHEMAS = {
    "teams.csv": ("canonical_id", "alias", "country", "region"),
    "final_fours.csv": ("season_label", "ordinal", "fork", "winner", "runner_up",
                        "third", "fourth"),
    "final_games.csv": ("season_label", "ordinal", "fork", "leg", "team", "points",
                        "top_scorer_points", "fga", "fgm", "fta", "ftm", "oreb", "dreb",
                        "to", "source"),
    "champion_scoring.csv": ("season_label", "ordinal", "fork", "champ_ppg", "opp_ppg",
                             "source"),
    "top_scorers.csv": ("season_label", "ordinal", "fork", "player", "ppg", "team",
                        "performance_label"),
}

_POSSESSION_FIELDS = ("fga", "fgm", "fta", "ftm", "oreb", "dreb", "to")


def bundled_data_dir() -> Path:
    return Path(str(resources.files("eurohist") / "data"))


def _read_csv(directory: Path, name: str) -> list[tuple[int, dict[str, str]]]:
    path = directory / name
    if not path.is_file():
        raise DataError("required file is missing", str(path))
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        missing = [c for c in SCHEMAS[name] if c not in header]
        if missing:
            raise DataError(f"header lacks columns {missing}", str(path), 1)
        return [(i, row) for i, row in enumerate(reader, start=2)]


class _RowContext:
    def __init__(self, path: Path, line: int):
        self.path = str(path)
        self.line = line

    def fail(self, message: str) -> DataError:
        return DataError(message, self.path, self.line)

    def integer(self, row: dict, key: str, optional: bool = False) -> int | None:
        raw = (row.get(key) or "").strip()
        if raw == "":
            if optional:
                return None
            raise self.fail(f"column {key!r} is empty")
        try:
            value = int(raw)
        except ValueError:
            raise self.fail(f"column {key!r} is not an integer: {raw!r}") from None
        if value < 0 and key != "ordinal":
            raise self.fail(f"column {key!r} must be nonnegative, got {value}")
        return value

    def real(self, row: dict, key: str) -> float:
        raw = (row.get(key) or "").strip()
        try:
            return float(raw)
        except ValueError:
            raise self.fail(f"column {key!r} is not a number: {raw!r}") from None

    def season(self, row: dict) -> SeasonId:
        label = (row.get("season_label") or "").strip()
        if not label:
            raise self.fail("season_label is empty")
        try:
            fork = Fork((row.get("fork") or "unified").strip() or "unified")
        except ValueError:
            raise self.fail(f"unknown fork {row.get('fork')!r}") from None
        return SeasonId(label, self.integer(row, "ordinal"), fork)


def load_dataset(directory: str | Path | None = None) -> Dataset:
    """Load and validate the five CSV tables in ``directory`` (bundled data by default)."""
    base = Path(directory) if directory is not None else bundled_data_dir()
    if not base.is_dir():
        raise DataError("data directory does not exist", str(base))

    teams, aliases = _load_teams(base)

    def resolve(ctx: _RowContext, name: str) -> str:
        name = name.strip()
        if name in aliases:
            return aliases[name]
        raise ctx.fail(f"unknown team {name!r}")

    final_fours = _load_final_fours(base, resolve)
    ff_by_season = {ff.season: ff for ff in final_fours}
    games = _load_final_games(base, resolve, ff_by_season)
    scoring = _load_champion_scoring(base, ff_by_season)
    scorers = _load_top_scorers(base, resolve)
    ds = Dataset(teams, aliases, final_fours, games, scoring, scorers, str(base))
    log.debug("loaded %d final fours, %d final games from %s",
              len(final_fours), len(games), base)
    return ds


def _load_teams(base: Path) -> tuple[dict[str, TeamInfo], dict[str, str]]:
    path = base / "teams.csv"
    names: dict[str, list[str]] = defaultdict(list)
    meta: dict[str, tuple[str, Region]] = {}
    aliases: dict[str, str] = {}
    for line, row in _read_csv(base, "teams.csv"):
        ctx = _RowContext(path, line)
        cid = row["canonical_id"].strip()
        alias = row["alias"].strip()
        country = row["country"].strip()
        if not cid or not alias or not country:
            raise ctx.fail("canonical_id, alias and country are required")
        try:
            region = Region(row["region"].strip())
        except ValueError:
            raise ctx.fail(f"unknown region {row['region']!r}") from None
        if region is not region_for_country(country):
            raise ctx.fail(f"region {region.value} inconsistent with country {country}")
        if alias in aliases and aliases[alias] != cid:
            raise ctx.fail(f"alias {alias!r} already maps to {aliases[alias]!r}")
        if cid in meta and meta[cid] != (country, region):
            raise ctx.fail(f"team {cid!r} listed with conflicting country")
        meta[cid] = (country, region)
        aliases[alias] = cid
        names[cid].append(alias)
    for cid in meta:
        aliases.setdefault(cid, cid)
    teams = {
        cid: TeamInfo(cid, tuple(names[cid]), country, region)
        for cid, (country, region) in meta.items()
    }
    return teams, aliases


def _load_final_fours(base: Path, resolve) -> list[FinalFourRecord]:
    path = base / "final_fours.csv"
    records: list[FinalFourRecord] = []
    seen: set[SeasonId] = set()
    for line, row in _read_csv(base, "final_fours.csv"):
        ctx = _RowContext(path, line)
        season = ctx.season(row)
        placed = tuple(resolve(ctx, row[k]) for k in ("winner", "runner_up", "third", "fourth"))
        if len(set(placed)) != 4:
            raise ctx.fail(f"season {season.label}: final four has duplicate teams {placed}")
        if season in seen:
            raise ctx.fail(f"season {season.label} listed twice")
        seen.add(season)
        records.append(FinalFourRecord(season, placed))  # type: ignore[arg-type]
    records.sort(key=lambda r: r.season.key)
    _check_unique_keys(path, [r.season for r in records])
    return records


def _check_unique_keys(path: Path, seasons: Sequence[SeasonId]) -> None:
    keys = Counter(s.key for s in seasons)
    dup = [k for k, c in keys.items() if c > 1]
    if dup:
        raise DataError(f"seasons share (ordinal, fork): {dup}", str(path))


def _season_lookup(ctx: _RowContext, season: SeasonId,
                   ff_by_season: dict[SeasonId, FinalFourRecord]) -> FinalFourRecord:
    for key, ff in ff_by_season.items():
        if key.key == season.key:
            return ff
    raise ctx.fail(f"season {season.label} has no final-four record")


def _load_final_games(base: Path, resolve, ff_by_season) -> list[FinalGame]:
    path = base / "final_games.csv"
    sides: dict[tuple[SeasonId, int], list[tuple[int, FinalSide, str]]] = defaultdict(list)
    for line, row in _read_csv(base, "final_games.csv"):
        ctx = _RowContext(path, line)
        season = ctx.season(row)
        ff = _season_lookup(ctx, season, ff_by_season)
        leg = ctx.integer(row, "leg")
        if leg < 1:
            raise ctx.fail("leg must be a positive integer")
        team = resolve(ctx, row["team"])
        if team not in (ff.winner, ff.runner_up):
            raise ctx.fail(f"{team} is neither finalist of {season.label}")
        extra = {k: ctx.integer(row, k, optional=True) for k in _POSSESSION_FIELDS}
        present = [v is not None for v in extra.values()]
        if any(present) and not all(present):
            raise ctx.fail("possession fields must be all present or all empty")
        side = FinalSide(team, ctx.integer(row, "points"),
                         ctx.integer(row, "top_scorer_points"), **extra)
        if side.top_scorer_points > side.points:
            raise ctx.fail("top scorer points exceed team points")
        if side.points == 0:
            raise ctx.fail("team points must be positive")
        if all(present):
            if side.fgm > side.fga or side.ftm > side.fta:
                raise ctx.fail("made shots exceed attempts")
        sides[(ff.season, leg)].append((line, side, (row.get("source") or "").strip()))

    games: list[FinalGame] = []
    for (season, leg), entries in sides.items():
        ff = ff_by_season[season]
        by_team = {s.team: (ln, s, src) for ln, s, src in entries}
        if len(entries) != 2 or set(by_team) != {ff.winner, ff.runner_up}:
            raise DataError(f"season {season.label} leg {leg} needs exactly one row per finalist",
                            str(path), entries[0][0])
        champ = by_team[ff.winner][1]
        runner = by_team[ff.runner_up][1]
        if champ.has_possession_fields != runner.has_possession_fields:
            raise DataError(f"season {season.label} leg {leg}: possession fields on one side only",
                            str(path), entries[0][0])
        games.append(FinalGame(season, leg, champ, runner, by_team[ff.winner][2]))
    games.sort(key=lambda g: (g.season.key, g.leg))

    aggregate: dict[SeasonId, list[int]] = defaultdict(lambda: [0, 0])
    for g in games:
        aggregate[g.season][0] += g.champion.points
        aggregate[g.season][1] += g.runner_up.points
    for season, (c, r) in aggregate.items():
        if c <= r:
            raise DataError(f"season {season.label}: champion did not outscore the runner-up "
                            f"over the final ({c} vs {r})", str(path))
    return games


def _load_champion_scoring(base: Path, ff_by_season) -> list[ChampionScoringRecord]:
    path = base / "champion_scoring.csv"
    out: list[ChampionScoringRecord] = []
    for line, row in _read_csv(base, "champion_scoring.csv"):
        ctx = _RowContext(path, line)
        season = _season_lookup(ctx, ctx.season(row), ff_by_season).season
        champ, opp = ctx.real(row, "champ_ppg"), ctx.real(row, "opp_ppg")
        if champ <= 0 or opp <= 0:
            raise ctx.fail("points per game must be strictly positive")
        out.append(ChampionScoringRecord(season, champ, opp, (row.get("source") or "").strip()))
    out.sort(key=lambda r: r.season.key)
    _check_unique_keys(path, [r.season for r in out])
    return out


def _load_top_scorers(base: Path, resolve) -> list[TopScorerRecord]:
    path = base / "top_scorers.csv"
    out: list[TopScorerRecord] = []
    for line, row in _read_csv(base, "top_scorers.csv"):
        ctx = _RowContext(path, line)
        season = ctx.season(row)
        try:
            label = Performance(row["performance_label"].strip())
        except ValueError:
            raise ctx.fail(f"unknown performance label {row['performance_label']!r}") from None
        ppg = ctx.real(row, "ppg")
        if ppg <= 0:
            raise ctx.fail("ppg must be positive")
        out.append(TopScorerRecord(season, row["player"].strip(), ppg,
                                   resolve(ctx, row["team"]), label))
    out.sort(key=lambda r: r.season.key)
    _check_unique_keys(path, [r.season for r in out])
    return out


# ---------------------------------------------------------------------------
# Region aggregates
# ---------------------------------------------------------------------------

TABLE2_PERIODS: tuple[tuple[int, int], ...] = (
    (1958, 1970), (1971, 1980), (1981, 1990), (1991, 2000), (2001, 2010), (2011, 2018),
)


def parse_period_scheme(text: str) -> tuple[tuple[int, int], ...]:
    """Parse ``"1958-1970,1971-1980"`` into inclusive ordinal ranges."""
    periods = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        try:
            lo, hi = (int(p) for p in chunk.split("-"))
        except ValueError:
            raise DomainError(f"bad period {chunk!r}; expected START-END") from None
        periods.append((lo, hi))
    return tuple(periods)


def period_label(period: tuple[int, int]) -> str:
    return f"{period[0]}-{period[1]}"


def _validate_scheme(dataset: Dataset, scheme: Sequence[tuple[int, int]]) -> None:
    if not scheme:
        raise DomainError("period scheme is empty")
    expected = dataset.first_ordinal
    for lo, hi in scheme:
        if lo > hi:
            raise DomainError(f"period {lo}-{hi} is reversed")
        if lo != expected:
            raise DomainError(f"period scheme is not contiguous at {lo} (expected {expected})")
        expected = hi + 1
    if expected - 1 != dataset.last_ordinal:
        raise DomainError(
            f"period scheme ends at {expected - 1}, data runs to {dataset.last_ordinal}")


def _period_index(scheme: Sequence[tuple[int, int]], ordinal: int) -> int:
    for i, (lo, hi) in enumerate(scheme):
        if lo <= ordinal <= hi:
            return i
    raise DomainError(f"ordinal {ordinal} not covered by the period scheme")


def titles_by_region_period(dataset: Dataset,
                            scheme: Sequence[tuple[int, int]] = TABLE2_PERIODS) -> np.ndarray:
    """Periods x regions matrix of titles, columns ordered as ``REGIONS``."""
    _validate_scheme(dataset, scheme)
    out = np.zeros((len(scheme), len(REGIONS)), dtype=int)
    for ff in dataset.final_fours:
        out[_period_index(scheme, ff.season.ordinal),
            REGIONS.index(dataset.region_of(ff.winner))] += 1
    return out


def appearances_by_region_period(dataset: Dataset,
                                 scheme: Sequence[tuple[int, int]] = TABLE2_PERIODS) -> np.ndarray:
    _validate_scheme(dataset, scheme)
    out = np.zeros((len(scheme), len(REGIONS)), dtype=int)
    for ff in dataset.final_fours:
        row = _period_index(scheme, ff.season.ordinal)
        for team in ff.placed:
            out[row, REGIONS.index(dataset.region_of(team))] += 1
    return out


@dataclass(frozen=True)
class TeamTally:
    team: str
    titles: int
    runner_up: int
    appearances: int

    @property
    def expected_titles(self) -> float:
        return expected_titles(self.appearances)

    @property
    def difference(self) -> float:
        return self.titles - self.expected_titles


def team_tallies(records: Iterable[FinalFourRecord]) -> dict[str, TeamTally]:
    titles: Counter = Counter()
    runners: Counter = Counter()
    apps: Counter = Counter()
    for ff in records:
        titles[ff.winner] += 1
        runners[ff.runner_up] += 1
        apps.update(ff.placed)
    return {t: TeamTally(t, titles[t], runners[t], apps[t]) for t in apps}


@dataclass(frozen=True)
class CountryTally:
    country: str
    region: Region
    winner: int
    runner_up: int
    appearances: int
    teams: int


def country_rollup(dataset: Dataset) -> list[CountryTally]:
    """Titles, runner-up places, appearances and distinct teams per country."""
    acc: dict[str, list[int]] = defaultdict(lambda: [0, 0, 0, 0])
    for tally in team_tallies(dataset.final_fours).values():
        info = dataset.team(tally.team)
        row = acc[info.country]
        row[0] += tally.titles
        row[1] += tally.runner_up
        row[2] += tally.appearances
        row[3] += 1
    rows = [CountryTally(c, region_for_country(c), *v) for c, v in acc.items()]
    rows.sort(key=lambda r: (-r.winner, -r.runner_up, -r.appearances, r.country))
    return rows


# ---------------------------------------------------------------------------
# Finals series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SharePair:
    season: SeasonId
    leg: int
    champion: float
    runner_up: float

    @property
    def difference(self) -> float:
        return self.champion - self.runner_up


def finals_share_pairs(dataset: Dataset, start: int | None = None,
                       forks: Iterable[Fork] | None = None) -> list[SharePair]:
    """Game-level top-scorer shares of both finalists, in chronological order."""
    allowed = set(forks) if forks is not None else None
    return [
        SharePair(g.season, g.leg, g.champion.scorer_share, g.runner_up.scorer_share)
        for g in dataset.final_games
        if (start is None or g.season.ordinal >= start)
        and (allowed is None or g.season.fork in allowed)
    ]


def _season_means(items: Iterable[tuple[SeasonId, float]]) -> TimeSeries:
    acc: dict[SeasonId, list[float]] = defaultdict(list)
    for season, value in items:
        acc[season].append(value)
    return TimeSeries(tuple((s, float(np.mean(acc[s]))) for s in sorted(acc, key=lambda s: s.key)))


def scorer_share_series(dataset: Dataset, side: str = "champion") -> TimeSeries:
    """Top-scorer share of one finalist per season (legs averaged)."""
    if side not in ("champion", "runner_up"):
        raise DomainError(f"side must be 'champion' or 'runner_up', got {side!r}")
    return _season_means(
        (g.season, getattr(g, side).scorer_share) for g in dataset.final_games
    )


def share_difference_series(dataset: Dataset) -> TimeSeries:
    """Champion minus runner-up top-scorer share per season (legs averaged)."""
    return _season_means((p.season, p.difference) for p in finals_share_pairs(dataset))


def pooled_share_series(dataset: Dataset) -> TimeSeries:
    """Mean top-scorer share of both finalists per season."""
    return _season_means(
        (g.season, side.scorer_share) for g in dataset.final_games for side in g.sides
    )


def possessions_for_final(game: FinalGame, lam: float = DEFAULT_LAMBDA) -> float | None:
    """Average of the possessions-lost and possessions-gained estimates for both sides.

    Returns None when the box-score fields are missing.
    """
    if not (game.champion.has_possession_fields and game.runner_up.has_possession_fields):
        return None
    quantities = []
    for own, opp in ((game.champion, game.runner_up), (game.runner_up, game.champion)):
        quantities.append(own.fga + lam * own.fta - own.oreb + own.to)
        quantities.append(own.fgm + lam * own.ftm + opp.dreb + own.to)
    return float(np.mean(quantities))


def possessions_series(dataset: Dataset, lam: float = DEFAULT_LAMBDA) -> tuple[TimeSeries, int]:
    """Per-season possessions (legs averaged) and the number of games lacking box scores."""
    values = []
    excluded = 0
    for g in dataset.final_games:
        p = possessions_for_final(g, lam)
        if p is None:
            excluded += 1
        else:
            values.append((g.season, p))
    return _season_means(values), excluded


def collapse_forks(series: TimeSeries) -> TimeSeries:
    """Average entries sharing an ordinal so each season appears once."""
    acc: dict[int, list[tuple[SeasonId, float]]] = defaultdict(list)
    for s, v in series.entries:
        acc[s.ordinal].append((s, v))
    out = []
    for ordinal in sorted(acc):
        group = acc[ordinal]
        if len(group) == 1:
            out.append(group[0])
        else:
            out.append((SeasonId.merged(ordinal), float(np.mean([v for _, v in group]))))
    return TimeSeries(tuple(out), series.flags)


def moving_average(series: TimeSeries, window: int) -> TimeSeries:
    """Trailing mean over ``window`` seasons, labelled by the last season in the window."""
    if window < 1:
        raise DomainError("window must be at least 1")
    merged = collapse_forks(series)
    if window > len(merged):
        return TimeSeries((), ("window_exceeds_series",))
    vals = np.asarray(merged.values())
    csum = np.concatenate([[0.0], np.cumsum(vals)])
    means = (csum[window:] - csum[:-window]) / window
    seasons = [s for s, _ in merged.entries][window - 1:]
    return TimeSeries(tuple(zip(seasons, means.tolist())))


def aggregate_by_period(records: Sequence[ChampionScoringRecord],
                        periods: Sequence[tuple[int, int]] = TABLE2_PERIODS) -> list[dict]:
    """Mean champion/opponent PPG and diff% per period."""
    rows = []
    for lo, hi in periods:
        chosen = [r for r in records if lo <= r.season.ordinal <= hi]
        if not chosen:
            continue
        champ = float(np.mean([r.champ_ppg for r in chosen]))
        opp = float(np.mean([r.opp_ppg for r in chosen]))
        rows.append({
            "period": period_label((lo, hi)),
            "champion": champ,
            "opponent": opp,
            "per_team": (champ + opp) / 2.0,
            "diff_pct": float(np.mean([r.diff_pct for r in chosen])),
            "seasons": len(chosen),
        })
    return rows
