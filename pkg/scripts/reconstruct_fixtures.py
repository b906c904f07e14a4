#!/usr/bin/env python3
"""Regenerate the per-game and per-season fixtures under src/eurohist/data.

The original per-season records (final box scores, champion scoring after
the quarterfinals) come from web sources that are not bundled here. This
script builds *synthetic stand-ins* instead: seeded draws shaped by each
era's scoring level, followed by a constrained search so that every
summary printed alongside the original analysis is reproduced:

* champion_scoring.csv: period means of champion/opponent PPG, six
  seasons above +20 %, one (1978) above +30 %.
* final_games.csv: 64 game-level finals (two-legged finals in 1959 and
  1960), top-scorer shares giving 24/40 signs, 31 runs, V = 824 over all
  finals and V = 42.5 over the 20 post-1998 finals, a Zivot-Andrews
  statistic near -4.35 with the break at the 1997-98 final; box scores
  from 1983 onward with mean possessions 66.25 / 71.33 and U = 84.

Every generated row carries ``source=reconstructed``. Values are NOT
historical records; only their published aggregates are. Re-running the
script with the same seed reproduces the files byte for byte.

Usage: python scripts/reconstruct_fixtures.py [--seed N] [--out DIR]
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from eurohist.dataset import (
    DEFAULT_LAMBDA,
    collapse_forks,
    TABLE2_PERIODS,
    _load_final_fours,
    _load_teams,
    load_dataset,
)
from eurohist.stats_tests import average_ranks, mann_whitney, zivot_andrews

SOURCE = "reconstructed"
TWO_LEG_ORDINALS = (1959, 1960)
BOX_SCORE_START = 1983
MODERN_START = 1999

TABLE2 = {
    (1958, 1970): (82.61, 72.90),
    (1971, 1980): (91.20, 77.88),
    (1981, 1990): (88.27, 81.92),
    (1991, 2000): (72.92, 65.61),
    (2001, 2010): (82.94, 74.38),
    (2011, 2018): (81.86, 75.18),
}
DOMINANT_SEASONS = (1960, 1964, 1968, 1973, 1976)  # diff% above 20 %
RECORD_SEASON = 1978  # the only one above 30 %

POSS_BEFORE_MEAN = 66.25
POSS_AFTER_MEAN = 71.33
MW_U = 84

SIGNS_POSITIVE = 24
RUNS = 31
V_FULL = 824.0
V_MODERN = 42.5
ZA_TARGET = -4.35
ZA_BREAK = 1998


# ---------------------------------------------------------------------------
# champion scoring
# ---------------------------------------------------------------------------

def champion_scoring(seasons, rng) -> list[dict]:
    rows = []
    for (lo, hi), (c_mean, o_mean) in TABLE2.items():
        chosen = [s for s in seasons if lo <= s.ordinal <= hi]
        base_ratio = c_mean / o_mean - 1.0
        for _ in range(10_000):
            ratio = np.clip(base_ratio + rng.normal(0, 0.045, len(chosen)), 0.005, 0.185)
            for i, s in enumerate(chosen):
                if s.ordinal in DOMINANT_SEASONS:
                    ratio[i] = rng.uniform(0.215, 0.28)
                elif s.ordinal == RECORD_SEASON:
                    ratio[i] = rng.uniform(0.31, 0.34)
            champ = c_mean + rng.normal(0, 4.0, len(chosen))
            champ += c_mean - champ.mean()
            opp = champ / (1.0 + ratio)
            # rescale opponent PPG to the period mean while keeping the flags intact
            opp *= o_mean / opp.mean()
            champ = np.round(champ, 2)
            opp = np.round(opp, 2)
            r = (champ - opp) / opp
            flagged20 = {s.ordinal for s, v in zip(chosen, r) if v > 0.20}
            flagged30 = {s.ordinal for s, v in zip(chosen, r) if v > 0.30}
            want20 = {o for o in (*DOMINANT_SEASONS, RECORD_SEASON) if lo <= o <= hi}
            want30 = {RECORD_SEASON} & set(range(lo, hi + 1))
            if (flagged20 == want20 and flagged30 == want30
                    and abs(champ.mean() - c_mean) < 0.006
                    and abs(opp.mean() - o_mean) < 0.006):
                break
        else:
            raise RuntimeError(f"could not calibrate period {lo}-{hi}")
        for s, c, o in zip(chosen, champ, opp):
            rows.append({"season_label": s.label, "ordinal": s.ordinal, "fork": s.fork.value,
                         "champ_ppg": f"{c:.2f}", "opp_ppg": f"{o:.2f}", "source": SOURCE})
    return rows


# ---------------------------------------------------------------------------
# box scores and possessions
# ---------------------------------------------------------------------------

BAND = 4.5  # allowed distance from the smooth trend
MA_RISE_MARGIN = 0.25  # survives rounding to integer box scores


def possession_targets(box_games, rng):
    """Per-game possession targets meeting the group means, U and the post-2002 shape."""
    before = [g for g in box_games if g["ordinal"] < MODERN_START]
    after = [g for g in box_games if g["ordinal"] >= MODERN_START]
    ords_all = [g["ordinal"] for g in before + after]
    late = np.array([g["ordinal"] >= 2002 for g in after])
    at_2002 = np.array([g["ordinal"] == 2002 for g in after])

    def cost(tb, ta):
        u = float(np.sum(tb[:, None] > ta[None, :]) + 0.5 * np.sum(tb[:, None] == ta[None, :]))
        lows = int(np.sum(ta[late] < 69.7))
        c = abs(u - MW_U) + 3 * abs(lows - 4)
        c += 3 * np.sum((ta[late] > 69.7) & (ta[late] < 70.3))
        c += 3 * float(np.sum(np.maximum(0, 70.5 - ta[at_2002])))
        by_ord: dict[int, list[float]] = {}
        for o, t in zip(ords_all, np.concatenate([tb, ta])):
            by_ord.setdefault(o, []).append(t)
        ords = sorted(by_ord)
        vals = np.array([np.mean(by_ord[o]) for o in ords])
        ma = np.convolve(vals, np.ones(5) / 5, mode="valid")
        rising = np.array([m for o, m in zip(ords[4:], ma) if o >= 2002])
        c += 5 * float(np.sum(np.maximum(0, MA_RISE_MARGIN - (rising[1:] - rising[:-1]))))
        c += float(np.sum(np.maximum(0, np.abs(tb - base_b) - BAND)))
        c += float(np.sum(np.maximum(0, np.abs(ta - base_a) - BAND)))
        gaps = np.abs(tb[:, None] - ta[None, :])
        c += 2 * float(np.sum(np.maximum(0, 0.6 - gaps)))
        return c

    base_b = np.array([69.5 - 0.45 * max(0, g["ordinal"] - 1988) for g in before])
    base_a = np.array([64.0 + 0.6 * (g["ordinal"] - 1999) for g in after])
    base_b += POSS_BEFORE_MEAN - base_b.mean()
    base_a += POSS_AFTER_MEAN - base_a.mean()
    tb = base_b + rng.normal(0, 1.5, len(base_b))
    ta = base_a + rng.normal(0, 1.5, len(base_a))
    tb += POSS_BEFORE_MEAN - tb.mean()
    ta += POSS_AFTER_MEAN - ta.mean()
    current = cost(tb, ta)
    for step in range(200_000):
        if current == 0:
            return dict(zip((id(g) for g in before + after), np.concatenate([tb, ta])))
        temp = 0.5 * (1 - step / 200_000) + 1e-3
        arr = tb if rng.random() < len(tb) / (len(tb) + len(ta)) else ta
        i = int(rng.integers(len(arr)))
        j = int(rng.integers(len(arr)))
        delta = rng.normal(0, 0.7)
        old_i, old_j = arr[i], arr[j]
        arr[i] += delta
        arr[j] -= delta  # keeps the group mean fixed
        new = cost(tb, ta)
        if new <= current or rng.random() < math.exp((current - new) / temp):
            current = new
        else:
            arr[i], arr[j] = old_i, old_j
    raise RuntimeError("could not find possession targets")


def side_box(target: float, points_hint: float, rng, three_point: bool, lam: float):
    to = int(rng.integers(11, 18))
    oreb = int(rng.integers(7, 14))
    fta = int(rng.integers(16, 31))
    ftm = int(round(fta * rng.uniform(0.64, 0.80)))
    fga = int(round(target - lam * fta + oreb - to))
    fgm = int(round(fga * rng.uniform(0.42, 0.52)))
    tpm = int(rng.integers(3, 10)) if three_point else 0
    tpm = min(tpm, fgm)
    return {"fga": fga, "fgm": fgm, "fta": fta, "ftm": ftm, "oreb": oreb, "to": to,
            "tpm": tpm, "points": 2 * fgm + tpm + ftm}


def box_value(champ, runner, lam):
    q = []
    for own, opp in ((champ, runner), (runner, champ)):
        q.append(own["fga"] + lam * own["fta"] - own["oreb"] + own["to"])
        q.append(own["fgm"] + lam * own["ftm"] + opp["dreb"] + own["to"])
    return float(np.mean(q))


def build_box(target, rng, three_point, lam):
    for _ in range(10_000):
        champ = side_box(target, 0, rng, three_point, lam)
        runner = side_box(target, 0, rng, three_point, lam)
        if champ["points"] <= runner["points"]:
            continue
        for own, opp in ((champ, runner), (runner, champ)):
            opp["dreb"] = int(round(target - own["fgm"] - lam * own["ftm"] - own["to"]))
        if not all(14 <= s["dreb"] <= 32 for s in (champ, runner)):
            continue
        # fine-tune champion FGA (each unit moves the game value by 0.25)
        value = box_value(champ, runner, lam)
        champ["fga"] += int(round((target - value) / 0.25))
        if champ["fgm"] > champ["fga"]:
            continue
        if abs(box_value(champ, runner, lam) - target) <= 0.13:
            return champ, runner
    raise RuntimeError("could not build box score")


def trim_possession_means(box_games, lam):
    """Nudge champion FGA (0.25 possessions per unit) until both group means sit on target."""
    for group, target in (([g for g in box_games if g["ordinal"] < MODERN_START],
                           POSS_BEFORE_MEAN),
                          ([g for g in box_games if g["ordinal"] >= MODERN_START],
                           POSS_AFTER_MEAN)):
        for g in group:
            err = np.mean([box_value(x["champ"], x["runner"], lam) for x in group]) - target
            if abs(err) < 0.01:
                break
            step = -1 if err > 0 else 1
            if abs(err + step * 0.25 / len(group)) < abs(err):
                g["champ"]["fga"] += step


# ---------------------------------------------------------------------------
# finals top-scorer shares
# ---------------------------------------------------------------------------

def fast_za(y: np.ndarray, lags: int = 5, trim: float = 0.15) -> tuple[float, int]:
    n = len(y)
    dy = np.diff(y)
    rows = np.arange(lags + 2, n + 1)
    resp = y[rows - 1] - y[rows - 2]
    cut = int(math.floor(trim * n))
    tbs = np.arange(max(cut, 1), min(n - cut, n - 1) + 1)
    m, p = len(rows), 5 + lags
    x = np.empty((len(tbs), m, p))
    x[:, :, 0] = 1.0
    x[:, :, 1] = rows
    after = rows[None, :] > tbs[:, None]
    x[:, :, 2] = after
    x[:, :, 3] = np.where(after, rows[None, :] - tbs[:, None], 0)
    x[:, :, 4] = y[rows - 2]
    for j in range(1, lags + 1):
        x[:, :, 4 + j] = dy[rows - 2 - j]
    xtx = np.einsum("kmi,kmj->kij", x, x)
    xty = np.einsum("kmi,m->ki", x, resp)
    inv = np.linalg.inv(xtx)
    beta = np.einsum("kij,kj->ki", inv, xty)
    resid = resp[None, :] - np.einsum("kmi,ki->km", x, beta)
    s2 = (resid**2).sum(axis=1) / (m - p)
    t = beta[:, 4] / np.sqrt(s2 * inv[:, 4, 4])
    k = int(np.argmin(t))
    return float(t[k]), int(tbs[k])


class ShareProblem:
    def __init__(self, games, rng):
        self.games = games
        self.rng = rng
        self.pc = np.array([g["champ"]["points"] for g in games], float)
        self.pr = np.array([g["runner"]["points"] for g in games], float)
        self.ordinal = np.array([g["ordinal"] for g in games])
        self.modern = np.array([g["ordinal"] >= MODERN_START and g["fork"] != "fiba_branch"
                                for g in games])
        # annual series: legs averaged within a season row, then forks pooled
        ords = sorted(set(self.ordinal))
        self.annual_ords = ords
        self.annual_matrix = np.zeros((len(ords), len(games)))
        for r, o in enumerate(ords):
            idx = np.flatnonzero(self.ordinal == o)
            forks = sorted({games[i]["fork"] for i in idx})
            for i in idx:
                legs = sum(1 for k in idx if games[k]["fork"] == games[i]["fork"])
                self.annual_matrix[r, i] = 1.0 / (len(forks) * legs)
        self.fixed = np.zeros(len(games), bool)

    def diffs(self, sc, sr):
        return sc / self.pc - sr / self.pr

    def annual(self, d):
        return self.annual_matrix @ d

    @staticmethod
    def signed_rank(d):
        ranks, _ = average_ranks(np.abs(d))
        return float(ranks[d > 0].sum())

    def features(self, sc, sr):
        d = self.diffs(sc, sr)
        pos = d > 0
        runs = 1 + int(np.count_nonzero(pos[1:] != pos[:-1]))
        y = self.annual(d)
        za, tb = fast_za(y)
        ma = np.convolve(y, np.ones(10) / 10, mode="valid")
        ma_ords = self.annual_ords[9:]
        late_pos = sum(1 for o, m in zip(ma_ords, ma) if o >= 2002 and m >= 0)
        pooled = np.convolve(self.annual(0.5 * (sc / self.pc + sr / self.pr)),
                             np.ones(10) / 10, mode="valid")
        return {
            "zeros": int(np.count_nonzero(d == 0)),
            "npos": int(pos.sum()),
            "runs": runs,
            "v_full": self.signed_rank(d),
            "v_modern": self.signed_rank(d[self.modern]),
            "za": za,
            "za_break": self.annual_ords[tb - 1],
            "late_ma_pos": late_pos,
            "ma_min": ma_ords[int(np.argmin([m if o >= 1998 else 9 for o, m in
                                             zip(ma_ords, ma)]))],
            "pooled_decline": float(pooled[ma_ords.index(1990)] - pooled[-1]),
        }

    @staticmethod
    def cost(f):
        return (
            50 * f["zeros"]
            + 10 * abs(f["npos"] - SIGNS_POSITIVE)
            + 5 * abs(f["runs"] - RUNS)
            + abs(f["v_full"] - V_FULL) / 4
            + abs(f["v_modern"] - V_MODERN) / 2
            + 40 * max(0.0, abs(f["za"] - ZA_TARGET) - 0.04)
            + 10 * (f["za_break"] != ZA_BREAK)
            + 3 * f["late_ma_pos"]
            + 2 * (abs(f["ma_min"] - 2009) > 1)
            + 20 * max(0.0, 0.04 - f["pooled_decline"])
        )


def initial_shares(problem: ShareProblem, rng):
    n = len(problem.games)
    sc = np.zeros(n)
    sr = np.zeros(n)
    for i, g in enumerate(problem.games):
        o = g["ordinal"]
        pooled = 0.34 if o < 1986 else 0.34 - 0.0035 * (o - 1986)
        shift = 0.0 if o < MODERN_START else -0.055 + 0.003 * abs(o - 2009)
        c = pooled + shift / 2 + rng.normal(0, 0.045)
        r = pooled - shift / 2 + rng.normal(0, 0.045)
        sc[i] = np.clip(round(c * problem.pc[i]), 8, problem.pc[i] * 0.55)
        sr[i] = np.clip(round(r * problem.pr[i]), 8, problem.pr[i] * 0.55)
    return sc, sr


def _fractions(den: int, lo: float = 0.16, hi: float = 0.45) -> list[tuple[int, int]]:
    return [(m, den) for m in range(1, den) if lo <= m / den <= hi and math.gcd(m, den) == 1]


def place_mirror_pair(problem, sc, sr, candidates, rng):
    """Give two games equal and opposite share differences (an exact tie in |d|).

    Shares x (champion of i, runner-up of j) and y (runner-up of i, champion
    of j) must be exact fractions of the existing point totals, so only
    pairs whose point totals share suitable divisors qualify.
    """
    options = []
    for a in candidates:
        for b in candidates:
            if a >= b:
                continue
            gx = math.gcd(int(problem.pc[a]), int(problem.pr[b]))
            gy = math.gcd(int(problem.pr[a]), int(problem.pc[b]))
            for g1 in range(3, gx + 1):
                if gx % g1:
                    continue
                for g2 in range(3, gy + 1):
                    if gy % g2:
                        continue
                    for x in _fractions(g1):
                        for y in _fractions(g2):
                            if x[0] * y[1] != y[0] * x[1] and abs(x[0] / x[1] - y[0] / y[1]) < 0.12:
                                options.append((a, b, x, y))
    if not options:
        raise RuntimeError("no game pair admits an exact mirrored tie")
    a, b, (xn, xd), (yn, yd) = options[int(rng.integers(len(options)))]
    sc[a] = problem.pc[a] * xn // xd
    sr[b] = problem.pr[b] * xn // xd
    sr[a] = problem.pr[a] * yn // yd
    sc[b] = problem.pc[b] * yn // yd
    problem.fixed[[a, b]] = True


def anneal(problem: ShareProblem, sc, sr, rng, steps=400_000):
    f = problem.features(sc, sr)
    cost = problem.cost(f)
    free = np.flatnonzero(~problem.fixed)
    temp0 = 2.0
    for step in range(steps):
        if cost == 0:
            break
        temp = temp0 * (1 - step / steps) + 1e-3
        i = int(rng.choice(free))
        side = sc if rng.random() < 0.5 else sr
        pts = problem.pc[i] if side is sc else problem.pr[i]
        old = side[i]
        new = old + rng.choice((-2, -1, 1, 2))
        if not 0.12 * pts <= new <= 0.55 * pts:
            continue
        side[i] = new
        f_new = problem.features(sc, sr)
        c_new = problem.cost(f_new)
        if c_new <= cost or rng.random() < math.exp((cost - c_new) / temp):
            cost, f = c_new, f_new
        else:
            side[i] = old
        if step % 5000 == 0:
            print(f"  step {step}: cost {cost:.3f} {f}", file=sys.stderr)
    return cost, f


# ---------------------------------------------------------------------------

def write_csv(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: r.get(k, "") for k in header})


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=20181)
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parents[1] / "src/eurohist/data")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    lam = DEFAULT_LAMBDA

    # only teams.csv and final_fours.csv are needed as inputs
    _, aliases = _load_teams(args.out)
    final_fours = _load_final_fours(args.out, lambda ctx, name: aliases[name.strip()])
    seasons = [ff.season for ff in final_fours]
    names = {ff.season: ff for ff in final_fours}

    scoring = champion_scoring(seasons, rng)

    games = []
    for s in seasons:
        legs = 2 if s.ordinal in TWO_LEG_ORDINALS else 1
        for leg in range(1, legs + 1):
            games.append({"season": s, "label": s.label, "ordinal": s.ordinal,
                          "fork": s.fork.value, "leg": leg})

    box_games = [g for g in games if g["ordinal"] >= BOX_SCORE_START]
    targets = possession_targets(box_games, rng)
    print("possession targets: " + " ".join(
        f"{g['ordinal']}:{targets[id(g)]:.1f}" for g in box_games), file=sys.stderr)
    for g in games:
        if id(g) in targets:
            champ, runner = build_box(targets[id(g)], rng, g["ordinal"] >= 1985, lam)
            g["champ"], g["runner"] = champ, runner
        else:
            period_mean = next(c for (lo, hi), (c, _) in TABLE2.items()
                               if lo <= g["ordinal"] <= hi)
            pc = int(round(period_mean - 4 + rng.normal(0, 7)))
            pr = int(round(pc - abs(rng.normal(0, 8)) - 1))
            if g["ordinal"] in TWO_LEG_ORDINALS:
                # champion drops the first leg narrowly and wins the return leg clearly
                if g["leg"] == 1:
                    pc, pr = pr, pr + int(rng.integers(1, 5))
                else:
                    pr = pc - int(rng.integers(9, 16))
            if g["ordinal"] == RECORD_SEASON:
                pc, pr = 75, min(pr, 67)
            g["champ"], g["runner"] = {"points": pc}, {"points": pr}

    trim_possession_means(box_games, lam)

    problem = ShareProblem(games, rng)
    sc, sr = initial_shares(problem, rng)
    modern_idx = [i for i, g in enumerate(games)
                  if g["ordinal"] >= MODERN_START and g["fork"] != "fiba_branch"]
    early_idx = [i for i, g in enumerate(games)
                 if g["ordinal"] < BOX_SCORE_START and g["ordinal"] not in TWO_LEG_ORDINALS]
    # mirrored ties: one pair inside the modern era (gives V = x.5 there), one
    # earlier so that the full-period V stays an integer
    place_mirror_pair(problem, sc, sr, modern_idx, rng)
    place_mirror_pair(problem, sc, sr, early_idx, rng)

    cost, feats = anneal(problem, sc, sr, rng)
    print(f"final cost {cost:.4f}: {feats}", file=sys.stderr)
    if cost > 0:
        raise SystemExit("constraint search did not converge; try another --seed")

    game_rows = []
    for i, g in enumerate(games):
        ff = names[g["season"]]
        for role, team, top in (("champ", ff.winner, sc[i]), ("runner", ff.runner_up, sr[i])):
            side = g[role]
            row = {"season_label": g["label"], "ordinal": g["ordinal"], "fork": g["fork"],
                   "leg": g["leg"], "team": team, "points": side["points"],
                   "top_scorer_points": int(top), "source": SOURCE}
            if "fga" in side:
                row.update({k: side[k] for k in ("fga", "fgm", "fta", "ftm", "oreb",
                                                 "dreb", "to")})
            game_rows.append(row)

    write_csv(args.out / "champion_scoring.csv",
              ["season_label", "ordinal", "fork", "champ_ppg", "opp_ppg", "source"], scoring)
    write_csv(args.out / "final_games.csv",
              ["season_label", "ordinal", "fork", "leg", "team", "points",
               "top_scorer_points", "fga", "fgm", "fta", "ftm", "oreb", "dreb", "to",
               "source"], game_rows)

    # sanity check through the library itself
    check = load_dataset(args.out)
    from eurohist.dataset import possessions_for_final, share_difference_series
    za = zivot_andrews(collapse_forks(share_difference_series(check)), lags=5)
    before = [possessions_for_final(g, lam) for g in check.final_games
              if g.season.ordinal < MODERN_START and possessions_for_final(g, lam) is not None]
    after = [possessions_for_final(g, lam) for g in check.final_games
             if g.season.ordinal >= MODERN_START]
    mw = mann_whitney(before, after)
    from eurohist.dataset import moving_average, possessions_series
    ma = moving_average(possessions_series(check, lam)[0], 5).filter(lambda s: s.ordinal >= 2002)
    if any(a >= b for a, b in zip(ma.values(), ma.values()[1:])):
        raise SystemExit("possessions moving average is not rising after 2002; try another --seed")
    print(f"ZA {za.base.statistic:.4f} break index {za.break_position}; "
          f"possessions {np.mean(before):.3f}/{np.mean(after):.3f} U={mw.statistic} "
          f"p={mw.p_value:.5f}; periods {TABLE2_PERIODS}", file=sys.stderr)


if __name__ == "__main__":
    main()
