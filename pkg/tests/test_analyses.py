import math

import pytest

from eurohist.analyses import (
    AnalysisId,
    analyze_champion_dominance,
    analyze_dominance,
    analyze_final_four_randomness,
    analyze_pace,
    analyze_pluralism,
    analyze_scorer_correlation,
)
from eurohist.dataset import Fork, finals_share_pairs, parse_period_scheme
from eurohist.errors import DomainError
from eurohist.stats_tests import wilcoxon_signed_rank


@pytest.fixture(scope="module")
def randomness(bundled):
    return {era: analyze_final_four_randomness(bundled, era, iterations=20_000, seed=3)
            for era in ("full", "modern")}


def test_dominance(bundled):
    rep = analyze_dominance(bundled)
    assert rep.analysis_id is AnalysisId.DOMINANCE
    assert set(rep.tests) == {"friedman_titles", "friedman_appearances"}
    assert rep.test("friedman_titles").statistic == pytest.approx(0.7627, abs=1e-4)
    assert rep.test("friedman_appearances").statistic == pytest.approx(6.5789, abs=1e-4)
    israel = rep.tables["country_rollup"].row("Israel")
    assert (israel["winner"], israel["runner_up"], israel["appearances"], israel["teams"]) == (6, 9, 20, 1)


def test_dominance_other_scheme(bundled):
    rep = analyze_dominance(bundled, parse_period_scheme("1958-1987,1988-2018"))
    assert rep.tables["titles_by_region"].row_labels == ("1958-1987", "1988-2018")
    with pytest.raises(DomainError):
        analyze_dominance(bundled, parse_period_scheme("1958-1987"))


def test_champion_dominance(bundled):
    rep = analyze_champion_dominance(bundled)
    row = rep.tables["periods"].row("1971-1980")
    assert row["champion"] == pytest.approx(91.20, abs=0.05)
    assert row["opponent"] == pytest.approx(77.88, abs=0.05)
    assert row["per_team"] == pytest.approx(84.54, abs=0.05)
    for cells in rep.tables["periods"].cells:
        assert cells[2] == (cells[0] + cells[1]) / 2
    counts = dict(zip(rep.tables["dominance_counts"].row_labels,
                      (c[0] for c in rep.tables["dominance_counts"].cells)))
    assert counts == {"diff_pct > 0.2": 6, "diff_pct > 0.3": 1}
    above_30 = [label for label, cells in zip(rep.tables["dominant_seasons"].row_labels,
                                               rep.tables["dominant_seasons"].cells) if cells[2]]
    assert above_30 == ["1977-1978"]
    assert rep.tables["periods"].row("1981-1990")["diff_pct"] == pytest.approx(0.08, abs=0.01)
    assert len(rep.series["diff_pct"]) == 62


def test_pluralism(bundled):
    rep = analyze_pluralism(bundled)
    assert set(rep.tests) == {"wilcoxon_full", "runs_full", "zivot_andrews",
                              "wilcoxon_modern", "runs_modern"}
    assert rep.test("wilcoxon_full").statistic == 824
    za = rep.tests["zivot_andrews"]
    assert rep.parameters["detected_break_ordinal"] == 1998
    assert za.p_bracket == "> 0.10"
    assert rep.test("wilcoxon_modern").statistic == 42.5
    assert rep.test("wilcoxon_modern").n_summary["pairs_used"] == 20
    for s in rep.series.values():
        assert s.ordinals() == sorted(s.ordinals())


def test_pluralism_modern_is_a_filter_of_the_full_series(bundled):
    rep = analyze_pluralism(bundled, break_ordinal=2005)
    pairs = [p for p in finals_share_pairs(bundled)
             if p.season.ordinal > 2005 and p.season.fork is not Fork.FIBA_BRANCH]
    direct = wilcoxon_signed_rank([p.champion for p in pairs], [p.runner_up for p in pairs])
    assert rep.test("wilcoxon_modern") == direct
    assert rep.parameters["break_ordinal"] == 2005


def test_pluralism_ma_variant(bundled):
    rep = analyze_pluralism(bundled, za_on_ma=True)
    assert rep.parameters["za_on_ma"]
    assert rep.test("zivot_andrews").n_summary["n"] == len(rep.series["share_difference_ma"])


def test_pace(bundled):
    rep = analyze_pace(bundled)
    groups = rep.tables["groups"]
    assert groups.row("before")["mean"] == pytest.approx(66.25, abs=0.05)
    assert groups.row("after")["mean"] == pytest.approx(71.33, abs=0.05)
    assert rep.test("mann_whitney").statistic == 84
    assert rep.parameters["excluded_games"] == 27
    means = rep.tables["lambda_sensitivity"].column("mean_all")
    assert means[0] < means[1] < means[2]


def test_pace_without_box_scores(bundled):
    import dataclasses
    stripped = dataclasses.replace(bundled, final_games=[
        g for g in bundled.final_games if not g.champion.has_possession_fields])
    with pytest.raises(DomainError):
        analyze_pace(stripped)


def test_scorer_correlation(bundled):
    rep = analyze_scorer_correlation(bundled)
    assert rep.test("pearson").extras["estimate"] == pytest.approx(-0.4002, abs=5e-4)
    assert rep.test("spearman").statistic == pytest.approx(5088.03, abs=0.01)
    row = rep.tables["top_scorers"].row("2002-2003")
    assert row["ppg"] == 25.8 and row["assigned_score"] == 1


def test_randomness_full(randomness):
    rep = randomness["full"]
    table = rep.tables["teams"]
    assert sum(table.column("observed")) == 62
    assert sum(table.column("expected")) == 62
    flagged = {label for label, f in zip(table.row_labels, table.column("flagged")) if f}
    assert flagged == {"cibona", "split", "ask_riga", "panathinaikos"}
    assert table.row("maccabi_tel_aviv")["expected"] == 5.0


def test_randomness_modern(randomness):
    rep = randomness["modern"]
    table = rep.tables["teams"]
    assert sum(table.column("observed")) == 21
    assert sum(table.column("expected")) == 21
    assert rep.test("binomial_panathinaikos").p_value == pytest.approx(0.02730, abs=1e-4)
    assert rep.test("multinomial").n_summary["final_fours"] == 21


def test_randomness_is_deterministic(bundled, randomness):
    again = analyze_final_four_randomness(bundled, "full", iterations=20_000, seed=3)
    assert again == randomness["full"]


def test_bad_era(bundled):
    with pytest.raises(DomainError):
        analyze_final_four_randomness(bundled, "ancient")
