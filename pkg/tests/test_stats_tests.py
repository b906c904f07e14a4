import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from eurohist.errors import DataError, DomainError
from eurohist.numerics import normal_sf
from eurohist.stats_tests import (
    ZA_CRITICAL_VALUES,
    Alternative,
    FinalFourDraw,
    Method,
    TestResult,
    average_ranks,
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


def test_average_ranks_with_ties():
    ranks, ties = average_ranks([10, 20, 20, 5, 20])
    assert_allclose(ranks, [2, 4, 4, 1, 4])
    assert ties == [3]


def test_result_rejects_bad_p():
    with pytest.raises(DomainError):
        TestResult(0.0, 1.5, Method.RUNS)


# --- Friedman --------------------------------------------------------------

def test_friedman_constant_table():
    res = friedman_test(np.full((3, 4), 2.0))
    assert res.statistic == 0.0 and res.p_value == 1.0
    assert res.degenerate


def test_friedman_hand_example():
    # three blocks, identical ordering: mean ranks 1,2,3
    res = friedman_test([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    assert res.statistic == pytest.approx(6.0)
    assert res.p_value == pytest.approx(math.exp(-3.0))


def test_friedman_tie_correction_hand_example():
    table = [[1, 1, 2], [3, 2, 1], [1, 2, 3]]
    # ranks: (1.5,1.5,3), (3,2,1), (1,2,3); sums 5.5, 5.5, 7
    q = 12 / (3 * 3 * 4) * (5.5**2 + 5.5**2 + 7**2) - 3 * 3 * 4
    corr = 1 - 6 / (3 * 3 * 8)
    assert friedman_test(table).statistic == pytest.approx(q / corr)


@pytest.mark.parametrize("bad", [np.ones((3, 1)), np.ones((1, 3)), [[1, np.nan], [2, 3]]])
def test_friedman_rejects(bad):
    with pytest.raises(DomainError):
        friedman_test(bad)


# --- Wilcoxon ----------------------------------------------------------------

def _signed_rank_two_sided_oracle(d):
    n = len(d)
    ranks = np.argsort(np.argsort(np.abs(d))) + 1
    v_obs = ranks[d > 0].sum()
    mean = n * (n + 1) / 4
    hits = 0
    for signs in itertools.product((0, 1), repeat=n):
        v = sum(r for r, s in zip(ranks, signs) if s)
        hits += abs(v - mean) >= abs(v_obs - mean) - 1e-9
    return v_obs, hits / 2**n


@pytest.mark.parametrize("seed", range(8))
def test_wilcoxon_exact_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 11))
    x = rng.permutation(np.arange(1, n + 1)) * rng.choice([-1, 1], n)
    v, p = _signed_rank_two_sided_oracle(x.astype(float))
    res = wilcoxon_signed_rank(x, np.zeros(n))
    assert res.method is Method.WILCOXON_EXACT
    assert res.statistic == v
    assert res.p_value == pytest.approx(min(1.0, p), abs=1e-12)


def test_wilcoxon_all_zero_is_degenerate():
    res = wilcoxon_signed_rank([1, 2, 3], [1, 2, 3])
    assert res.degenerate and res.p_value == 1.0 and res.statistic == 0.0
    assert res.n_summary == {"pairs_supplied": 3, "zeros_dropped": 3, "pairs_used": 0}


def test_wilcoxon_normal_branch_by_hand():
    d = np.array([1.5, -0.5, 2.0, 2.0, -3.0, 4.0, 0.0, 5.0])
    res = wilcoxon_signed_rank(d, np.zeros_like(d))
    # ranks of |d| (zero dropped): 0.5->1, 1.5->2, 2->3.5, 2->3.5, 3->5, 4->6, 5->7
    v = 2 + 3.5 + 3.5 + 6 + 7
    n = 7
    sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24 - (2**3 - 2) / 48)
    z = (v - n * (n + 1) / 4 - 0.5) / sigma
    assert res.method is Method.WILCOXON_NORMAL
    assert res.statistic == v
    assert res.p_value == pytest.approx(2 * normal_sf(z), abs=1e-14)
    assert res.n_summary["zeros_dropped"] == 1


def test_wilcoxon_length_mismatch():
    with pytest.raises(DomainError):
        wilcoxon_signed_rank([1, 2], [1])


def test_wilcoxon_one_sided():
    x = np.arange(1, 9, dtype=float)
    res = wilcoxon_signed_rank(x, np.zeros(8), alternative="greater")
    assert res.p_value == pytest.approx(1 / 256)


# --- Mann-Whitney ------------------------------------------------------------

def test_mann_whitney_examples():
    res = mann_whitney([1, 2], [3, 4])
    assert res.statistic == 0.0
    assert res.p_value == pytest.approx(1 / 3)
    same = mann_whitney([1, 2, 3], [1, 2, 3])
    assert same.statistic == 4.5
    assert same.p_value == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(6))
def test_mann_whitney_exact_matches_enumeration(seed):
    rng = np.random.default_rng(100 + seed)
    n1, n2 = (int(v) for v in rng.integers(1, 7, size=2))
    values = rng.permutation(n1 + n2).astype(float)
    x, y = values[:n1], values[n1:]
    u_obs = sum(1 for a in x for b in y if a > b)
    mean = n1 * n2 / 2
    hits = total = 0
    for pick in itertools.combinations(range(n1 + n2), n1):
        rest = [i for i in range(n1 + n2) if i not in pick]
        u = sum(1 for a in pick for b in rest if a > b)
        hits += abs(u - mean) >= abs(u_obs - mean) - 1e-9
        total += 1
    res = mann_whitney(x, y)
    assert res.statistic == u_obs
    assert res.p_value == pytest.approx(min(1.0, hits / total), abs=1e-12)


def test_mann_whitney_tied_normal_by_hand():
    x, y = [1, 2, 2, 3], [2, 3, 4, 5, 6]
    res = mann_whitney(x, y)
    # ranks: 1->1, 2->3 (x3), 3->5.5 (x2), 4->7, 5->8, 6->9
    u = (1 + 3 + 3 + 5.5) - 10
    n = 9
    var = 4 * 5 / 12 * ((n + 1) - (24 + 6) / (n * (n - 1)))
    z = (u - 10 + 0.5) / math.sqrt(var)
    assert res.statistic == u
    assert res.p_value == pytest.approx(2 * normal_sf(abs(z)))


def test_mann_whitney_empty_group():
    with pytest.raises(DomainError):
        mann_whitney([], [1.0])


# --- runs --------------------------------------------------------------------

def test_runs_counts_and_moments():
    res = runs_test([-1, 2, 3, 4, 5])
    assert res.n_summary["runs"] == 2
    assert res.n_summary["n_above"] == 4 and res.n_summary["n_below"] == 1


def _alternating(pos_runs, neg_runs):
    out = []
    for i in range(max(len(pos_runs), len(neg_runs))):
        if i < len(pos_runs):
            out += [1.0] * pos_runs[i]
        if i < len(neg_runs):
            out += [-1.0] * neg_runs[i]
    return out


def test_runs_full_period_counts_give_zero():
    # 16 positive runs totalling 24, 15 negative runs totalling 40
    signs = _alternating([2] * 8 + [1] * 8, [3] * 10 + [2] * 5)
    res = runs_test(signs)
    assert res.n_summary == {"n_above": 24, "n_below": 40, "runs": 31, "dropped": 0}
    assert res.statistic == 0.0 and res.p_value == 1.0


def test_runs_hand_value_for_printed_counts():
    # n1=5, n2=12, R=11
    mu = 2 * 5 * 12 / 17 + 1
    sigma = math.sqrt((mu - 1) * (mu - 2) / 16)
    assert mu == pytest.approx(8.0588, abs=1e-4)
    assert sigma == pytest.approx(1.6349, abs=1e-4)
    signs = [-1.0] * 7 + _alternating([1] * 5, [1] * 5)
    res = runs_test(signs)
    assert (res.n_summary["n_above"], res.n_summary["n_below"], res.n_summary["runs"]) == (5, 12, 11)
    assert res.statistic == pytest.approx((11 - mu) / sigma, rel=1e-12)
    assert res.statistic == pytest.approx(1.799, abs=1e-3)


def test_runs_single_sign_is_domain_error():
    with pytest.raises(DomainError):
        runs_test([0.1, 0.2, 0.3])


def test_runs_drops_threshold_values():
    res = runs_test([1, 0, -1, 0, 1], threshold=0)
    assert res.n_summary["dropped"] == 2


# --- correlations --------------------------------------------------------------

def test_pearson_perfect_is_degenerate():
    x = np.arange(10.0)
    assert pearson_test(x, x).degenerate
    neg = pearson_test(x, -x)
    assert neg.extras["estimate"] == -1.0 and neg.degenerate


def test_pearson_constant_input():
    with pytest.raises(DomainError):
        pearson_test([1, 1, 1], [1, 2, 3])


def test_spearman_monotone():
    x = np.arange(8.0)
    res = spearman_test(x, np.exp(x))
    assert res.extras["estimate"] == 1.0
    assert res.statistic == 0.0


@pytest.mark.parametrize("perm", [(2, 0, 4, 1, 3), (4, 3, 2, 1, 0), (1, 0, 2, 4, 3)])
def test_spearman_exact_matches_enumeration(perm):
    x = np.arange(5.0)
    y = np.array(perm, dtype=float)
    s_obs = float(np.sum((x - y) ** 2))
    all_s = [sum((i - p) ** 2 for i, p in enumerate(q)) for q in itertools.permutations(range(5))]
    mean = 5 * 24 / 6
    p = sum(abs(s - mean) >= abs(s_obs - mean) - 1e-9 for s in all_s) / 120
    res = spearman_test(x, y)
    assert res.statistic == pytest.approx(s_obs)
    assert res.method is Method.SPEARMAN_EXACT
    assert res.p_value == pytest.approx(min(1.0, p), abs=1e-12)


def test_spearman_constant_input():
    with pytest.raises(DomainError):
        spearman_test([2, 2, 2, 2], [1, 2, 3, 4])


# --- binomial ------------------------------------------------------------------

@pytest.mark.parametrize("k,n,p0,expected", [
    (2, 2, 0.25, 0.0625), (3, 4, 0.25, 0.05078), (6, 12, 0.25, 0.08608),
    (5, 8, 0.25, 0.02730), (1, 1, 0.5, 1.0),
])
def test_binomial_examples(k, n, p0, expected):
    res = binomial_test_two_sided(k, n, p0)
    assert res.p_value == pytest.approx(expected, abs=1e-4)
    assert res.statistic == k


def test_binomial_modal_outcome():
    assert binomial_test_two_sided(3, 12, 0.25).p_value == pytest.approx(1.0)


@pytest.mark.parametrize("k,n", [(-1, 3), (4, 3), (0, 0)])
def test_binomial_bad_counts(k, n):
    with pytest.raises(DomainError):
        binomial_test_two_sided(k, n, 0.25)


# --- multinomial Monte Carlo ------------------------------------------------------

def test_multinomial_single_final_four():
    res = multinomial_mc_gof([FinalFourDraw(("a", "b", "c", "d"), "a")], iterations=2000, seed=1)
    assert res.p_value == 1.0


def test_multinomial_pearson_single_final_four_statistic():
    res = multinomial_mc_gof([FinalFourDraw(("a", "b", "c", "d"), "a")], iterations=2000,
                             statistic="pearson", scheme="per_final_four")
    assert res.statistic == pytest.approx(3.0)
    assert res.p_value == 1.0


def test_multinomial_rejects_bad_records():
    with pytest.raises(DataError):
        multinomial_mc_gof([FinalFourDraw(("a", "a", "c", "d"), "a")], iterations=1000)
    with pytest.raises(DataError):
        multinomial_mc_gof([FinalFourDraw(("a", "b", "c", "d"), "e")], iterations=1000)
    with pytest.raises(DomainError):
        multinomial_mc_gof([FinalFourDraw(("a", "b", "c", "d"), "a")], iterations=10)


def _toy_history(n=30, seed=0):
    rng = np.random.default_rng(seed)
    teams = [f"t{i}" for i in range(12)]
    out = []
    for _ in range(n):
        four = tuple(rng.choice(teams, 4, replace=False))
        out.append(FinalFourDraw(four, four[int(rng.integers(4))]))
    return out


def test_multinomial_parallel_is_bit_identical():
    hist = _toy_history()
    a = multinomial_mc_gof(hist, iterations=20_000, seed=5)
    b = multinomial_mc_gof(hist, iterations=20_000, seed=5, workers=4, block_size=1_234)
    assert a == b


def test_multinomial_extras():
    res = multinomial_mc_gof(_toy_history(), iterations=10_000, seed=2)
    p = res.p_value
    assert res.extras["mc_standard_error"] == pytest.approx(math.sqrt(p * (1 - p) / 10_000))
    assert res.n_summary["iterations"] == 10_000


def test_multinomial_pearson_scheme_against_direct_simulation():
    # the per-final-four scheme with the Pearson statistic, checked against
    # an independent numpy simulation
    hist = _toy_history(20, seed=4)
    res = multinomial_mc_gof(hist, iterations=40_000, seed=11, statistic="pearson",
                             scheme="per_final_four")
    teams = sorted({t for h in hist for t in h.participants})
    idx = {t: i for i, t in enumerate(teams)}
    slots = np.array([[idx[t] for t in h.participants] for h in hist])
    expected = np.bincount(slots.ravel(), minlength=len(teams)) / 4
    obs = np.bincount([idx[h.winner] for h in hist], minlength=len(teams))
    t_obs = np.sum((obs - expected) ** 2 / expected)
    rng = np.random.default_rng(0)
    picks = rng.integers(0, 4, size=(40_000, len(hist)))
    winners = slots[np.arange(len(hist)), picks]
    counts = np.zeros((40_000, len(teams)))
    np.add.at(counts, (np.repeat(np.arange(40_000), len(hist)), winners.ravel()), 1)
    sims = np.sum((counts - expected) ** 2 / expected, axis=1)
    p_direct = np.mean(sims >= t_obs - 1e-9)
    assert abs(res.p_value - p_direct) < 6 * math.sqrt(2 * p_direct * (1 - p_direct) / 40_000)


# --- Zivot-Andrews --------------------------------------------------------------------

def test_za_broken_trend_rejects_at_one_percent():
    rng = np.random.default_rng(80)
    t = np.arange(1, 81, dtype=float)
    y = t + 10.0 * (t > 40) + rng.normal(0, 1, 80)
    res = zivot_andrews(y)
    assert res.base.statistic < ZA_CRITICAL_VALUES[0.01]
    assert res.decision_at[0.01]
    assert res.p_bracket == "< 0.01"
    assert abs(res.break_position - 39) <= 2


def test_za_statistic_is_min_over_candidates():
    rng = np.random.default_rng(1)
    y = np.cumsum(rng.normal(size=60))
    res = zivot_andrews(y)
    assert res.base.statistic == min(res.candidate_stats.values())
    tb = res.break_position + 1
    assert res.candidate_stats[tb] == res.base.statistic
    cut = math.floor(0.15 * 60)
    assert cut <= tb <= 60 - cut


def test_za_skips_singular_candidates():
    # a constant tail makes designs near the end rank deficient
    rng = np.random.default_rng(2)
    y = np.concatenate([np.cumsum(rng.normal(size=40)), np.full(12, 3.0)])
    res = zivot_andrews(y, trim=0.05)
    assert res.skipped
    assert set(res.skipped).isdisjoint(res.candidate_stats)


def test_za_against_statsmodels_style_regression():
    # one candidate recomputed with numpy least squares
    rng = np.random.default_rng(3)
    y = np.cumsum(rng.normal(size=50))
    res = zivot_andrews(y, lags=2)
    tb = res.break_position + 1
    n = 50
    rows = np.arange(4, n + 1)
    dy = np.diff(y)
    x = np.column_stack([
        np.ones(len(rows)), rows, (rows > tb).astype(float),
        np.where(rows > tb, rows - tb, 0.0), y[rows - 2], dy[rows - 3], dy[rows - 4],
    ])
    resp = y[rows - 1] - y[rows - 2]
    beta, *_ = np.linalg.lstsq(x, resp, rcond=None)
    resid = resp - x @ beta
    s2 = resid @ resid / (len(rows) - x.shape[1])
    se = math.sqrt(s2 * np.linalg.inv(x.T @ x)[4, 4])
    assert res.base.statistic == pytest.approx(beta[4] / se, rel=1e-9)


def test_za_too_short():
    with pytest.raises(DomainError):
        zivot_andrews(np.arange(12.0), lags=5)


def test_za_labels():
    rng = np.random.default_rng(4)
    y = np.cumsum(rng.normal(size=40))
    labels = [f"s{i}" for i in range(40)]
    res = zivot_andrews(y, labels=labels)
    assert res.break_label == labels[res.break_position]
