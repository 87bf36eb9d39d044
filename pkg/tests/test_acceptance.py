"""End-to-end acceptance criteria; each test records one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest
from scipy import stats

from hedonic_mc import (
    ExperimentConfig,
    PreferenceMatrix,
    bell_number,
    census,
    count_games,
    find_core,
    model_compare,
    run_experiment,
    verify_core,
)
from hedonic_mc.analysis import as_weighted, fit, log_likelihood
from hedonic_mc.generator import random_batch
from hedonic_mc.partitions import bell_numbers_by_binomial
from hedonic_mc.solver import core_sizes

from oracles import brute_force_core, game_count
from reference import PUBLISHED_COUNTS, PUBLISHED_GAMMA, PUBLISHED_WEIBULL, published_proportion

pytestmark = pytest.mark.acceptance

DESK_GAMES = 100_000
DESK_SEED = 2024
# Published zero bins carry no resolution below one game per million.
P_FLOOR = 1e-6


@pytest.fixture(scope="module")
def desk_run():
    cfg = ExperimentConfig(sizes=(3, 4, 5, 6, 7), games_per_size=DESK_GAMES, seed=DESK_SEED, checkpoint_interval=25_000)
    return run_experiment(cfg)


def _line(report, number, ok, detail):
    report(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_exact_three_player_census(acceptance_report):
    t0 = time.perf_counter()
    hist = census(3)
    elapsed = time.perf_counter() - t0
    total = hist.total(3)
    freq = hist.frequencies(3)
    diffs = {k: abs(freq.get(k, 0.0) - published_proportion(3, k)) for k in (0, 1, 2)}
    ok = total == 13_824 == count_games(3) and set(freq) == {0, 1, 2} and max(diffs.values()) <= 0.002 and elapsed < 60
    _line(
        acceptance_report, 1, ok,
        f"{total} games in {elapsed:.1f}s; exact {[round(freq[k], 6) for k in (0, 1, 2)]}; max |diff| {max(diffs.values()):.5f} (tol 0.002)",
    )
    assert ok


def test_criterion_2_desk_scale_table(desk_run, acceptance_report):
    worst = {}
    for n in (4, 5, 6, 7):
        freq = desk_run.frequencies(n)
        bins = set(freq) | set(PUBLISHED_COUNTS[n])
        zs = {}
        for k in bins:
            p = max(published_proportion(n, k), P_FLOOR)
            sd = math.sqrt(p * (1 - p) / DESK_GAMES)
            zs[k] = (freq.get(k, 0.0) - published_proportion(n, k)) / sd
        k = max(zs, key=lambda b: abs(zs[b]))
        worst[n] = (k, zs[k])
    ok = all(abs(z) <= 4 for _, z in worst.values())
    detail = "; ".join(f"n={n} worst bin {k} z={z:+.1f}" for n, (k, z) in worst.items())
    _line(acceptance_report, 2, ok, f"{detail} (tol 4 sd)")
    assert ok, detail


def test_criterion_3_two_player_law(acceptance_report):
    sizes = core_sizes(random_batch(DESK_SEED, 2, 0, 10_000))
    ok = bool(np.all(sizes == 1))
    _line(acceptance_report, 3, ok, f"{int(np.sum(sizes == 1))}/10000 two-player games have core size 1")
    assert ok


def test_criterion_4_monotone_trends(desk_run, acceptance_report):
    ones = [desk_run.frequencies(n).get(1, 0.0) for n in range(3, 8)]
    many = [sum(v for k, v in desk_run.frequencies(n).items() if k >= 2) for n in range(3, 8)]
    ok = all(a > b for a, b in zip(ones, ones[1:])) and all(a < b for a, b in zip(many, many[1:]))
    _line(
        acceptance_report, 4, ok,
        f"core-1 {[round(v, 4) for v in ones]}; core>=2 {[round(v, 4) for v in many]} for n=3..7",
    )
    assert ok


def test_criterion_5_exact_combinatorics(acceptance_report):
    recurrence = bell_numbers_by_binomial(16)
    checks = [
        bell_number(15) == 1_382_958_545,
        all(bell_number(n) == recurrence[n] for n in range(1, 17)),
        count_games(2) == 4,
        count_games(3) == 13_824,
        count_games(4) == math.factorial(8) ** 4 == game_count(4),
    ]
    ok = all(checks)
    _line(
        acceptance_report, 5, ok,
        f"B15={bell_number(15)}; count_games(4)={count_games(4)} ({count_games(4):.3e}); "
        "rounded prose value 2.2e18 flagged as a discrepancy",
    )
    assert ok


# -- estimator properties (criterion 7, also the fallback for criterion 6) --------


def _score(family, x, w, shape, scale, h=1e-6):
    f = lambda a, b: log_likelihood(family, x, w, a, b)
    ga = (f(shape * (1 + h), scale) - f(shape * (1 - h), scale)) / (2 * shape * h)
    gb = (f(shape, scale * (1 + h)) - f(shape, scale * (1 - h))) / (2 * scale * h)
    return max(abs(ga), abs(gb)) / w.sum()


def _policy_data(counts, policy):
    x, w = as_weighted(counts)
    return (x[x > 0], w[x > 0]) if policy == "drop_zeros" else (x + 1, w)


def estimator_properties():
    """(all ok, summary) for the gradient, recovery and exponential-limit checks."""
    rng = np.random.default_rng(DESK_SEED)
    grad = 0.0
    for n in (5, 9, 13):
        for policy in ("drop_zeros", "shift_by_one"):
            x, w = _policy_data(PUBLISHED_COUNTS[n], policy)
            for family in ("weibull", "gamma"):
                r = fit(family, PUBLISHED_COUNTS[n], zero_policy=policy)
                grad = max(grad, _score(family, x, w, r.shape, r.scale))
    wb = fit("weibull", stats.weibull_min(1.67, scale=1.21).rvs(size=10**6, random_state=rng))
    gm = fit("gamma", stats.gamma(1.37, scale=1.19).rvs(size=10**6, random_state=rng))
    recovery = max(
        abs(wb.shape / 1.67 - 1), abs(wb.scale / 1.21 - 1), abs(gm.shape / 1.37 - 1), abs(gm.scale / 1.19 - 1)
    )
    expo = rng.exponential(2.0, size=10**6)
    exp_shapes = (fit("weibull", expo).shape, fit("gamma", expo).shape)
    ok = grad < 1e-4 and recovery < 0.01 and all(abs(s - 1) <= 0.02 for s in exp_shapes)
    summary = (
        f"max score {grad:.1e} (tol 1e-4); recovery error {recovery:.2%} (tol 1%); "
        f"exponential shapes {exp_shapes[0]:.4f}/{exp_shapes[1]:.4f} (tol 1+-0.02)"
    )
    return ok, summary


@pytest.fixture(scope="module")
def properties():
    return estimator_properties()


def test_criterion_6_fit_reproduction(properties, acceptance_report):
    pw, pg = PUBLISHED_WEIBULL[5], PUBLISHED_GAMMA[5]
    fits, distance = {}, {}
    for policy in ("drop_zeros", "shift_by_one"):
        for n in (5, 9, 13):
            fits[policy, n] = {fam: fit(fam, PUBLISHED_COUNTS[n], zero_policy=policy) for fam in ("weibull", "gamma")}
        w5, g5 = fits[policy, 5]["weibull"], fits[policy, 5]["gamma"]
        distance[policy] = abs(w5.shape - pw[0]) + abs(w5.scale - pw[1]) + abs(g5.shape - pg[0]) + abs(g5.scale - pg[1])
    best = min(distance, key=distance.get)
    wshape = fits[best, 5]["weibull"].shape
    preferred = {n: model_compare(list(fits[best, n].values())).preferred for n in (5, 9, 13)}
    in_band = abs(wshape - pw[0]) <= 0.15
    flip = preferred[5] == "weibull" and preferred[13] == "gamma"
    params = "; ".join(
        f"{p}: W {fits[p, 5]['weibull'].shape:.3f}/{fits[p, 5]['weibull'].scale:.3f} "
        f"G {fits[p, 5]['gamma'].shape:.3f}/{fits[p, 5]['gamma'].scale:.3f}"
        for p in distance
    )
    detail = (
        f"best policy {best}, n=5 Weibull shape {wshape:.3f} vs {pw[0]} (band 0.15); {params}; "
        f"AIC preferred n=5/9/13: {preferred[5]}/{preferred[9]}/{preferred[13]}"
    )
    if in_band:
        ok = flip
        _line(acceptance_report, 6, ok, detail)
    else:
        ok, summary = properties
        _line(acceptance_report, 6, ok, f"{detail}; band missed, fallback to estimator properties: {summary}")
    assert ok


def test_criterion_7_estimator_properties(properties, acceptance_report):
    ok, summary = properties
    _line(acceptance_report, 7, ok, summary)
    assert ok


def test_criterion_8_oracle_and_determinism(tmp_path, acceptance_report):
    verified = agreed = 0
    for n in (2, 3, 4, 5):
        batch = random_batch(DESK_SEED + n, n, 0, 1000)
        for g, ranks in enumerate(batch):
            result = find_core(PreferenceMatrix(ranks))
            verified += verify_core(PreferenceMatrix(ranks), result)
            if g < 200:
                agreed += result.core == brute_force_core(ranks.tolist())
    base = dict(sizes=(3, 4, 5), games_per_size=4_000, seed=DESK_SEED, checkpoint_interval=250)
    by_workers = [run_experiment(ExperimentConfig(**base, worker_count=w)).to_csv() for w in (1, 4, 8)]
    workers_same = len(set(by_workers)) == 1

    cfg = ExperimentConfig(sizes=(4,), games_per_size=10_000, seed=DESK_SEED, checkpoint_interval=1_000)
    ck = tmp_path / "ck.json"
    run_experiment(cfg, checkpoint=ck, stop_after=5_000)
    resumed = run_experiment(cfg, checkpoint=ck, resume=True)
    resume_same = resumed.to_csv() == run_experiment(cfg).to_csv()

    ok = verified == 4000 and agreed == 800 and workers_same and resume_same
    _line(
        acceptance_report, 8, ok,
        f"verify_core {verified}/4000; oracle agreement {agreed}/800; "
        f"workers 1/4/8 identical={workers_same}; interrupt/resume identical={resume_same}",
    )
    assert ok
