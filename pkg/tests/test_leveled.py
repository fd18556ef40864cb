"""Finite-width leveled simulation and the exact transition matrix."""
import io
import math

import numpy as np
import pytest

from amptree.catalog import linear_threshold, quad4, valiant
from amptree.errors import CapacityError, InputShapeError, RangeError
from amptree.leveled import (LevelConfig, exact_level_distribution,
                             simulate_leveled, width_scaling_experiment)

from _oracles import binom_pmf


def test_config_validation():
    with pytest.raises(InputShapeError):
        LevelConfig(widths=(), n=5, seed=1, input_p=0.5)
    with pytest.raises(InputShapeError):
        LevelConfig(widths=(0, 3), n=5, seed=1, input_p=0.5)
    with pytest.raises(InputShapeError):
        LevelConfig(widths=(3,), n=5, seed=1)                 # no input
    with pytest.raises(InputShapeError):
        LevelConfig(widths=(3,), n=5, seed=1, input_p=0.5,
                    input_bits=(1, 0, 1, 0, 1))               # both inputs
    with pytest.raises(InputShapeError):
        LevelConfig(widths=(3,), n=5, seed=1, input_bits=(1, 0))
    with pytest.raises(RangeError):
        LevelConfig(widths=(3,), n=5, seed=1, input_p=1.5)


def test_trace_determinism():
    cfg = LevelConfig(widths=(40,) * 8, n=30, seed=77, trials=6, input_p=0.4)
    a = simulate_leveled(linear_threshold(0.5), cfg)
    b = simulate_leveled(linear_threshold(0.5), cfg)
    assert np.array_equal(a.fractions, b.fractions)
    assert np.array_equal(a.final_items, b.final_items)
    buf_a, buf_b = io.StringIO(), io.StringIO()
    a.write_csv(buf_a)
    b.write_csv(buf_b)
    assert buf_a.getvalue() == buf_b.getvalue()


def test_trials_are_independent_of_trial_count():
    base = dict(widths=(16,) * 4, n=12, seed=5, input_p=0.5)
    small = simulate_leveled(valiant(), LevelConfig(trials=3, **base))
    large = simulate_leveled(valiant(), LevelConfig(trials=7, **base))
    assert np.array_equal(small.fractions, large.fractions[:3])


def test_all_ones_input_fires():
    cfg = LevelConfig(widths=(1,), n=4, seed=1, trials=10,
                      input_bits=(1, 1, 1, 1))
    trace = simulate_leveled(valiant(), cfg)
    assert trace.fractions[:, -1].min() == 1.0
    assert trace.final_items.min() == 1


def test_fractions_are_multiples_of_width():
    cfg = LevelConfig(widths=(7, 13), n=9, seed=3, trials=8, input_p=0.6)
    trace = simulate_leveled(linear_threshold(0.4), cfg)
    for trial in range(8):
        assert (trace.fractions[trial, 1] * 7) == pytest.approx(
            round(trace.fractions[trial, 1] * 7))
        assert (trace.fractions[trial, 2] * 13) == pytest.approx(
            round(trace.fractions[trial, 2] * 13))


def test_csv_format():
    cfg = LevelConfig(widths=(3,), n=4, seed=9, trials=2, input_p=0.5)
    trace = simulate_leveled(valiant(), cfg)
    buf = io.StringIO()
    trace.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "trial,level,fraction"
    assert len(lines) == 1 + 2 * 2


def test_rejects_oversized_blocks():
    from amptree.catalog import dense_fixed_point, TreeDistribution
    big = dense_fixed_point(0.55, 0.02)
    dist = TreeDistribution("big", ((big, 1.0),))
    with pytest.raises(CapacityError):
        simulate_leveled(dist, LevelConfig(widths=(5,), n=4, seed=1,
                                           input_p=0.5))


# ---------------------------------------------------------------------------
# Exact transition matrix
# ---------------------------------------------------------------------------

def test_exact_m1_l1_is_f_of_p():
    d = valiant()
    firing, v = exact_level_distribution(d, 1, 0.5, 1)
    assert firing == pytest.approx(d.evaluate(0.5), abs=1e-12)
    assert v.shape == (2,)


def test_exact_m2_l2_matches_hand_enumeration():
    d = valiant()
    m, p = 2, 0.5
    f = d.evaluate
    expected = 0.0
    for c1 in range(m + 1):
        w1 = binom_pmf(m, c1, f(p))
        for c2 in range(m + 1):
            expected += w1 * binom_pmf(m, c2, f(c1 / m)) * (c2 / m)
    firing, _ = exact_level_distribution(d, m, p, 2)
    assert firing == pytest.approx(expected, abs=1e-12)


def test_exact_distribution_sums_to_one():
    _, v = exact_level_distribution(quad4(0.5), 50, 0.45, 8)
    assert v.sum() == pytest.approx(1.0, abs=1e-9)


def test_exact_width_cap():
    with pytest.raises(CapacityError):
        exact_level_distribution(valiant(), 2001, 0.5, 2)


def test_exact_vs_monte_carlo_small():
    d = quad4(0.5)
    m, levels, p, trials = 60, 10, 0.44, 3000
    firing, _ = exact_level_distribution(d, m, p, levels)
    n = 100
    bits = (1,) * 44 + (0,) * 56
    cfg = LevelConfig(widths=(m,) * levels, n=n, seed=11, trials=trials,
                      input_bits=bits)
    trace = simulate_leveled(d, cfg)
    mc = trace.fractions[:, -1]
    se = mc.std(ddof=1) / math.sqrt(trials)
    assert abs(mc.mean() - firing) <= 3 * se


def test_half_progress_falsification_rate():
    # conditioned on X_i in [u, t - eps], the fraction of trials violating
    # half-progress is at most exp(-alpha m eps_i^2) + 3 sigma
    t, u, eps = 0.5, 0.2, 0.05
    m, trials = 5000, 400
    d = linear_threshold(t)
    bits = (1,) * 35 + (0,) * 65
    cfg = LevelConfig(widths=(m,) * 6, n=100, seed=21, trials=trials,
                      input_bits=bits)
    trace = simulate_leveled(d, cfg)
    alpha = u * (1 - t) ** 2 / 8.0    # divergence-ratio minimum is 1 here
    violations = 0
    total = 0
    for trial in range(trials):
        xs = trace.fractions[trial]
        for i in range(len(xs) - 1):
            x = xs[i]
            if u <= x <= t - eps:
                total += 1
                if xs[i + 1] > (x + d.evaluate(x)) / 2.0:
                    violations += 1
    assert total > 0
    worst_bound = math.exp(-alpha * m * eps ** 2)
    sigma = math.sqrt(worst_bound * (1 - worst_bound) / total)
    assert violations / total <= worst_bound + 3 * sigma


def test_width_scaling_smoke():
    res = width_scaling_experiment(quad4(0.5), 0.5, gammas=(0.2, 0.1),
                                   epsilons=(0.1, 0.05), seed=31, trials=60,
                                   n=400)
    assert len(res.rows) == 4
    assert all(r.min_width >= 1 for r in res.rows)
    # halving epsilon at fixed gamma multiplies the required width ~4x
    by_cell = {(r.gamma, r.epsilon): r.min_width for r in res.rows}
    assert by_cell[(0.2, 0.05)] > by_cell[(0.2, 0.1)]
    assert by_cell[(0.1, 0.05)] > by_cell[(0.1, 0.1)]
    # gamma = 0.2 needs no more width than gamma = 0.1
    assert by_cell[(0.2, 0.1)] <= by_cell[(0.1, 0.1)]
    assert by_cell[(0.2, 0.05)] <= by_cell[(0.1, 0.05)]
