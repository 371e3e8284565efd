import random

import numpy as np
import pytest

from _helpers import front_load_min_margin, record, records_from_margins
from cascadegate import evaluate
from cascadegate.errors import CurveError, GridError
from cascadegate.policy import (
    COMMITTEE_CASCADE,
    MARGIN_CASCADE,
    RANDOM_ROUTING,
    SCORE_ROUTING,
)
from cascadegate.records import CostScheme, CurvePoint
from cascadegate.synth import generate, oracle_cascade_accuracy

SCHEME = CostScheme.fixed(1, 10)


def test_budget_grid_three_points():
    assert evaluate.budget_grid(SCHEME, 3) == pytest.approx([1.0, 5.5, 10.0])


def test_budget_grid_endpoints_only():
    assert evaluate.budget_grid(CostScheme.fixed(1, 2), 2) == pytest.approx([1.0, 2.0])


def test_budget_grid_default_is_arithmetic_progression():
    grid = evaluate.budget_grid(SCHEME)
    assert len(grid) == 21
    assert grid[0] == 1.0 and grid[-1] == 10.0
    steps = [b - a for a, b in zip(grid, grid[1:])]
    assert steps == pytest.approx([0.45] * 20)


def test_budget_grid_needs_two_points():
    with pytest.raises(GridError):
        evaluate.budget_grid(SCHEME, 1)


def curve_points(pairs):
    return [CurvePoint(b, b, a) for b, a in pairs]


def test_auc_constant_accuracy():
    points = curve_points([(1, 0.8), (5.5, 0.8), (10, 0.8)])
    assert evaluate.normalized_auc(points, SCHEME) == pytest.approx(0.8)


def test_auc_linear_ramp():
    points = curve_points([(1, 0.0), (10, 1.0)])
    assert evaluate.normalized_auc(points, SCHEME) == pytest.approx(0.5)


def test_auc_single_trapezoid():
    points = curve_points([(1, 0.6), (10, 0.9)])
    assert evaluate.normalized_auc(points, SCHEME) == pytest.approx(0.75)


def test_auc_rejects_unsorted_and_off_span_curves():
    with pytest.raises(CurveError):
        evaluate.normalized_auc(curve_points([(1, 0.5), (1, 0.6), (10, 0.7)]), SCHEME)
    with pytest.raises(CurveError):
        evaluate.normalized_auc(curve_points([(2, 0.5), (10, 0.6)]), SCHEME)
    with pytest.raises(CurveError):
        evaluate.normalized_auc(curve_points([(1, 0.5)]), SCHEME)


def test_auc_invariant_under_affine_budget_rescaling():
    rng = random.Random(0)
    pairs = [(b, rng.random()) for b in evaluate.budget_grid(SCHEME, 9)]
    base = evaluate.normalized_auc(curve_points(pairs), SCHEME)
    for scale, shift in ((2.0, 0.0), (3.0, 4.0), (0.5, 1.0)):
        scheme = CostScheme.fixed(1 * scale + shift, 10 * scale + shift)
        moved = curve_points([(b * scale + shift, a) for b, a in pairs])
        assert evaluate.normalized_auc(moved, scheme) == pytest.approx(base, abs=1e-12)


def test_pointwise_dominance_implies_auc_dominance():
    rng = random.Random(1)
    budgets = evaluate.budget_grid(SCHEME, 11)
    low = [rng.uniform(0.2, 0.6) for _ in budgets]
    high = [a + rng.uniform(0.0, 0.3) for a in low]
    auc_low = evaluate.normalized_auc(curve_points(list(zip(budgets, low))), SCHEME)
    auc_high = evaluate.normalized_auc(curve_points(list(zip(budgets, high))), SCHEME)
    assert auc_high >= auc_low


def riemann_midpoint_auc(points, scheme, total_cells=10_000):
    """Independent quadrature: knot-aligned midpoint sums via np.interp."""
    xs = np.array([p.target_budget for p in points])
    ys = np.array([p.accuracy for p in points])
    per_segment = max(1, int(np.ceil(total_cells / (len(points) - 1))))
    area = 0.0
    for left, right in zip(xs[:-1], xs[1:]):
        edges = np.linspace(left, right, per_segment + 1)
        mids = (edges[:-1] + edges[1:]) / 2.0
        area += float(np.sum(np.interp(mids, xs, ys)) * (right - left) / per_segment)
    return area / (scheme.avg_large - scheme.avg_small)


def test_trapezoid_matches_riemann_oracle_quick():
    rng = random.Random(2)
    for _ in range(10):
        n = rng.randint(2, 12)
        budgets = sorted(rng.uniform(1, 10) for _ in range(n - 2))
        budgets = [1.0] + budgets + [10.0]
        points = curve_points([(b, rng.random()) for b in budgets])
        ours = evaluate.normalized_auc(points, SCHEME)
        oracle = riemann_midpoint_auc(points, SCHEME)
        assert ours == pytest.approx(oracle, abs=1e-9)


def test_sweep_endpoints_recover_model_accuracies():
    records = generate(600, seed=3)
    result = evaluate.sweep(records, RANDOM_ROUTING, SCHEME, seeds=[0], n_points=3)
    post = records[10:]
    small_accuracy = sum(r.small_correct for r in post) / len(post)
    large_accuracy = sum(r.large_correct for r in post) / len(post)
    assert result.curve.points[0].accuracy == pytest.approx(small_accuracy)
    assert result.curve.points[-1].accuracy == pytest.approx(large_accuracy)
    assert result.curve.points[0].realized_budget == pytest.approx(1.0)
    assert result.curve.points[-1].realized_budget == pytest.approx(10.0)


def test_sweep_flat_curve_when_models_agree():
    flags = [i % 3 == 0 for i in range(300)]
    records = records_from_margins([0.1 + 0.8 * (i / 300) for i in range(300)])
    records = [
        record(
            id=r.id,
            small_first_token=[list(e) for e in r.small_first_token.entries],
            small_correct=flags[i],
            large_correct=flags[i],
        )
        for i, r in enumerate(records)
    ]
    result = evaluate.sweep(records, MARGIN_CASCADE, SCHEME, seeds=[0], n_points=5)
    accuracies = [p.accuracy for p in result.curve.points]
    assert max(accuracies) - min(accuracies) == pytest.approx(0.0)


def test_margin_between_random_and_oracle():
    records = front_load_min_margin(generate(3000, seed=4))
    margin = evaluate.sweep(records, MARGIN_CASCADE, SCHEME, seeds=[0, 1, 2], n_points=9)
    rand = evaluate.sweep(records, RANDOM_ROUTING, SCHEME, seeds=[0, 1, 2], n_points=9)
    post = records[10:]
    for m_point, r_point in zip(margin.curve.points, rand.curve.points):
        oracle = oracle_cascade_accuracy(post, SCHEME, m_point.target_budget)
        assert m_point.accuracy >= r_point.accuracy - 0.03
        assert m_point.accuracy <= oracle + 1e-12
    assert margin.curve.normalized_auc >= rand.curve.normalized_auc


def test_sweep_parallel_jobs_match_serial():
    records = generate(400, seed=5)
    serial = evaluate.sweep(records, MARGIN_CASCADE, SCHEME, seeds=[0, 1], n_points=5, jobs=1)
    parallel = evaluate.sweep(records, MARGIN_CASCADE, SCHEME, seeds=[0, 1], n_points=5, jobs=2)
    assert serial == parallel


def test_target_probability_committee_clamps_below_floor():
    assert evaluate.target_probability(COMMITTEE_CASCADE, 1.0, SCHEME) == 0.0
    assert evaluate.target_probability(COMMITTEE_CASCADE, 5.0, SCHEME) == 0.0
    assert evaluate.target_probability(COMMITTEE_CASCADE, 10.0, SCHEME) == pytest.approx(0.5)
    assert evaluate.target_probability(MARGIN_CASCADE, 10.0, SCHEME) == pytest.approx(0.9)
    assert evaluate.target_probability(SCORE_ROUTING, 5.5, SCHEME) == pytest.approx(0.5)


def test_committee_realized_budget_shows_floor_overshoot():
    records = generate(300, seed=6)
    result = evaluate.sweep(records, COMMITTEE_CASCADE, SCHEME, seeds=[0], n_points=3)
    # Discrete agreement levels allow a few new-minimum escalations at p=0,
    # so the floor is approximate; the overshoot above the target is the point.
    assert result.curve.points[0].realized_budget == pytest.approx(5.0, abs=0.3)
    assert result.curve.points[0].realized_budget > 4.9


def test_extended_points_cover_full_cascade_range():
    records = generate(300, seed=7)
    result = evaluate.sweep(
        records, MARGIN_CASCADE, SCHEME, seeds=[0], n_points=5, extended=True
    )
    assert result.extended_points
    assert result.extended_points[-1].target_budget == pytest.approx(11.0)
    assert all(p.target_budget > 10.0 for p in result.extended_points)
    # Extended range excluded from the AUC.
    plain = evaluate.sweep(records, MARGIN_CASCADE, SCHEME, seeds=[0], n_points=5)
    assert result.curve.normalized_auc == plain.curve.normalized_auc
    routing = evaluate.sweep(
        records, RANDOM_ROUTING, SCHEME, seeds=[0], n_points=5, extended=True
    )
    assert routing.extended_points == ()


def test_available_strategies_follow_dataset_signals():
    records = generate(30, seed=8)
    assert set(evaluate.available_strategies(records)) == {
        "random_routing",
        "score_routing",
        "hybrid_routing",
        "frugal_cascade",
        "margin_cascade",
        "committee_cascade",
    }
    bare = records_from_margins([0.5] * 20)
    assert set(evaluate.available_strategies(bare)) == {
        "random_routing",
        "margin_cascade",
    }


def test_curve_table_format():
    records = generate(200, seed=9)
    results = [
        evaluate.sweep(records, strategy, SCHEME, seeds=[0, 1], n_points=3)
        for strategy in (MARGIN_CASCADE, RANDOM_ROUTING)
    ]
    text = evaluate.format_curve_table(results)
    lines = text.strip().splitlines()
    assert lines[0] == "budget,margin_cascade_mean,margin_cascade_std,random_routing_mean,random_routing_std"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "1.000000"
    assert all(len(cell.split(".")[1]) == 6 for cell in first)


def test_auc_table_format():
    records = generate(200, seed=10)
    results = [evaluate.sweep(records, MARGIN_CASCADE, SCHEME, seeds=[0], n_points=3)]
    text = evaluate.format_auc_table(results)
    lines = text.strip().splitlines()
    assert lines[0] == "strategy,scheme,auc"
    strategy, scheme, auc = lines[1].split(",")
    assert strategy == "margin_cascade"
    assert scheme == "cs1_cl10"
    assert len(auc.split(".")[1]) == 6


def test_realized_table_format():
    records = generate(200, seed=11)
    results = [evaluate.sweep(records, MARGIN_CASCADE, SCHEME, seeds=[0], n_points=3)]
    text = evaluate.format_realized_table(results)
    lines = text.strip().splitlines()
    assert lines[0] == "budget,margin_cascade_realized"
    assert len(lines) == 4


def test_mismatched_grids_rejected_in_curve_table():
    records = generate(200, seed=12)
    a = evaluate.sweep(records, MARGIN_CASCADE, SCHEME, seeds=[0], n_points=3)
    b = evaluate.sweep(records, MARGIN_CASCADE, SCHEME, seeds=[0], n_points=5)
    with pytest.raises(CurveError):
        evaluate.format_curve_table([a, b])
