import math

import numpy as np
import pytest

import convexeff as ce


def line_meanings(n, sigma2=2.0):
    x = np.arange(n, dtype=float)
    m = np.exp(-((x[:, None] - x[None, :]) ** 2) / (2 * sigma2))
    return m / m.sum(axis=1, keepdims=True)


def mutual_information_bits(joint):
    pa = joint.sum(axis=1, keepdims=True)
    pb = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    return float((joint[nz] * np.log2(joint[nz] / (pa @ pb)[nz])).sum())


def test_scores_match_numpy():
    rng = np.random.default_rng(0)
    n, k = 12, 4
    m = line_meanings(n)
    prior = rng.uniform(0.5, 1.5, n)
    prior /= prior.sum()
    q = rng.uniform(size=(n, k))
    q /= q.sum(axis=1, keepdims=True)
    s = ce.score(q, ce.MeaningModel(m, prior))
    complexity = mutual_information_bits(prior[:, None] * q)
    accuracy = mutual_information_bits(q.T @ (prior[:, None] * m))
    info_mu = mutual_information_bits(prior[:, None] * m)
    assert s["complexity"] == pytest.approx(complexity, abs=1e-12)
    assert s["accuracy"] == pytest.approx(accuracy, abs=1e-12)
    assert s["cost"] == pytest.approx(info_mu - accuracy, abs=1e-12)


def test_fixed_point_is_self_consistent():
    mm = ce.MeaningModel(line_meanings(10))
    sol = ce.ba_fixed_point(mm, 4.0, ce.perturbed_identity(10, 1e-2, 3))
    assert sol["converged"]
    assert sol["self_consistency_gap"] < 1e-6
    assert np.allclose(sol["encoder"].sum(axis=1), 1.0)


def test_frontier_bounds_random_systems():
    mm = ce.MeaningModel(line_meanings(10))
    f = ce.compute_frontier(mm, ce.geometric_grid(0.5, 256.0, 60))
    assert len(f) == 60
    assert f.is_valid()
    rng = np.random.default_rng(1)
    for _ in range(20):
        q = rng.uniform(size=(10, 3))
        q /= q.sum(axis=1, keepdims=True)
        s = ce.score(q, mm)
        eps, _ = f.epsilon(s["complexity"], s["accuracy"])
        assert eps >= -1e-9


def test_hull_membership_agrees_with_scipy():
    spatial = pytest.importorskip("scipy.spatial")
    rng = np.random.default_rng(2)
    pts = rng.uniform(-5, 5, size=(12, 3))
    tri = spatial.Delaunay(pts)
    for z in rng.uniform(-6, 6, size=(200, 3)):
        assert ce.hull_contains(pts, z) == (tri.find_simplex(z) >= 0)


def test_consistency_of_interleaved_line():
    coords = np.column_stack([np.arange(4.0), np.zeros(4), np.zeros(4)])
    assert ce.system_consistency([0, 0, 1, 1], coords) == 1.0
    assert ce.system_consistency([0, 1, 0, 1], coords) < 1.0


def test_certainty_world():
    assign = [0] * 30 + [1] * 30 + [2] * 12
    w = ce.circle_certainty_world(assign)
    assert abs(w["p_accuracy"]) <= 1e-12
    assert w["q_accuracy"] == pytest.approx(math.log2(3), abs=1e-9)
    with pytest.raises(ValueError):
        ce.circle_certainty_world([0, 1, 0, 1])


def test_missing_data_directory():
    with pytest.raises(OSError):
        ce.load_wcs("/nonexistent/wcs")


def test_auc():
    assert ce.roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75)
