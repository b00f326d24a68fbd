import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmax.value import KernelValueEstimator, TabularValues


def zero(_):
    return 0.0


def test_tabular_overwrites():
    V = TabularValues(lambda s: 1.0)
    assert V.predict((0,)) == 1.0
    V.apply_updates([((0,), 4.0)])
    V.apply_updates([((0,), 6.0)])
    assert V.predict((0,)) == 6.0
    assert json.loads(json.dumps(V.to_dict()))["table"] == [{"state": [0], "value": 6.0}]


def test_kernel_empty_returns_base():
    est = KernelValueEstimator(lambda s: 5.0, gamma=1.0, dim=2)
    assert est.predict((0.3, 0.1)) == 5.0


def test_kernel_single_point_exact_hit():
    est = KernelValueEstimator(lambda s: 5.0, gamma=1.0, dim=2)
    est.apply_updates([((1.0, 1.0), 7.0)])
    assert est.predict((1.0, 1.0)) == pytest.approx(7.0)


def test_kernel_equidistant_points_average():
    est = KernelValueEstimator(zero, gamma=1.0, dim=1)
    est.apply_updates([((-1.0,), 2.0), ((1.0,), 4.0)])
    assert est.predict((0.0,)) == pytest.approx(3.0)


def test_kernel_small_gamma_interpolates_training_points():
    est = KernelValueEstimator(zero, gamma=1e-3, dim=1, weight_floor=0.0)
    pts = [((float(i),), float(i * i)) for i in range(6)]
    est.apply_updates(pts)
    for (x,), t in pts:
        assert est.predict((x,)) == pytest.approx(t)


def test_kernel_replaces_duplicate_points():
    est = KernelValueEstimator(zero, gamma=1.0, dim=1, replace_radius=0.01)
    est.apply_updates([((0.5,), 9.0)])
    est.apply_updates([((0.5,), 9.0)])
    assert len(est) == 1 and est.targets[0] == 9.0
    est.apply_updates([((0.505,), 3.0)])
    assert len(est) == 1 and est.targets[0] == 3.0


def test_kernel_newest_wins_within_a_batch():
    est = KernelValueEstimator(zero, gamma=1.0, dim=1, replace_radius=0.01)
    est.apply_updates([((0.5,), 1.0), ((0.501,), 2.0)])
    assert len(est) == 1 and est.targets[0] == 2.0


def test_kernel_weight_floor_falls_back_to_base():
    est = KernelValueEstimator(lambda s: 1.5, gamma=0.01, dim=1)
    est.apply_updates([((0.0,), 10.0)])
    assert est.predict((5.0,)) == 1.5


def test_kernel_capacity_evicts_oldest():
    est = KernelValueEstimator(zero, gamma=1.0, dim=1, capacity=3)
    for i in range(5):
        est.apply_updates([((float(i),), float(i))])
    assert est.X[:, 0].tolist() == [2.0, 3.0, 4.0]


def test_kernel_goal_anchoring():
    goal = (0.0, 0.0)
    base = lambda s: math.hypot(*s)
    est = KernelValueEstimator(base, gamma=0.1, dim=2)
    est.apply_updates([((3.0, 3.0), 6.0), ((2.0, 1.0), 4.0)])
    assert est.predict(goal) == 0.0


def test_kernel_serializes():
    est = KernelValueEstimator(zero, gamma=2.0, dim=2)
    est.apply_updates([((1.0, 2.0), 3.0)])
    d = json.loads(json.dumps(est.to_dict()))
    assert d["gamma"] == 2.0 and d["points"] == [[1.0, 2.0]] and d["targets"] == [3.0]


points = st.lists(st.tuples(st.floats(0, 5), st.floats(0, 5), st.floats(0, 20)), min_size=1, max_size=15)


@settings(max_examples=80, deadline=None)
@given(data=points, q=st.tuples(st.floats(0, 5), st.floats(0, 5)), gamma=st.floats(0.2, 20))
def test_kernel_residual_is_a_convex_combination(data, q, gamma):
    base = lambda s: 0.5 * s[0]
    est = KernelValueEstimator(base, gamma=gamma, dim=2)
    est.apply_updates([((x, y), t) for x, y, t in data])
    r = est.predict(q) - base(q)
    d2 = ((est.X - np.asarray(q)) ** 2).sum(axis=1)
    w = np.exp(-d2 / (2 * gamma**2))
    if w.sum() >= est.weight_floor:
        assert est.residuals.min() - 1e-9 <= r <= est.residuals.max() + 1e-9
        assert r == pytest.approx(float(w @ est.residuals / w.sum()), abs=1e-9)
    else:
        assert r == 0.0


@settings(max_examples=80, deadline=None)
@given(data=points, a=st.tuples(st.floats(0, 5), st.floats(0, 5)),
       step=st.tuples(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3)))
def test_kernel_difference_bound_shrinks_with_gamma(data, a, step):
    """|r(a)-r(b)| <= |a-b| * (spread of residuals / 2) * D / gamma^2, D the farthest data distance."""
    b = (a[0] + step[0], a[1] + step[1])
    prev_bound = math.inf
    for gamma in (1.0, 2.0, 4.0, 8.0, 16.0):
        est = KernelValueEstimator(zero, gamma=gamma, dim=2, weight_floor=0.0)
        est.apply_updates([((x, y), t) for x, y, t in data])
        spread = float(est.residuals.max() - est.residuals.min())
        far = max(float(np.max(np.linalg.norm(est.X - np.asarray(p), axis=1))) for p in (a, b))
        bound = math.dist(a, b) * spread / 2 * far / gamma**2
        assert abs(est.predict(a) - est.predict(b)) <= bound + 1e-9
        assert bound <= prev_bound + 1e-12
        prev_bound = bound
