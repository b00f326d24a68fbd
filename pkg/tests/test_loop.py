import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmax.core import PenalizedModel
from cmax.discrepancy import ExactDiscrepancySet
from cmax.envs import IcyGrid, generate_arm, generate_icy
from cmax.envs.graph import FiniteGraph
from cmax.envs.icy import RIGHT
from cmax.loop import (
    LargeConfig,
    ReplayBuffer,
    SmallConfig,
    TrialRecord,
    run_large,
    run_small,
    update_estimator,
)
from cmax.search import lookahead
from cmax.value import KernelValueEstimator, TabularValues


def test_empty_grid_takes_manhattan_steps():
    env = IcyGrid(10, 10, [], (0, 0), (9, 9))
    rec = run_small(env, SmallConfig(K=1))
    assert rec.reached_goal and rec.steps == 18
    assert rec.discrepancies == [] and rec.failure is None


def test_single_ice_cell_is_flagged_once():
    env = IcyGrid(6, 1, [(1, 0)], (0, 0), (5, 0))
    rec = run_small(env, SmallConfig(K=1))
    assert rec.reached_goal
    assert [(s, a) for s, a, _ in rec.discrepancies] == [((1, 0), RIGHT)]


def test_cutoff_is_reported():
    env = IcyGrid(30, 30, [], (0, 0), (29, 29))
    rec = run_small(env, SmallConfig(K=1, max_steps=5))
    assert rec.steps == 5 and not rec.reached_goal and rec.failure == "cutoff"


@pytest.mark.parametrize("kw", [{"K": 0}, {"max_steps": 0}])
def test_small_config_rejects_non_positive(kw):
    with pytest.raises(ValueError):
        SmallConfig(**kw)


@pytest.mark.parametrize("kw", [{"N": 0}, {"delta": 0.0}, {"xi": -1.0}, {"B": 10, "buffer_capacity": 5}])
def test_large_config_rejects_bad_values(kw):
    with pytest.raises(ValueError):
        LargeConfig(**kw)


def _check_record(rec, env):
    assert rec.steps == len(rec.trajectory) == len(rec.expansions)
    assert len(rec.per_step_plan_time) == rec.steps
    for (s, a, n), (s2, _, _) in zip(rec.trajectory, rec.trajectory[1:]):
        assert n == s2
        assert env.true_step(s, a) == n
    if rec.trajectory:
        assert rec.trajectory[0][0] == env.start
    assert rec.reached_goal == (bool(rec.trajectory) and env.is_goal(rec.trajectory[-1][2]))
    assert all(0 <= t < rec.steps for _, _, t in rec.discrepancies)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), ice=st.sampled_from([0.0, 0.3, 0.6]), K=st.integers(1, 6))
def test_small_record_invariants(seed, ice, K):
    env = generate_icy(12, 12, ice, seed)
    rec = run_small(env, SmallConfig(K=K, max_steps=2000))
    _check_record(rec, env)
    # every discrepancy is a real model error, reported once
    pairs = [(s, a) for s, a, _ in rec.discrepancies]
    assert len(pairs) == len(set(pairs))
    for s, a in pairs:
        assert env.true_step(s, a) != env.model_step(s, a)


def test_record_json_round_trip():
    env = generate_icy(8, 8, 0.4, 2)
    rec = run_small(env, SmallConfig(K=2))
    back = TrialRecord.from_dict(json.loads(rec.to_json()))
    assert back == rec
    assert "per_step_plan_time_us" not in json.loads(rec.to_json(timing=False))


def test_small_loop_is_deterministic():
    env = generate_icy(15, 15, 0.4, 7)
    a, b = run_small(env, SmallConfig(K=3)), run_small(env, SmallConfig(K=3))
    assert a.to_json(timing=False) == b.to_json(timing=False)


def test_replay_buffer_ring():
    buf = ReplayBuffer(3)
    for i in range(5):
        buf.push((i,))
    assert sorted(buf.items) == [(2,), (3,), (4,)] and len(buf) == 3
    assert set(buf.sample(20, random.Random(0))) <= {(2,), (3,), (4,)}


class _CountingValues(TabularValues):
    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        self.fits = []

    def apply_updates(self, updates):
        updates = list(updates)
        self.fits.append(updates)
        super().apply_updates(updates)


def test_update_estimator_fits_once_per_round():
    env = IcyGrid(6, 6, [], (0, 0), (5, 5))
    model = PenalizedModel(env, ExactDiscrepancySet())
    est = _CountingValues(env.initial_heuristic)
    buf = ReplayBuffer()
    for s in [(0, 0), (1, 1), (2, 2)]:
        buf.push(s)
    update_estimator((0, 0), model, est, buf, LargeConfig(K=2, N=5, B=4), random.Random(0))
    assert len(est.fits) == 5


def test_update_estimator_keeps_the_largest_target():
    # roots 0 and 2 both close state (1,) at K=3; the fitted target is the larger one
    succ = [[1, 2], [3, 3], [1, 1], [3, 3]]
    costs = [[1, 1], [5, 5], [1, 1], [1, 1]]
    env = FiniteGraph(succ, costs, goals={3}, heuristic=[0, 0, 0, 0])
    model = PenalizedModel(env, ExactDiscrepancySet())
    est = _CountingValues(env.initial_heuristic)
    buf = ReplayBuffer()
    buf.push((0,))
    buf.push((2,))
    cfg = LargeConfig(K=1, N=1, B=64)
    update_estimator((0,), model, est, buf, cfg, random.Random(0))
    fit = dict(est.fits[0])
    # root 0 closes only itself; root 2 closes itself; neither touches (1,) at K=1
    assert set(fit) == {(0,), (2,)}
    cfg = LargeConfig(K=3, N=1, B=64)
    est2 = _CountingValues(env.initial_heuristic)
    update_estimator((0,), model, est2, buf, cfg, random.Random(0))
    fit2 = dict(est2.fits[0])

    expected = {}
    for root in [(0,), (2,)]:
        for s, v in lookahead(root, model, TabularValues(env.initial_heuristic), 3).value_updates:
            expected[s] = max(v, expected.get(s, float("-inf")))
    assert fit2 == expected


def test_large_loop_with_tiny_delta_matches_small_loop():
    # N=1, B=1 on a tabular estimator; the one buffer sample is the current state
    env = generate_icy(12, 12, 0.4, 3)
    small = run_small(env, SmallConfig(K=3))
    large = run_large(env, LargeConfig(K=3, N=1, B=1, delta=0.1, xi=1.0, buffer_capacity=1),
                      TabularValues(env.initial_heuristic), seed=0)
    assert [(s, a) for s, a, _ in large.trajectory] == [(s, a) for s, a, _ in small.trajectory]


def test_large_loop_determinism_and_invariants():
    env = generate_icy(12, 12, 0.4, 5)
    cfg = LargeConfig(K=3, N=2, B=8, delta=0.5, xi=1.0)
    runs = [run_large(env, cfg, KernelValueEstimator(env.initial_heuristic, 0.5, 2), seed=4) for _ in range(2)]
    assert runs[0].to_json(timing=False) == runs[1].to_json(timing=False)
    _check_record(runs[0], env)


def test_arm_broken_joint_is_discovered():
    env = generate_arm(0, broken_joint=0, n_joints=3, bins=5)
    cfg = LargeConfig(K=3, N=1, B=4, delta=1.0, xi=1.0, max_steps=200)
    rec = run_large(env, cfg, KernelValueEstimator(env.initial_heuristic, 0.5, 3), seed=0)
    _check_record(rec, env)
    for s, a, _ in rec.discrepancies:
        assert a // 2 == 0
    for s, a, n in rec.trajectory:
        if a // 2 == 0:
            assert n == s


def test_huge_delta_penalizes_but_does_not_forbid():
    # one sphere covers every Right move; the goal is still reached by paying the penalty
    env = IcyGrid(8, 1, [(2, 0)], (0, 0), (7, 0))
    cfg = LargeConfig(K=2, N=1, B=1, delta=100.0, xi=1.0, max_steps=200)
    rec = run_large(env, cfg, TabularValues(env.initial_heuristic), seed=0)
    assert rec.reached_goal
    assert {(s, a) for s, a, _ in rec.discrepancies} <= {((2, 0), 0), ((2, 0), 1)}
