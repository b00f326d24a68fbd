import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmax.discrepancy import (
    ExactDiscrepancySet,
    HypersphereStore,
    detect_discrepancy,
    lattice_threshold,
)
from cmax.envs import generate_icy, generate_push


def test_exact_record_is_idempotent():
    store = ExactDiscrepancySet()
    store.record((1, 2), 0)
    store.record((1, 2), 0)
    assert len(store) == 1
    assert store.is_flagged((1, 2), 0)
    assert not store.is_flagged((1, 2), 1)


def test_exact_json_round_trip():
    store = ExactDiscrepancySet()
    for s, a in [((0, 0), 1), ((3, 4), 2)]:
        store.record(s, a)
    back = ExactDiscrepancySet.from_dict(json.loads(json.dumps(store.to_dict())))
    assert back.is_flagged((3, 4), 2) and back.is_flagged((0, 0), 1) and len(back) == 2


def test_sphere_covers_own_center_for_same_action_only():
    store = HypersphereStore(4, 2, delta=0.1, xi=0.01)
    store.record((0.5, 0.5), 2)
    assert store.is_covered((0.5, 0.5), 2)
    assert not store.is_covered((0.5, 0.5), 1)


def test_sphere_dedup_within_tenth_of_delta():
    store = HypersphereStore(1, 2, delta=0.1, xi=0.01)
    assert store.record((0.5, 0.5), 0)
    assert not store.record((0.505, 0.5), 0)
    assert store.count(0) == 1
    assert store.record((0.52, 0.5), 0)
    assert store.count(0) == 2


def test_sphere_boundary_is_inclusive():
    store = HypersphereStore(1, 2, delta=0.25, xi=0.01)
    store.record((0.0, 0.0), 0)
    assert store.is_covered((0.25, 0.0), 0)
    assert not store.is_covered((0.25 + 1e-9, 0.0), 0)


def test_index_matches_linear_scan_unit_square():
    rng = np.random.default_rng(0)
    centers = rng.random((1000, 2))
    store = HypersphereStore(1, 2, delta=0.02, xi=0.01)
    for c in centers:
        store.record(tuple(c), 0)
    kept = store.centers(0)
    for q in rng.random((1000, 2)):
        linear = float(np.min(np.linalg.norm(kept - q, axis=1))) <= 0.02
        assert store.is_covered(tuple(q), 0) == linear


@settings(max_examples=30, deadline=None)
@given(dim=st.integers(2, 7), n=st.integers(1, 300), seed=st.integers(0, 2**32 - 1),
       delta=st.floats(0.05, 0.6))
def test_index_matches_linear_scan_any_dimension(dim, n, seed, delta):
    rng = np.random.default_rng(seed)
    store = HypersphereStore(3, dim, delta=delta, xi=0.01)
    acts = rng.integers(0, 3, size=n)
    for c, a in zip(rng.random((n, dim)), acts):
        store.record(tuple(c), int(a))
    for q, a in zip(rng.random((100, dim)), rng.integers(0, 3, size=100)):
        C = store.centers(int(a))
        linear = bool(len(C)) and float(np.min(np.linalg.norm(C - q, axis=1))) <= delta
        assert store.is_covered(tuple(q), int(a)) == linear


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_cover_is_monotone(seed):
    rng = random.Random(seed)
    store = HypersphereStore(2, 3, delta=0.2, xi=0.01)
    queries = [(tuple(rng.random() for _ in range(3)), rng.randrange(2)) for _ in range(100)]
    covered = set()
    for _ in range(40):
        store.record(tuple(rng.random() for _ in range(3)), rng.randrange(2))
        now = {i for i, (q, a) in enumerate(queries) if store.is_covered(q, a)}
        assert covered <= now
        covered = now


def test_sphere_count_bounded_by_records():
    rng = random.Random(1)
    store = HypersphereStore(2, 2, delta=0.05, xi=0.01)
    for t in range(1, 200):
        store.record((rng.random(), rng.random()), rng.randrange(2))
        assert len(store) <= t


def test_tiny_delta_matches_exact_set_on_grid():
    env = generate_icy(10, 10, 0.5, 3)
    exact = ExactDiscrepancySet()
    spheres = HypersphereStore(4, 2, delta=0.5, xi=0.0)
    rng = random.Random(0)
    cells = list(env.states())
    for _ in range(30):
        s, a = rng.choice(cells), rng.randrange(4)
        exact.record(s, a)
        spheres.record(s, a)
    for s in cells:
        for a in range(4):
            assert spheres.is_covered(s, a) == exact.is_flagged(s, a)


def test_sphere_store_json_round_trip():
    store = HypersphereStore(2, 3, delta=0.1, xi=0.01)
    store.record((0.1, 0.2, 0.3), 1)
    store.record((0.9, 0.2, 0.3), 0)
    back = HypersphereStore.from_dict(json.loads(store.to_json()))
    assert back.delta == 0.1 and back.xi == 0.01
    assert back.is_covered((0.1, 0.2, 0.35), 1)
    assert not back.is_covered((0.1, 0.2, 0.35), 0)


def test_detect_identical_is_not_a_discrepancy():
    env = generate_push(0, obstacles=False)
    s = env.start
    assert not detect_discrepancy(s, s, env.metric, 0.01)


def test_detect_push_error_above_xi():
    assert detect_discrepancy((0.5, 0.5, 0.5, 0.515), (0.5, 0.5, 0.5, 0.5),
                              generate_push(0).metric, 0.01)


def test_detect_is_strict_at_xi():
    metric = lambda p, q: abs(p[0] - q[0])
    assert not detect_discrepancy((1.0,), (0.0,), metric, 1.0)


@pytest.mark.parametrize("xi,lattice,expected", [(1.0, True, 0.5), (1.0, False, 1.0), (0.2, True, 0.0)])
def test_lattice_threshold(xi, lattice, expected):
    assert lattice_threshold(xi, lattice) == expected
