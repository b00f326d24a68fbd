"""Property suites and reproduction tables with pass/fail verdicts.

Each function returns a :class:`SuiteResult` holding one verdict line per
checked claim, so the CLI and the test suite report the same thing.
"""

from __future__ import annotations

import functools
import math
import random
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from cmax.baselines import run_rtaa_patch
from cmax.core import PenalizedModel
from cmax.discrepancy import ExactDiscrepancySet, HypersphereStore
from cmax.envs import PickPlaceGrid, generate_icy
from cmax.envs.graph import FiniteGraph, random_graph
from cmax.harness.config import AlgorithmSpec, EnvironmentSpec, ExperimentConfig
from cmax.harness.experiments import batch_to_json, run_batch
from cmax.harness.stats import SummaryRow, summarize
from cmax.loop import LargeConfig, SmallConfig, run_large, run_small
from cmax.oracles import (
    dijkstra_oracle,
    greedy_cover,
    incorrect_pairs,
    inflate_pairs,
)
from cmax.search import lookahead
from cmax.value import TabularValues


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)
    rows: list[SummaryRow] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> Check:
        c = Check(name, bool(passed), detail)
        self.checks.append(c)
        return c

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    return wrapper


# -- completeness bounds ---------------------------------------------------


@_timed
def exact_bound_suite(n: int = 200, size: int = 8, ice_fraction: float = 0.2) -> SuiteResult:
    """Exact loop on grids where every true-reachable state keeps an incorrect-free model path."""
    res = SuiteResult("exact-loop bounds")
    S = size * size
    worst_k1 = worst_kS = 0.0
    fail_k1 = fail_kS = 0
    for seed in range(n):
        env = generate_icy(size, size, ice_fraction, seed, mode="assumption1")
        n_incorrect = len(incorrect_pairs(env))
        r1 = run_small(env, SmallConfig(K=1, max_steps=S * S + 1))
        rS = run_small(env, SmallConfig(K=S, max_steps=S * (n_incorrect + 1) + 1))
        if not (r1.reached_goal and r1.steps <= S * S):
            fail_k1 += 1
        if not (rS.reached_goal and rS.steps <= S * (n_incorrect + 1)):
            fail_kS += 1
        worst_k1 = max(worst_k1, r1.steps / (S * S))
        worst_kS = max(worst_kS, rS.steps / (S * (n_incorrect + 1)))
    res.add(f"K=1 reaches goal within |S|^2={S * S}", fail_k1 == 0,
            f"{n - fail_k1}/{n} instances, worst steps/bound {worst_k1:.4f}")
    res.add(f"K={S} reaches goal within |S|(|I|+1)", fail_kS == 0,
            f"{n - fail_kS}/{n} instances, worst steps/bound {worst_kS:.4f}")
    return res


def _assumption2_forbidden(delta: float, threshold: float):
    def forbidden(env):
        pairs = incorrect_pairs(env, threshold)
        return inflate_pairs(pairs, list(env.states()), delta, env.metric)

    return forbidden


@_timed
def sphere_bound_suite(n: int = 100, size: int = 20, ice_fraction: float = 0.03, delta: float = 2.0,
                   xi: float = 1.0) -> SuiteResult:
    """Hypersphere loop with tabular values and K=|S| against |S|(G(delta)+1)."""
    res = SuiteResult("hypersphere-loop bound")
    S = size * size
    threshold = max(0.0, xi - 0.5)
    fails = 0
    worst = 0.0
    for seed in range(n):
        env = generate_icy(size, size, ice_fraction, seed, mode="assumption1",
                           forbidden=_assumption2_forbidden(delta, threshold))
        cover = greedy_cover(sorted(incorrect_pairs(env, threshold)), delta, env.metric)
        bound = S * (cover + 1)
        cfg = LargeConfig(K=S, N=1, B=1, delta=delta, xi=xi, max_steps=bound + 1)
        rec = run_large(env, cfg, TabularValues(env.initial_heuristic), seed=seed)
        if not (rec.reached_goal and rec.steps <= bound):
            fails += 1
        worst = max(worst, rec.steps / bound)
    res.add(f"K={S}, delta={delta:g} reaches goal within |S|(G+1)", fails == 0,
            f"{n - fails}/{n} instances, worst steps/bound {worst:.4f}")
    return res


# -- search against Dijkstra ---------------------------------------------------


def _reachable_goal_graph(seed: int) -> FiniteGraph:
    rng = random.Random(seed)
    while True:
        g = random_graph(rng.randrange(2**31))
        store = ExactDiscrepancySet()
        for s in g.states():
            for a in range(g.n_actions):
                if not g.is_goal(s) and rng.random() < 0.15:
                    store.record(s, a)
        model = PenalizedModel(g, store)
        vstar = dijkstra_oracle(g.states(), g.n_actions, model.successor, model.cost, g.is_goal)
        if math.isfinite(vstar[g.start]):
            # scaled optimal values are admissible and consistent
            scale = rng.choice((0.0, 0.5, 1.0))
            g.heuristic = [scale * vstar[s] if math.isfinite(vstar[s]) else 0.0 for s in g.states()]
            return g, model, vstar


@_timed
def oracle_suite(n: int = 500) -> SuiteResult:
    """Full-budget lookahead against Dijkstra on random penalized graphs."""
    res = SuiteResult("search oracle agreement")
    off_path = value_mismatch = bound_violations = 0
    for seed in range(n):
        g, model, vstar = _reachable_goal_graph(seed)
        root = g.start
        out = lookahead(root, model, TabularValues(g.initial_heuristic), len(g.succ))
        a = out.best_action
        if model.cost(root, a) + vstar[model.successor(root, a)] != vstar[root]:
            off_path += 1
        V = TabularValues(g.initial_heuristic)
        V.apply_updates(out.value_updates)
        for s, _ in out.value_updates:
            if V.predict(s) != vstar[s]:
                value_mismatch += 1
                break
        if any(v > vstar[s] for s, v in out.value_updates):
            bound_violations += 1
    res.add("first action lies on an optimal penalized path", off_path == 0,
            f"{n - off_path}/{n} graphs")
    res.add("updated V equals V* on every closed state", value_mismatch == 0,
            f"{n - value_mismatch}/{n} graphs")
    res.add("updated V never exceeds V* (admissibility kept)", bound_violations == 0,
            f"{n - bound_violations}/{n} graphs")
    return res


# -- reproduction tables ---------------------------------------------------------


def _mean_steps(records) -> float:
    ok = [r.steps for r in records if r.reached_goal]
    return statistics.fmean(ok) if ok else math.inf


@_timed
def icy_table(n: int = 50, size: int = 100, levels=(0.0, 0.4, 0.8), max_steps: int = 500_000,
              jobs: int = 1) -> SuiteResult:
    """Exact loop, patched-model RTAA* and Q-learning across ice fractions."""
    res = SuiteResult("icy gridworld table")
    steps: dict[tuple[str, float], list] = {}
    for frac in levels:
        env = EnvironmentSpec("icy", {"width": size, "height": size, "ice_fraction": frac}, 0, n)
        for alg in ("cmax", "rtaa", "qlearning"):
            cfg = ExperimentConfig(f"icy-{alg}", f"ice={frac:g}", env, AlgorithmSpec(alg, K=1),
                                   max_steps=max_steps)
            recs = run_batch(cfg, jobs)
            steps[alg, frac] = recs
            res.rows.append(summarize(recs, alg, cfg.condition))
    if 0.0 in levels:
        same = [a.steps == b.steps for a, b in zip(steps["cmax", 0.0], steps["rtaa", 0.0])]
        res.add("ice 0%: CMAX and RTAA* steps identical per seed", all(same),
                f"{sum(same)}/{len(same)} seeds equal")
        c0, q0 = _mean_steps(steps["cmax", 0.0]), _mean_steps(steps["qlearning", 0.0])
        res.add("ice 0%: Q-learning mean >= 5x CMAX mean", q0 >= 5 * c0,
                f"Q {q0:.1f} vs CMAX {c0:.1f} (ratio {q0 / c0:.1f})")
    if 0.4 in levels:
        c, r = _mean_steps(steps["cmax", 0.4]), _mean_steps(steps["rtaa", 0.4])
        res.add("ice 40%: CMAX mean within 25% of RTAA* mean", abs(c - r) <= 0.25 * r,
                f"CMAX {c:.1f} vs RTAA* {r:.1f}")
    if 0.8 in levels:
        c, q = _mean_steps(steps["cmax", 0.8]), _mean_steps(steps["qlearning", 0.8])
        res.add("ice 80%: Q-learning mean < CMAX mean", q < c, f"Q {q:.1f} vs CMAX {c:.1f}")
    return res


def push_config(algorithm: str, obstacles: bool, n: int = 20, gamma: float = 0.005) -> ExperimentConfig:
    alg = AlgorithmSpec(algorithm, loop="hypersphere", estimator="kernel", K=5, N=5, B=64,
                        delta=0.02, xi=0.01, gamma=gamma, knn_radius=0.02)
    cond = "accurate" if not obstacles else "inaccurate"
    return ExperimentConfig(f"push-{algorithm}", cond, EnvironmentSpec("push", {"obstacles": obstacles}, 0, n),
                            alg, max_steps=1000)


@_timed
def push_table(n: int = 20, jobs: int = 1) -> SuiteResult:
    """Pushing surrogate: CMAX with and without obstacles, KNN residual model with them."""
    res = SuiteResult("pushing table")
    out = {}
    for alg, obst in (("cmax", False), ("cmax", True), ("knn", True)):
        cfg = push_config(alg, obst, n)
        recs = run_batch(cfg, jobs)
        out[alg, obst] = recs
        res.rows.append(summarize(recs, alg, cfg.condition))
        if any(r.steps > cfg.max_steps for r in recs):
            res.add(f"{alg} {cfg.condition}: cutoff respected", False)
    acc = summarize(out["cmax", False]).success_rate
    inacc = summarize(out["cmax", True]).success_rate
    res.add("accurate model: CMAX success >= 90%", acc >= 0.9, f"{acc:.0%}")
    res.add("inaccurate model: CMAX success >= 75%", inacc >= 0.75, f"{inacc:.0%}")
    c, k = _mean_steps(out["cmax", True]), _mean_steps(out["knn", True])
    res.add("inaccurate model: CMAX mean steps < KNN mean steps", c < k, f"CMAX {c:.1f} vs KNN {k:.1f}")
    return res


@_timed
def pickplace_suite(K: int = 3) -> SuiteResult:
    """Light and heavy object on the 3D lattice."""
    res = SuiteResult("pick-and-place")
    light, heavy = PickPlaceGrid(heavy=False), PickPlaceGrid(heavy=True)
    optimal = dijkstra_oracle(light.states(), light.n_actions, light.true_step, light.cost,
                              light.is_goal)[light.start]
    rl = run_small(light, SmallConfig(K=K, max_steps=10_000))
    rh = run_small(heavy, SmallConfig(K=K, max_steps=10_000))
    res.rows = [summarize([rl], "cmax", "light"), summarize([rh], "cmax", "heavy")]
    res.add("light run is optimal on the true dynamics", rl.reached_goal and rl.steps == optimal,
            f"{rl.steps} steps, optimum {optimal:g}")
    res.add("heavy run reaches the goal", rh.reached_goal, f"{rh.steps} steps")
    res.add("heavy run takes more steps than light", rh.steps > rl.steps, f"{rh.steps} > {rl.steps}")
    bad = [(s, a) for s, a, _ in rh.discrepancies if not (a == 4 and s[2] == heavy.z_limit)]
    res.add("every heavy discrepancy is +z at the height limit", rh.discrepancies and not bad,
            f"{len(rh.discrepancies)} discrepancies, {len(bad)} elsewhere")
    return res


def arm_config(algorithm: str, n: int = 10, max_steps: int = 300, gamma: float = 10.0,
               delta: float = 1.0, K: int = 5, N: int = 5, B: int = 64) -> ExperimentConfig:
    if algorithm == "cmax":
        alg = AlgorithmSpec("cmax", loop="hypersphere", estimator="kernel", K=K, N=N, B=B,
                            delta=delta, xi=1.0, gamma=gamma)
    else:
        alg = AlgorithmSpec("rtaa", K=K)
    return ExperimentConfig(f"arm-{algorithm}", "broken joint", EnvironmentSpec("arm", {"goal_radius": 1.0, "min_distance": 3.0}, 0, n), alg,
                            max_steps=max_steps)


@_timed
def arm_suite(n: int = 10, jobs: int = 1) -> SuiteResult:
    """7-joint arm with one joint that never moves."""
    res = SuiteResult("7D arm")
    rates = {}
    for alg in ("cmax", "rtaa"):
        recs = run_batch(arm_config(alg, n), jobs)
        row = summarize(recs, alg, "broken joint")
        res.rows.append(row)
        rates[alg] = row.success_rate
    res.add("CMAX success = 100%", rates["cmax"] == 1.0, f"{rates['cmax']:.0%}")
    res.add("RTAA* with model patching success <= 60%", rates["rtaa"] <= 0.6, f"{rates['rtaa']:.0%}")
    return res


# -- invariant battery -------------------------------------------------------------


@_timed
def invariant_suite(seed: int = 0) -> SuiteResult:
    """Quick standalone checks of the core invariants."""
    res = SuiteResult("invariant battery")
    rng = random.Random(seed)

    # the model's dynamics are untouched by a trial
    env = generate_icy(12, 12, 0.3, seed)
    probe = [(s, a) for s in env.states() for a in range(env.n_actions)]
    before = [env.model_step(s, a) for s, a in probe]
    code = env.model_step.__func__.__code__.co_code
    run_small(env, SmallConfig(K=4, max_steps=5000))
    after = [env.model_step(s, a) for s, a in probe]
    res.add("model immutability", before == after and code == env.model_step.__func__.__code__.co_code,
            f"{len(probe)} pairs compared")

    # coverage never shrinks as spheres are added
    store = HypersphereStore(3, 2, 0.1, 0.01)
    queries = [((rng.random(), rng.random()), rng.randrange(3)) for _ in range(300)]
    covered: set[int] = set()
    monotone = True
    for _ in range(60):
        store.record((rng.random(), rng.random()), rng.randrange(3))
        now = {i for i, (q, a) in enumerate(queries) if store.is_covered(q, a)}
        monotone &= covered <= now
        covered = now
    res.add("monotone cover", monotone, f"{len(covered)}/{len(queries)} queries covered at end")

    # lookahead updates never lower V and keep it consistent on small grids
    env = generate_icy(10, 10, 0.3, seed + 1)
    dset = ExactDiscrepancySet()
    model = PenalizedModel(env, dset)
    V = TabularValues(env.initial_heuristic)
    s, lowered, inconsistent = env.start, 0, 0
    for _ in range(300):
        if env.is_goal(s):
            break
        out = lookahead(s, model, V, 8)
        lowered += sum(v < V.predict(x) - 1e-12 for x, v in out.value_updates)
        V.apply_updates(out.value_updates)
        for x, _ in out.value_updates:
            best = min(model.cost(x, a) + V.predict(model.successor(x, a)) for a in range(env.n_actions))
            inconsistent += V.predict(x) > best + 1e-9
        nxt = env.true_step(s, out.best_action)
        if nxt != env.model_step(s, out.best_action):
            dset.record(s, out.best_action)
        s = nxt
    res.add("value monotonicity", lowered == 0, f"{lowered} decreases")
    res.add("consistency preservation", inconsistent == 0, f"{inconsistent} violations")

    # spatial index agrees with a linear scan
    mismatches = 0
    for dim in range(2, 8):
        store = HypersphereStore(2, dim, 0.3, 0.01)
        pts = np.asarray([[rng.random() for _ in range(dim)] for _ in range(200)])
        acts = [rng.randrange(2) for _ in range(200)]
        for p, a in zip(pts, acts):
            store.record(tuple(p), a)
        for _ in range(200):
            q = np.asarray([rng.random() for _ in range(dim)])
            a = rng.randrange(2)
            C = store.centers(a)
            lin = bool(len(C)) and float(np.min(np.linalg.norm(C - q, axis=1))) <= 0.3
            mismatches += lin != store.is_covered(tuple(q), a)
    res.add("spatial index equals linear scan (dims 2-7)", mismatches == 0, f"{mismatches} mismatches")

    # parallel execution does not perturb per-trial results
    cfg = ExperimentConfig("det", "", EnvironmentSpec("icy", {"width": 30, "height": 30, "ice_fraction": 0.5}, 0, 6),
                           AlgorithmSpec("qlearning", alpha=0.5, epsilon=0.1), max_steps=20_000)
    one = batch_to_json(cfg, run_batch(cfg, jobs=1))
    eight = batch_to_json(cfg, run_batch(cfg, jobs=8))
    res.add("per-seed determinism across --jobs 1 and --jobs 8", one == eight,
            f"{len(one)} bytes of JSON compared")
    return res


SUITES = {
    "exact-bound": exact_bound_suite,
    "sphere-bound": sphere_bound_suite,
    "oracle": oracle_suite,
    "invariants": invariant_suite,
    "pickplace": pickplace_suite,
    "arm": arm_suite,
}
TABLES = {"icy": icy_table, "push": push_table}
