"""Shared domain types: environments, planning models and the penalized cost."""

from __future__ import annotations

import abc
import math
from typing import Hashable, Iterator, Protocol, Sequence, Tuple

State = Tuple[float, ...]
ActionId = int


class ContractViolation(ValueError):
    """Raised when a state or action falls outside an environment's declared bounds."""


class DiscrepancyFlags(Protocol):
    def is_flagged(self, s: State, a: ActionId) -> bool: ...


def euclidean(p: Sequence[float], q: Sequence[float]) -> float:
    return math.sqrt(sum((x - y) * (x - y) for x, y in zip(p, q)))


class Environment(abc.ABC):
    """A deterministic shortest-path task with a true and a modeled dynamics.

    Subclasses must keep goals absorbing and cost-free in both dynamics.
    """

    n_actions: int
    start: State
    # integer-coordinate state spaces switch on the half-bin discrepancy threshold
    integer_lattice: bool = True

    @abc.abstractmethod
    def true_step(self, s: State, a: ActionId) -> State: ...

    @abc.abstractmethod
    def model_step(self, s: State, a: ActionId) -> State: ...

    @abc.abstractmethod
    def is_goal(self, s: State) -> bool: ...

    @abc.abstractmethod
    def in_bounds(self, s: State) -> bool: ...

    @property
    @abc.abstractmethod
    def state_space_size(self) -> float: ...

    @abc.abstractmethod
    def initial_heuristic(self, s: State) -> float: ...

    def cost(self, s: State, a: ActionId) -> float:
        return 0.0 if self.is_goal(s) else 1.0

    def metric(self, p: State, q: State) -> float:
        return euclidean(p, q)

    def key(self, s: State) -> Hashable:
        """Hashable identity used for duplicate detection in search."""
        return s

    def states(self) -> Iterator[State]:
        """Enumerate every state; only finite environments implement this."""
        raise NotImplementedError(f"{type(self).__name__} is not enumerable")


def penalized_cost(
    s: State, a: ActionId, store: DiscrepancyFlags, base: float, penalty: float
) -> float:
    if store.is_flagged(s, a):
        return penalty
    return base


def model_successor(s: State, a: ActionId, env: Environment) -> State:
    if not env.in_bounds(s):
        raise ContractViolation(f"state {s!r} is outside the environment bounds")
    if not 0 <= a < env.n_actions:
        raise ContractViolation(f"action {a} is not in [0, {env.n_actions})")
    return env.model_step(s, a)


class PenalizedModel:
    """The environment's model with costs inflated on flagged pairs.

    Dynamics are always delegated untouched to ``env.model_step``; only the
    cost of pairs flagged by ``store`` changes, to ``penalty``.
    """

    def __init__(self, env: Environment, store: DiscrepancyFlags, penalty: float | None = None):
        self.env = env
        self.store = store
        self.penalty = float(env.state_space_size if penalty is None else penalty)
        self.n_actions = env.n_actions
        self._succ: dict = {}

    def successor(self, s: State, a: ActionId) -> State:
        # the model never changes, so successors are memoized
        k = (s, a)
        hit = self._succ.get(k)
        if hit is None:
            hit = self._succ[k] = self.env.model_step(s, a)
        return hit

    def cost(self, s: State, a: ActionId) -> float:
        return penalized_cost(s, a, self.store, self.env.cost(s, a), self.penalty)

    def is_goal(self, s: State) -> bool:
        return self.env.is_goal(s)

    def key(self, s: State) -> Hashable:
        return self.env.key(s)
