"""Real-time planning that penalizes transitions its model gets wrong."""

from cmax.core import ContractViolation, Environment, PenalizedModel, model_successor, penalized_cost
from cmax.discrepancy import ExactDiscrepancySet, HypersphereStore, detect_discrepancy
from cmax.loop import LargeConfig, SmallConfig, TrialRecord, run_large, run_small, update_estimator
from cmax.search import DeadEnd, LookaheadResult, lookahead
from cmax.value import KernelValueEstimator, TabularValues

__version__ = "0.1.0"

__all__ = [
    "ContractViolation",
    "DeadEnd",
    "Environment",
    "ExactDiscrepancySet",
    "HypersphereStore",
    "KernelValueEstimator",
    "LargeConfig",
    "LookaheadResult",
    "PenalizedModel",
    "SmallConfig",
    "TabularValues",
    "TrialRecord",
    "detect_discrepancy",
    "lookahead",
    "model_successor",
    "penalized_cost",
    "run_large",
    "run_small",
    "update_estimator",
]
