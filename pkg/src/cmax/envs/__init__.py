"""Seedable environments whose true and modeled dynamics disagree."""

import json

from cmax.envs.arm import ArmLattice, generate_arm
from cmax.envs.icy import IcyGrid, generate_icy
from cmax.envs.pickplace import PickPlaceGrid
from cmax.envs.push import PlanarPushWorld, generate_push, push_heuristic

_KINDS = {
    "icy": IcyGrid,
    "pickplace": PickPlaceGrid,
    "arm": ArmLattice,
    "push": PlanarPushWorld,
}


def env_from_dict(d: dict):
    return _KINDS[d["kind"]].from_dict(d)


def save_instance(env, path) -> None:
    with open(path, "w") as f:
        json.dump(env.to_dict(), f, indent=2, sort_keys=True)


def load_instance(path):
    with open(path) as f:
        return env_from_dict(json.load(f))


__all__ = [
    "ArmLattice",
    "IcyGrid",
    "PickPlaceGrid",
    "PlanarPushWorld",
    "env_from_dict",
    "generate_arm",
    "generate_icy",
    "generate_push",
    "load_instance",
    "push_heuristic",
    "save_instance",
]
