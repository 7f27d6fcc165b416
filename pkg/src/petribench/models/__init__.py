"""Parameterized benchmark model families."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..net import PetriNet
from . import generators as _g
from .lbs import simple_lbs
from .params import ModelFamily, ModelParams


@dataclass(frozen=True)
class FamilyInfo:
    family: ModelFamily
    description: str
    official_parameters: tuple[ModelParams, ...]
    minimum: int
    pair: bool
    build: Callable[..., PetriNet]


def _ints(*values):
    return tuple(ModelParams(n=v) for v in values)


def _pairs(*values):
    return tuple(ModelParams(r=r, w=w) for r, w in values)


_FAMILIES: dict[ModelFamily, FamilyInfo] = {
    info.family: info
    for info in (
        FamilyInfo(ModelFamily.Philosophers, "dining philosophers sharing forks in a ring",
                   _ints(5, 10, 20, 50, 100, 500, 1000, 5000, 10000, 50000, 100000),
                   1, False, _g.philosophers),
        FamilyInfo(ModelFamily.FMS, "flexible manufacturing system",
                   _ints(2, 5, 10, 20, 50, 100, 200, 500), 2, False, _g.fms),
        FamilyInfo(ModelFamily.Kanban, "four-cell Kanban production line",
                   _ints(5, 10, 20, 50, 100, 200, 500, 1000), 1, False, _g.kanban),
        FamilyInfo(ModelFamily.SharedMemory, "processors competing for a shared memory bus",
                   _ints(5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000, 20000, 50000),
                   1, False, _g.shared_memory),
        FamilyInfo(ModelFamily.TokenRing, "self-stabilizing token ring",
                   _ints(5, 10, 15, 20, 30, 40, 50, 100, 200, 300, 400, 500),
                   1, False, _g.token_ring),
        FamilyInfo(ModelFamily.Peterson, "generalized Peterson mutual exclusion",
                   _ints(2, 3, 4, 5, 6), 2, False, _g.peterson),
        FamilyInfo(ModelFamily.Lamport, "Lamport fast mutual exclusion",
                   _ints(2, 3, 4, 5, 6, 7, 8), 2, False, _g.lamport),
        FamilyInfo(ModelFamily.Eratosthenes, "sieve of Eratosthenes",
                   _ints(5, 10, 20, 50, 100, 200, 500), 1, False, _g.eratosthenes),
        FamilyInfo(ModelFamily.RwMutex, "readers and writers guarded by per-reader semaphores",
                   _pairs((10, 10), (10, 20), (10, 50), (10, 100), (10, 500), (10, 1000),
                          (10, 2000), (20, 10), (100, 10), (500, 10), (1000, 10), (2000, 10)),
                   1, True, _g.rw_mutex),
        FamilyInfo(ModelFamily.SimpleLbs, "clients balanced over two servers",
                   _ints(2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20), 2, False, simple_lbs),
    )
}


def family_info(family: ModelFamily | str) -> FamilyInfo:
    if not isinstance(family, ModelFamily):
        family = ModelFamily.parse(family)
    return _FAMILIES[family]


def list_instances(family: ModelFamily | str) -> list[ModelParams]:
    """The official scaling values of ``family``, in published order."""
    return list(family_info(family).official_parameters)


def generate(family: ModelFamily | str, params) -> PetriNet:
    """Instantiate ``family`` at ``params`` (an int, ``(r, w)``, ``"r10w20"`` or ModelParams)."""
    info = family_info(family)
    p = ModelParams.parse(params)
    if p.is_pair != info.pair:
        shape = "a reader/writer pair like r10w10" if info.pair else "a single integer"
        raise ValueError(f"{info.family.value} expects {shape}, got {p}")
    for v in p.components():
        if v < info.minimum:
            raise ValueError(
                f"{info.family.value} parameter {p} is below the family minimum {info.minimum}"
            )
    return info.build(*p.components())


__all__ = [
    "FamilyInfo", "ModelFamily", "ModelParams", "family_info", "generate", "list_instances",
]
