"""Measurement scenarios and the built-in registry.

A scenario is the physics of one run: system, pointer, mass and a default
coupling. Registry entries are stored as config trees (see
:mod:`weakpointer.config`) so that built-ins and files go through the same
loader.
"""

import copy
from dataclasses import dataclass, field
from typing import Tuple

from .hilbert import SystemSpec
from .perturb import ObservablePoly
from .pointer import PointerState

_R = 0.7071067811865476  # 1/sqrt(2)

_SIGMA_Z = [[1, 0], [0, 0], [0, 0], [-1, 0]]
_PLUS = [[_R, 0], [_R, 0]]


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    system: SystemSpec
    pointer: PointerState
    mass: float = 1.0
    gamma: float = 0.1
    observables: Tuple[ObservablePoly, ...] = field(default_factory=tuple)

    @property
    def hbar(self):
        return self.pointer.hbar


def _qubit(post, pointer, gamma=0.1, gammas=(0.2, 0.1, 0.05, 0.025)):
    return {
        "system": {"dim": 2, "observable": _SIGMA_Z, "pre_state": _PLUS, "post_state": post},
        "pointer": dict(pointer, grid={"n": 4096, "extent": 40.0, "center": 0.0}),
        "constants": {"hbar": 1.0, "mass": 1.0, "gamma": gamma},
        "run": {
            "observables": [{"basis": "q", "coefficients": [0.0, 0.0, 1.0]}],
            "gammas": list(gammas),
            "epsilon": 0.1,
        },
    }


# post-selections giving A_w = +i and A_w = -i for sigma_z with |+> pre-selection
_POST_PLUS_I = [[_R, 0], [0, _R]]
_POST_MINUS_I = [[_R, 0], [0, -_R]]

REGISTRY = {
    "S-A": _qubit(_POST_PLUS_I, {"family": "chirped", "sigma": 1.0, "c": 0.25}),
    "S-B": _qubit(_POST_MINUS_I, {"family": "cubic", "sigma": 1.0, "b": 0.05}),
    "S-C": _qubit(_POST_MINUS_I, {"family": "momentum_skewed", "s": 1.0, "lam": 0.5}),
    "REAL": {
        "system": {
            "dim": 2,
            "observable": _SIGMA_Z,
            "pre_state": [[1, 0], [0, 0]],
            "post_state": [[1, 0], [0, 0]],
        },
        "pointer": {"family": "gaussian", "sigma": 1.0, "q0": 0.0, "p0": 0.0,
                    "grid": {"n": 4096, "extent": 40.0, "center": 0.0}},
        "constants": {"hbar": 1.0, "mass": 1.0, "gamma": 0.1},
        "run": {"observables": [], "gammas": [0.2, 0.1, 0.05, 0.025], "epsilon": 0.1},
    },
    "D1": {
        "system": {"dim": 1, "observable": [[1.5, 0]], "pre_state": [[1, 0]], "post_state": [[1, 0]]},
        "pointer": {"family": "chirped", "sigma": 1.0, "c": 0.25,
                    "grid": {"n": 4096, "extent": 40.0, "center": 0.0}},
        "constants": {"hbar": 1.0, "mass": 1.0, "gamma": 0.3},
        "run": {"observables": [], "gammas": [0.4, 0.2, 0.1], "epsilon": 0.1},
    },
}


def registry_config(name):
    """Deep copy of the config tree of a built-in scenario."""
    from .errors import ConfigError

    try:
        return copy.deepcopy(REGISTRY[name])
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}; known: {', '.join(sorted(REGISTRY))}",
                          key="--scenario") from None


def get_scenario(name):
    from .config import scenario_from_config

    return scenario_from_config(registry_config(name), name=name)
