"""Discrete XGBoost hyperparameter grids and their unit-cube embedding.

Optimizers work on points ``u`` in ``[0, 1]^d``.  A grid with ``m`` values
is indexed by ``round(u * (m - 1))`` (halves rounded away from zero), so every
grid value owns a preimage of equal width regardless of how the values
themselves are spaced.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np

from .gbt import HyperParams

PARAM_NAMES = (
    "max_depth",
    "learning_rate",
    "n_estimators",
    "subsample",
    "colsample_bytree",
    "min_child_weight",
)

DEFAULT_GRIDS: Dict[str, Tuple] = {
    "max_depth": (3, 4, 5, 6, 7, 8, 9, 10),
    "learning_rate": (0.001, 0.003, 0.005, 0.007, 0.009, 0.01, 0.03, 0.05,
                      0.07, 0.09, 0.1, 0.3, 0.5, 0.7, 0.9),
    "n_estimators": (100, 200, 300, 400, 500, 600, 700, 800, 900, 1000),
    "subsample": (0.5, 0.7, 0.8, 1.0),
    "colsample_bytree": (0.5, 0.6, 0.7, 0.8, 0.9, 1.0),
    "min_child_weight": (1, 3, 5, 7),
}

_INTEGER_PARAMS = ("max_depth", "n_estimators")


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


@dataclass(frozen=True)
class SearchSpace:
    grids: Mapping[str, Tuple] = field(default_factory=lambda: dict(DEFAULT_GRIDS))

    def __post_init__(self):
        missing = [p for p in PARAM_NAMES if p not in self.grids]
        if missing:
            raise ValueError(f"search space lacks grids for {missing}")
        for name in PARAM_NAMES:
            g = self.grids[name]
            if len(g) == 0:
                raise ValueError(f"grid {name} is empty")
            if any(b <= a for a, b in zip(g, g[1:])):
                raise ValueError(f"grid {name} is not strictly increasing")

    @property
    def dim(self) -> int:
        return len(PARAM_NAMES)

    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(self.grids[p]) for p in PARAM_NAMES)

    def indices(self, u) -> Tuple[int, ...]:
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        return tuple(_round_half_away(float(u[k]) * (m - 1)) for k, m in enumerate(self.sizes()))

    def from_indices(self, idx: Sequence[int]) -> HyperParams:
        values = {}
        for k, name in enumerate(PARAM_NAMES):
            v = self.grids[name][idx[k]]
            values[name] = int(v) if name in _INTEGER_PARAMS else float(v)
        return HyperParams(**values)

    def decode(self, u) -> HyperParams:
        return self.from_indices(self.indices(u))

    def encode(self, hp: HyperParams) -> np.ndarray:
        """Canonical unit point ``index / (m - 1)`` of a grid configuration."""
        d = hp.as_dict()
        u = []
        for name, m in zip(PARAM_NAMES, self.sizes()):
            i = list(self.grids[name]).index(d[name])
            u.append(i / (m - 1) if m > 1 else 0.0)
        return np.array(u)

    def snap(self, u) -> np.ndarray:
        sizes = self.sizes()
        return np.array([i / (m - 1) if m > 1 else 0.0 for i, m in zip(self.indices(u), sizes)])

    def sample_unit(self, rng: np.random.Generator) -> np.ndarray:
        """Canonical unit point of a configuration drawn uniformly per grid."""
        idx = [int(rng.integers(m)) for m in self.sizes()]
        return np.array([i / (m - 1) if m > 1 else 0.0 for i, m in zip(idx, self.sizes())])

    def contains(self, hp: HyperParams) -> bool:
        d = hp.as_dict()
        return all(d[name] in self.grids[name] for name in PARAM_NAMES)

    def to_mapping(self) -> Dict[str, list]:
        return {name: list(self.grids[name]) for name in PARAM_NAMES}

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Sequence]) -> "SearchSpace":
        grids = dict(DEFAULT_GRIDS)
        for name, values in mapping.items():
            if name not in PARAM_NAMES:
                raise ValueError(f"unknown hyperparameter {name!r}")
            grids[name] = tuple(values)
        return cls(grids)


@dataclass(frozen=True)
class UnitCube:
    """Continuous ``[0, 1]^dim`` search domain; decode returns the point itself."""

    dim: int

    def decode(self, u) -> Tuple[float, ...]:
        return tuple(float(x) for x in np.clip(np.asarray(u, dtype=float), 0.0, 1.0))

    def snap(self, u) -> np.ndarray:
        return np.clip(np.asarray(u, dtype=float), 0.0, 1.0)

    def sample_unit(self, rng: np.random.Generator) -> np.ndarray:
        return rng.random(self.dim)


def decode(u, space: SearchSpace) -> HyperParams:
    return space.decode(u)


def sample_uniform(space: SearchSpace, rng_seed) -> HyperParams:
    """Draw each hyperparameter uniformly and independently from its grid."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return space.decode(space.sample_unit(rng))


def default_space() -> SearchSpace:
    return SearchSpace()
