"""Closed-curve states and the built-in curve library."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotClosed, OffSphere
from .spectral import PeriodicGrid

SPHERE_TOL = 1e-12
DEFAULT_TAIL_THRESHOLD = 1e-8


@dataclass
class CurveState:
    """Sampled closed curve on the unit sphere at one instant."""

    grid: PeriodicGrid
    points: np.ndarray  # (n, 3)
    time: float = 0.0

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.shape != (self.grid.n, 3):
            raise ValueError(f"points shape {self.points.shape} != ({self.grid.n}, 3)")

    def sphere_defect(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.points, axis=1) - 1.0)))

    def tail(self) -> float:
        return self.grid.tail_fraction(self.points)

    def validate(self, tail_threshold: float = DEFAULT_TAIL_THRESHOLD,
                 sphere_tol: float = SPHERE_TOL) -> "CurveState":
        if self.sphere_defect() > sphere_tol:
            raise OffSphere(f"max | |gamma| - 1 | = {self.sphere_defect():.3e}")
        if self.tail() > tail_threshold:
            raise NotClosed(f"spectral tail {self.tail():.3e} > {tail_threshold:.1e}")
        return self


def _fixed_point(x):
    out = np.zeros((len(x), 3))
    out[:, 0] = 1.0
    return out


def _great_circle(x):
    return np.stack([np.zeros_like(x), np.cos(x), np.sin(x)], axis=1)


def _viviani(x):
    return np.stack([np.sin(x) * np.cos(x), np.sin(x), np.cos(x) ** 2], axis=1)


def _spherical_sinusoid(x):
    w = 1.0 / np.sqrt(1.0 + np.cos(2 * x) ** 2)
    return np.stack([w * np.cos(x), w * np.sin(x), w * np.cos(2 * x)], axis=1)


#: Closed curves on S^2, parametrized on [0, 2*pi).
CURVE_LIBRARY = {
    "fixed_point": _fixed_point,
    "great_circle": _great_circle,
    "viviani": _viviani,
    "spherical_sinusoid": _spherical_sinusoid,
}


def _smoke_ring_seed(x):
    return np.stack([np.cos(x), np.sin(x), np.cos(x)], axis=1)


def _circle_filament(x):
    # unit-speed filament whose tangent is the great circle (0, cos x, sin x)
    return np.stack([np.zeros_like(x), np.sin(x), -np.cos(x)], axis=1)


def _planar_circle(x):
    return np.stack([np.cos(x), np.sin(x), np.zeros_like(x)], axis=1)


#: Space-curve seeds in R^3 for the filament solver (not on S^2).
FILAMENT_SEEDS = {
    "smoke_ring": _smoke_ring_seed,
    "circle_filament": _circle_filament,
    "planar_circle": _planar_circle,
}


def make_curve(name: str, grid: PeriodicGrid, time: float = 0.0) -> CurveState:
    """Instantiate a library curve on the given grid (validated)."""
    try:
        fn = CURVE_LIBRARY[name]
    except KeyError:
        raise KeyError(f"unknown curve {name!r}; have {sorted(CURVE_LIBRARY)}") from None
    return CurveState(grid, fn(grid.x), time).validate()


def make_filament_seed(name: str, grid: PeriodicGrid) -> np.ndarray:
    try:
        fn = FILAMENT_SEEDS[name]
    except KeyError:
        raise KeyError(f"unknown seed {name!r}; have {sorted(FILAMENT_SEEDS)}") from None
    return fn(grid.x)
