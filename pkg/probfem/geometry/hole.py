# probfem/geometry/hole.py
"""Rounded-square hole: parametrization, signed distance and admissibility."""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# minimum gap between the hole and the outer boundary of the beam
ADMISSIBILITY_CLEARANCE = 0.02


@dataclass(frozen=True)
class HoleParams:
    """Rounded square with center (x, y), side d, rotation alpha and relative corner radius r.

    r = 0 is a square, r = 0.5 a circle of diameter d.
    """
    x: float
    y: float
    d: float
    alpha: float
    r: float

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"d must be positive, got {self.d}")
        if not 0.0 <= self.r <= 0.5:
            raise ValueError(f"r must lie in [0, 0.5], got {self.r}")

    @property
    def corner_radius(self) -> float:
        return self.r * self.d

    @property
    def straight_half_length(self) -> float:
        return self.d / 2.0 - self.corner_radius

    def as_vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.d, self.alpha, self.r])

    @classmethod
    def from_vector(cls, values: Sequence[float]) -> "HoleParams":
        x, y, d, alpha, r = (float(v) for v in values)
        return cls(x=x, y=y, d=d, alpha=alpha, r=r)


def hole_perimeter(params: HoleParams) -> float:
    """4 d (1 - 2 r) + 2 pi r d."""
    return 8.0 * params.straight_half_length + 2.0 * np.pi * params.corner_radius


def _pieces(params: HoleParams):
    """Eight boundary pieces in counter-clockwise order, starting on the right edge."""
    a = params.straight_half_length
    rho = params.corner_radius
    s = params.d / 2.0
    arc = 0.5 * np.pi * rho
    # (length, kind, data): lines carry (start, direction), arcs carry (center, start angle)
    return [
        (2 * a, "line", (np.array([s, -a]), np.array([0.0, 1.0]))),
        (arc, "arc", (np.array([a, a]), 0.0)),
        (2 * a, "line", (np.array([a, s]), np.array([-1.0, 0.0]))),
        (arc, "arc", (np.array([-a, a]), 0.5 * np.pi)),
        (2 * a, "line", (np.array([-s, a]), np.array([0.0, -1.0]))),
        (arc, "arc", (np.array([-a, -a]), np.pi)),
        (2 * a, "line", (np.array([-a, -s]), np.array([1.0, 0.0]))),
        (arc, "arc", (np.array([a, -a]), 1.5 * np.pi)),
    ]


def _to_world(params: HoleParams, local: np.ndarray) -> np.ndarray:
    c, s = np.cos(params.alpha), np.sin(params.alpha)
    rotation = np.array([[c, -s], [s, c]])
    return local @ rotation.T + np.array([params.x, params.y])


def _evaluate(params: HoleParams, n_points: int):
    if n_points < 8:
        raise ValueError(f"n_points must be at least 8, got {n_points}")
    pieces = _pieces(params)
    lengths = np.array([p[0] for p in pieces])
    starts = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    t = np.arange(n_points) * lengths.sum() / n_points
    index = np.searchsorted(starts, t, side="right") - 1
    points = np.empty((n_points, 2))
    tangents = np.empty((n_points, 2))
    for k, (_, kind, data) in enumerate(pieces):
        mask = index == k
        if not np.any(mask):
            continue
        u = t[mask] - starts[k]
        if kind == "line":
            start, direction = data
            points[mask] = start + u[:, None] * direction
            tangents[mask] = direction
        else:
            center, phi0 = data
            rho = params.corner_radius
            phi = phi0 + u / rho
            points[mask] = center + rho * np.column_stack([np.cos(phi), np.sin(phi)])
            tangents[mask] = np.column_stack([-np.sin(phi), np.cos(phi)])
    return points, tangents


def hole_boundary(params: HoleParams, n_points: int) -> np.ndarray:
    """Counter-clockwise polyline of n_points vertices equally spaced in arc length.

    Four straight edges of length d (1 - 2 r) joined by quarter circles of
    radius r d, rotated by alpha about (x, y).
    """
    local, _ = _evaluate(params, n_points)
    return _to_world(params, local)


def hole_tangent(params: HoleParams, n_points: int) -> np.ndarray:
    """Unit tangents of the parametrization at the hole_boundary vertices."""
    _, tangents = _evaluate(params, n_points)
    c, s = np.cos(params.alpha), np.sin(params.alpha)
    return tangents @ np.array([[c, -s], [s, c]]).T


def signed_distance_hole(point, params: HoleParams) -> np.ndarray:
    """Exact signed distance to the rounded square: negative inside, positive outside.

    Accepts a single point (2,) or an array (..., 2).
    """
    p = np.asarray(point, dtype=float) - np.array([params.x, params.y])
    c, s = np.cos(params.alpha), np.sin(params.alpha)
    local = np.stack([c * p[..., 0] + s * p[..., 1], -s * p[..., 0] + c * p[..., 1]], axis=-1)
    q = np.abs(local) - params.straight_half_length
    outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
    inside = np.minimum(np.max(q, axis=-1), 0.0)
    return outside + inside - params.corner_radius


def hole_extent(params: HoleParams) -> float:
    """Half-width of the axis-aligned bounding box of the rotated hole."""
    a = params.straight_half_length
    return a * (abs(np.cos(params.alpha)) + abs(np.sin(params.alpha))) + params.corner_radius
