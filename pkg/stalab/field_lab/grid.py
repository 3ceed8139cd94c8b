"""Uniform 4D grids, sampled fields and central-difference stencils."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from stalab import sta_core as sc
from stalab.field_lab.fields import MultivectorField, as_points
from stalab.utils.errors import BoundaryPoint, OffGridPoint

logger = logging.getLogger(__name__)

# first-derivative central stencils, offsets -w..w
_FIRST = {
    2: np.array([-0.5, 0.0, 0.5]),
    4: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
}
# second-derivative central stencils
_SECOND = {
    2: np.array([1.0, -2.0, 1.0]),
    4: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
}


def _check_order(order: int) -> int:
    if order not in _FIRST:
        raise ValueError(f"stencil order must be 2 or 4, got {order}")
    return order // 2


@dataclass(frozen=True)
class Grid4:
    """Uniform grid; node (i0, i1, i2, i3) sits at origin + i_mu * spacing_mu."""

    origin: tuple[float, float, float, float]
    spacing: tuple[float, float, float, float]
    counts: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.origin) != 4 or len(self.spacing) != 4 or len(self.counts) != 4:
            raise ValueError("Grid4 needs four origin, spacing and count entries")
        if any(h <= 0 for h in self.spacing):
            raise ValueError(f"grid spacing must be positive, got {self.spacing}")
        if any(n < 1 for n in self.counts):
            raise ValueError(f"node counts must be positive, got {self.counts}")
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "spacing", tuple(float(v) for v in self.spacing))
        object.__setattr__(self, "counts", tuple(int(v) for v in self.counts))

    @classmethod
    def centered(cls, center, half_extent: float, h: float) -> "Grid4":
        """Cube of side 2 * half_extent around ``center`` with spacing ``h`` on every axis."""
        n = int(round(2 * half_extent / h)) + 1
        origin = tuple(float(c) - half_extent for c in center)
        return cls(origin, (h,) * 4, (n,) * 4)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def axes(self) -> list[np.ndarray]:
        return [o + h * np.arange(n) for o, h, n in zip(self.origin, self.spacing, self.counts)]

    def points(self) -> np.ndarray:
        """Node coordinates, shape counts + (4,), row-major."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def node_index(self, x, atol: float = 1e-9) -> tuple[int, int, int, int]:
        pts = as_points(x)
        rel = (pts - np.asarray(self.origin)) / np.asarray(self.spacing)
        idx = np.rint(rel)
        if np.any(np.abs(rel - idx) > atol) or np.any(idx < 0) or np.any(idx >= np.asarray(self.counts)):
            raise OffGridPoint(f"event {pts.tolist()} is not a node of the grid")
        return tuple(int(i) for i in idx)

    def is_interior(self, index, order: int = 2) -> bool:
        w = _check_order(order)
        return all(w <= i < n - w for i, n in zip(index, self.counts))

    def interior_slices(self, order: int = 2) -> tuple[slice, ...]:
        w = _check_order(order)
        if any(n <= 2 * w for n in self.counts):
            raise BoundaryPoint(f"grid {self.counts} has no interior for order {order}")
        return tuple(slice(w, n - w) for n in self.counts)

    def interior_points(self, order: int = 2) -> np.ndarray:
        return self.points()[self.interior_slices(order)]


def _shifted(values: np.ndarray, axis: int, offset: int, w: int) -> np.ndarray:
    """Interior-aligned view of ``values`` shifted by ``offset`` along ``axis``."""
    sl = []
    for ax in range(4):
        n = values.shape[ax]
        shift = offset if ax == axis else 0
        sl.append(slice(w + shift, n - w + shift))
    return values[tuple(sl)]


def grid_gradient(values: np.ndarray, grid: Grid4, order: int = 2) -> np.ndarray:
    """Partial derivatives at interior nodes, shape interior + (4,) + value shape."""
    w = _check_order(order)
    grid.interior_slices(order)
    stencil = _FIRST[order]
    parts = []
    for mu in range(4):
        d = sum(c * _shifted(values, mu, k - w, w) for k, c in enumerate(stencil) if c != 0.0)
        parts.append(d / grid.spacing[mu])
    return np.stack(parts, axis=4)


def grid_second_derivatives(values: np.ndarray, grid: Grid4, order: int = 2) -> np.ndarray:
    """Unmixed second derivatives d^2/dx^mu^2 at interior nodes, stacked on axis 4."""
    w = _check_order(order)
    grid.interior_slices(order)
    stencil = _SECOND[order]
    parts = []
    for mu in range(4):
        d = sum(c * _shifted(values, mu, k - w, w) for k, c in enumerate(stencil))
        parts.append(d / grid.spacing[mu] ** 2)
    return np.stack(parts, axis=4)


def grid_dalembertian(values: np.ndarray, grid: Grid4, order: int = 2) -> np.ndarray:
    """eta^{mu mu} d_mu d_mu applied to each coefficient, interior nodes only."""
    second = grid_second_derivatives(values, grid, order)
    metric = np.asarray(sc.METRIC).reshape((1,) * 4 + (4,) + (1,) * (values.ndim - 4))
    return np.sum(metric * second, axis=4)


def grid_dirac_op(values: np.ndarray, grid: Grid4, order: int = 2) -> np.ndarray:
    """gamma^mu d_mu f at interior nodes; ``values`` has shape counts + (16,)."""
    grad = grid_gradient(values, grid, order)
    out = np.zeros(grad.shape[:4] + (sc.DIM,))
    for mu, g in enumerate(sc.GAMMA_UP):
        out += sc.gp_batch(g.coeffs, grad[..., mu, :])
    return out


class GridField(MultivectorField):
    """Field sampled at the nodes of a Grid4; derivatives by central differences."""

    analytic = False

    def __init__(self, grid: Grid4, values: np.ndarray, order: int = 2):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != grid.counts + (sc.DIM,):
            raise ValueError(f"values shape {values.shape} does not match grid {grid.counts}")
        _check_order(order)
        self.grid = grid
        self.values = values
        self.order = order

    def evaluate(self, points):
        pts = as_points(points)
        flat = pts.reshape(-1, 4)
        out = np.array([self.values[self.grid.node_index(p)] for p in flat])
        return out.reshape(pts.shape[:-1] + (sc.DIM,))

    def gradient_array(self, points):
        pts = as_points(points)
        flat = pts.reshape(-1, 4)
        w = self.order // 2
        stencil = _FIRST[self.order]
        rows = []
        for p in flat:
            idx = self.grid.node_index(p)
            if not self.grid.is_interior(idx, self.order):
                raise BoundaryPoint(f"node {idx} lacks a full order-{self.order} stencil")
            grad = np.zeros((4, sc.DIM))
            for mu in range(4):
                for k, c in enumerate(stencil):
                    if c == 0.0:
                        continue
                    j = list(idx)
                    j[mu] += k - w
                    grad[mu] += c * self.values[tuple(j)]
                grad[mu] /= self.grid.spacing[mu]
            rows.append(grad)
        return np.array(rows).reshape(pts.shape[:-1] + (4, sc.DIM))


def sample(field: MultivectorField, grid: Grid4, order: int = 2) -> GridField:
    logger.debug("sampling %s on %d nodes", type(field).__name__, grid.size)
    return GridField(grid, field.evaluate(grid.points()), order)
