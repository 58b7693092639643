"""Uniform lattices on the unit box, grid functions, and point classification.

The domain is [0,1]^dim with dim in {2, 3} and n points per side (boundary
included), so the spacing is h = 1/(n-1).  Grid values are stored flat in
row-major order with x fastest:

    flat = ix + n*iy            (2D)
    flat = ix + n*(iy + n*iz)   (3D)

This ordering is fixed so sparse matrix column indices are reproducible
across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DataError


@dataclass(eq=True, frozen=False)
class Grid:
    """Uniform lattice on the unit box."""

    dim: int
    n: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigurationError(f"dim must be 2 or 3, got {self.dim}")
        if self.n < 3:
            raise ConfigurationError(f"need at least 3 points per side, got n={self.n}")

    @property
    def h(self) -> float:
        return 1.0 / (self.n - 1)

    @property
    def num_points(self) -> int:
        return self.n**self.dim

    @property
    def shape(self) -> tuple:
        """Array shape for reshaped grid values; axes ordered (z,) y, x."""
        return (self.n,) * self.dim

    def multi_indices(self) -> np.ndarray:
        """Integer index coordinates (ix, iy[, iz]) of every point, (M, dim)."""
        if "multi" not in self._cache:
            idx = np.arange(self.num_points)
            cols = [idx % self.n, (idx // self.n) % self.n]
            if self.dim == 3:
                cols.append(idx // self.n**2)
            self._cache["multi"] = np.stack(cols, axis=1)
        return self._cache["multi"]

    def points(self) -> np.ndarray:
        """Physical coordinates of every lattice point, (M, dim)."""
        return self.multi_indices() * self.h

    def flat_index(self, multi) -> np.ndarray:
        """Flat index of integer index coordinates; accepts (dim,) or (m, dim)."""
        m = np.atleast_2d(np.asarray(multi, dtype=np.int64))
        flat = m[:, 0] + self.n * m[:, 1]
        if self.dim == 3:
            flat = flat + self.n**2 * m[:, 2]
        return flat if np.asarray(multi).ndim > 1 else int(flat[0])

    def coordinate(self, flat: int) -> np.ndarray:
        """Physical coordinates of one flat index."""
        return self.multi_indices()[flat] * self.h

    def interior_mask(self) -> np.ndarray:
        """Boolean per point: True iff no index coordinate is 0 or n-1."""
        if "interior" not in self._cache:
            m = self.multi_indices()
            self._cache["interior"] = np.all((m > 0) & (m < self.n - 1), axis=1)
        return self._cache["interior"]

    def interior_indices(self) -> np.ndarray:
        if "int_idx" not in self._cache:
            self._cache["int_idx"] = np.flatnonzero(self.interior_mask())
        return self._cache["int_idx"]

    def boundary_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.interior_mask())

    def interior_multi_indices(self) -> np.ndarray:
        return self.multi_indices()[self.interior_indices()]


def make_grid(dim: int, n: int) -> Grid:
    """Build the uniform lattice on [0,1]^dim with n points per side."""
    return Grid(dim, n)


@dataclass
class PointClass:
    """Interior/boundary tag per lattice point."""

    grid: Grid
    interior: np.ndarray  # bool, length M

    @property
    def n_interior(self) -> int:
        return int(self.interior.sum())

    @property
    def n_boundary(self) -> int:
        return self.grid.num_points - self.n_interior


def classify(grid: Grid) -> PointClass:
    """Tag every point interior or boundary."""
    return PointClass(grid, grid.interior_mask())


@dataclass
class GridFunction:
    """One real value per lattice point, stored flat (x fastest)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.num_points,):
            raise DataError(
                f"expected {self.grid.num_points} values, got shape {self.values.shape}"
            )

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy())

    def reshaped(self) -> np.ndarray:
        """Values as a (n, n[, n]) array indexed [iz,] iy, ix."""
        return self.values.reshape(self.grid.shape)

    def interior(self) -> np.ndarray:
        return self.values[self.grid.interior_indices()]

    def to_csv(self, path) -> None:
        """Write `x,y[,z],value` rows in flat (row-major, x fastest) order."""
        pts = self.grid.points()
        header = "x,y,value" if self.grid.dim == 2 else "x,y,z,value"
        data = np.column_stack([pts, self.values])
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


def sample(grid: Grid, fn) -> GridFunction:
    """Sample a closed-form field fn(x, y[, z]) at every lattice point.

    Raises DataError naming the first offending point if any sampled value
    is non-finite.
    """
    pts = grid.points()
    values = np.asarray(fn(*pts.T), dtype=np.float64)
    if values.ndim == 0:
        values = np.full(grid.num_points, float(values))
    bad = ~np.isfinite(values)
    if bad.any():
        where = pts[int(np.argmax(bad))]
        raise DataError(f"field is not finite at {tuple(where)}")
    return GridFunction(grid, values)


def as_values(u) -> np.ndarray:
    """Accept a GridFunction or a flat value array."""
    return u.values if isinstance(u, GridFunction) else np.asarray(u, dtype=np.float64)
