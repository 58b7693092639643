"""Lattice direction stencils.

Enumerates the integer grid directions of a wide stencil, the mutually
orthogonal direction bases used by the monotone scheme, and evaluates
second directional differences

    D_vv u(x) = (u(x + v h) + u(x - v h) - 2 u(x)) / (|v|^2 h^2),

which is exact on quadratics.  Arms that would leave the unit box are
shortened to the boundary intersection; the value there is obtained by
linear interpolation of the boundary data between the adjacent boundary
lattice points, and the nonuniform three-point formula

    2 [ u+ / (r+ (r+ + r-)) + u- / (r- (r+ + r-)) - u0 / (r+ r-) ]

is used with physical arm lengths r+, r-.  All neighbor weights stay
nonnegative and the centre weight negative, so every produced difference
is in monotone form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError
from .grid import Grid, GridFunction, as_values

_SNAP = 1e-9  # snap tolerance for fractional boundary-intersection coordinates


def _canonical(vec) -> tuple:
    """gcd-reduce and fix the sign so the first nonzero component is positive."""
    v = np.asarray(vec, dtype=np.int64)
    g = 0
    for c in v:
        g = gcd(g, abs(int(c)))
    v = v // g
    for c in v:
        if c != 0:
            if c < 0:
                v = -v
            break
    return tuple(int(c) for c in v)


def build_directions(dim: int, width: int, include_body_diagonals: bool = False) -> np.ndarray:
    """Canonical lattice directions with Chebyshev norm <= width, (n_dir, dim).

    Directions come gcd-reduced and sign-canonical, so v and -v are never
    both listed; the stencil they induce has 1 + 2*n_dir points.  In 3D the
    default drops body diagonals (all components nonzero), which gives the
    19-point stencil at width 1.
    """
    if width < 1:
        raise ConfigurationError(f"stencil width must be >= 1, got {width}")
    seen = set()
    for raw in itertools.product(range(-width, width + 1), repeat=dim):
        if all(c == 0 for c in raw):
            continue
        if dim == 3 and not include_body_diagonals and all(c != 0 for c in raw):
            continue
        seen.add(_canonical(raw))
    dirs = sorted(seen, key=lambda v: (max(abs(c) for c in v), sum(c != 0 for c in v), v))
    return np.array(dirs, dtype=np.int64)


def stencil_point_count(directions: np.ndarray) -> int:
    """Number of lattice points touched: centre plus both arms per direction."""
    return 1 + 2 * len(directions)


@dataclass
class StencilBasisSet:
    """Directions of a wide stencil plus its mutually orthogonal bases.

    `bases` holds index tuples into `directions`; each tuple is pairwise
    orthogonal and spans R^dim.  The coordinate-axis basis is always
    present and listed first.
    """

    dim: int
    width: int
    directions: np.ndarray  # (n_dir, dim) int
    bases: np.ndarray  # (n_bases, dim) indices into directions

    @property
    def n_directions(self) -> int:
        return len(self.directions)

    @property
    def n_bases(self) -> int:
        return len(self.bases)


def build_orthogonal_bases(directions: np.ndarray, dim: int, width: int | None = None) -> StencilBasisSet:
    """Collect every unordered pairwise-orthogonal dim-tuple of directions."""
    directions = np.asarray(directions, dtype=np.int64)
    dots = directions @ directions.T
    bases = [
        combo
        for combo in itertools.combinations(range(len(directions)), dim)
        if all(dots[a, b] == 0 for a, b in itertools.combinations(combo, 2))
    ]
    if not bases:
        raise ConfigurationError("direction set contains no complete orthogonal basis")
    bases.sort()
    if width is None:
        width = int(np.abs(directions).max())
    return StencilBasisSet(dim, width, directions, np.array(bases, dtype=np.int64))


def default_basis_set(dim: int, width: int | None = None) -> StencilBasisSet:
    """The paper-scale stencil: 17 points (width 2) in 2D, 19 points in 3D."""
    if width is None:
        width = 2 if dim == 2 else 1
    return build_orthogonal_bases(build_directions(dim, width), dim, width)


def _arm_samples(grid: Grid, pts: np.ndarray, step: np.ndarray):
    """Lattice samples approximating u at the end of one stencil arm.

    pts is (m, dim) integer index coordinates of the arm origins and step the
    integer direction (sign included).  Returns (rho, rows, cols, weights):
    rho is the physical arm length per origin; the COO triplets express the
    arm-end value as a convex combination of lattice values (weights sum to
    1 per row).  Arms ending on the lattice produce a single unit weight;
    arms leaving the box are cut at the boundary and interpolated.
    """
    n, h, d = grid.n, grid.h, grid.dim
    m = len(pts)
    norm = float(np.linalg.norm(step))
    target = pts + step
    inside = np.all((target >= 0) & (target <= n - 1), axis=1)

    rho = np.full(m, norm * h)
    rows = [np.flatnonzero(inside)]
    cols = [grid.flat_index(target[inside])]
    weights = [np.ones(int(inside.sum()))]

    out = np.flatnonzero(~inside)
    if len(out):
        p = pts[out]
        # first exit parameter along x(t) = p + t*step, t in (0, 1)
        t = np.full(len(out), np.inf)
        for a in range(d):
            if step[a] > 0:
                t = np.minimum(t, (n - 1 - p[:, a]) / step[a])
            elif step[a] < 0:
                t = np.minimum(t, p[:, a] / (-step[a]))
        rho[out] = t * norm * h
        cut = p + t[:, None] * step  # fractional index coords on the boundary

        # multilinear interpolation between adjacent boundary lattice points
        combo_idx = np.zeros((len(out), 1), dtype=np.int64)
        combo_w = np.ones((len(out), 1))
        stride = 1
        for a in range(d):
            lo = np.floor(cut[:, a]).astype(np.int64)
            frac = cut[:, a] - lo
            up = frac > 1.0 - _SNAP
            lo[up] += 1
            frac[up] = 0.0
            frac[frac < _SNAP] = 0.0
            lo = np.clip(lo, 0, n - 1)
            new_idx = [combo_idx + stride * lo[:, None]]
            new_w = [combo_w * (1.0 - frac)[:, None]]
            if np.any(frac > 0):
                new_idx.append(combo_idx + stride * (lo + 1)[:, None])
                new_w.append(combo_w * frac[:, None])
            combo_idx = np.concatenate(new_idx, axis=1)
            combo_w = np.concatenate(new_w, axis=1)
            stride *= n
        keep = combo_w > 0
        rr, _ = np.nonzero(keep)
        rows.append(out[rr])
        cols.append(combo_idx[keep])
        weights.append(combo_w[keep])

    return rho, np.concatenate(rows), np.concatenate(cols), np.concatenate(weights)


@dataclass
class DirectionOperator:
    """Second directional difference along one direction, as sparse matrices.

    `matrix` maps the full grid vector (boundary entries included, carrying
    the Dirichlet data) to D_vv u at the interior points.  `interior` is the
    same operator restricted to interior columns, which is the block entering
    Jacobians; boundary samples fold into the right-hand side.  `rho_product`
    stores r+ * r- per interior point.
    """

    direction: np.ndarray
    matrix: sp.csr_matrix
    interior: sp.csr_matrix
    rho_product: np.ndarray

    def __call__(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ values


def build_direction_operator(grid: Grid, direction) -> DirectionOperator:
    """Assemble the D_vv operator over all interior points."""
    step = np.asarray(direction, dtype=np.int64)
    pts = grid.interior_multi_indices()
    n_int = len(pts)
    rho_p, rows_p, cols_p, w_p = _arm_samples(grid, pts, step)
    rho_m, rows_m, cols_m, w_m = _arm_samples(grid, pts, -step)

    c_plus = 2.0 / (rho_p * (rho_p + rho_m))
    c_minus = 2.0 / (rho_m * (rho_p + rho_m))
    c_centre = -2.0 / (rho_p * rho_m)

    rows = np.concatenate([rows_p, rows_m, np.arange(n_int)])
    cols = np.concatenate([cols_p, cols_m, grid.interior_indices()])
    vals = np.concatenate([w_p * c_plus[rows_p], w_m * c_minus[rows_m], c_centre])
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n_int, grid.num_points))
    mat.sum_duplicates()
    return DirectionOperator(step, mat, mat[:, grid.interior_indices()].tocsr(), rho_p * rho_m)


@dataclass
class MixedOperator:
    """Centred mixed second difference D_ab u (a != b) over interior points."""

    axes: tuple
    matrix: sp.csr_matrix
    interior: sp.csr_matrix

    def __call__(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ values


def build_mixed_operator(grid: Grid, a: int, b: int) -> MixedOperator:
    """(u(+a+b) + u(-a-b) - u(+a-b) - u(-a+b)) / (4 h^2); all points on-lattice."""
    pts = grid.interior_multi_indices()
    n_int = len(pts)
    ea = np.zeros(grid.dim, dtype=np.int64)
    eb = np.zeros(grid.dim, dtype=np.int64)
    ea[a] = 1
    eb[b] = 1
    scale = 1.0 / (4.0 * grid.h**2)
    rows, cols, vals = [], [], []
    for sa, sb, sign in ((1, 1, 1.0), (-1, -1, 1.0), (1, -1, -1.0), (-1, 1, -1.0)):
        rows.append(np.arange(n_int))
        cols.append(grid.flat_index(pts + sa * ea + sb * eb))
        vals.append(np.full(n_int, sign * scale))
    mat = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_int, grid.num_points),
    )
    mat.sum_duplicates()
    return MixedOperator((a, b), mat, mat[:, grid.interior_indices()].tocsr())


@dataclass
class SecondDifference:
    """One directional second difference and the lattice samples it used."""

    value: float
    coefficients: list  # (flat point index, weight), centre weight negative


def second_difference(u: GridFunction, index, direction, g=None) -> SecondDifference:
    """Evaluate D_vv u at one interior point.

    `index` is a flat point index or an integer index tuple; boundary values
    are taken from `g` (full-length array) when given, else from u itself.
    """
    grid = u.grid
    vals = as_values(u).copy()
    if g is not None:
        bnd = grid.boundary_indices()
        vals[bnd] = as_values(g)[bnd]
    if np.isscalar(index) or np.asarray(index).ndim == 0:
        multi = grid.multi_indices()[int(index)]
    else:
        multi = np.asarray(index, dtype=np.int64)
    if not np.all((multi > 0) & (multi < grid.n - 1)):
        raise ConfigurationError(f"point {tuple(multi)} is not interior")
    step = np.asarray(direction, dtype=np.int64)
    pt = multi[None, :]
    rho_p, _, cols_p, w_p = _arm_samples(grid, pt, step)
    rho_m, _, cols_m, w_m = _arm_samples(grid, pt, -step)
    rp, rm = float(rho_p[0]), float(rho_m[0])
    c_plus = 2.0 / (rp * (rp + rm))
    c_minus = 2.0 / (rm * (rp + rm))
    coeffs = [(int(c), float(w) * c_plus) for c, w in zip(cols_p, w_p)]
    coeffs += [(int(c), float(w) * c_minus) for c, w in zip(cols_m, w_m)]
    coeffs.append((grid.flat_index(multi), -2.0 / (rp * rm)))
    value = sum(w * vals[c] for c, w in coeffs)
    return SecondDifference(float(value), coeffs)
