"""Cartesian lattice grids over closed balls in R^{2n} (identified with C^n).

Real coordinates are ordered (x_1..x_n, y_1..y_n).  Nodes are the points of
h*Z^{2n} with |z| <= r, split into the interior (every node whose full
second-order stencil -- axis neighbors and all diagonal cross neighbors -- lies
inside the node set) and the boundary collar (everything else).  Collar nodes
only ever carry Dirichlet data.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, ResolutionError, StencilError

# Hard cap on bounding-cube size so accidental n=3 full grids fail fast.
MAX_CUBE_POINTS = 15_000_000


def _stencil_offsets(dim):
    """Axis and diagonal offsets of the second-order stencil, as an (S, dim) array."""
    offs = []
    for a in range(dim):
        for s in (1, -1):
            e = np.zeros(dim, dtype=np.int64)
            e[a] = s
            offs.append(e)
    for a in range(dim):
        for b in range(a + 1, dim):
            for sa in (1, -1):
                for sb in (1, -1):
                    e = np.zeros(dim, dtype=np.int64)
                    e[a], e[b] = sa, sb
                    offs.append(e)
    return np.array(offs)


@dataclass
class BallGrid:
    """Lattice ball grid; constructed through :func:`build_grid`."""

    n: int
    r: float
    h: float
    lattice: np.ndarray  # (N, 2n) int64, lexicographic order
    is_interior: np.ndarray  # (N,) bool
    _lookup: np.ndarray = field(repr=False)  # dense cube of node ids, -1 = absent
    _halfwidth: int = field(repr=False)

    @property
    def dim(self):
        return 2 * self.n

    @cached_property
    def coords(self):
        return self.lattice * self.h

    @cached_property
    def interior_ids(self):
        return np.flatnonzero(self.is_interior)

    @cached_property
    def collar_ids(self):
        return np.flatnonzero(~self.is_interior)

    @property
    def n_nodes(self):
        return self.lattice.shape[0]

    def ids_at(self, lattice_points):
        """Node ids of lattice points (M, dim); -1 where the point is not a node."""
        pts = np.asarray(lattice_points, dtype=np.int64)
        squeeze = pts.ndim == 1
        if squeeze:
            pts = pts[None]
        k = self._halfwidth
        inside = np.all(np.abs(pts) <= k, axis=1)
        ids = np.full(pts.shape[0], -1, dtype=np.int64)
        if np.any(inside):
            shifted = pts[inside] + k
            flat = np.ravel_multi_index(shifted.T, (2 * k + 1,) * self.dim)
            ids[inside] = self._lookup[flat]
        return int(ids[0]) if squeeze else ids

    def node_id(self, lattice_point):
        return self.ids_at(lattice_point)

    @cached_property
    def stencil_tables(self):
        """Neighbor id tables for vectorized interior-stencil evaluation.

        Returns a dict with interior node ids ("center"), axis neighbor ids
        ("axis_p"/"axis_m", shape (Ni, dim)), the list of dimension pairs,
        and the four diagonal corner tables ("pp","pm","mp","mm").
        """
        d = self.dim
        center = self.interior_ids
        lat = self.lattice[center]
        axis_p = np.empty((center.size, d), dtype=np.int64)
        axis_m = np.empty((center.size, d), dtype=np.int64)
        for a in range(d):
            e = np.zeros(d, dtype=np.int64)
            e[a] = 1
            axis_p[:, a] = self.ids_at(lat + e)
            axis_m[:, a] = self.ids_at(lat - e)
        pairs = [(a, b) for a in range(d) for b in range(a + 1, d)]
        corners = {}
        for key, (sa, sb) in (("pp", (1, 1)), ("pm", (1, -1)), ("mp", (-1, 1)), ("mm", (-1, -1))):
            tab = np.empty((center.size, len(pairs)), dtype=np.int64)
            for idx, (a, b) in enumerate(pairs):
                e = np.zeros(d, dtype=np.int64)
                e[a], e[b] = sa, sb
                tab[:, idx] = self.ids_at(lat + e)
            corners[key] = tab
        tables = {"center": center, "axis_p": axis_p, "axis_m": axis_m, "pairs": pairs}
        tables.update(corners)
        return tables


def build_grid(n, r, h):
    """Build the lattice ball grid of complex dimension n, radius r, spacing h.

    Requires h <= r/2 (below that no node has a full stencil) and raises
    ResolutionError when the interior comes out empty anyway.
    """
    if n < 1:
        raise DomainError(f"complex dimension must be >= 1, got {n}")
    if not (r > 0 and h > 0):
        raise DomainError("radius and spacing must be positive")
    if h > r / 2:
        raise ResolutionError(f"spacing h={h} too coarse for radius r={r} (need h <= r/2)")
    dim = 2 * n
    k = int(np.floor(r / h + 1e-9))
    if (2 * k + 1) ** dim > MAX_CUBE_POINTS:
        raise ResolutionError(f"grid bounding cube would hold {(2*k+1)**dim} points; refusing")
    axes = [np.arange(-k, k + 1, dtype=np.int64)] * dim
    cube = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    rho2 = (r / h) ** 2 * (1.0 + 1e-12) + 1e-12
    mask = np.einsum("ij,ij->i", cube, cube) <= rho2
    lattice = cube[mask]
    lookup = np.full((2 * k + 1) ** dim, -1, dtype=np.int64)
    flat = np.ravel_multi_index((lattice + k).T, (2 * k + 1,) * dim)
    lookup[flat] = np.arange(lattice.shape[0])

    grid = BallGrid(n=n, r=float(r), h=float(h), lattice=lattice,
                    is_interior=np.zeros(lattice.shape[0], dtype=bool),
                    _lookup=lookup, _halfwidth=k)
    interior = np.ones(lattice.shape[0], dtype=bool)
    for off in _stencil_offsets(dim):
        interior &= grid.ids_at(lattice + off) >= 0
    if not np.any(interior):
        raise ResolutionError("grid has no interior node; refine the spacing")
    grid.is_interior = interior
    return grid


@dataclass
class GridFunction:
    """Real values attached to every node of a BallGrid."""

    grid: BallGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_nodes,):
            raise DomainError(f"values shape {self.values.shape} != ({self.grid.n_nodes},)")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("grid function values must be finite")

    @classmethod
    def from_callable(cls, grid, fn):
        """Sample fn on all nodes.  fn may be vectorized ((N,2n)->(N,)) or pointwise."""
        try:
            vals = np.asarray(fn(grid.coords), dtype=float)
            if vals.shape != (grid.n_nodes,):
                raise TypeError
        except (TypeError, ValueError):
            vals = np.array([float(fn(z)) for z in grid.coords])
        return cls(grid, vals)

    def copy(self):
        return GridFunction(self.grid, self.values.copy())


def node_or_raise(grid, node):
    """Resolve a node given as id or lattice tuple; raise StencilError if absent."""
    if np.isscalar(node) or isinstance(node, (int, np.integer)):
        nid = int(node)
        if not 0 <= nid < grid.n_nodes:
            raise StencilError(f"node id {nid} out of range")
        return nid
    nid = grid.node_id(np.asarray(node, dtype=np.int64))
    if nid < 0:
        raise StencilError(f"lattice point {tuple(node)} is not a grid node")
    return nid
