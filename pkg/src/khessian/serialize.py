"""CSV/JSON serialization of grid solutions and solver reports.

The CSV schema is `x1,y1,...,xn,yn,value` (coordinate pairs interleaved per
complex variable), floats with 17 significant digits; in-memory arrays keep
the (x_1..x_n, y_1..y_n) order, so columns are permuted on the way out/in.
JSON reports are emitted with sorted keys for byte-stable output.
"""

import json

import numpy as np

from .errors import DomainError
from .grids import GridFunction, build_grid


def _interleave_columns(n):
    # (x1..xn, y1..yn) -> (x1, y1, x2, y2, ...)
    order = []
    for j in range(n):
        order.extend([j, n + j])
    return order


def csv_header(n):
    cols = []
    for j in range(1, n + 1):
        cols.extend([f"x{j}", f"y{j}"])
    cols.append("value")
    return ",".join(cols)


def write_solution_csv(path, gf):
    """Write a GridFunction as CSV with the interleaved-coordinate schema."""
    grid = gf.grid
    order = _interleave_columns(grid.n)
    with open(path, "w") as fh:
        fh.write(csv_header(grid.n) + "\n")
        for row, val in zip(grid.coords, gf.values):
            cells = [format(row[a], ".17g") for a in order]
            cells.append(format(val, ".17g"))
            fh.write(",".join(cells) + "\n")


def read_solution_csv(path, grid):
    """Read a solution CSV back onto a matching grid (exact node coverage required)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != grid.dim + 1:
        raise DomainError(f"CSV has {data.shape[1]} columns, expected {grid.dim + 1}")
    order = _interleave_columns(grid.n)
    coords = np.empty((data.shape[0], grid.dim))
    coords[:, order] = data[:, : grid.dim]
    lattice = np.round(coords / grid.h).astype(np.int64)
    if np.max(np.abs(lattice * grid.h - coords)) > 1e-9 * max(grid.h, 1.0):
        raise DomainError("CSV coordinates do not sit on the grid lattice")
    ids = grid.ids_at(lattice)
    if np.any(ids < 0):
        raise DomainError("CSV contains points that are not grid nodes")
    values = np.full(grid.n_nodes, np.nan)
    values[ids] = data[:, grid.dim]
    if np.any(np.isnan(values)):
        raise DomainError("CSV does not cover every grid node")
    return GridFunction(grid, values)


def write_report_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_report_json(path):
    with open(path) as fh:
        return json.load(fh)


def grid_from_report(report):
    """Rebuild the BallGrid referenced by a solve report's parameter echo."""
    try:
        prm = report["problem"]
        return build_grid(int(prm["n"]), float(prm["r"]), float(prm["h"]))
    except KeyError as exc:
        raise DomainError(f"report is missing grid parameters: {exc}") from exc
