from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import NumericError


@dataclass(frozen=True)
class Grid:
    x0: float
    y0: float
    x1: float
    y1: float
    nx: int
    ny: int
    exclude: Callable | None = None

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise NumericError("a grid needs at least two nodes per direction")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise NumericError("grid corners must be increasing")

    @classmethod
    def square(cls, x0, y0, x1, y1, h, exclude=None) -> "Grid":
        nx = int(round((x1 - x0) / h)) + 1
        ny = int(round((y1 - y0) / h)) + 1
        return cls(x0, y0, x1, y1, nx, ny, exclude)

    @property
    def hx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y1 - self.y0) / (self.ny - 1)

    def axes(self, half: bool = False):
        mx = (self.nx - 1) * (2 if half else 1)
        my = (self.ny - 1) * (2 if half else 1)
        xs = np.array([self.x0 + (self.x1 - self.x0) * (k / mx) for k in range(mx + 1)])
        ys = np.array([self.y0 + (self.y1 - self.y0) * (k / my) for k in range(my + 1)])
        xs[-1], ys[-1] = self.x1, self.y1
        return xs, ys

    def mesh(self, half: bool = False):
        xs, ys = self.axes(half)
        return np.meshgrid(xs, ys, indexing="ij")


class GridField:
    """Values of one scalar unknown at the grid nodes; finite entries only."""

    def __init__(self, grid: Grid, values):
        values = np.array(values, dtype=float)
        if values.shape != (grid.nx, grid.ny):
            raise NumericError(f"field shape {values.shape} does not match the grid")
        if not np.all(np.isfinite(values)):
            raise NumericError("grid fields must be finite")
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    def to_csv(self, stream=None) -> str:
        buf = stream or io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "value"])
        xs, ys = self.grid.axes()
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                w.writerow([repr(float(x)), repr(float(y)), repr(float(self.values[i, j]))])
        return buf.getvalue() if stream is None else ""
