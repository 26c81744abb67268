"""Removal masks: a rectangle or polygon in tile pixel coordinates.

Rectangle coordinates are inclusive on both ends, so x0=x1, y0=y1 covers
exactly one pixel. Polygons rasterize with the even-odd rule sampled at
pixel centers; that rule is an API contract shared with the UI preview.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from satforge import kernels
from satforge.errors import DegeneratePolygon, MaskOutOfBounds

SHAPES = ("rectangle", "polygon")


@dataclass
class RemovalMask:
    shape: str  # rectangle | polygon
    geometry: object  # (x0, y0, x1, y1) or [(x, y), ...]
    tile_coord: tuple[int, int]

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise MaskOutOfBounds(f"unknown mask shape {self.shape!r}")
        if self.shape == "rectangle":
            x0, y0, x1, y1 = self.geometry
            if x0 > x1 or y0 > y1:
                raise MaskOutOfBounds(f"rectangle must have x0 <= x1 and y0 <= y1: {self.geometry}")
        else:
            if len(self.geometry) < 3:
                raise DegeneratePolygon(f"polygon mask needs >= 3 vertices, got {len(self.geometry)}")

    def validate_bounds(self, tile_size: int) -> None:
        if self.shape == "rectangle":
            x0, y0, x1, y1 = self.geometry
            coords = [(x0, y0), (x1, y1)]
        else:
            coords = list(self.geometry)
        for x, y in coords:
            if not (0 <= x < tile_size and 0 <= y < tile_size):
                raise MaskOutOfBounds(
                    f"mask vertex ({x}, {y}) outside [0, {tile_size})^2", tile_size=tile_size
                )

    def to_json(self) -> dict:
        return {
            "shape": self.shape,
            "geometry": [list(v) for v in self.geometry] if self.shape == "polygon" else list(self.geometry),
            "tile": list(self.tile_coord),
        }

    @classmethod
    def from_json(cls, d: dict) -> "RemovalMask":
        geometry = d["geometry"]
        if d["shape"] == "rectangle":
            geometry = tuple(geometry)
        else:
            geometry = [tuple(v) for v in geometry]
        return cls(shape=d["shape"], geometry=geometry, tile_coord=tuple(d["tile"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2))

    @classmethod
    def load(cls, path: str | Path) -> "RemovalMask":
        return cls.from_json(json.loads(Path(path).read_text()))


def rasterize_mask(mask: RemovalMask, tile_size: int) -> np.ndarray:
    """Boolean pixel set covered by the mask within a tile."""
    mask.validate_bounds(tile_size)
    if mask.shape == "rectangle":
        x0, y0, x1, y1 = (int(v) for v in mask.geometry)
        out = np.zeros((tile_size, tile_size), dtype=bool)
        out[y0:y1 + 1, x0:x1 + 1] = True
        return out
    xs = np.array([v[0] for v in mask.geometry], dtype=np.float64)
    ys = np.array([v[1] for v in mask.geometry], dtype=np.float64)
    return kernels.rasterize_polygon(xs, ys, tile_size, tile_size).astype(bool)
