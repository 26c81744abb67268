"""Raster I/O, deterministic tiling, lossless stitching and compositing.

Tiles are row-major from the top-left. Edge tiles are padded to the full
tile size (reflect by default, zero optionally); the unpadded extent is
kept in ``Tile.valid_region`` so stitching is bit-exact.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from satforge.errors import (
    InconsistentGrid,
    InvalidTileSize,
    OutOfBounds,
    UnreadableFile,
    UnsupportedFormat,
)

DEFAULT_TILE_SIZE = 256
PAD_POLICIES = ("reflect", "zero")

_CONVERTIBLE_MODES = {"L", "LA", "P", "RGB", "RGBA", "1"}
_SIXTEEN_BIT_MODES = {"I", "I;16", "I;16B", "I;16L", "I;16N"}


@dataclass
class Scene:
    id: str
    pixels: np.ndarray  # H x W x 3 uint8
    provenance: str = "pristine"  # pristine | forged
    source_path: str | None = None

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass
class Tile:
    grid_coord: tuple[int, int]  # (row, col)
    pixels: np.ndarray  # tile_size x tile_size x 3 uint8
    valid_region: tuple[int, int]  # (height, width) of unpadded content

    @property
    def tile_size(self) -> int:
        return self.pixels.shape[0]


@dataclass
class TileGrid:
    scene_id: str
    tile_size: int
    rows: int
    cols: int
    pad_policy: str
    tiles: list[Tile] = field(default_factory=list)

    def tile_at(self, row: int, col: int) -> Tile:
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise OutOfBounds(f"tile ({row}, {col}) outside {self.rows}x{self.cols} grid")
        return self.tiles[row * self.cols + col]

    def meta(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "tile_size": self.tile_size,
            "rows": self.rows,
            "cols": self.cols,
            "pad_policy": self.pad_policy,
        }

    def save_meta(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.meta(), indent=2))


def load_scene(path: str | Path) -> Scene:
    """Decode an image file into a pristine RGB Scene.

    Grayscale sources are replicated across channels; 16-bit sources are
    rescaled to 8-bit with a warning. Anything that cannot be decoded to
    8-bit RGB raises.
    """
    p = Path(path)
    if not p.is_file() or p.stat().st_size == 0:
        raise UnreadableFile(f"missing or empty file: {p}", path=str(p))
    try:
        img = Image.open(p)
        img.load()
    except (UnidentifiedImageError, OSError) as exc:
        raise UnreadableFile(f"cannot decode {p}: {exc}", path=str(p)) from exc

    if img.mode in _SIXTEEN_BIT_MODES:
        arr = np.asarray(img, dtype=np.float64)
        warnings.warn(f"{p.name}: 16-bit source rescaled to 8-bit", stacklevel=2)
        arr = np.rint(arr * (255.0 / max(arr.max(), 1.0))).astype(np.uint8)
        pixels = np.repeat(arr[:, :, None], 3, axis=2)
    elif img.mode in _CONVERTIBLE_MODES:
        pixels = np.asarray(img.convert("RGB"), dtype=np.uint8)
    else:
        raise UnsupportedFormat(f"mode {img.mode!r} is not decodable to 8-bit RGB", mode=img.mode)

    return Scene(id=p.stem, pixels=pixels, provenance="pristine", source_path=str(p))


def save_scene(scene: Scene, path: str | Path) -> None:
    """Write the scene losslessly as PNG (mandatory for forged outputs)."""
    Image.fromarray(scene.pixels, mode="RGB").save(Path(path), format="PNG")


def _reflect_indices(length: int, total: int) -> np.ndarray:
    """Mirror-without-repeat index map of size ``total`` for an axis of ``length``."""
    idx = np.arange(total)
    if length == 1:
        return np.zeros(total, dtype=np.intp)
    period = 2 * (length - 1)
    m = idx % period
    return np.where(m < length, m, period - m)


def slice_tiles(scene: Scene, tile_size: int = DEFAULT_TILE_SIZE, pad_policy: str = "reflect") -> TileGrid:
    """Slice a scene into rows x cols fixed-size blocks, padding edge tiles."""
    if not isinstance(tile_size, int) or tile_size < 8:
        raise InvalidTileSize(f"tile_size must be an int >= 8, got {tile_size!r}")
    if pad_policy not in PAD_POLICIES:
        raise InvalidTileSize(f"unknown pad_policy {pad_policy!r}")

    h, w = scene.pixels.shape[:2]
    rows = math.ceil(h / tile_size)
    cols = math.ceil(w / tile_size)
    ph, pw = rows * tile_size, cols * tile_size

    if pad_policy == "zero":
        padded = np.zeros((ph, pw, 3), dtype=np.uint8)
        padded[:h, :w] = scene.pixels
    else:
        ry = _reflect_indices(h, ph)
        rx = _reflect_indices(w, pw)
        padded = scene.pixels[np.ix_(ry, rx)]

    tiles = []
    for r in range(rows):
        for c in range(cols):
            block = padded[r * tile_size:(r + 1) * tile_size, c * tile_size:(c + 1) * tile_size].copy()
            valid = (min(tile_size, h - r * tile_size), min(tile_size, w - c * tile_size))
            tiles.append(Tile(grid_coord=(r, c), pixels=block, valid_region=valid))

    return TileGrid(scene_id=scene.id, tile_size=tile_size, rows=rows, cols=cols, pad_policy=pad_policy, tiles=tiles)


def stitch_tiles(grid: TileGrid) -> np.ndarray:
    """Reassemble the original raster from a grid; inverse of slice_tiles."""
    if len(grid.tiles) != grid.rows * grid.cols:
        raise InconsistentGrid(
            f"expected {grid.rows * grid.cols} tiles, got {len(grid.tiles)}",
            rows=grid.rows, cols=grid.cols,
        )
    ts = grid.tile_size
    last_row = grid.tiles[(grid.rows - 1) * grid.cols]
    last_col = grid.tiles[grid.cols - 1]
    h = (grid.rows - 1) * ts + last_row.valid_region[0]
    w = (grid.cols - 1) * ts + last_col.valid_region[1]

    out = np.zeros((h, w, 3), dtype=np.uint8)
    for tile in grid.tiles:
        if tile.pixels.shape != (ts, ts, 3):
            raise InconsistentGrid(f"tile {tile.grid_coord} has shape {tile.pixels.shape}")
        r, c = tile.grid_coord
        vh, vw = tile.valid_region
        out[r * ts:r * ts + vh, c * ts:c * ts + vw] = tile.pixels[:vh, :vw]
    return out


def composite_tile(scene: Scene, coord: tuple[int, int], new_tile: Tile) -> Scene:
    """Paste a tile back into the scene; result is a forged scene.

    Only the valid footprint of the target tile changes (hard paste,
    no blending).
    """
    ts = new_tile.tile_size
    h, w = scene.pixels.shape[:2]
    rows = math.ceil(h / ts)
    cols = math.ceil(w / ts)
    r, c = coord
    if not (0 <= r < rows and 0 <= c < cols):
        raise OutOfBounds(f"coord {coord} outside {rows}x{cols} grid for tile_size {ts}")
    if new_tile.pixels.shape != (ts, ts, 3):
        raise InconsistentGrid(f"tile shape {new_tile.pixels.shape} != ({ts}, {ts}, 3)")

    vh = min(ts, h - r * ts)
    vw = min(ts, w - c * ts)
    pixels = scene.pixels.copy()
    pixels[r * ts:r * ts + vh, c * ts:c * ts + vw] = new_tile.pixels[:vh, :vw]
    return Scene(id=scene.id, pixels=pixels, provenance="forged", source_path=scene.source_path)
