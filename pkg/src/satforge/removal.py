"""Inference-phase pipeline: erase CFI edges inside a user region,
re-translate the tile, and composite it back into the scene."""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from satforge.errors import CheckpointMismatch, MaskOutOfBounds, WrongFeatureKind
from satforge.features import CannyParams, FeatureImage, extract_cfi
from satforge.imaging import Scene, Tile, TileGrid, composite_tile, save_scene
from satforge.masks import RemovalMask, rasterize_mask
from satforge.translator.checkpoint import TranslatorCheckpoint, translate


@dataclass
class ForgedResult:
    forged_scene: Scene
    edited_cfi: FeatureImage
    output_tile: Tile
    mask: RemovalMask
    checkpoint_id: str
    created_at: str

    def persist(self, directory: str | Path) -> Path:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        save_scene(self.forged_scene, d / "forged.png")
        self.edited_cfi.save(d / "edited_cfi.png")
        from PIL import Image

        Image.fromarray(self.output_tile.pixels, mode="RGB").save(d / "output_tile.png")
        self.mask.save(d / "mask.json")
        meta = {
            "scene_id": self.forged_scene.id,
            "provenance": self.forged_scene.provenance,
            "checkpoint_id": self.checkpoint_id,
            "tile": list(self.mask.tile_coord),
            "created_at": self.created_at,
        }
        (d / "meta.json").write_text(json.dumps(meta, indent=2))
        return d


def erase_edges(cfi: FeatureImage, mask: RemovalMask) -> FeatureImage:
    """Zero every CFI pixel inside the mask region; all others unchanged."""
    if cfi.kind != "CFI":
        raise WrongFeatureKind(f"expected CFI, got {cfi.kind}")
    region = rasterize_mask(mask, cfi.tile_size)
    out = cfi.data.copy()
    out[region] = 0
    return FeatureImage(kind="CFI", data=out, params=cfi.params)


def _check_checkpoint(checkpoint: TranslatorCheckpoint, grid: TileGrid, canny_params: CannyParams) -> None:
    if checkpoint.tile_size != grid.tile_size:
        raise CheckpointMismatch(
            f"checkpoint tile_size {checkpoint.tile_size} != grid tile_size {grid.tile_size}"
        )
    recorded = checkpoint.provenance.get("canny_params")
    if recorded is not None and recorded != canny_params.to_json():
        raise CheckpointMismatch(
            "canny params disagree with checkpoint provenance",
            recorded=recorded, requested=canny_params.to_json(),
        )


def remove_object(
    scene: Scene,
    grid: TileGrid,
    mask: RemovalMask,
    checkpoint: TranslatorCheckpoint,
    canny_params: CannyParams | None = None,
    checkpoint_id: str = "",
) -> ForgedResult:
    """Full removal: extract_cfi -> erase_edges -> translate -> composite.

    Deterministic for identical inputs; the forged scene differs from the
    source only inside the target tile footprint.
    """
    canny_params = canny_params or CannyParams()
    r, c = mask.tile_coord
    if not (0 <= r < grid.rows and 0 <= c < grid.cols):
        raise MaskOutOfBounds(f"tile {mask.tile_coord} outside {grid.rows}x{grid.cols} grid")
    _check_checkpoint(checkpoint, grid, canny_params)

    tile = grid.tile_at(r, c)
    cfi = extract_cfi(tile, canny_params)
    edited = erase_edges(cfi, mask)
    out_tile = translate(checkpoint, edited, coord=(r, c))
    forged = composite_tile(scene, (r, c), out_tile)
    return ForgedResult(
        forged_scene=forged,
        edited_cfi=edited,
        output_tile=out_tile,
        mask=mask,
        checkpoint_id=checkpoint_id,
        created_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )


def reconstruction_baseline(
    scene: Scene,
    grid: TileGrid,
    tile_coord: tuple[int, int],
    checkpoint: TranslatorCheckpoint,
    canny_params: CannyParams | None = None,
) -> Tile:
    """Translate a tile's unedited CFI: isolates translator error from the
    removal effect when attributing degradation."""
    canny_params = canny_params or CannyParams()
    _check_checkpoint(checkpoint, grid, canny_params)
    tile = grid.tile_at(*tile_coord)
    cfi = extract_cfi(tile, canny_params)
    return translate(checkpoint, cfi, coord=tile_coord)
