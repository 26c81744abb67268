"""satforge: one-shot CGAN object removal for high-resolution overhead imagery.

Pipeline: slice a scene into fixed-size tiles, condition a feature->image
translator on Canny feature images (CFI) of those tiles, erase edges in a
user-chosen region, re-translate, composite back, and evaluate the forgery
with similarity metrics, detection scoring, and forged-image detectors.
"""

from satforge import errors
from satforge.imaging import Scene, Tile, TileGrid, load_scene, save_scene, slice_tiles, stitch_tiles, composite_tile
from satforge.features import CannyParams, FeatureImage, PolygonAnnotation, extract_cfi, render_sfi, batch_extract
from satforge.masks import RemovalMask, rasterize_mask
from satforge.metrics import SimilarityReport, mse, psnr, ssim, degradation_report

__version__ = "0.1.0"

__all__ = [
    "errors",
    "Scene", "Tile", "TileGrid",
    "load_scene", "save_scene", "slice_tiles", "stitch_tiles", "composite_tile",
    "CannyParams", "FeatureImage", "PolygonAnnotation",
    "extract_cfi", "render_sfi", "batch_extract",
    "RemovalMask", "rasterize_mask",
    "SimilarityReport", "mse", "psnr", "ssim", "degradation_report",
]
