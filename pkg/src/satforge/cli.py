"""Batch command line covering every pipeline stage.

Each subcommand is a thin veneer over one library operation; results are
written to disk and/or printed as JSON on stdout. Operation failures print
a machine-readable {code, message, details} object on stderr and exit 1;
usage errors exit 2 (click's convention).
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from satforge import errors
from satforge.features import CannyParams, PolygonAnnotation, extract_cfi, batch_extract, render_sfi
from satforge.imaging import Scene, Tile, load_scene, save_scene, slice_tiles
from satforge.masks import RemovalMask
from satforge.metrics import degradation_report
from satforge.removal import remove_object, reconstruction_baseline
from satforge.translator import (
    DiscriminatorSpec,
    GeneratorSpec,
    TrainConfig,
    TranslatorCheckpoint,
    train_translator,
)


def _fail(exc: Exception) -> None:
    if isinstance(exc, errors.SatforgeError):
        payload = exc.to_json()
    else:
        payload = {"code": type(exc).__name__, "message": str(exc), "details": {}}
    click.echo(json.dumps(payload), err=True)
    sys.exit(1)


def operation(fn):
    """Convert library exceptions into error JSON + exit code 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except Exception as exc:  # noqa: BLE001 - the CLI boundary
            _fail(exc)

    return wrapper


def _save_tile_png(tile: Tile, path: Path) -> None:
    from PIL import Image

    Image.fromarray(tile.pixels, mode="RGB").save(path)


def _canny_options(fn):
    fn = click.option("--sigma", default=1.4, show_default=True, help="Gaussian smoothing sigma.")(fn)
    fn = click.option("--low", default=50.0, show_default=True, help="Weak-edge threshold.")(fn)
    fn = click.option("--high", default=150.0, show_default=True, help="Strong-edge threshold.")(fn)
    return fn


def _params(sigma, low, high) -> CannyParams:
    return CannyParams(gaussian_sigma=sigma, low_threshold=low, high_threshold=high)


@click.group()
def main():
    """Object-removal workbench for high-resolution satellite imagery."""


@main.command("slice")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--tile", "tile_size", default=256, show_default=True)
@click.option("--pad", default="reflect", type=click.Choice(["reflect", "zero"]), show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@operation
def slice_cmd(in_path, tile_size, pad, out_dir):
    """Slice a scene into tiles; writes tile_R_C.png files plus grid.json."""
    scene = load_scene(in_path)
    grid = slice_tiles(scene, tile_size=tile_size, pad_policy=pad)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for t in grid.tiles:
        r, c = t.grid_coord
        _save_tile_png(t, out / f"tile_{r}_{c}.png")
    grid.save_meta(out / "grid.json")
    click.echo(json.dumps({"rows": grid.rows, "cols": grid.cols, "tiles": len(grid.tiles)}))


@main.command("extract-cfi")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@_canny_options
@operation
def extract_cfi_cmd(in_path, out_path, sigma, low, high):
    """Canny feature image of one tile PNG."""
    scene = load_scene(in_path)
    tile = Tile(grid_coord=(0, 0), pixels=scene.pixels, valid_region=(scene.height, scene.width))
    cfi = extract_cfi(tile, _params(sigma, low, high))
    cfi.save(out_path)
    click.echo(json.dumps({"edge_pixels": int(np.count_nonzero(cfi.data))}))


@main.command("render-sfi")
@click.option("--annotations", "ann_path", required=True, type=click.Path(),
              help="JSON list of {class_id, vertices} polygons in scene coordinates.")
@click.option("--row", default=0, show_default=True)
@click.option("--col", default=0, show_default=True)
@click.option("--tile", "tile_size", default=256, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@operation
def render_sfi_cmd(ann_path, row, col, tile_size, out_path):
    """Segmented feature image for one tile from polygon annotations."""
    records = json.loads(Path(ann_path).read_text())
    anns = [PolygonAnnotation(class_id=r["class_id"], vertices=[tuple(v) for v in r["vertices"]]) for r in records]
    sfi = render_sfi(anns, (row, col), tile_size)
    sfi.save(out_path)
    click.echo(json.dumps({"labelled_pixels": int(np.count_nonzero(sfi.data))}))


@main.command("train")
@click.option("--scene", "scene_path", required=True, type=click.Path())
@click.option("--tile", "tile_size", default=256, show_default=True)
@click.option("--steps", default=2000, show_default=True)
@click.option("--family", default="coarse_to_fine", type=click.Choice(["unet_skip", "coarse_to_fine"]), show_default=True)
@click.option("--base-channels", default=64, show_default=True)
@click.option("--depth", default=3, show_default=True)
@click.option("--local-enhancer/--no-local-enhancer", default=False, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@_canny_options
@operation
def train_cmd(scene_path, tile_size, steps, family, base_channels, depth, local_enhancer, seed, out_dir, sigma, low, high):
    """One-shot training on a single scene's tiles; writes a checkpoint."""
    params = _params(sigma, low, high)
    scene = load_scene(scene_path)
    grid = slice_tiles(scene, tile_size=tile_size)
    pairs = [(cfi, tile) for tile, cfi in batch_extract(grid, params)]
    g_spec = GeneratorSpec(family=family, base_channels=base_channels, depth=depth, has_local_enhancer=local_enhancer)
    config = TrainConfig(steps=steps, seed=seed)
    ckpt = train_translator(
        pairs, g_spec, DiscriminatorSpec(), config,
        provenance={"scene_id": scene.id, "canny_params": params.to_json()},
    )
    ckpt.save(out_dir)
    with open(Path(out_dir) / "losses.csv", "w") as fh:
        fh.write("step,d_loss,g_adv,g_fm,g_l1\n")
        fh.writelines(",".join(str(v) for v in row) + "\n" for row in ckpt.loss_log)
    click.echo(json.dumps({"checkpoint": str(out_dir), "loss_summary": ckpt.loss_summary}))


@main.command("remove")
@click.option("--scene", "scene_path", required=True, type=click.Path())
@click.option("--mask", "mask_path", required=True, type=click.Path())
@click.option("--ckpt", "ckpt_dir", required=True, type=click.Path())
@click.option("--tile", "tile_size", default=256, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@_canny_options
@operation
def remove_cmd(scene_path, mask_path, ckpt_dir, tile_size, out_dir, sigma, low, high):
    """Erase edges under a mask and re-translate; writes a ForgedResult directory."""
    scene = load_scene(scene_path)
    grid = slice_tiles(scene, tile_size=tile_size)
    mask = RemovalMask.load(mask_path)
    ckpt = TranslatorCheckpoint.load(ckpt_dir)
    result = remove_object(scene, grid, mask, ckpt, _params(sigma, low, high), checkpoint_id=Path(ckpt_dir).name)
    result.persist(out_dir)
    click.echo(json.dumps({"out": str(out_dir), "tile": list(mask.tile_coord)}))


@main.command("baseline")
@click.option("--scene", "scene_path", required=True, type=click.Path())
@click.option("--ckpt", "ckpt_dir", required=True, type=click.Path())
@click.option("--row", required=True, type=int)
@click.option("--col", required=True, type=int)
@click.option("--tile", "tile_size", default=256, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@_canny_options
@operation
def baseline_cmd(scene_path, ckpt_dir, row, col, tile_size, out_path, sigma, low, high):
    """Re-translate a tile's unedited CFI (translator-error baseline)."""
    scene = load_scene(scene_path)
    grid = slice_tiles(scene, tile_size=tile_size)
    ckpt = TranslatorCheckpoint.load(ckpt_dir)
    tile = reconstruction_baseline(scene, grid, (row, col), ckpt, _params(sigma, low, high))
    _save_tile_png(tile, Path(out_path))
    click.echo(json.dumps({"out": str(out_path)}))


@main.command("metrics")
@click.option("--a", "a_path", required=True, type=click.Path())
@click.option("--b", "b_path", required=True, type=click.Path())
@click.option("--out", "out_path", type=click.Path(), default=None)
@operation
def metrics_cmd(a_path, b_path, out_path):
    """MSE / PSNR / SSIM between two images of identical size."""
    a = load_scene(a_path)
    b = load_scene(b_path)
    report = degradation_report(a, b)
    text = json.dumps(report.to_json(), indent=2)
    if out_path:
        Path(out_path).write_text(text)
    click.echo(text)


@main.group()
def dataset():
    """Forged-dataset construction and validation."""


@dataset.command("build")
@click.option("--forged-dir", required=True, type=click.Path(), help="Directory of already-forged images.")
@click.option("--pristine-dir", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True)
@click.option("--name", default="forged-dataset", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@operation
def dataset_build_cmd(forged_dir, pristine_dir, seed, name, out_path):
    """Stratified seeded split of materialized forged/pristine pools."""
    from satforge.dataset import assemble_manifest

    def pool(d, label):
        paths = sorted(p for p in Path(d).iterdir() if p.suffix.lower() in (".png", ".jpg", ".jpeg", ".tif"))
        prov = str(Path(d) / "meta.json") if label == "forged" and (Path(d) / "meta.json").is_file() else None
        return [{"image_path": str(p), "label": label, "provenance": prov} for p in paths]

    manifest = assemble_manifest(pool(forged_dir, "forged"), pool(pristine_dir, "pristine"), seed=seed, name=name)
    manifest.save(out_path)
    click.echo(json.dumps(manifest.counts()))


@dataset.command("validate")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@operation
def dataset_validate_cmd(manifest_path):
    from satforge.dataset import DatasetManifest, validate_manifest

    report = validate_manifest(DatasetManifest.load(manifest_path))
    click.echo(json.dumps(report, indent=2))
    if not report["ok"]:
        sys.exit(1)


@main.group()
def detector():
    """Forged-image detector training and evaluation."""


@detector.command("train")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--kind", default="binary_cnn", type=click.Choice(["binary_cnn", "finetune_pretrained"]), show_default=True)
@click.option("--epochs", default=100, show_default=True)
@click.option("--lr", default=0.001, show_default=True)
@click.option("--input-size", default=256, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@operation
def detector_train_cmd(manifest_path, kind, epochs, lr, input_size, seed, out_dir):
    from satforge.dataset import DatasetManifest
    from satforge.forensics import DetectorConfig, train_detector

    manifest = DatasetManifest.load(manifest_path)
    config = DetectorConfig(kind=kind, epochs=epochs, learning_rate=lr, input_size=input_size, seed=seed)
    handle = train_detector(manifest, config)
    handle.save(out_dir)
    final = handle.history[-1]
    click.echo(json.dumps({"out": str(out_dir), "final_epoch": final[0], "loss": final[1], "accuracy": final[2]}))


@detector.command("eval")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--kind", "kinds", multiple=True, default=("binary_cnn",), show_default=True)
@click.option("--epochs", default=100, show_default=True)
@click.option("--input-size", default=256, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@operation
def detector_eval_cmd(manifest_path, kinds, epochs, input_size, out_dir):
    """Train each kind and write ROC JSON + plot per kind."""
    from satforge.dataset import DatasetManifest
    from satforge.forensics import DetectorConfig, evaluate_detectors

    manifest = DatasetManifest.load(manifest_path)
    configs = [DetectorConfig(kind=k, epochs=epochs, input_size=input_size) for k in kinds]
    reports = evaluate_detectors(manifest, configs)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for kind, report in reports.items():
        report.save(out / f"roc_{kind}.json")
        report.plot(out / f"roc_{kind}.png", label=kind)
        summary[kind] = report.auc
    click.echo(json.dumps({"auc": summary}))


@main.command("score-objects")
@click.option("--registry", "registry_path", required=True, type=click.Path(),
              help="JSON {image_id: [{label, removed, confidence?}]}.")
@click.option("--image-id", required=True)
@operation
def score_objects_cmd(registry_path, image_id):
    """Detection confidences from the offline stub scorer."""
    from satforge.forensics import StubScorer, score_objects

    registry = json.loads(Path(registry_path).read_text())
    scores = score_objects(None, StubScorer(registry), image_id=image_id)
    click.echo(json.dumps([{"label": s.label, "confidence": s.confidence} for s in scores]))


@main.command("project")
@click.option("--images", "images_dir", required=True, type=click.Path(),
              help="Directory of images; names containing 'forged' are labelled forged.")
@click.option("--seed", default=0, show_default=True)
@click.option("--backbone", default="histogram", type=click.Choice(["histogram", "resnet50"]), show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--plot", "plot_path", type=click.Path(), default=None)
@operation
def project_cmd(images_dir, seed, backbone, out_path, plot_path):
    """2-D embedding projection of a directory of images."""
    from PIL import Image

    from satforge.forensics import HistogramBackbone, TorchBackbone, embed_projection

    paths = sorted(p for p in Path(images_dir).iterdir() if p.suffix.lower() in (".png", ".jpg", ".jpeg"))
    images = [np.asarray(Image.open(p).convert("RGB"), dtype=np.uint8) for p in paths]
    labels = ["forged" if "forged" in p.name.lower() else "pristine" for p in paths]
    handle = HistogramBackbone() if backbone == "histogram" else TorchBackbone(seed=seed)
    proj = embed_projection(images, handle, seed=seed, labels=labels)
    proj.save(out_path)
    if plot_path:
        proj.plot(plot_path)
    click.echo(json.dumps({"points": len(images), "out": str(out_path)}))


if __name__ == "__main__":
    main()
