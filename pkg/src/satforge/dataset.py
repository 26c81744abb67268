"""Dataset construction: annotated-imagery ingestion, batch forged-image
generation, and versioned train/validation manifests.

Manifests are JSON with a schema_version; splits are stratified by label
under a seeded shuffle so forged/pristine ratios match between train and
validation and rebuilds are deterministic.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from satforge.errors import EmptyDirectory, JobFailed, MissingAnnotations
from satforge.features import CannyParams, PolygonAnnotation
from satforge.masks import RemovalMask

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Reference split sizes used as the default target counts:
# train 162 forged / 266 pristine, validation 95 forged / 114 pristine.
PAPER_SPLIT_COUNTS = {
    "train": {"forged": 162, "pristine": 266},
    "validation": {"forged": 95, "pristine": 114},
}


@dataclass
class IsaidIndex:
    images: dict  # image id -> path
    annotations_by_image: dict  # image id -> [PolygonAnnotation, ...]
    class_counts: dict  # class_id -> instance count
    skipped: int = 0

    def annotations_for(self, image_id: str) -> list:
        return self.annotations_by_image.get(image_id, [])


@dataclass
class RemovalJobSpec:
    job_id: str
    source_image: str  # path to the source scene
    mask: RemovalMask
    checkpoint_dir: str
    canny_params: CannyParams = field(default_factory=CannyParams)
    tile_size: int = 256


@dataclass
class DatasetManifest:
    name: str
    splits: dict  # split -> [{image_path, label, provenance}, ...]
    schema_version: int = SCHEMA_VERSION

    def counts(self) -> dict:
        out = {}
        for split, entries in self.splits.items():
            out[split] = {
                "forged": sum(1 for e in entries if e["label"] == "forged"),
                "pristine": sum(1 for e in entries if e["label"] == "pristine"),
            }
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "schema_version": self.schema_version,
            "counts": self.counts(),
            "splits": self.splits,
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2))

    @classmethod
    def load(cls, path: str | Path) -> "DatasetManifest":
        d = json.loads(Path(path).read_text())
        return cls(name=d["name"], splits=d["splits"], schema_version=d["schema_version"])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["split", "image_path", "label", "provenance"])
            for split, entries in self.splits.items():
                for e in entries:
                    writer.writerow([split, e["image_path"], e["label"], e.get("provenance") or ""])


def _parse_coco_json(path: Path, root: Path, index: IsaidIndex) -> None:
    data = json.loads(path.read_text())
    id_to_name = {}
    for img in data.get("images", []):
        try:
            img_path = root / "images" / img["file_name"]
            if not img_path.is_file():
                img_path = root / img["file_name"]
            if not img_path.is_file():
                log.warning("annotation references missing image %s; skipped", img["file_name"])
                index.skipped += 1
                continue
            image_id = Path(img["file_name"]).stem
            id_to_name[img["id"]] = image_id
            index.images[image_id] = str(img_path)
        except (KeyError, TypeError):
            index.skipped += 1

    for ann in data.get("annotations", []):
        try:
            image_id = id_to_name[ann["image_id"]]
            class_id = int(ann["category_id"])
            seg = ann["segmentation"]
            polys = seg if isinstance(seg[0], list) else [seg]
            for flat in polys:
                if len(flat) < 6:
                    raise ValueError("fewer than 3 vertices")
                vertices = [(flat[i], flat[i + 1]) for i in range(0, len(flat), 2)]
                poly = PolygonAnnotation(class_id=class_id, vertices=vertices)
                index.annotations_by_image.setdefault(image_id, []).append(poly)
                index.class_counts[class_id] = index.class_counts.get(class_id, 0) + 1
        except Exception:
            index.skipped += 1


def ingest_isaid(root: str | Path) -> IsaidIndex:
    """Index iSAID-style instance-segmentation JSON plus images under root.

    Malformed records are skipped and counted, never fatal.
    """
    root = Path(root)
    if not root.is_dir() or not any(root.iterdir()):
        raise EmptyDirectory(f"{root} is missing or empty")
    json_files = sorted(root.rglob("*.json"))
    ann_files = [p for p in json_files if "annotation" in p.name.lower() or _looks_like_coco(p)]
    if not ann_files:
        raise MissingAnnotations(f"no instance-segmentation JSON found under {root}")

    index = IsaidIndex(images={}, annotations_by_image={}, class_counts={})
    for path in ann_files:
        _parse_coco_json(path, root, index)
    if index.skipped:
        log.info("ingest: skipped %d malformed/unresolvable records", index.skipped)
    return index


def _looks_like_coco(path: Path) -> bool:
    try:
        head = path.read_text()[:2000]
    except OSError:
        return False
    return '"annotations"' in head and '"images"' in head


def default_job_executor(job: RemovalJobSpec, out_dir: Path) -> str:
    """Run one removal job end to end and persist the ForgedResult;
    returns the forged image path."""
    from satforge.imaging import load_scene, slice_tiles
    from satforge.removal import remove_object
    from satforge.translator.checkpoint import TranslatorCheckpoint

    scene = load_scene(job.source_image)
    grid = slice_tiles(scene, tile_size=job.tile_size)
    checkpoint = TranslatorCheckpoint.load(job.checkpoint_dir)
    result = remove_object(scene, grid, job.mask, checkpoint, job.canny_params,
                           checkpoint_id=Path(job.checkpoint_dir).name)
    result.persist(out_dir / job.job_id)
    return str(out_dir / job.job_id / "forged.png")


def _split_stratified(entries: list, target: dict, rng: np.random.Generator) -> dict:
    """Assign entries of one label to splits; explicit counts are scaled
    proportionally when there are not enough entries."""
    order = rng.permutation(len(entries))
    shuffled = [entries[i] for i in order]
    want_train = target["train"]
    want_val = target["validation"]
    total_want = want_train + want_val
    if len(shuffled) < total_want:
        scale = len(shuffled) / total_want if total_want else 0
        want_train = int(round(want_train * scale))
        want_val = len(shuffled) - want_train
    return {
        "train": shuffled[:want_train],
        "validation": shuffled[want_train:want_train + want_val],
    }


def assemble_manifest(
    forged_entries: list,
    pristine_entries: list,
    seed: int,
    name: str = "forged-dataset",
    split_counts: dict | None = None,
) -> DatasetManifest:
    """Stratified, seeded split of already-materialized entries.

    Entries are {image_path, label, provenance}; split_counts defaults to
    the reference counts and scales down proportionally when the pools
    are smaller.
    """
    counts = split_counts or PAPER_SPLIT_COUNTS
    rng = np.random.default_rng(seed)
    forged_entries = sorted(forged_entries, key=lambda e: e["image_path"])
    pristine_entries = sorted(pristine_entries, key=lambda e: e["image_path"])

    seen = set()
    for e in forged_entries + pristine_entries:
        if e["image_path"] in seen:
            raise JobFailed(f"duplicate entry {e['image_path']}")
        seen.add(e["image_path"])

    forged_split = _split_stratified(
        forged_entries,
        {s: counts[s]["forged"] for s in ("train", "validation")},
        rng,
    )
    pristine_split = _split_stratified(
        pristine_entries,
        {s: counts[s]["pristine"] for s in ("train", "validation")},
        rng,
    )
    splits = {
        s: forged_split[s] + pristine_split[s] for s in ("train", "validation")
    }
    return DatasetManifest(name=name, splits=splits)


def build_forged_dataset(
    jobs: list[RemovalJobSpec],
    pristine_pool: dict,
    out_dir: str | Path,
    seed: int = 0,
    name: str = "forged-dataset",
    split_counts: dict | None = None,
    executor=None,
) -> DatasetManifest:
    """Execute removal jobs, then split forged + pristine into a manifest.

    Failed jobs are logged and reported, never abort the batch. The
    executor is pluggable for testing; the default runs the full removal
    pipeline.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    executor = executor or default_job_executor

    forged_entries = []
    failures = []
    for job in sorted(jobs, key=lambda j: j.job_id):
        try:
            forged_path = executor(job, out_dir)
            forged_entries.append({
                "image_path": forged_path,
                "label": "forged",
                "provenance": str(Path(forged_path).parent / "meta.json"),
            })
        except Exception as exc:
            log.warning("job %s failed: %s", job.job_id, exc)
            failures.append({"job_id": job.job_id, "error": str(exc)})

    pristine_entries = [
        {"image_path": str(path), "label": "pristine", "provenance": None}
        for path in pristine_pool.values()
    ]
    manifest = assemble_manifest(forged_entries, pristine_entries, seed, name=name, split_counts=split_counts)
    if failures:
        (out_dir / "failures.json").write_text(json.dumps(failures, indent=2))
    return manifest


def validate_manifest(manifest: DatasetManifest) -> dict:
    """Check path existence, duplicates, count consistency and forged
    provenance reachability; returns {violations: [...], ok: bool}."""
    violations = []
    seen = set()
    for split, entries in manifest.splits.items():
        for e in entries:
            p = e["image_path"]
            if p in seen:
                violations.append({"kind": "duplicate_path", "detail": p})
            seen.add(p)
            if not Path(p).is_file():
                violations.append({"kind": "missing_path", "detail": p})
            if e["label"] == "forged":
                prov = e.get("provenance")
                if not prov or not Path(prov).is_file():
                    violations.append({"kind": "unreachable_provenance", "detail": p})
            elif e["label"] != "pristine":
                violations.append({"kind": "bad_label", "detail": f"{p}: {e['label']}"})
    counts = manifest.counts()
    for split, entries in manifest.splits.items():
        tally = counts[split]["forged"] + counts[split]["pristine"]
        if tally != len(entries):
            violations.append({"kind": "count_mismatch", "detail": split})
    return {"ok": not violations, "violations": violations}
