import json

import numpy as np
import pytest
from PIL import Image

from satforge import errors
from satforge.dataset import (
    PAPER_SPLIT_COUNTS,
    DatasetManifest,
    RemovalJobSpec,
    assemble_manifest,
    build_forged_dataset,
    ingest_isaid,
    validate_manifest,
)
from satforge.masks import RemovalMask


def make_isaid_fixture(root):
    """Two real images, one phantom, with hand-counted annotations."""
    (root / "images").mkdir()
    rng = np.random.default_rng(0)
    for name in ("P0001.png", "P0002.png"):
        arr = rng.integers(0, 255, size=(64, 64, 3), dtype=np.uint8)
        Image.fromarray(arr).save(root / "images" / name)

    coco = {
        "images": [
            {"id": 1, "file_name": "P0001.png"},
            {"id": 2, "file_name": "P0002.png"},
            {"id": 3, "file_name": "P_missing.png"},  # not on disk -> skipped
        ],
        "annotations": [
            # P0001: two planes and one vehicle (3 instances, 2 classes)
            {"image_id": 1, "category_id": 1, "segmentation": [[0, 0, 10, 0, 10, 10]]},
            {"image_id": 1, "category_id": 1, "segmentation": [[20, 20, 30, 20, 30, 30, 20, 30]]},
            {"image_id": 1, "category_id": 10, "segmentation": [[5, 40, 9, 40, 9, 44]]},
            # P0002: one plane
            {"image_id": 2, "category_id": 1, "segmentation": [[1, 1, 8, 1, 8, 8]]},
            # degenerate: fewer than 3 vertices -> skipped
            {"image_id": 2, "category_id": 1, "segmentation": [[1, 1, 8, 1]]},
            # references the phantom image -> skipped
            {"image_id": 3, "category_id": 1, "segmentation": [[0, 0, 4, 0, 4, 4]]},
        ],
    }
    (root / "annotations.json").write_text(json.dumps(coco))


class TestIngest:
    def test_hand_counted_index(self, tmp_path):
        make_isaid_fixture(tmp_path)
        index = ingest_isaid(tmp_path)
        assert set(index.images) == {"P0001", "P0002"}
        assert len(index.annotations_for("P0001")) == 3
        assert len(index.annotations_for("P0002")) == 1
        assert index.class_counts == {1: 3, 10: 1}
        # one phantom image record + one degenerate polygon + its annotation
        assert index.skipped == 3

    def test_annotation_coordinates_preserved(self, tmp_path):
        make_isaid_fixture(tmp_path)
        index = ingest_isaid(tmp_path)
        poly = index.annotations_for("P0002")[0]
        assert poly.vertices == [(1, 1), (8, 1), (8, 8)]
        assert poly.class_id == 1

    def test_empty_directory(self, tmp_path):
        with pytest.raises(errors.EmptyDirectory):
            ingest_isaid(tmp_path / "nope")
        empty = tmp_path / "empty"
        empty.mkdir()
        with pytest.raises(errors.EmptyDirectory):
            ingest_isaid(empty)

    def test_missing_annotations(self, tmp_path):
        Image.fromarray(np.zeros((8, 8, 3), dtype=np.uint8)).save(tmp_path / "img.png")
        with pytest.raises(errors.MissingAnnotations):
            ingest_isaid(tmp_path)


def fake_entries(n, label, prefix="/data"):
    return [
        {"image_path": f"{prefix}/{label}_{i:04d}.png", "label": label, "provenance": None}
        for i in range(n)
    ]


class TestAssembleManifest:
    def test_reference_split_counts_hit_exactly(self):
        manifest = assemble_manifest(fake_entries(257, "forged"), fake_entries(380, "pristine"), seed=0)
        assert manifest.counts() == PAPER_SPLIT_COUNTS

    def test_deterministic_under_seed(self):
        args = (fake_entries(257, "forged"), fake_entries(380, "pristine"))
        a = assemble_manifest(*args, seed=7)
        b = assemble_manifest(*args, seed=7)
        assert a.to_json() == b.to_json()
        c = assemble_manifest(*args, seed=8)
        assert a.splits["train"] != c.splits["train"]

    def test_no_overlap_between_splits(self):
        m = assemble_manifest(fake_entries(257, "forged"), fake_entries(380, "pristine"), seed=3)
        train = {e["image_path"] for e in m.splits["train"]}
        val = {e["image_path"] for e in m.splits["validation"]}
        assert not train & val

    def test_small_pools_scale_proportionally(self):
        m = assemble_manifest(fake_entries(20, "forged"), fake_entries(30, "pristine"), seed=0)
        counts = m.counts()
        # everything is used, ratio stays close to the reference 162:95
        assert counts["train"]["forged"] + counts["validation"]["forged"] == 20
        assert counts["train"]["pristine"] + counts["validation"]["pristine"] == 30
        assert counts["train"]["forged"] == round(20 * 162 / 257)

    def test_duplicate_entry_rejected(self):
        forged = fake_entries(5, "forged")
        forged.append(dict(forged[0]))
        with pytest.raises(errors.JobFailed):
            assemble_manifest(forged, fake_entries(5, "pristine"), seed=0)

    def test_save_load_roundtrip(self, tmp_path):
        m = assemble_manifest(fake_entries(10, "forged"), fake_entries(10, "pristine"), seed=0)
        m.save(tmp_path / "manifest.json")
        loaded = DatasetManifest.load(tmp_path / "manifest.json")
        assert loaded.splits == m.splits
        assert loaded.schema_version == m.schema_version
        m.to_csv(tmp_path / "manifest.csv")
        lines = (tmp_path / "manifest.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + 20


class TestValidateManifest:
    def _materialized(self, tmp_path, n_forged=4, n_pristine=4):
        meta = tmp_path / "meta.json"
        meta.write_text("{}")
        entries = {"forged": [], "pristine": []}
        for label, n in (("forged", n_forged), ("pristine", n_pristine)):
            for i in range(n):
                p = tmp_path / f"{label}_{i}.png"
                Image.fromarray(np.zeros((8, 8, 3), dtype=np.uint8)).save(p)
                entries[label].append({
                    "image_path": str(p),
                    "label": label,
                    "provenance": str(meta) if label == "forged" else None,
                })
        return entries

    def test_clean_manifest_validates(self, tmp_path):
        e = self._materialized(tmp_path)
        m = assemble_manifest(e["forged"], e["pristine"], seed=0)
        report = validate_manifest(m)
        assert report == {"ok": True, "violations": []}

    def test_duplicate_injection_yields_single_violation(self, tmp_path):
        e = self._materialized(tmp_path)
        m = assemble_manifest(e["forged"], e["pristine"], seed=0)
        m.splits["validation"].append(dict(m.splits["train"][-1]))
        report = validate_manifest(m)
        assert not report["ok"]
        assert [v["kind"] for v in report["violations"]] == ["duplicate_path"]

    def test_missing_file_and_bad_label_flagged(self, tmp_path):
        e = self._materialized(tmp_path, n_forged=1, n_pristine=1)
        m = assemble_manifest(e["forged"], e["pristine"], seed=0)
        m.splits["train"].append({"image_path": str(tmp_path / "ghost.png"), "label": "weird", "provenance": None})
        kinds = sorted(v["kind"] for v in validate_manifest(m)["violations"])
        # the unknown label also breaks the forged+pristine tally for its split
        assert kinds == ["bad_label", "count_mismatch", "missing_path"]

    def test_forged_without_provenance_flagged(self, tmp_path):
        e = self._materialized(tmp_path, n_forged=1, n_pristine=1)
        e["forged"][0]["provenance"] = None
        m = assemble_manifest(e["forged"], e["pristine"], seed=0)
        kinds = [v["kind"] for v in validate_manifest(m)["violations"]]
        assert kinds == ["unreachable_provenance"]


class TestBuildForgedDataset:
    def _jobs(self, n):
        mask = RemovalMask(shape="rectangle", geometry=(0, 0, 7, 7), tile_coord=(0, 0))
        return [
            RemovalJobSpec(job_id=f"job{i:02d}", source_image=f"/src/{i}.png", mask=mask, checkpoint_dir="/ckpt")
            for i in range(n)
        ]

    def test_pluggable_executor_and_failures_recorded(self, tmp_path):
        def executor(job, out_dir):
            if job.job_id == "job01":
                raise RuntimeError("synthetic failure")
            d = out_dir / job.job_id
            d.mkdir(parents=True)
            p = d / "forged.png"
            Image.fromarray(np.zeros((8, 8, 3), dtype=np.uint8)).save(p)
            (d / "meta.json").write_text("{}")
            return str(p)

        pristine = {}
        for i in range(3):
            p = tmp_path / f"pristine_{i}.png"
            Image.fromarray(np.zeros((8, 8, 3), dtype=np.uint8)).save(p)
            pristine[f"p{i}"] = p

        manifest = build_forged_dataset(self._jobs(3), pristine, tmp_path / "out", seed=0, executor=executor)
        counts = manifest.counts()
        assert counts["train"]["forged"] + counts["validation"]["forged"] == 2
        assert counts["train"]["pristine"] + counts["validation"]["pristine"] == 3
        failures = json.loads((tmp_path / "out" / "failures.json").read_text())
        assert [f["job_id"] for f in failures] == ["job01"]
        assert validate_manifest(manifest)["ok"]
