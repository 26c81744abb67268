import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner
from PIL import Image

from satforge.cli import main
from satforge.features import CannyParams, extract_cfi
from satforge.imaging import Tile, load_scene, slice_tiles
from tests.conftest import make_scene, textured_background


@pytest.fixture
def runner():
    return CliRunner()


def write_scene(path, h=512, w=512, seed=0):
    scene = make_scene(h, w, seed=seed)
    Image.fromarray(scene.pixels).save(path)
    return scene


class TestSlice:
    def test_512_scene_yields_four_tiles_and_grid_meta(self, runner, tmp_path):
        write_scene(tmp_path / "scene.png")
        out = tmp_path / "grid"
        result = runner.invoke(main, ["slice", "--in", str(tmp_path / "scene.png"), "--tile", "256", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output) == {"rows": 2, "cols": 2, "tiles": 4}
        assert sorted(p.name for p in out.glob("*.png")) == [
            "tile_0_0.png", "tile_0_1.png", "tile_1_0.png", "tile_1_1.png",
        ]
        meta = json.loads((out / "grid.json").read_text())
        assert meta["tile_size"] == 256

    def test_cli_tiles_match_library_bytes(self, runner, tmp_path):
        scene = write_scene(tmp_path / "scene.png", 300, 300, seed=3)
        out = tmp_path / "grid"
        runner.invoke(main, ["slice", "--in", str(tmp_path / "scene.png"), "--tile", "256", "--out", str(out)], catch_exceptions=False)
        grid = slice_tiles(load_scene(tmp_path / "scene.png"), tile_size=256)
        for t in grid.tiles:
            on_disk = np.asarray(Image.open(out / f"tile_{t.grid_coord[0]}_{t.grid_coord[1]}.png"))
            assert np.array_equal(on_disk, t.pixels)

    def test_missing_file_is_operation_error(self, runner, tmp_path):
        result = runner.invoke(main, ["slice", "--in", str(tmp_path / "nope.png"), "--out", str(tmp_path / "o")])
        assert result.exit_code == 1
        err = json.loads(result.stderr)
        assert err["code"] == "unreadable_file"

    def test_missing_required_flag_is_usage_error(self, runner):
        result = runner.invoke(main, ["slice", "--out", "x"])
        assert result.exit_code == 2


class TestExtractCfi:
    def test_matches_library_output(self, runner, tmp_path):
        px = textured_background(128, seed=1)
        Image.fromarray(px).save(tmp_path / "tile.png")
        result = runner.invoke(main, [
            "extract-cfi", "--in", str(tmp_path / "tile.png"), "--out", str(tmp_path / "cfi.png"),
        ])
        assert result.exit_code == 0, result.output
        tile = Tile(grid_coord=(0, 0), pixels=px, valid_region=(128, 128))
        expected = extract_cfi(tile, CannyParams())
        on_disk = np.asarray(Image.open(tmp_path / "cfi.png"))
        assert np.array_equal(on_disk, expected.data)
        assert json.loads(result.output)["edge_pixels"] == int(np.count_nonzero(expected.data))


class TestRenderSfi:
    def test_polygon_json_to_label_map(self, runner, tmp_path):
        ann = [{"class_id": 3, "vertices": [[10, 10], [40, 10], [40, 40], [10, 40]]}]
        (tmp_path / "ann.json").write_text(json.dumps(ann))
        result = runner.invoke(main, [
            "render-sfi", "--annotations", str(tmp_path / "ann.json"),
            "--tile", "64", "--out", str(tmp_path / "sfi.png"),
        ])
        assert result.exit_code == 0, result.output
        sfi = np.asarray(Image.open(tmp_path / "sfi.png"))
        assert set(np.unique(sfi)) == {0, 3}
        assert json.loads(result.output)["labelled_pixels"] == int(np.count_nonzero(sfi))


class TestMetrics:
    def test_identical_images_report_zero_error(self, runner, tmp_path):
        write_scene(tmp_path / "x.png", 64, 64)
        result = runner.invoke(main, ["metrics", "--a", str(tmp_path / "x.png"), "--b", str(tmp_path / "x.png")])
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report["mse_reported"] == 0
        assert report["psnr_db"] == 100.0
        assert report["ssim"] == pytest.approx(1.0, abs=1e-9)

    def test_shape_mismatch_is_operation_error(self, runner, tmp_path):
        write_scene(tmp_path / "a.png", 64, 64)
        write_scene(tmp_path / "b.png", 32, 32)
        result = runner.invoke(main, ["metrics", "--a", str(tmp_path / "a.png"), "--b", str(tmp_path / "b.png")])
        assert result.exit_code == 1
        assert json.loads(result.stderr)["code"] == "shape_mismatch"


@pytest.fixture(scope="module")
def trained_workspace(tmp_path_factory):
    """A small scene and a toy checkpoint trained on it via the CLI."""
    root = tmp_path_factory.mktemp("cli_train")
    px = textured_background(64, seed=2)
    scene = np.concatenate([np.concatenate([px, px], axis=1)] * 1, axis=0)  # 64 x 128
    Image.fromarray(scene).save(root / "scene.png")
    runner = CliRunner()
    result = runner.invoke(main, [
        "train", "--scene", str(root / "scene.png"), "--tile", "64",
        "--steps", "25", "--family", "coarse_to_fine", "--base-channels", "4",
        "--depth", "1", "--seed", "0", "--out", str(root / "ckpt"),
    ], catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return root


class TestTrainRemoveBaseline:
    def test_train_writes_checkpoint_and_loss_log(self, trained_workspace):
        ckpt = trained_workspace / "ckpt"
        assert (ckpt / "weights.pt").is_file()
        assert (ckpt / "meta.json").is_file()
        lines = (ckpt / "losses.csv").read_text().strip().splitlines()
        assert lines[0] == "step,d_loss,g_adv,g_fm,g_l1"
        assert len(lines) == 1 + 25

    def test_remove_changes_only_masked_tile(self, trained_workspace, tmp_path, runner):
        mask = {"shape": "rectangle", "geometry": [8, 8, 30, 30], "tile": [0, 1]}
        (tmp_path / "mask.json").write_text(json.dumps(mask))
        result = runner.invoke(main, [
            "remove", "--scene", str(trained_workspace / "scene.png"),
            "--mask", str(tmp_path / "mask.json"), "--ckpt", str(trained_workspace / "ckpt"),
            "--tile", "64", "--out", str(tmp_path / "forged"),
        ])
        assert result.exit_code == 0, result.stderr if result.exit_code else result.output
        original = np.asarray(Image.open(trained_workspace / "scene.png"))
        forged = np.asarray(Image.open(tmp_path / "forged" / "forged.png"))
        assert forged.shape == original.shape
        # locality: left tile untouched, right tile is the translated output
        assert np.array_equal(forged[:, :64], original[:, :64])
        assert not np.array_equal(forged[:, 64:], original[:, 64:])

    def test_baseline_written(self, trained_workspace, tmp_path, runner):
        result = runner.invoke(main, [
            "baseline", "--scene", str(trained_workspace / "scene.png"),
            "--ckpt", str(trained_workspace / "ckpt"), "--row", "0", "--col", "0",
            "--tile", "64", "--out", str(tmp_path / "baseline.png"),
        ])
        assert result.exit_code == 0, result.output
        img = np.asarray(Image.open(tmp_path / "baseline.png"))
        assert img.shape == (64, 64, 3)

    def test_checkpoint_mismatch_reported(self, trained_workspace, tmp_path, runner):
        mask = {"shape": "rectangle", "geometry": [0, 0, 5, 5], "tile": [0, 0]}
        (tmp_path / "mask.json").write_text(json.dumps(mask))
        result = runner.invoke(main, [
            "remove", "--scene", str(trained_workspace / "scene.png"),
            "--mask", str(tmp_path / "mask.json"), "--ckpt", str(trained_workspace / "ckpt"),
            "--tile", "32", "--out", str(tmp_path / "f"),
        ])
        assert result.exit_code == 1
        assert json.loads(result.stderr)["code"] == "checkpoint_mismatch"


class TestDatasetCommands:
    def _pools(self, tmp_path):
        for d, label, n in ((tmp_path / "forged", "forged", 6), (tmp_path / "pristine", "pristine", 8)):
            d.mkdir()
            (d / "meta.json").write_text("{}")
            for i in range(n):
                Image.fromarray(np.zeros((8, 8, 3), dtype=np.uint8)).save(d / f"{label}_{i}.png")
        return tmp_path / "forged", tmp_path / "pristine"

    def test_build_then_validate(self, runner, tmp_path):
        forged, pristine = self._pools(tmp_path)
        manifest = tmp_path / "manifest.json"
        result = runner.invoke(main, [
            "dataset", "build", "--forged-dir", str(forged), "--pristine-dir", str(pristine),
            "--seed", "0", "--out", str(manifest),
        ])
        assert result.exit_code == 0, result.output
        counts = json.loads(result.output)
        assert counts["train"]["forged"] + counts["validation"]["forged"] == 6

        result = runner.invoke(main, ["dataset", "validate", "--manifest", str(manifest)])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["ok"] is True

    def test_validate_fails_on_missing_files(self, runner, tmp_path):
        manifest = {
            "name": "bad", "schema_version": 1,
            "splits": {"train": [{"image_path": str(tmp_path / "ghost.png"), "label": "pristine", "provenance": None}]},
        }
        p = tmp_path / "manifest.json"
        p.write_text(json.dumps({**manifest, "counts": {}}))
        result = runner.invoke(main, ["dataset", "validate", "--manifest", str(p)])
        assert result.exit_code == 1
        assert json.loads(result.output)["ok"] is False


class TestScoreAndProject:
    def test_score_objects_stub(self, runner, tmp_path):
        registry = {"img1": [
            {"label": "Airplane", "removed": False},
            {"label": "Vehicle", "removed": True},
        ]}
        (tmp_path / "reg.json").write_text(json.dumps(registry))
        result = runner.invoke(main, [
            "score-objects", "--registry", str(tmp_path / "reg.json"), "--image-id", "img1",
        ])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output) == [{"label": "Airplane", "confidence": 99.0}]

    def test_project_writes_points(self, runner, tmp_path):
        img_dir = tmp_path / "imgs"
        img_dir.mkdir()
        rng = np.random.default_rng(0)
        for i in range(4):
            Image.fromarray(rng.integers(0, 60, (16, 16, 3), dtype=np.uint8)).save(img_dir / f"pristine_{i}.png")
            Image.fromarray(rng.integers(180, 255, (16, 16, 3), dtype=np.uint8)).save(img_dir / f"forged_{i}.png")
        result = runner.invoke(main, [
            "project", "--images", str(img_dir), "--out", str(tmp_path / "proj.json"),
            "--plot", str(tmp_path / "proj.png"),
        ])
        assert result.exit_code == 0, result.output
        data = json.loads((tmp_path / "proj.json").read_text())
        assert len(data["points"]) == 8
        assert sorted(set(data["labels"])) == ["forged", "pristine"]
        assert (tmp_path / "proj.png").stat().st_size > 0
