import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from PIL import Image

from satforge import errors
from satforge.imaging import (
    Scene,
    Tile,
    composite_tile,
    load_scene,
    save_scene,
    slice_tiles,
    stitch_tiles,
)
from tests.conftest import make_scene


class TestLoadScene:
    def test_png_identity_decode(self, tmp_path):
        scene = make_scene(64, 48, seed=3)
        p = tmp_path / "x.png"
        Image.fromarray(scene.pixels).save(p)
        loaded = load_scene(p)
        assert loaded.provenance == "pristine"
        assert np.array_equal(loaded.pixels, scene.pixels)

    def test_grayscale_replicated_to_three_channels(self, tmp_path):
        rng = np.random.default_rng(0)
        gray = rng.integers(0, 256, size=(32, 32), dtype=np.uint8)
        p = tmp_path / "g.png"
        Image.fromarray(gray, mode="L").save(p)
        loaded = load_scene(p)
        # oracle: PIL's own RGB conversion of the same file
        ref = np.asarray(Image.open(p).convert("RGB"))
        assert np.array_equal(loaded.pixels, ref)
        assert np.array_equal(loaded.pixels[..., 0], loaded.pixels[..., 1])
        assert np.array_equal(loaded.pixels[..., 0], loaded.pixels[..., 2])

    def test_zero_byte_file(self, tmp_path):
        p = tmp_path / "empty.png"
        p.touch()
        with pytest.raises(errors.UnreadableFile):
            load_scene(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(errors.UnreadableFile):
            load_scene(tmp_path / "nope.png")

    def test_corrupt_file(self, tmp_path):
        p = tmp_path / "bad.png"
        p.write_bytes(b"not a png at all")
        with pytest.raises(errors.UnreadableFile):
            load_scene(p)

    def test_sixteen_bit_rescaled_with_warning(self, tmp_path):
        arr = (np.arange(16 * 16, dtype=np.uint16).reshape(16, 16) * 255)
        p = tmp_path / "deep.png"
        Image.fromarray(arr, mode="I;16").save(p)
        with pytest.warns(UserWarning):
            scene = load_scene(p)
        assert scene.pixels.dtype == np.uint8

    def test_save_roundtrip(self, tmp_path):
        scene = make_scene(20, 30, seed=9)
        save_scene(scene, tmp_path / "s.png")
        assert np.array_equal(load_scene(tmp_path / "s.png").pixels, scene.pixels)


class TestSliceTiles:
    def test_exact_division(self):
        grid = slice_tiles(make_scene(1024, 1024), tile_size=256)
        assert (grid.rows, grid.cols) == (4, 4)
        assert len(grid.tiles) == 16
        assert all(t.valid_region == (256, 256) for t in grid.tiles)

    def test_remainder_tile(self):
        # oracle: enumerate indices directly
        grid = slice_tiles(make_scene(300, 300), tile_size=256)
        assert (grid.rows, grid.cols) == (2, 2)
        assert grid.tile_at(1, 1).valid_region == (44, 44)
        assert grid.tile_at(0, 0).valid_region == (256, 256)
        assert grid.tile_at(0, 1).valid_region == (256, 44)
        assert grid.tile_at(1, 0).valid_region == (44, 256)

    def test_single_block(self):
        grid = slice_tiles(make_scene(256, 256), tile_size=256)
        assert len(grid.tiles) == 1
        assert grid.tiles[0].valid_region == (256, 256)

    def test_interior_tiles_contain_only_original_pixels(self):
        scene = make_scene(300, 300, seed=5)
        grid = slice_tiles(scene, tile_size=256)
        t = grid.tile_at(0, 0)
        assert np.array_equal(t.pixels, scene.pixels[:256, :256])

    def test_invalid_tile_size(self):
        with pytest.raises(errors.InvalidTileSize):
            slice_tiles(make_scene(64, 64), tile_size=7)

    def test_zero_pad_policy(self):
        scene = make_scene(10, 10, seed=1)
        grid = slice_tiles(scene, tile_size=8, pad_policy="zero")
        t = grid.tile_at(1, 1)
        assert np.all(t.pixels[2:, :] == 0)
        assert np.all(t.pixels[:, 2:] == 0)

    def test_no_shared_pixel_storage(self):
        scene = make_scene(16, 16, seed=2)
        grid = slice_tiles(scene, tile_size=8)
        before = grid.tile_at(0, 1).pixels.copy()
        grid.tile_at(0, 0).pixels[:] = 0
        assert np.array_equal(grid.tile_at(0, 1).pixels, before)
        assert scene.pixels.any()


class TestStitchTiles:
    @settings(max_examples=60, deadline=None)
    @given(
        h=st.integers(1, 600),
        w=st.integers(1, 600),
        pad=st.sampled_from(["reflect", "zero"]),
    )
    def test_roundtrip_bit_exact(self, h, w, pad):
        scene = make_scene(h, w, seed=h * 1000 + w)
        grid = slice_tiles(scene, tile_size=64, pad_policy=pad)
        assert np.array_equal(stitch_tiles(grid), scene.pixels)

    def test_missing_tile(self):
        grid = slice_tiles(make_scene(100, 100), tile_size=64)
        grid.tiles.pop()
        with pytest.raises(errors.InconsistentGrid):
            stitch_tiles(grid)

    def test_replaced_tile_changes_only_its_region(self):
        scene = make_scene(128, 128, seed=7)
        grid = slice_tiles(scene, tile_size=64)
        new = np.zeros((64, 64, 3), dtype=np.uint8)
        grid.tiles[3] = Tile(grid_coord=(1, 1), pixels=new, valid_region=(64, 64))
        out = stitch_tiles(grid)
        diff = np.any(out != scene.pixels, axis=2)
        assert diff[64:, 64:].sum() == np.count_nonzero(np.any(scene.pixels[64:, 64:] != 0, axis=2))
        assert not diff[:64, :].any()
        assert not diff[:, :64].any()


class TestCompositeTile:
    def test_identity_composite_is_forged_but_identical(self):
        scene = make_scene(512, 512, seed=11)
        grid = slice_tiles(scene, tile_size=256)
        out = composite_tile(scene, (0, 0), grid.tile_at(0, 0))
        assert out.provenance == "forged"
        assert np.array_equal(out.pixels, scene.pixels)

    def test_black_tile_diff_count(self):
        white = Scene(id="w", pixels=np.full((512, 512, 3), 255, dtype=np.uint8))
        black = Tile(grid_coord=(0, 0), pixels=np.zeros((256, 256, 3), dtype=np.uint8), valid_region=(256, 256))
        out = composite_tile(white, (0, 0), black)
        changed = int(np.sum(out.pixels != white.pixels))
        assert changed == 256 * 256 * 3

    def test_out_of_bounds(self):
        scene = make_scene(512, 512)
        tile = Tile(grid_coord=(9, 9), pixels=np.zeros((256, 256, 3), dtype=np.uint8), valid_region=(256, 256))
        with pytest.raises(errors.OutOfBounds):
            composite_tile(scene, (9, 9), tile)

    def test_locality_exhaustive(self):
        scene = make_scene(512, 512, seed=13)
        tile = Tile(grid_coord=(1, 0), pixels=np.full((256, 256, 3), 7, dtype=np.uint8), valid_region=(256, 256))
        out = composite_tile(scene, (1, 0), tile)
        diff = np.any(out.pixels != scene.pixels, axis=2)
        footprint = np.zeros((512, 512), dtype=bool)
        footprint[256:, :256] = True
        assert not diff[~footprint].any()

    def test_source_scene_untouched(self):
        scene = make_scene(512, 512, seed=4)
        before = scene.pixels.copy()
        tile = Tile(grid_coord=(0, 0), pixels=np.zeros((256, 256, 3), dtype=np.uint8), valid_region=(256, 256))
        composite_tile(scene, (0, 0), tile)
        assert np.array_equal(scene.pixels, before)
