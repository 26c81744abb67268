import math

import numpy as np
import pytest

from satforge import errors
from satforge.imaging import Scene, Tile, composite_tile
from satforge.metrics import (
    PSNR_CAP_DB,
    SimilarityReport,
    degradation_report,
    mse,
    psnr,
    reports_to_csv,
    ssim,
    table1_consistency,
)
from tests.conftest import make_scene


class TestMse:
    def test_identical_zero_under_every_convention(self):
        a = make_scene(16, 16, seed=0).pixels
        for conv in ("unit", "eight_bit", "reported"):
            assert mse(a, a, conv) == 0.0

    def test_closed_form_extremes(self):
        a = np.zeros((8, 8, 3), dtype=np.uint8)
        b = np.full((8, 8, 3), 255, dtype=np.uint8)
        assert mse(a, b, "eight_bit") == 65025.0
        assert mse(a, b, "unit") == 1.0
        assert mse(a, b, "reported") == 255.0

    def test_shape_mismatch(self):
        with pytest.raises(errors.ShapeMismatch):
            mse(np.zeros((4, 4)), np.zeros((5, 5)))


class TestPsnr:
    def test_identical_cap(self):
        a = make_scene(16, 16, seed=1).pixels
        assert psnr(a, a) == PSNR_CAP_DB

    def test_uniform_one_level_difference(self):
        a = np.full((32, 32, 3), 100, dtype=np.uint8)
        b = np.full((32, 32, 3), 101, dtype=np.uint8)
        assert psnr(a, b) == pytest.approx(20 * math.log10(255), abs=1e-9)
        assert psnr(a, b) == pytest.approx(48.1308, abs=1e-3)

    def test_functional_identity_with_mse(self, rng):
        for _ in range(100):
            a = rng.integers(0, 256, size=(12, 12, 3), dtype=np.uint8)
            b = rng.integers(0, 256, size=(12, 12, 3), dtype=np.uint8)
            m8 = mse(a, b, "eight_bit")
            if m8 == 0:
                continue
            assert psnr(a, b) == pytest.approx(10 * math.log10(255 ** 2 / m8), rel=1e-12)


class TestSsim:
    def test_self_similarity_is_one(self):
        a = make_scene(32, 32, seed=2).pixels
        assert ssim(a, a) == pytest.approx(1.0, abs=1e-9)

    def test_constant_pair_closed_form(self):
        # variance terms vanish; only the luminance term remains
        a = np.full((32, 32, 3), 100, dtype=np.uint8)
        b = np.full((32, 32, 3), 150, dtype=np.uint8)
        mu_a, mu_b = 100 / 255, 150 / 255
        expected = (2 * mu_a * mu_b + 1e-4) / (mu_a ** 2 + mu_b ** 2 + 1e-4)
        assert ssim(a, b) == pytest.approx(expected, abs=1e-9)
        assert ssim(a, b) == pytest.approx(0.923, abs=1e-3)

    def test_symmetry(self, rng):
        for _ in range(5):
            a = rng.integers(0, 256, size=(24, 24, 3), dtype=np.uint8)
            b = rng.integers(0, 256, size=(24, 24, 3), dtype=np.uint8)
            assert ssim(a, b) == pytest.approx(ssim(b, a), rel=1e-12)

    def test_range(self, rng):
        for _ in range(10):
            a = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
            b = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
            assert -1.0 <= ssim(a, b) <= 1.0

    def test_constant_shift_near_invariant(self, rng):
        a = rng.integers(40, 200, size=(32, 32, 3), dtype=np.uint8)
        b = rng.integers(40, 200, size=(32, 32, 3), dtype=np.uint8)
        assert ssim(a + 10, b + 10) == pytest.approx(ssim(a, b), abs=1e-3)

    def test_window_too_large(self):
        with pytest.raises(errors.WindowTooLarge):
            ssim(np.zeros((8, 8), dtype=np.uint8), np.zeros((8, 8), dtype=np.uint8), window=11)


class TestDegradationReport:
    def test_identical_scene_perfect_values(self):
        scene = make_scene(64, 64, seed=3)
        r = degradation_report(scene, scene)
        assert r.mse_unit == 0
        assert r.psnr_db == PSNR_CAP_DB
        assert r.ssim == pytest.approx(1.0, abs=1e-9)

    def test_area_weighting_identity(self):
        scene = make_scene(128, 128, seed=4)
        new_tile = Tile(grid_coord=(0, 0),
                        pixels=np.zeros((64, 64, 3), dtype=np.uint8), valid_region=(64, 64))
        forged = composite_tile(scene, (0, 0), new_tile)
        full = degradation_report(scene, forged, "full_image")
        tile = degradation_report(scene, forged, ("tile", (0, 0), 64))
        # brute-force verified identity: full MSE = tile MSE * area fraction
        assert full.mse_unit == pytest.approx(tile.mse_unit * (64 * 64) / (128 * 128), rel=1e-12)

    def test_masked_region(self):
        scene = make_scene(64, 64, seed=5)
        other = make_scene(64, 64, seed=6)
        m = np.zeros((64, 64), dtype=bool)
        m[:32, :32] = True
        r = degradation_report(scene, other, ("masked_region", m))
        d = scene.pixels[:32, :32].astype(float) - other.pixels[:32, :32].astype(float)
        assert r.mse_unit == pytest.approx(np.mean(d * d) / 255 ** 2, rel=1e-12)
        assert r.region == "masked_region"

    def test_shape_mismatch(self):
        with pytest.raises(errors.ShapeMismatch):
            degradation_report(make_scene(8, 8), make_scene(8, 9))


class TestTableConsistency:
    def test_cfi_a_pair(self):
        rows = {(r["family"], r["column"]): r for r in table1_consistency()}
        assert rows[("CFI", "A")]["psnr_computed"] == pytest.approx(32.96, abs=0.005)
        assert rows[("CFI", "A")]["delta_db"] < 0.05

    def test_seven_of_eight_within_tolerance(self):
        # SFI/D (0.135 <-> 32.7) sits at 0.062 dB, beyond the 0.05 gate;
        # the acceptance suite asserts the strict criterion and documents
        # that single outlier.
        rows = table1_consistency()
        ok = [r for r in rows if r["delta_db"] <= 0.05]
        assert len(ok) == 7
        outlier = [r for r in rows if r["delta_db"] > 0.05]
        assert (outlier[0]["family"], outlier[0]["column"]) == ("SFI", "D")
        assert outlier[0]["delta_db"] == pytest.approx(0.0621, abs=0.001)


def test_reports_csv_layout():
    table = {"MSE": {"CFI": {"A": 0.1, "B": 0.2}, "SFI": {"A": 0.3, "B": 0.4}}}
    text = reports_to_csv(table)
    lines = text.strip().splitlines()
    assert lines[0] == "metric,family,A,B"
    assert lines[1] == "MSE,CFI,0.1,0.2"


def test_report_json_fields():
    r = SimilarityReport(mse_unit=0.1, mse_reported=25.5, psnr_db=10.0, ssim=0.5, region="tile")
    d = r.to_json()
    assert set(d) == {"mse_unit", "mse_reported", "psnr_db", "ssim", "region"}
