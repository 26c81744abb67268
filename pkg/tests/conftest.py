import numpy as np
import pytest

from satforge.imaging import Scene


def make_scene(h, w, seed=0, scene_id="scene"):
    rng = np.random.default_rng(seed)
    return Scene(id=scene_id, pixels=rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))


def textured_background(size, seed=0):
    """Smooth low-frequency background a small generator can memorize."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    img = (
        110
        + 60 * np.sin(2 * np.pi * xx / size + rng.uniform(0, 6))
        + 45 * np.cos(2 * np.pi * yy / size + rng.uniform(0, 6))
    )
    base = np.clip(img, 0, 255).astype(np.uint8)
    return np.stack([base, np.clip(base + 15, 0, 255), np.clip(base - 10, 0, 255)], axis=2)


def paste_square(pixels, y, x, side, value=235):
    out = pixels.copy()
    out[y:y + side, x:x + side] = value
    return out


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
