"""Pure numpy/scipy implementations of the hot kernels.

Must stay bit-identical to the Cython versions in ``_native.pyx``: the two
backends share formulas and comparison rules exactly (same IEEE double
arithmetic, same tie handling), and a parity test enforces it.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

# tan(22.5 deg): boundary between the 4 gradient-direction sectors
_T = 0.4142135623730951


def nonmax_suppress(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Keep pixels that are local maxima of |gradient| along the gradient.

    Ties keep both sides (>= against both neighbors); out-of-image
    neighbors count as zero. Returns a uint8 {0,1} mask.
    """
    mag = np.ascontiguousarray(mag, dtype=np.float64)
    h, w = mag.shape
    padded = np.zeros((h + 2, w + 2), dtype=np.float64)
    padded[1:-1, 1:-1] = mag

    def shift(dy: int, dx: int) -> np.ndarray:
        return padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]

    adx = np.abs(gx)
    ady = np.abs(gy)
    horiz = ady <= _T * adx
    vert = ~horiz & (adx <= _T * ady)
    diag = ~horiz & ~vert
    main_diag = diag & (gx * gy > 0)
    anti_diag = diag & ~main_diag

    n1 = np.zeros_like(mag)
    n2 = np.zeros_like(mag)
    for sel, (d1, d2) in (
        (horiz, ((0, -1), (0, 1))),
        (vert, ((-1, 0), (1, 0))),
        (main_diag, ((-1, -1), (1, 1))),
        (anti_diag, ((-1, 1), (1, -1))),
    ):
        n1[sel] = shift(*d1)[sel]
        n2[sel] = shift(*d2)[sel]

    keep = (mag > 0) & (mag >= n1) & (mag >= n2)
    return keep.astype(np.uint8)


def hysteresis(strong: np.ndarray, weak: np.ndarray) -> np.ndarray:
    """8-connected hysteresis: weak pixels survive when their component
    (within strong|weak) touches a strong pixel. Returns uint8 {0,1}."""
    strong = strong.astype(bool)
    candidates = strong | weak.astype(bool)
    labels, n = ndimage.label(candidates, structure=np.ones((3, 3), dtype=int))
    if n == 0:
        return np.zeros_like(strong, dtype=np.uint8)
    seeded = np.zeros(n + 1, dtype=bool)
    seeded[np.unique(labels[strong])] = True
    seeded[0] = False
    return seeded[labels].astype(np.uint8)


def rasterize_polygon(xs: np.ndarray, ys: np.ndarray, height: int, width: int) -> np.ndarray:
    """Even-odd rasterization sampled at pixel centers (x+0.5, y+0.5).

    The crossing-number formula here is the rasterization contract shared
    with the UI preview; do not change it without changing both.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    n = xs.shape[0]
    px = np.arange(width, dtype=np.float64) + 0.5
    py = np.arange(height, dtype=np.float64) + 0.5
    pxg = px[None, :]
    pyg = py[:, None]

    inside = np.zeros((height, width), dtype=bool)
    j = n - 1
    for i in range(n):
        x1, y1 = xs[i], ys[i]
        x2, y2 = xs[j], ys[j]
        crosses_row = (y1 > pyg) != (y2 > pyg)
        if np.any(crosses_row):
            with np.errstate(divide="ignore", invalid="ignore"):
                x_at = (x2 - x1) * (pyg - y1) / (y2 - y1) + x1
            inside ^= crosses_row & (pxg < x_at)
        j = i
    return inside.astype(np.uint8)
