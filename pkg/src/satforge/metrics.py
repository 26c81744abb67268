"""Image similarity scoring: MSE, PSNR, SSIM and degradation reports.

MSE conventions:
  unit      mean squared difference on [0, 1]-scaled pixels
  eight_bit mean squared difference on [0, 255]-scaled pixels
  reported  eight_bit / 255 (equivalently unit * 255) — the scale under
            which the reference comparison table's MSE and PSNR columns
            are mutually consistent (PSNR = 10*log10(255 / MSE_reported))

PSNR uses MAX = 255 and a 100 dB sentinel for identical rasters so
reports stay finite and serializable.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from satforge.errors import ShapeMismatch, WindowTooLarge
from satforge.features import grayscale

PSNR_CAP_DB = 100.0

MSE_CONVENTIONS = ("unit", "eight_bit", "reported")

# Printed values from the reference CFI-vs-SFI comparison table
# (metric x {CFI, SFI} x columns A-D), kept as fixture data for the
# consistency suite and for report formatting.
TABLE1 = {
    "MSE": {
        "CFI": {"A": 0.129, "B": 0.085, "C": 0.248, "D": 0.253},
        "SFI": {"A": 0.137, "B": 0.163, "C": 0.132, "D": 0.135},
    },
    "PSNR": {
        "CFI": {"A": 32.95, "B": 34.73, "C": 30.10, "D": 30.02},
        "SFI": {"A": 32.69, "B": 31.93, "C": 32.84, "D": 32.7},
    },
    "SSIM": {
        "CFI": {"A": 0.844, "B": 0.92, "C": 0.69, "D": 0.66},
        "SFI": {"A": 0.901, "B": 0.83, "C": 0.887, "D": 0.87},
    },
}


@dataclass
class SimilarityReport:
    mse_unit: float
    mse_reported: float
    psnr_db: float
    ssim: float
    region: str  # full_image | tile | masked_region

    def to_json(self) -> dict:
        return {
            "mse_unit": self.mse_unit,
            "mse_reported": self.mse_reported,
            "psnr_db": self.psnr_db,
            "ssim": self.ssim,
            "region": self.region,
        }


def _check_shapes(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ShapeMismatch(f"shape {a.shape} != {b.shape}")


def _mse_eight_bit(a: np.ndarray, b: np.ndarray) -> float:
    d = a.astype(np.float64) - b.astype(np.float64)
    return float(np.mean(d * d))


def mse(a: np.ndarray, b: np.ndarray, convention: str = "unit") -> float:
    """Mean squared error between 8-bit rasters under a named convention."""
    _check_shapes(a, b)
    if convention not in MSE_CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    m8 = _mse_eight_bit(a, b)
    if convention == "eight_bit":
        return m8
    if convention == "unit":
        return m8 / (255.0 * 255.0)
    return m8 / 255.0


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB; identical rasters return the cap."""
    _check_shapes(a, b)
    m8 = _mse_eight_bit(a, b)
    if m8 == 0.0:
        return PSNR_CAP_DB
    return 10.0 * math.log10(255.0 * 255.0 / m8)


def ssim(
    a: np.ndarray,
    b: np.ndarray,
    window: int = 11,
    sigma: float = 1.5,
    c1: float = 0.01 ** 2,
    c2: float = 0.03 ** 2,
) -> float:
    """Mean local SSIM over Gaussian-weighted sliding windows.

    Inputs are grayscale-converted and scaled to [0, 1]; the stabilizing
    constants c1/c2 live on that scale. Border windows are cropped so
    every window sees only real pixels.
    """
    _check_shapes(a, b)
    if a.ndim == 3:
        a = grayscale(a)
        b = grayscale(b)
    h, w = a.shape
    if min(h, w) < window:
        raise WindowTooLarge(f"window {window} exceeds raster {h}x{w}")

    x = a.astype(np.float64) / 255.0
    y = b.astype(np.float64) / 255.0
    r = (window - 1) // 2
    g1 = np.exp(-(np.arange(-r, r + 1, dtype=np.float64) ** 2) / (2 * sigma * sigma))
    win = np.outer(g1, g1)
    win /= win.sum()

    def f(img):
        return ndimage.correlate(img, win, mode="constant")[r:h - r, r:w - r]

    mu_x = f(x)
    mu_y = f(y)
    s_xx = f(x * x) - mu_x * mu_x
    s_yy = f(y * y) - mu_y * mu_y
    s_xy = f(x * y) - mu_x * mu_y

    num = (2 * mu_x * mu_y + c1) * (2 * s_xy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (s_xx + s_yy + c2)
    return float(np.mean(num / den))


def _region_slice(region, shape) -> tuple:
    """Resolve a region spec into (kind, bool-mask or slices)."""
    if region == "full_image" or region is None:
        return "full_image", None
    kind = region[0]
    if kind == "tile":
        (r, c), ts = region[1], region[2]
        ys = slice(r * ts, min((r + 1) * ts, shape[0]))
        xs = slice(c * ts, min((c + 1) * ts, shape[1]))
        return "tile", (ys, xs)
    if kind == "masked_region":
        return "masked_region", np.asarray(region[1], dtype=bool)
    raise ValueError(f"unknown region spec {region!r}")


def degradation_report(ground_truth, forged, region="full_image") -> SimilarityReport:
    """All three metrics over a region of the scene pair.

    ``region`` is "full_image", ("tile", (row, col), tile_size) or
    ("masked_region", bool_mask). For masked regions, MSE/PSNR use the
    masked pixels and SSIM uses the mask's bounding box.
    """
    a = ground_truth.pixels if hasattr(ground_truth, "pixels") else np.asarray(ground_truth)
    b = forged.pixels if hasattr(forged, "pixels") else np.asarray(forged)
    _check_shapes(a, b)

    kind, sel = _region_slice(region, a.shape)
    if kind == "full_image":
        ra, rb = a, b
        sa, sb = a, b
    elif kind == "tile":
        ra = a[sel]
        rb = b[sel]
        sa, sb = ra, rb
    else:
        ra = a[sel]
        rb = b[sel]
        ys, xs = np.nonzero(sel)
        box = (slice(ys.min(), ys.max() + 1), slice(xs.min(), xs.max() + 1))
        sa, sb = a[box], b[box]

    m8 = _mse_eight_bit(ra, rb)
    psnr_db = PSNR_CAP_DB if m8 == 0 else 10.0 * math.log10(255.0 * 255.0 / m8)
    try:
        s = ssim(sa, sb)
    except WindowTooLarge:
        s = float("nan")
    return SimilarityReport(
        mse_unit=m8 / 255.0 ** 2,
        mse_reported=m8 / 255.0,
        psnr_db=psnr_db,
        ssim=s,
        region=kind,
    )


def table1_consistency() -> list[dict]:
    """Check every printed (MSE, PSNR) pair of the fixture table against
    PSNR = 10*log10(255 / MSE_reported); returns one row per pair."""
    rows = []
    for fam in ("CFI", "SFI"):
        for col in "ABCD":
            m = TABLE1["MSE"][fam][col]
            p = TABLE1["PSNR"][fam][col]
            computed = 10.0 * math.log10(255.0 / m)
            rows.append({
                "family": fam,
                "column": col,
                "mse_reported": m,
                "psnr_printed": p,
                "psnr_computed": computed,
                "delta_db": abs(computed - p),
            })
    return rows


def reports_to_csv(reports: dict) -> str:
    """Serialize {metric: {family: {column: value}}} in the comparison
    table's layout (metric x {CFI, SFI} x columns)."""
    cols = sorted({c for fams in reports.values() for vals in fams.values() for c in vals})
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["metric", "family", *cols])
    for metric, fams in reports.items():
        for fam, vals in fams.items():
            writer.writerow([metric, fam, *[vals.get(c, "") for c in cols]])
    return buf.getvalue()


def report_to_json(report: SimilarityReport) -> str:
    return json.dumps(report.to_json(), indent=2)
