"""Hot per-pixel kernels: Canny non-maximum suppression, edge hysteresis,
and even-odd polygon rasterization.

A compiled Cython extension is preferred; a numpy/scipy fallback with
bit-identical outputs is selected when the extension is missing or when
SATFORGE_PURE_PYTHON=1 is set. ``BACKEND`` records the choice.
"""

import os

if os.environ.get("SATFORGE_PURE_PYTHON") == "1":
    from satforge.kernels import _fallback as _impl

    BACKEND = "python"
else:
    try:
        from satforge.kernels import _native as _impl  # type: ignore[attr-defined]

        BACKEND = "native"
    except ImportError:
        from satforge.kernels import _fallback as _impl

        BACKEND = "python"

nonmax_suppress = _impl.nonmax_suppress
hysteresis = _impl.hysteresis
rasterize_polygon = _impl.rasterize_polygon

__all__ = ["BACKEND", "nonmax_suppress", "hysteresis", "rasterize_polygon"]
