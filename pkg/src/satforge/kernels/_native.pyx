# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython implementations of the hot kernels.

Bit-identical to ``_fallback.py``: same formulas, same comparison rules,
same IEEE double arithmetic. A parity test enforces equality.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef double _T = 0.4142135623730951  # tan(22.5 deg)


def nonmax_suppress(cnp.ndarray[cnp.float64_t, ndim=2] mag,
                    cnp.ndarray[cnp.float64_t, ndim=2] gx,
                    cnp.ndarray[cnp.float64_t, ndim=2] gy):
    cdef Py_ssize_t h = mag.shape[0]
    cdef Py_ssize_t w = mag.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((h, w), dtype=np.uint8)
    cdef Py_ssize_t y, x
    cdef double m, ax, ay, n1, n2
    cdef int dy1, dx1, dy2, dx2
    for y in range(h):
        for x in range(w):
            m = mag[y, x]
            if m <= 0:
                continue
            ax = gx[y, x]
            ay = gy[y, x]
            if ax < 0:
                ax = -ax
            if ay < 0:
                ay = -ay
            if ay <= _T * ax:
                dy1 = 0; dx1 = -1; dy2 = 0; dx2 = 1
            elif ax <= _T * ay:
                dy1 = -1; dx1 = 0; dy2 = 1; dx2 = 0
            elif gx[y, x] * gy[y, x] > 0:
                dy1 = -1; dx1 = -1; dy2 = 1; dx2 = 1
            else:
                dy1 = -1; dx1 = 1; dy2 = 1; dx2 = -1
            n1 = 0.0
            n2 = 0.0
            if 0 <= y + dy1 < h and 0 <= x + dx1 < w:
                n1 = mag[y + dy1, x + dx1]
            if 0 <= y + dy2 < h and 0 <= x + dx2 < w:
                n2 = mag[y + dy2, x + dx2]
            if m >= n1 and m >= n2:
                out[y, x] = 1
    return out


def hysteresis(cnp.ndarray strong_in, cnp.ndarray weak_in):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] strong = np.ascontiguousarray(strong_in, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] weak = np.ascontiguousarray(weak_in, dtype=np.uint8)
    cdef Py_ssize_t h = strong.shape[0]
    cdef Py_ssize_t w = strong.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((h, w), dtype=np.uint8)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] stack_y = np.empty(h * w, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] stack_x = np.empty(h * w, dtype=np.intp)
    cdef Py_ssize_t top = 0
    cdef Py_ssize_t y, x, ny, nx
    cdef int dy, dx
    for y in range(h):
        for x in range(w):
            if strong[y, x]:
                out[y, x] = 1
                stack_y[top] = y
                stack_x[top] = x
                top += 1
    while top > 0:
        top -= 1
        y = stack_y[top]
        x = stack_x[top]
        for dy in range(-1, 2):
            for dx in range(-1, 2):
                if dy == 0 and dx == 0:
                    continue
                ny = y + dy
                nx = x + dx
                if 0 <= ny < h and 0 <= nx < w:
                    if not out[ny, nx] and (weak[ny, nx] or strong[ny, nx]):
                        out[ny, nx] = 1
                        stack_y[top] = ny
                        stack_x[top] = nx
                        top += 1
    return out


def rasterize_polygon(xs_in, ys_in, Py_ssize_t height, Py_ssize_t width):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.ascontiguousarray(xs_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ys = np.ascontiguousarray(ys_in, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((height, width), dtype=np.uint8)
    cdef Py_ssize_t row, col, i, j
    cdef double px, py, x1, y1, x2, y2, x_at
    cdef bint inside
    for row in range(height):
        py = row + 0.5
        for col in range(width):
            px = col + 0.5
            inside = 0
            j = n - 1
            for i in range(n):
                x1 = xs[i]; y1 = ys[i]
                x2 = xs[j]; y2 = ys[j]
                if (y1 > py) != (y2 > py):
                    x_at = (x2 - x1) * (py - y1) / (y2 - y1) + x1
                    if px < x_at:
                        inside = not inside
                j = i
            out[row, col] = 1 if inside else 0
    return out
