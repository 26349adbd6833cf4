"""Minimal static SVG output: level-set contours and region overlays.

Plain paths and axes only, fixed-precision coordinates, no external
assets; output is byte-reproducible for identical inputs.
"""

from __future__ import annotations

import numpy as np
from skimage.measure import find_contours

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd",
            "#ff7f0e", "#8c564b", "#17becf", "#e377c2"]

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 60, 20, 20, 45


class _Canvas:
    def __init__(self, window):
        self.re_min, self.re_max, self.im_min, self.im_max = window
        self.parts = []

    def px(self, re, im):
        fx = (re - self.re_min) / (self.re_max - self.re_min)
        fy = (im - self.im_min) / (self.im_max - self.im_min)
        return (_ML + fx * (_W - _ML - _MR),
                _H - _MB - fy * (_H - _MT - _MB))

    def polyline(self, res, ims, color, width=1.2, dash=None, closed=False):
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in
                       (self.px(r, i) for r, i in zip(res, ims)))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        tag = "polygon" if closed else "polyline"
        self.parts.append(
            f'<{tag} points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{dash_attr}/>')

    def dot(self, re, im, color, radius=2.0):
        x, y = self.px(re, im)
        self.parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}" fill="{color}"/>')

    def text(self, x, y, s, size=11, anchor="middle", color="#222222"):
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}" '
            f'fill="{color}">{s}</text>')

    def axes(self, xlabel="Re", ylabel="Im", nticks=5):
        x0, y0 = _ML, _H - _MB
        x1, y1 = _W - _MR, _MT
        self.parts.append(
            f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
            f'fill="none" stroke="#444444" stroke-width="1"/>')
        for t in np.linspace(self.re_min, self.re_max, nticks):
            px, _ = self.px(t, self.im_min)
            self.parts.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" '
                              f'y2="{y0 + 4}" stroke="#444444"/>')
            self.text(px, y0 + 16, f"{t:.4g}")
        for t in np.linspace(self.im_min, self.im_max, nticks):
            _, py = self.px(self.re_min, t)
            self.parts.append(f'<line x1="{x0 - 4}" y1="{py:.2f}" x2="{x0}" '
                              f'y2="{py:.2f}" stroke="#444444"/>')
            self.text(x0 - 8, py + 4, f"{t:.4g}", anchor="end")
        self.text((x0 + x1) / 2, _H - 8, xlabel)
        self.text(14, (y0 + y1) / 2, ylabel, anchor="middle")

    def render(self):
        body = "\n".join(self.parts)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
                f'height="{_H}" viewBox="0 0 {_W} {_H}">\n'
                f'<rect width="{_W}" height="{_H}" fill="white"/>\n'
                f"{body}\n</svg>\n")


def pspec_svg(grid, eps_list, eigenvalues=None):
    """Level sets sigma_min = eps extracted by marching squares."""
    cv = _Canvas(grid.window)
    cv.axes()
    dre = grid.re_centers[1] - grid.re_centers[0]
    dim = grid.im_centers[1] - grid.im_centers[0]
    for i, eps in enumerate(sorted(eps_list, reverse=True)):
        color = _PALETTE[i % len(_PALETTE)]
        for contour in find_contours(grid.values, eps):
            res = grid.re_centers[0] + contour[:, 1] * dre
            ims = grid.im_centers[0] + contour[:, 0] * dim
            cv.polyline(res, ims, color)
        cv.text(_W - _MR - 6, _MT + 16 + 14 * i, f"eps = {eps:.4g}",
                anchor="end", color=color)
    if eigenvalues is not None:
        for lam in eigenvalues:
            if (grid.window[0] <= lam.real <= grid.window[1]
                    and grid.window[2] <= lam.imag <= grid.window[3]):
                cv.dot(lam.real, lam.imag, "#222222", radius=1.6)
    return cv.render()


def numrange_svg(regions, limit=None):
    """Overlay of per-cluster range boundaries plus the limit region."""
    pts = []
    for region in list(regions.values()) + ([limit] if limit is not None else []):
        pts.extend(region.vertices.tolist())
    arr = np.asarray(pts)
    lo_r, hi_r = arr.real.min(), arr.real.max()
    lo_i, hi_i = arr.imag.min(), arr.imag.max()
    pad_r = 0.08 * max(hi_r - lo_r, 1e-6)
    pad_i = 0.08 * max(hi_i - lo_i, 1e-6)
    cv = _Canvas((lo_r - pad_r, hi_r + pad_r, lo_i - pad_i, hi_i + pad_i))
    cv.axes()
    for i, (k, region) in enumerate(sorted(regions.items())):
        color = _PALETTE[i % len(_PALETTE)]
        v = region.vertices
        if region.kind == "point":
            cv.dot(v[0].real, v[0].imag, color)
        else:
            cv.polyline(v.real, v.imag, color, closed=region.kind == "polygon")
        cv.text(_W - _MR - 6, _MT + 16 + 14 * i, f"k = {k}",
                anchor="end", color=color)
    if limit is not None:
        v = limit.vertices
        if limit.kind == "point":
            cv.dot(v[0].real, v[0].imag, "#222222", radius=3.0)
        else:
            cv.polyline(v.real, v.imag, "#222222", width=1.8, dash="6,3",
                        closed=limit.kind == "polygon")
        cv.text(_W - _MR - 6, _MT + 16 + 14 * len(regions), "limit",
                anchor="end", color="#222222")
    return cv.render()
