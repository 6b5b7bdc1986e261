"""Image-quality figures of merit: impulse-response widths, entropy,
contrast, and scatterer localization error."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tdbp import SarImage

__all__ = [
    "FocusMetrics",
    "impulse_response_width",
    "image_entropy",
    "image_contrast",
    "localization_error",
    "compute_focus_metrics",
]


@dataclass(frozen=True)
class FocusMetrics:
    peak_magnitude: float
    peak_pixel: tuple          # (row, col)
    width_x: float             # -3 dB width along x (m), nan if not measurable
    width_y: float             # -3 dB width along y (m), nan if not measurable
    entropy: float
    contrast: float            # std(|I|) / mean(|I|)

    def to_dict(self) -> dict:
        return {
            "peak_magnitude": self.peak_magnitude,
            "peak_row": int(self.peak_pixel[0]),
            "peak_col": int(self.peak_pixel[1]),
            "width_x": self.width_x,
            "width_y": self.width_y,
            "entropy": self.entropy,
            "contrast": self.contrast,
        }


def impulse_response_width(img: SarImage, peak, axis: str = "x") -> float:
    """-3 dB width of the magnitude cut through a peak, in meters.

    The cut runs along the requested axis through the peak pixel; the
    half-power crossings (|I| = peak / sqrt(2)) on both sides are found
    by linear interpolation between samples.

    Raises ValueError if the peak is not a local maximum of the cut, if
    it sits on the grid boundary, or if either crossing is not bracketed
    within the grid.
    """
    row, col = int(peak[0]), int(peak[1])
    mag = np.abs(img.pixels)
    if axis == "x":
        cut = mag[row, :]
        idx = col
        step = img.grid.x_step
    elif axis == "y":
        cut = mag[:, col]
        idx = row
        step = img.grid.y_step
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")

    if idx <= 0 or idx >= cut.size - 1:
        raise ValueError("peak sits on the grid boundary")
    if cut[idx] < cut[idx - 1] or cut[idx] < cut[idx + 1]:
        raise ValueError(f"pixel {peak} is not a local maximum along {axis}")

    level = cut[idx] / math.sqrt(2.0)

    def crossing(direction):
        i = idx
        while 0 <= i + direction < cut.size:
            j = i + direction
            if cut[j] < level:
                frac = (cut[i] - level) / (cut[i] - cut[j])
                return i + direction * frac
            i = j
        raise ValueError(f"-3 dB crossing not bracketed within the grid (axis {axis})")

    right = crossing(+1)
    left = crossing(-1)
    return float((right - left) * step)


def image_entropy(img: SarImage) -> float:
    """Shannon entropy (natural log) of the normalized intensity.

    p_i = |I_i|^2 / sum |I|^2;  entropy = -sum p_i ln p_i.  Zero for a
    single nonzero pixel, ln(P) for uniform magnitude over P pixels.
    """
    p = np.abs(img.pixels.astype(np.complex128)) ** 2
    total = p.sum()
    if total == 0:
        raise ValueError("all-zero image has no entropy")
    p = (p / total).ravel()
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def image_contrast(img: SarImage) -> float:
    """Standard deviation over mean of the magnitude image."""
    mag = np.abs(img.pixels)
    mean = mag.mean()
    if mean == 0:
        raise ValueError("all-zero image has no contrast")
    return float(mag.std() / mean)


def _local_maxima(mag):
    padded = np.full((mag.shape[0] + 2, mag.shape[1] + 2), -np.inf)
    padded[1:-1, 1:-1] = mag
    mask = np.ones(mag.shape, dtype=bool)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr == 0 and dc == 0:
                continue
            mask &= mag >= padded[1 + dr : 1 + dr + mag.shape[0], 1 + dc : 1 + dc + mag.shape[1]]
    return mask


def localization_error(img: SarImage, scene, capture_radius: float | None = None,
                       rel_floor: float = 0.1) -> list:
    """Ground-plane distance from each scatterer to its nearest image peak.

    Peaks are local maxima of |I| at or above rel_floor times the global
    maximum.  Each scatterer is associated with the nearest peak; if none
    lies within capture_radius (default: 10 grid spacings) the entry is
    None (a miss).  Distances are Euclidean in the (x, y) image plane,
    in meters, in scene order.
    """
    scatterers = list(scene.scatterers)
    if not scatterers:
        return []
    grid = img.grid
    if capture_radius is None:
        capture_radius = 10.0 * max(grid.x_step, grid.y_step)
    mag = np.abs(img.pixels)
    top = mag.max()
    if top == 0:
        return [None] * len(scatterers)
    rows, cols = np.nonzero(_local_maxima(mag) & (mag >= rel_floor * top))
    if rows.size == 0:
        return [None] * len(scatterers)
    px = grid.x_axis[cols]
    py = grid.y_axis[rows]

    out = []
    for s in scatterers:
        d = np.hypot(px - s.position.x, py - s.position.y)
        dmin = float(d.min())
        out.append(dmin if dmin <= capture_radius else None)
    return out


def compute_focus_metrics(img: SarImage) -> FocusMetrics:
    """Assemble the standard metrics for one image.

    Widths are nan when the -3 dB cut cannot be measured (peak on the
    boundary, crossing outside the grid) — common for cluttered scenes,
    so not an error here.
    """
    mag = np.abs(img.pixels)
    peak = np.unravel_index(int(np.argmax(mag)), mag.shape)

    def width_or_nan(axis):
        try:
            return impulse_response_width(img, peak, axis)
        except ValueError:
            return math.nan

    return FocusMetrics(
        peak_magnitude=float(mag[peak]),
        peak_pixel=(int(peak[0]), int(peak[1])),
        width_x=width_or_nan("x"),
        width_y=width_or_nan("y"),
        entropy=image_entropy(img),
        contrast=image_contrast(img),
    )
