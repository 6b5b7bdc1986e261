"""Time-domain back-projection.

Every pulse of the data cube is focused onto a common ground grid: for
each pixel the exact VPC-to-pixel distance is computed from the supplied
navigation trajectory, the range-compressed signal is interpolated at
that distance, and the two-way propagation phase is removed.  The result
is one low-resolution complex image per pulse; their coherent sum over
the aperture is the SAR image.

Because every pixel tracks its own range history, the per-pulse images
are already range-migration compensated: a residual phase left at a
pixel is attributable to trajectory error (or target motion), which is
what the autofocus in :mod:`mimosar.moco` exploits.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import ArrayConfig, GroundGrid, Trajectory
from .signal_sim import DataCube

__all__ = [
    "ImageStack",
    "SarImage",
    "backproject_pulse",
    "backproject_stack",
    "coherent_sum",
    "write_stack",
    "read_stack",
    "write_image",
    "read_image",
]


@dataclass
class ImageStack:
    """M per-pulse complex images on a shared grid.

    pixels has shape (M, ny, nx); tau is the centered slow-time axis
    derived from pri; clipped[m] counts range lookups that fell outside
    the sampled window while forming image m (those contribute zero).
    """

    pixels: np.ndarray
    grid: GroundGrid
    pri: float
    clipped: np.ndarray = field(default=None)

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 3:
            raise ValueError(f"stack pixels must be 3-D (m, y, x), got shape {p.shape}")
        if p.shape[1:] != self.grid.shape:
            raise ValueError(f"stack shape {p.shape[1:]} does not match grid {self.grid.shape}")
        if not self.pri > 0:
            raise ValueError("pri must be > 0")
        for m in range(p.shape[0]):  # per-pulse to keep the temp small
            if not np.all(np.isfinite(p[m].real)) or not np.all(np.isfinite(p[m].imag)):
                raise ValueError(f"non-finite pixels in image {m}")
        self.pixels = p
        if self.clipped is None:
            self.clipped = np.zeros(p.shape[0], dtype=np.int64)
        else:
            self.clipped = np.asarray(self.clipped, dtype=np.int64)
            if self.clipped.shape != (p.shape[0],):
                raise ValueError("clipped must have one entry per pulse")

    @property
    def n_pulses(self) -> int:
        return self.pixels.shape[0]

    @property
    def tau(self) -> np.ndarray:
        m = np.arange(self.n_pulses, dtype=np.float64)
        return (m - (self.n_pulses - 1) / 2.0) * self.pri


@dataclass
class SarImage:
    """Coherently summed complex image on a GroundGrid."""

    pixels: np.ndarray
    grid: GroundGrid

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.shape != self.grid.shape:
            raise ValueError(f"image shape {p.shape} does not match grid {self.grid.shape}")
        self.pixels = p


def _pulse_chunk(cube, m, xc, yc, q, pc, offs, k_phase, interp):
    """Backproject pulse m onto a flat chunk of pixels.

    Returns (complex128 chunk accumulator, clipped-lookup count).
    Reduction order over n is fixed so results do not depend on how the
    grid was partitioned.
    """
    B = cube.n_bins
    r0 = cube.range_start
    dr = cube.range_step
    acc = np.zeros(xc.shape, dtype=np.complex128)
    n_clip = 0
    dx = xc - pc[0]
    dx2 = dx * dx
    dz = q - pc[2]
    dz2 = dz * dz
    for n in range(offs.shape[0]):
        dy = yc - (pc[1] + offs[n])
        r = np.sqrt(dx2 + dy * dy + dz2)
        t = (r - r0) / dr
        valid = (t >= 0.0) & (t <= B - 1)
        n_clip += int(t.size - np.count_nonzero(valid))
        col = np.ascontiguousarray(cube.samples[:, n, m])
        if interp == "linear":
            i0 = np.clip(np.floor(t).astype(np.int64), 0, B - 2)
            frac = t - i0
            s = col[i0] + (col[i0 + 1] - col[i0]) * frac
        else:  # 8-tap truncated-sinc interpolation
            i0 = np.floor(t).astype(np.int64)
            s = np.zeros(t.shape, dtype=np.complex128)
            for k in range(-3, 5):
                idx = i0 + k
                ok = (idx >= 0) & (idx <= B - 1)
                w = np.sinc(t - idx) * ok
                s += col[np.clip(idx, 0, B - 1)] * w
        acc += s * np.exp(1j * (k_phase * r)) * valid
    return acc, n_clip


def backproject_pulse(
    cube: DataCube,
    nav: Trajectory,
    arr: ArrayConfig,
    grid: GroundGrid,
    m: int,
    interp: str = "linear",
) -> np.ndarray:
    """Focus a single pulse onto the grid.

    For each pixel x the N range-compressed signals are interpolated at
    the exact distance r(n, tau_m; x) computed from ``nav`` (which may
    carry a deliberate velocity error) and summed after removing the
    two-way phase exp(-j 4pi/lambda r).  Pixels whose range falls
    outside the sampled window contribute zero.

    Returns the complex (ny, nx) image for pulse m.
    """
    _check_consistency(cube, nav, arr, interp)
    if not 0 <= m < nav.n_pulses:
        raise IndexError(f"pulse index {m} out of range [0, {nav.n_pulses})")
    xf, yf = _flat_grid(grid)
    pc = _platform(nav, arr, m)
    acc, _ = _pulse_chunk(cube, m, xf, yf, grid.q, pc, arr.centered_offsets(),
                          4.0 * math.pi / cube.wavelength, interp)
    return acc.astype(np.complex64).reshape(grid.shape)


def backproject_stack(
    cube: DataCube,
    nav: Trajectory,
    arr: ArrayConfig,
    grid: GroundGrid,
    threads: int = 1,
    interp: str = "linear",
) -> ImageStack:
    """Backproject every pulse onto the shared grid.

    threads > 1 partitions the grid into contiguous pixel slabs; each
    pixel's reduction order over (n, m) is unchanged by partitioning, so
    the output is bit-identical for any thread count.
    """
    _check_consistency(cube, nav, arr, interp)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    M = nav.n_pulses
    xf, yf = _flat_grid(grid)
    npix = xf.size
    offs = arr.centered_offsets()
    k_phase = 4.0 * math.pi / cube.wavelength
    platforms = [_platform(nav, arr, m) for m in range(M)]
    out = np.empty((M, npix), dtype=np.complex64)
    clipped = np.zeros(M, dtype=np.int64)

    def run(lo, hi):
        counts = np.zeros(M, dtype=np.int64)
        xc, yc = xf[lo:hi], yf[lo:hi]
        for m in range(M):
            acc, n_clip = _pulse_chunk(cube, m, xc, yc, grid.q, platforms[m], offs, k_phase, interp)
            out[m, lo:hi] = acc
            counts[m] = n_clip
        return counts

    if threads == 1:
        clipped += run(0, npix)
    else:
        bounds = np.linspace(0, npix, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run, bounds[i], bounds[i + 1]) for i in range(threads)]
            for fut in futures:
                clipped += fut.result()

    return ImageStack(
        pixels=out.reshape(M, grid.ny, grid.nx),
        grid=grid,
        pri=nav.pri,
        clipped=clipped,
    )


def coherent_sum(stack: ImageStack) -> SarImage:
    """Pixel-wise sum of the per-pulse images over the aperture."""
    total = stack.pixels.sum(axis=0, dtype=np.complex128)
    return SarImage(pixels=total.astype(np.complex64), grid=stack.grid)


def _check_consistency(cube, nav, arr, interp):
    if cube.n_pulses != nav.n_pulses:
        raise ValueError(f"cube has {cube.n_pulses} pulses but trajectory has {nav.n_pulses}")
    if cube.n_vpc != arr.n_vpc:
        raise ValueError(f"cube has {cube.n_vpc} VPCs but array config has {arr.n_vpc}")
    if interp not in ("linear", "sinc8"):
        raise ValueError(f"unknown interpolator {interp!r}, expected 'linear' or 'sinc8'")


def _flat_grid(grid):
    x = np.broadcast_to(grid.x_axis[None, :], grid.shape).ravel()
    y = np.broadcast_to(grid.y_axis[:, None], grid.shape).ravel()
    return np.ascontiguousarray(x), np.ascontiguousarray(y)


def _platform(nav, arr, m):
    """Array-center position at pulse m."""
    p = nav.position_at(nav.tau(m)) + arr.offset
    return np.array([p.x, p.y, p.z])


# --- file format -----------------------------------------------------------
#
# "SIMG": magic, version, kind (0 = image, 1 = stack), M, ny, nx (u32 LE)
# followed by six f64 (x_start, x_step, y_start, y_step, q, pri) and the
# pixel payload as little-endian float32 (re, im) pairs, row-major, m
# slowest for stacks.  pri is 0 for kind-0 files.

_IMG_MAGIC = b"SIMG"
_IMG_VERSION = 1
_IMG_HEADER = struct.Struct("<4sIIIIIdddddd")


def _write_simg(path, kind, m, grid, pri, payload):
    header = _IMG_HEADER.pack(
        _IMG_MAGIC, _IMG_VERSION, kind, m, grid.ny, grid.nx,
        grid.x_start, grid.x_step, grid.y_start, grid.y_step, grid.q, pri,
    )
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(payload).astype("<c8").tobytes())


def _read_simg(path):
    with open(path, "rb") as f:
        raw = f.read(_IMG_HEADER.size)
        if len(raw) != _IMG_HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, kind, m, ny, nx, x0, dx, y0, dy, q, pri = _IMG_HEADER.unpack(raw)
        if magic != _IMG_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {_IMG_MAGIC!r}")
        if version != _IMG_VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        count = (m if kind == 1 else 1) * ny * nx
        body = np.fromfile(f, dtype="<c8", count=count)
    if body.size != count:
        raise ValueError(f"{path}: truncated body")
    grid = GroundGrid(x0, dx, nx, y0, dy, ny, q)
    return kind, m, grid, pri, body


def write_image(path, img: SarImage) -> None:
    _write_simg(path, 0, 0, img.grid, 0.0, img.pixels)


def read_image(path) -> SarImage:
    kind, _, grid, _, body = _read_simg(path)
    if kind != 0:
        raise ValueError(f"{path}: expected an image file, found a stack")
    return SarImage(pixels=body.reshape(grid.shape), grid=grid)


def write_stack(path, stack: ImageStack) -> None:
    _write_simg(path, 1, stack.n_pulses, stack.grid, stack.pri, stack.pixels)


def read_stack(path) -> ImageStack:
    kind, m, grid, pri, body = _read_simg(path)
    if kind != 1:
        raise ValueError(f"{path}: expected a stack file, found an image")
    return ImageStack(pixels=body.reshape(m, grid.ny, grid.nx), grid=grid, pri=pri)
