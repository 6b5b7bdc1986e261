"""Synthetic range-compressed MIMO data generation.

Each sample of the data cube is the coherent sum over point scatterers of

    alpha * sinc[(r - r_sc) / rho_r] * exp(-j * 4*pi/lambda * r_sc)

where r_sc is the exact VPC-to-scatterer distance at that pulse, rho_r
the range resolution, and sinc(x) = sin(pi x)/(pi x).  Circular complex
white noise of configurable power can be added on top.  Data cubes are
indexed (range bin, VPC index n, pulse index m).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .geometry import ArrayConfig, Trajectory, Vec3

__all__ = [
    "Scatterer",
    "Scene",
    "RadarConfig",
    "DataCube",
    "simulate_range_compressed",
    "apply_velocity_error",
    "write_cube",
    "read_cube",
]

_CUBE_MAGIC = b"SRCC"
_CUBE_VERSION = 1
_CUBE_HEADER = struct.Struct("<4sIIIIdddd")  # magic, version, N, M, n_bins, r0, dr, pri, lambda


@dataclass(frozen=True)
class Scatterer:
    """Point scatterer: position (m), complex reflectivity, optional
    constant velocity (m/s) for moving-target test cases."""

    position: Vec3
    reflectivity: complex = 1.0 + 0.0j
    velocity: Vec3 | None = None

    def __post_init__(self):
        if abs(self.reflectivity) <= 0.0 or not math.isfinite(abs(self.reflectivity)):
            raise ValueError(f"reflectivity must be nonzero and finite, got {self.reflectivity}")

    def position_at(self, tau: float) -> Vec3:
        if self.velocity is None:
            return self.position
        return self.position + self.velocity.scaled(float(tau))


@dataclass(frozen=True)
class Scene:
    """A set of point scatterers plus an additive-noise description.

    noise_power is the total variance per complex sample (real+imag);
    noise_seed makes the realization reproducible.
    """

    scatterers: tuple
    noise_power: float = 0.0
    noise_seed: int | None = None

    def __init__(self, scatterers, noise_power: float = 0.0, noise_seed: int | None = None):
        object.__setattr__(self, "scatterers", tuple(scatterers))
        object.__setattr__(self, "noise_power", float(noise_power))
        object.__setattr__(self, "noise_seed", noise_seed)
        if self.noise_power < 0:
            raise ValueError(f"noise_power must be >= 0, got {noise_power}")


@dataclass(frozen=True)
class RadarConfig:
    """Radar and sampling parameters.

    Parameters
    ----------
    wavelength : float
        Operating wavelength (m).
    range_resolution : float
        Range resolution rho_r of the compressed pulse (m).
    range_bin_spacing : float
        Spacing of the sampled range bins (m); must be <= rho_r / 2 so
        the sinc envelope is adequately sampled.
    n_bins : int
        Number of range bins.
    range_start : float
        Range of the first bin (m).
    pri : float
        Pulse repetition interval (s).
    nav_accuracy : float
        Nominal 1-sigma bound on the navigation velocity error (m/s);
        used by the autofocus outlier threshold.
    """

    wavelength: float
    range_resolution: float
    range_bin_spacing: float
    n_bins: int
    range_start: float
    pri: float
    nav_accuracy: float = 0.2

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError("wavelength must be > 0")
        if not self.range_resolution > 0:
            raise ValueError("range_resolution must be > 0")
        if not 0 < self.range_bin_spacing <= self.range_resolution / 2 + 1e-12:
            raise ValueError(
                f"range_bin_spacing must be in (0, rho_r/2], got {self.range_bin_spacing} "
                f"for rho_r = {self.range_resolution}"
            )
        if self.n_bins < 1:
            raise ValueError("n_bins must be >= 1")
        if not self.pri > 0:
            raise ValueError("pri must be > 0")
        if not self.nav_accuracy > 0:
            raise ValueError("nav_accuracy must be > 0")

    @property
    def range_axis(self) -> np.ndarray:
        return self.range_start + np.arange(self.n_bins, dtype=np.float64) * self.range_bin_spacing


@dataclass
class DataCube:
    """Complex range-compressed samples indexed (range bin, n, m)."""

    samples: np.ndarray  # complex64, shape (n_bins, N, M)
    range_start: float
    range_step: float
    pri: float
    wavelength: float

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 3:
            raise ValueError(f"samples must be 3-D (bin, n, m), got shape {s.shape}")
        if not np.iscomplexobj(s):
            raise ValueError("samples must be complex")
        if not np.all(np.isfinite(s.view(np.float32) if s.dtype == np.complex64 else s.view(np.float64))):
            raise ValueError("samples contain non-finite values")
        if not (self.range_step > 0 and self.pri > 0 and self.wavelength > 0):
            raise ValueError("range_step, pri and wavelength must be > 0")
        self.samples = s

    @property
    def n_bins(self) -> int:
        return self.samples.shape[0]

    @property
    def n_vpc(self) -> int:
        return self.samples.shape[1]

    @property
    def n_pulses(self) -> int:
        return self.samples.shape[2]

    @property
    def range_axis(self) -> np.ndarray:
        return self.range_start + np.arange(self.n_bins, dtype=np.float64) * self.range_step


def simulate_range_compressed(
    scene: Scene, traj: Trajectory, arr: ArrayConfig, radar: RadarConfig
) -> DataCube:
    """Simulate the range-compressed data cube for a point-scatterer scene.

    Ranges are exact VPC-to-scatterer distances per pulse (moving
    scatterers are advanced along their constant-velocity track).  The
    sinc envelope is evaluated over the full range axis with no
    truncation.  Noise, if configured, is circular complex white
    Gaussian with total per-sample variance scene.noise_power, drawn
    from ``numpy.random.default_rng(scene.noise_seed)`` in a fixed order
    so the cube is reproducible.
    """
    M = traj.n_pulses
    N = arr.n_vpc
    B = radar.n_bins
    r_axis = radar.range_axis
    k_phase = 4.0 * math.pi / radar.wavelength

    acc = np.zeros((B, N, M), dtype=np.complex128)
    scatterers = scene.scatterers
    if scatterers:
        alphas = np.array([s.reflectivity for s in scatterers], dtype=np.complex128)
        base_pos = np.array([s.position.as_array() for s in scatterers])  # (S, 3)
        vels = np.array(
            [(s.velocity.as_array() if s.velocity is not None else np.zeros(3)) for s in scatterers]
        )
        offs = arr.centered_offsets()
        tau = traj.tau()
        v = traj.velocity.as_array()
        p0 = traj.position.as_array() + arr.offset.as_array()
        for m in range(M):
            t = tau[m]
            spos = base_pos + vels * t  # (S, 3)
            pc = p0 + v * t
            for n in range(N):
                p = pc + np.array([0.0, offs[n], 0.0])
                d = spos - p
                r = np.sqrt(np.einsum("ij,ij->i", d, d))  # (S,)
                contrib = alphas * np.exp(-1j * k_phase * r)
                env = np.sinc((r_axis[None, :] - r[:, None]) / radar.range_resolution)
                acc[:, n, m] = contrib @ env

    if scene.noise_power > 0:
        rng = np.random.default_rng(scene.noise_seed)
        sigma = math.sqrt(scene.noise_power / 2.0)
        noise = rng.standard_normal((B, N, M, 2))
        acc += sigma * (noise[..., 0] + 1j * noise[..., 1])

    return DataCube(
        samples=acc.astype(np.complex64),
        range_start=radar.range_start,
        range_step=radar.range_bin_spacing,
        pri=radar.pri,
        wavelength=radar.wavelength,
    )


def apply_velocity_error(traj: Trajectory, delta_v: Vec3) -> Trajectory:
    """Return the navigation trajectory with velocity v + delta_v.

    The reference position at tau = 0 is unchanged: a constant velocity
    error integrates to zero displacement at the aperture center.
    """
    return Trajectory(
        position=traj.position,
        velocity=traj.velocity + delta_v,
        n_pulses=traj.n_pulses,
        pri=traj.pri,
    )


def write_cube(path, cube: DataCube) -> None:
    """Write a cube: 52-byte header then little-endian float32 (re, im)
    pairs in (m, n, bin) nesting order, m slowest."""
    header = _CUBE_HEADER.pack(
        _CUBE_MAGIC,
        _CUBE_VERSION,
        cube.n_vpc,
        cube.n_pulses,
        cube.n_bins,
        cube.range_start,
        cube.range_step,
        cube.pri,
        cube.wavelength,
    )
    body = np.ascontiguousarray(cube.samples.transpose(2, 1, 0)).astype("<c8")
    with open(path, "wb") as f:
        f.write(header)
        f.write(body.tobytes())


def read_cube(path) -> DataCube:
    with open(path, "rb") as f:
        raw = f.read(_CUBE_HEADER.size)
        if len(raw) != _CUBE_HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, n, m, b, r0, dr, pri, lam = _CUBE_HEADER.unpack(raw)
        if magic != _CUBE_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {_CUBE_MAGIC!r}")
        if version != _CUBE_VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        body = np.fromfile(f, dtype="<c8", count=m * n * b)
    if body.size != m * n * b:
        raise ValueError(f"{path}: truncated body, expected {m * n * b} samples, got {body.size}")
    samples = body.reshape(m, n, b).transpose(2, 1, 0).copy()
    return DataCube(samples=samples, range_start=r0, range_step=dr, pri=pri, wavelength=lam)
