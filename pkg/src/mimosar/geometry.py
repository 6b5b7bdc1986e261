"""Acquisition geometry for a forward-looking automotive MIMO SAR.

Coordinate frame: x is the direction of motion, y is cross-track (left
positive), z is up.  The platform carries a virtual array of N phase
centers displaced along y; a synthetic aperture is formed by M pulses at
a fixed PRI.  Slow time is centered on the aperture, so tau = 0 at the
aperture center and the per-pulse times are symmetric about it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Vec3",
    "Trajectory",
    "ArrayConfig",
    "GroundGrid",
    "vpc_positions",
    "unit_vector",
    "wavevector",
    "range_history",
]


@dataclass(frozen=True)
class Vec3:
    """A 3-vector in the local Cartesian frame.

    Used for positions (m), velocities (m/s) and wavevectors (rad/m).
    Components must be finite.
    """

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"Vec3 components must be finite, got {(self.x, self.y, self.z)}")

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @staticmethod
    def from_array(a) -> "Vec3":
        x, y, z = (float(v) for v in a)
        return Vec3(x, y, z)


@dataclass(frozen=True)
class Trajectory:
    """Constant-velocity platform trajectory over one synthetic aperture.

    Parameters
    ----------
    position : Vec3
        Platform reference position at tau = 0 (the aperture center).
    velocity : Vec3
        Constant velocity over the aperture (m/s).
    n_pulses : int
        Number of pulses M in the aperture.
    pri : float
        Pulse repetition interval (s).

    The slow time of pulse m is ``tau_m = (m - (M-1)/2) * pri``, so the
    tau axis is symmetric about zero.
    """

    position: Vec3
    velocity: Vec3
    n_pulses: int
    pri: float

    def __post_init__(self):
        if self.n_pulses < 1:
            raise ValueError(f"n_pulses must be >= 1, got {self.n_pulses}")
        if not self.pri > 0:
            raise ValueError(f"pri must be > 0, got {self.pri}")

    def tau(self, m=None):
        """Slow time of pulse m (scalar or the full centered axis)."""
        if m is None:
            m = np.arange(self.n_pulses)
        return (np.asarray(m, dtype=np.float64) - (self.n_pulses - 1) / 2.0) * self.pri

    def position_at(self, tau: float) -> Vec3:
        return self.position + self.velocity.scaled(float(tau))


@dataclass(frozen=True)
class ArrayConfig:
    """Virtual array layout: N phase centers spaced by dy along y.

    VPC indices are centered: the offset of VPC n is (n - (N-1)/2)*dy
    along y, so the array phase reference is the array center.  The
    optional mounting ``offset`` is the lever arm from the navigation
    reference point to the array center (defaults to zero).
    """

    n_vpc: int
    spacing: float
    offset: Vec3 = field(default_factory=lambda: Vec3(0.0, 0.0, 0.0))

    def __post_init__(self):
        if self.n_vpc < 1:
            raise ValueError(f"n_vpc must be >= 1, got {self.n_vpc}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be > 0, got {self.spacing}")

    def centered_offsets(self) -> np.ndarray:
        """Signed y-offsets of all VPCs relative to the array center (m)."""
        return (np.arange(self.n_vpc, dtype=np.float64) - (self.n_vpc - 1) / 2.0) * self.spacing


@dataclass(frozen=True)
class GroundGrid:
    """Regular image grid at a single focusing height q.

    The grid is defined by an origin, spacing and pixel count per axis;
    pixel (row, col) sits at ``(x_start + col*x_step, y_start + row*y_step, q)``.
    """

    x_start: float
    x_step: float
    nx: int
    y_start: float
    y_step: float
    ny: int
    q: float = 0.0

    def __post_init__(self):
        if not (self.x_step > 0 and self.y_step > 0):
            raise ValueError("grid spacings must be > 0")
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid must be non-empty")

    @staticmethod
    def from_extent(x_start, x_stop, x_step, y_start, y_stop, y_step, q=0.0) -> "GroundGrid":
        """Build a grid covering [start, stop] inclusively on both axes."""
        nx = int(math.floor((x_stop - x_start) / x_step + 0.5)) + 1
        ny = int(math.floor((y_stop - y_start) / y_step + 0.5)) + 1
        return GroundGrid(x_start, x_step, nx, y_start, y_step, ny, q)

    @property
    def x_axis(self) -> np.ndarray:
        return self.x_start + np.arange(self.nx, dtype=np.float64) * self.x_step

    @property
    def y_axis(self) -> np.ndarray:
        return self.y_start + np.arange(self.ny, dtype=np.float64) * self.y_step

    @property
    def shape(self) -> tuple:
        return (self.ny, self.nx)

    def pixel_position(self, row: int, col: int) -> Vec3:
        return Vec3(self.x_start + col * self.x_step, self.y_start + row * self.y_step, self.q)


def vpc_positions(traj: Trajectory, arr: ArrayConfig, m: int) -> list:
    """Positions of all N virtual phase centers at pulse m.

    VPC n sits at ``traj.position_at(tau_m) + arr.offset + n_centered*dy*yhat``
    where ``n_centered = n - (N-1)/2``.

    Parameters
    ----------
    traj : Trajectory
    arr : ArrayConfig
    m : int
        Pulse index, 0 <= m < traj.n_pulses.

    Returns
    -------
    list of Vec3, length arr.n_vpc.
    """
    if not 0 <= m < traj.n_pulses:
        raise IndexError(f"pulse index {m} out of range [0, {traj.n_pulses})")
    center = traj.position_at(traj.tau(m)) + arr.offset
    return [Vec3(center.x, center.y + dy, center.z) for dy in arr.centered_offsets()]


def unit_vector(aperture_center: Vec3, target: Vec3) -> Vec3:
    """Unit line-of-sight vector from the aperture center to a target.

    In spherical terms the result is
    ``[sin(theta)cos(phi), sin(theta)sin(phi), cos(theta)]`` with theta the
    incidence angle from z and phi the azimuth from x.
    """
    d = target - aperture_center
    n = d.norm()
    if n == 0.0:
        raise ValueError("target coincides with the aperture center")
    return Vec3(d.x / n, d.y / n, d.z / n)


def wavevector(u: Vec3, wavelength: float) -> Vec3:
    """Two-way wavevector (4*pi/lambda) * u for a unit direction u."""
    if not wavelength > 0:
        raise ValueError(f"wavelength must be > 0, got {wavelength}")
    n = u.norm()
    if abs(n - 1.0) > 1e-9:
        raise ValueError(f"direction must be unit norm, got |u| = {n}")
    return u.scaled(4.0 * math.pi / wavelength)


def range_history(
    n: int,
    m: int,
    target: Vec3,
    traj: Trajectory,
    arr: ArrayConfig,
    mode: str = "exact",
) -> float:
    """Distance from VPC n at pulse m to a target position.

    ``mode="exact"`` returns the Euclidean distance.  ``mode="plane-wave"``
    applies the far-field linearization about the aperture center:

        r(n, tau) ~= r0 - (u . v) tau - n_centered * dy * u_y

    with r0 and u evaluated from the array center at tau = 0.  The
    approximation error is quadratic in the aperture extent (bounded by
    L^2 / (2 r0) for extent L).
    """
    if not 0 <= n < arr.n_vpc:
        raise IndexError(f"VPC index {n} out of range [0, {arr.n_vpc})")
    if not 0 <= m < traj.n_pulses:
        raise IndexError(f"pulse index {m} out of range [0, {traj.n_pulses})")
    if mode == "exact":
        p = vpc_positions(traj, arr, m)[n]
        return (target - p).norm()
    if mode == "plane-wave":
        center = traj.position + arr.offset
        r0 = (target - center).norm()
        if r0 == 0.0:
            raise ValueError("target coincides with the aperture center")
        u = unit_vector(center, target)
        tau = float(traj.tau(m))
        n_c = (n - (arr.n_vpc - 1) / 2.0) * arr.spacing
        return r0 - u.dot(traj.velocity) * tau - n_c * u.y
    raise ValueError(f"unknown mode {mode!r}, expected 'exact' or 'plane-wave'")
