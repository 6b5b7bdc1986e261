"""Residual motion estimation and compensation.

A constant velocity error dv in the navigation solution leaves each
focused pixel with a linear phase ramp over slow time,

    phi(x, tau) = -(k(x) . dv) tau,      k(x) = (4 pi / lambda) u(x),

i.e. a residual Doppler proportional to the radial component of dv seen
from pixel x.  The autofocus measures that Doppler on a handful of
bright, stable pixels (ground control points), inverts the linear system
for dv by weighted least squares, and removes the implied phase screens
from the image stack.  Ground-truth velocity is then nav minus the
estimate.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ArrayConfig, GroundGrid, Trajectory, Vec3, unit_vector, wavevector
from .signal_sim import DataCube, RadarConfig
from .tdbp import ImageStack, backproject_stack

__all__ = [
    "Gcp",
    "MocoError",
    "MocoReport",
    "PhaseScreenSet",
    "incoherent_mean",
    "select_gcp",
    "estimate_gcp_frequency",
    "reject_outliers",
    "solve_wls",
    "phase_screens",
    "compensate",
    "integrate_residual_velocity",
    "residual_doppler_height",
    "unwrap_gcp_phase",
    "autofocus",
    "autofocus_refine",
    "write_report_json",
    "write_gcp_csv",
]

_AXES = ("x", "y", "z")


class MocoError(RuntimeError):
    """Numerical failure in the autofocus (rank deficiency, bad conditioning)."""


@dataclass
class Gcp:
    """One ground control point and its diagnostics."""

    row: int
    col: int
    position: Vec3
    amplitude: float
    omega: float = math.nan       # estimated residual Doppler, rad/s
    prominence: float = math.nan  # spectral peak over median spectrum magnitude
    weight: float = 0.0
    outlier: bool = False

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        if self.weight < 0:
            raise ValueError("weight must be >= 0")


@dataclass
class MocoReport:
    """Outcome of the WLS inversion plus per-GCP diagnostics."""

    delta_v: Vec3
    accuracy: dict            # axis name -> 1-sigma accuracy (m/s), estimated axes only
    condition_number: float
    dropped_z: bool
    dropped_y: bool
    n_used: int
    gcps: list

    def to_dict(self) -> dict:
        return {
            "delta_v": {"x": self.delta_v.x, "y": self.delta_v.y, "z": self.delta_v.z},
            "accuracy": dict(self.accuracy),
            "condition_number": self.condition_number,
            "dropped_z": self.dropped_z,
            "dropped_y": self.dropped_y,
            "n_used": self.n_used,
            "gcps": [
                {
                    "row": g.row,
                    "col": g.col,
                    "x": g.position.x,
                    "y": g.position.y,
                    "z": g.position.z,
                    "amplitude": g.amplitude,
                    "omega": g.omega,
                    "prominence": g.prominence,
                    "weight": g.weight,
                    "outlier": g.outlier,
                }
                for g in self.gcps
            ],
        }


@dataclass
class PhaseScreenSet:
    """Per-pulse, per-pixel correction phases.

    The screens of a constant velocity error are separable,
    dpsi(x, tau_m) = rate(x) * tau_m with rate(x) = -(k(x) . dv), so
    only the per-pixel rate and the tau axis are stored; values(m)
    materializes the screen of one pulse.
    """

    rate: np.ndarray  # (ny, nx) float64, rad/s
    tau: np.ndarray   # (M,) float64, s

    def __post_init__(self):
        self.rate = np.asarray(self.rate, dtype=np.float64)
        self.tau = np.asarray(self.tau, dtype=np.float64)
        if self.rate.ndim != 2 or self.tau.ndim != 1:
            raise ValueError("rate must be 2-D and tau 1-D")
        if not np.all(np.isfinite(self.rate)) or not np.all(np.isfinite(self.tau)):
            raise ValueError("phase screens must be finite")

    @property
    def n_pulses(self) -> int:
        return self.tau.size

    def values(self, m: int) -> np.ndarray:
        """Phase screen of pulse m, radians."""
        return self.rate * self.tau[m]

    def dense(self) -> np.ndarray:
        """All screens as an (M, ny, nx) array (test/diagnostic use)."""
        return self.rate[None, :, :] * self.tau[:, None, None]


def incoherent_mean(stack: ImageStack) -> np.ndarray:
    """Pixel-wise mean of |I_m| over the stack (amplitudes, not complex mean)."""
    if stack.n_pulses < 1:
        raise ValueError("stack is empty")
    acc = np.zeros(stack.grid.shape, dtype=np.float64)
    for m in range(stack.n_pulses):
        acc += np.abs(stack.pixels[m])
    return acc / stack.n_pulses


def select_gcp(amp: np.ndarray, grid: GroundGrid, count: int, min_separation: int = 5) -> list:
    """Greedy bright-point selection on an amplitude image.

    Local maxima (8-neighborhood, non-strict so plateaus qualify) are
    visited in descending amplitude with deterministic (row, col)
    tie-break; a candidate is kept if its Chebyshev distance to every
    already-kept point is at least min_separation.  Stops at `count`
    selections or when candidates run out.
    """
    amp = np.asarray(amp)
    if amp.ndim != 2 or amp.size == 0:
        raise ValueError("amplitude image must be a non-empty 2-D array")
    if amp.shape != grid.shape:
        raise ValueError(f"amplitude shape {amp.shape} does not match grid {grid.shape}")
    if count < 1:
        raise ValueError("count must be >= 1")
    if min_separation < 1:
        raise ValueError("min_separation must be >= 1")

    padded = np.full((amp.shape[0] + 2, amp.shape[1] + 2), -np.inf)
    padded[1:-1, 1:-1] = amp
    is_max = np.ones(amp.shape, dtype=bool)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr == 0 and dc == 0:
                continue
            is_max &= amp >= padded[1 + dr : 1 + dr + amp.shape[0], 1 + dc : 1 + dc + amp.shape[1]]
    rows, cols = np.nonzero(is_max)
    order = np.lexsort((cols, rows, -amp[rows, cols]))
    rows, cols = rows[order], cols[order]

    sel_r, sel_c = [], []
    for r, c in zip(rows, cols):
        if sel_r:
            cheb = np.maximum(np.abs(np.array(sel_r) - r), np.abs(np.array(sel_c) - c))
            if cheb.min() < min_separation:
                continue
        sel_r.append(int(r))
        sel_c.append(int(c))
        if len(sel_r) == count:
            break

    return [
        Gcp(row=r, col=c, position=grid.pixel_position(r, c), amplitude=float(amp[r, c]))
        for r, c in zip(sel_r, sel_c)
    ]


def estimate_gcp_frequency(
    stack: ImageStack, gcp: Gcp, pad_factor: int = 8, refine: bool = True
):
    """Estimate the residual Doppler of one GCP from its slow-time series.

    The length-M complex series at the GCP pixel is zero-padded to
    pad_factor*M, the FFT magnitude peak located, and (if refine) the
    peak position refined by 3-point parabolic interpolation of the
    log magnitude.  Sign convention: a series exp(-j w0 tau_m) yields
    +w0.

    Returns (omega, prominence) with omega in rad/s and prominence the
    peak magnitude over the median spectrum magnitude.
    """
    M = stack.n_pulses
    if M < 4:
        raise ValueError(f"need at least 4 pulses to estimate a frequency, got {M}")
    if pad_factor < 1:
        raise ValueError("pad_factor must be >= 1")
    series = stack.pixels[:, gcp.row, gcp.col].astype(np.complex128)
    if not np.any(series):
        raise ValueError(f"all-zero series at GCP pixel ({gcp.row}, {gcp.col})")

    L = pad_factor * M
    mag = np.abs(np.fft.fft(series, L))
    kpk = int(np.argmax(mag))
    delta = 0.0
    if refine:
        yl, yc, yr = mag[(kpk - 1) % L], mag[kpk], mag[(kpk + 1) % L]
        if yl > 0 and yr > 0:
            yl, yc, yr = math.log(yl), math.log(yc), math.log(yr)
            denom = yl - 2.0 * yc + yr
            if denom < 0:
                delta = float(np.clip(0.5 * (yl - yr) / denom, -0.5, 0.5))
    k = kpk + delta
    if k > L / 2:
        k -= L
    freq_hz = k / (L * stack.pri)
    omega = -2.0 * math.pi * freq_hz
    prominence = float(mag[kpk] / np.median(mag))
    return omega, prominence


def reject_outliers(gcps, nav_accuracy: float, wavelength: float, margin: float = 1.5):
    """Flag GCPs whose Doppler exceeds what the navigation error bound allows.

    A velocity error of at most nav_accuracy m/s can produce at most
    (4 pi / lambda) * nav_accuracy rad/s of residual Doppler; anything
    above margin times that is attributed to target motion and flagged,
    excluding it from the inversion.
    """
    if margin < 1:
        raise ValueError("margin must be >= 1")
    threshold = margin * (4.0 * math.pi / wavelength) * nav_accuracy
    for g in gcps:
        g.outlier = bool(abs(g.omega) > threshold)
    return gcps


def solve_wls(
    gcps,
    wavelength: float,
    aperture_center: Vec3,
    drop_z: bool = True,
    drop_y: bool = False,
    weighting: str = "amplitude",
    cond_limit: float = 1e8,
) -> MocoReport:
    """Invert the per-GCP Doppler measurements for the velocity error.

    Builds one row k(x)^T = (4 pi / lambda) u(x)^T per non-outlier GCP,
    drops the z (and optionally y) column when that direction is
    unobservable from a ground-level grid, and solves the weighted
    normal equations.  Per-component accuracy is the square root of the
    diagonal of sigma2 * (K^T W K)^-1 with sigma2 the weighted residual
    sum of squares over (V - p) degrees of freedom.

    Raises MocoError when too few GCPs survive, or when the normal
    matrix is ill-conditioned; the error names the weakest direction.
    """
    if weighting not in ("amplitude", "prominence", "uniform"):
        raise ValueError(f"unknown weighting {weighting!r}")
    used = [g for g in gcps if not g.outlier]
    axes = [0] + ([] if drop_y else [1]) + ([] if drop_z else [2])
    axes = sorted(axes)
    p = len(axes)
    if len(used) < p:
        raise MocoError(f"only {len(used)} usable GCPs for {p} unknowns")

    K_full = np.empty((len(used), 3))
    omegas = np.empty(len(used))
    for i, g in enumerate(used):
        k = wavevector(unit_vector(aperture_center, g.position), wavelength)
        K_full[i] = (k.x, k.y, k.z)
        if not math.isfinite(g.omega):
            raise MocoError(f"GCP at ({g.row}, {g.col}) has no frequency estimate")
        omegas[i] = g.omega

    if weighting == "amplitude":
        w = np.array([g.amplitude for g in used])
    elif weighting == "prominence":
        w = np.array([g.prominence for g in used])
    else:
        w = np.ones(len(used))
    if not np.all(np.isfinite(w)) or np.any(w < 0) or w.sum() == 0:
        raise MocoError(f"invalid {weighting} weights")
    for g in gcps:
        g.weight = 0.0
    for g, wi in zip(used, w):
        g.weight = float(wi)

    K = K_full[:, axes]
    normal = K.T @ (w[:, None] * K)
    rhs = K.T @ (w * omegas)
    cond = float(np.linalg.cond(normal))
    if not math.isfinite(cond) or cond > cond_limit:
        eigvals, eigvecs = np.linalg.eigh(normal)
        weakest = _AXES[axes[int(np.argmax(np.abs(eigvecs[:, 0])))]]
        raise MocoError(
            f"normal matrix condition number {cond:.3g} exceeds {cond_limit:.3g}; "
            f"the {weakest} direction is effectively unobservable from this GCP geometry"
        )

    sol = np.linalg.solve(normal, rhs)
    resid = omegas - K @ sol
    dof = len(used) - p
    sigma2 = float(w @ (resid * resid)) / (dof if dof > 0 else 1)
    cov = sigma2 * np.linalg.inv(normal)
    acc = np.sqrt(np.maximum(np.diag(cov), 0.0))

    dv = [0.0, 0.0, 0.0]
    accuracy = {}
    for j, axis in enumerate(axes):
        dv[axis] = float(sol[j])
        accuracy[_AXES[axis]] = float(acc[j])

    return MocoReport(
        delta_v=Vec3(dv[0], dv[1], dv[2]),
        accuracy=accuracy,
        condition_number=cond,
        dropped_z=drop_z,
        dropped_y=drop_y,
        n_used=len(used),
        gcps=list(gcps),
    )


def phase_screens(
    grid: GroundGrid,
    delta_v: Vec3,
    tau: np.ndarray,
    wavelength: float,
    aperture_center: Vec3,
) -> PhaseScreenSet:
    """Phase screens implied by a velocity-error estimate.

    dpsi(x, tau) = -(k(x) . delta_v) tau with k(x) the two-way
    wavevector from the aperture center to pixel x at the grid height.
    Stored factored as a per-pixel rate times the tau axis.
    """
    dx = grid.x_axis[None, :] - aperture_center.x
    dy = grid.y_axis[:, None] - aperture_center.y
    dz = grid.q - aperture_center.z
    r = np.sqrt(dx * dx + dy * dy + dz * dz)
    if np.any(r == 0):
        raise ValueError("a grid pixel coincides with the aperture center")
    radial = (dx * delta_v.x + dy * delta_v.y + dz * delta_v.z) / r
    rate = -(4.0 * math.pi / wavelength) * radial
    return PhaseScreenSet(rate=rate, tau=np.asarray(tau, dtype=np.float64))


def compensate(stack: ImageStack, screens: PhaseScreenSet) -> ImageStack:
    """Remove the estimated phase screens: I_m -> I_m * exp(-j dpsi_m).

    Pure phase correction; magnitudes are untouched.
    """
    if screens.rate.shape != stack.grid.shape:
        raise ValueError(f"screen shape {screens.rate.shape} does not match grid {stack.grid.shape}")
    if screens.n_pulses != stack.n_pulses:
        raise ValueError(f"{screens.n_pulses} screens for {stack.n_pulses} pulses")
    if not np.allclose(screens.tau, stack.tau):
        raise ValueError("screen tau axis does not match the stack")
    out = np.empty_like(stack.pixels)
    for m in range(stack.n_pulses):
        out[m] = stack.pixels[m] * np.exp(-1j * screens.values(m))
    return ImageStack(pixels=out, grid=stack.grid, pri=stack.pri, clipped=stack.clipped.copy())


def integrate_residual_velocity(nav: Trajectory, delta_v: Vec3) -> Trajectory:
    """Fold the estimated error back into the trajectory: v -> v - dv_hat."""
    return Trajectory(
        position=nav.position,
        velocity=nav.velocity - delta_v,
        n_pulses=nav.n_pulses,
        pri=nav.pri,
    )


def residual_doppler_height(v_x: float, r: float, theta: float, delta_q: float, wavelength: float) -> float:
    """Residual Doppler (Hz) from focusing at the wrong height.

    Focusing a target at range r, incidence theta, with a height error
    delta_q leaves a residual range rate v_x * delta_q / (r tan theta),
    i.e. a Doppler of (2/lambda) v_x delta_q / (r tan theta).  At
    exactly theta = pi/2 the geometry is insensitive to height and the
    Doppler is zero.
    """
    if not r > 0:
        raise ValueError("range must be > 0")
    if not wavelength > 0:
        raise ValueError("wavelength must be > 0")
    if not 1e-6 < theta < math.pi - 1e-6:
        raise ValueError(f"incidence angle {theta} rad is outside the valid geometry")
    if abs(theta - math.pi / 2) < 1e-12:
        return 0.0
    return (2.0 / wavelength) * v_x * delta_q / (r * math.tan(theta))


def unwrap_gcp_phase(stack: ImageStack, gcp: Gcp) -> np.ndarray:
    """Unwrapped slow-time phase history of a GCP (diagnostic)."""
    if stack.n_pulses < 2:
        raise ValueError("need at least 2 pulses to unwrap")
    series = stack.pixels[:, gcp.row, gcp.col]
    if np.any(series == 0):
        raise ValueError(f"zero-magnitude sample in the series at ({gcp.row}, {gcp.col})")
    return np.unwrap(np.angle(series.astype(np.complex128)))


def gcps_from_references(amp: np.ndarray, grid: GroundGrid,
                         references) -> list:
    """Anchor one Gcp at each known reference position.

    Control points with surveyed coordinates skip image-maxima detection:
    the slow-time series is read at the grid pixel nearest the reference,
    while the stored position is the exact reference itself so that the
    wavevector rows (and the pixel-to-reference Doppler correction) use
    the true geometry.  References outside the grid raise.
    """
    gcps = []
    for ref in references:
        col = int(round((ref.x - grid.x_start) / grid.x_step))
        row = int(round((ref.y - grid.y_start) / grid.y_step))
        if not (0 <= row < grid.ny and 0 <= col < grid.nx):
            raise ValueError(f"reference ({ref.x}, {ref.y}) falls outside the image grid")
        gcps.append(Gcp(row=row, col=col, position=ref,
                        amplitude=float(amp[row, col])))
    return gcps


def autofocus(
    stack: ImageStack,
    radar: RadarConfig,
    nav: Trajectory,
    arr: ArrayConfig,
    gcp_count: int = 25,
    min_separation: int = 5,
    pad_factor: int = 8,
    margin: float = 1.5,
    weighting: str = "amplitude",
    drop_z: bool = True,
    drop_y: bool = False,
    references=None,
):
    """Full autofocus chain on a defocused stack.

    incoherent mean -> GCP selection -> per-GCP Doppler estimation ->
    outlier rejection -> WLS inversion -> phase screens.

    With references (a sequence of Vec3 control-point coordinates) the
    GCPs are anchored at those known positions instead of detected as
    image maxima, and the differential Doppler between the read pixel
    and the reference, (4pi/lambda)(u(pixel) - u(ref)) . v, is removed
    from each measurement.  A reference series is read where the
    scatterer actually is, so one pass recovers the velocity error even
    from a strongly defocused stack; detected maxima sit on blobs whose
    flat cross-range tops wander by several pixels, which biases a
    single pass (see :func:`autofocus_refine` for that case).

    Returns (MocoReport, PhaseScreenSet); apply the screens with
    :func:`compensate` and correct the trajectory with
    :func:`integrate_residual_velocity`.
    """
    amp = incoherent_mean(stack)
    center = nav.position + arr.offset
    if references is None:
        gcps = select_gcp(amp, stack.grid, gcp_count, min_separation)
        for g in gcps:
            g.omega, g.prominence = estimate_gcp_frequency(stack, g, pad_factor)
    else:
        gcps = gcps_from_references(amp, stack.grid, references)
        for g in gcps:
            g.omega, g.prominence = estimate_gcp_frequency(stack, g, pad_factor)
            pixel = stack.grid.pixel_position(g.row, g.col)
            g.omega -= _differential_doppler(center, pixel, g.position,
                                             nav.velocity, radar.wavelength)
    reject_outliers(gcps, radar.nav_accuracy, radar.wavelength, margin)
    report = solve_wls(
        gcps, radar.wavelength, center,
        drop_z=drop_z, drop_y=drop_y, weighting=weighting,
    )
    screens = phase_screens(stack.grid, report.delta_v, stack.tau, radar.wavelength, center)
    return report, screens


def _parabolic_offset(yl: float, yc: float, yr: float) -> float:
    """Sub-sample offset of a 3-point parabola vertex, clipped to [-0.5, 0.5]."""
    denom = yl - 2.0 * yc + yr
    if denom >= 0:
        return 0.0
    return float(np.clip(0.5 * (yl - yr) / denom, -0.5, 0.5))


def _refine_gcp_position(amp: np.ndarray, grid: GroundGrid, gcp: Gcp) -> Vec3:
    """Sub-pixel apex of the amplitude blob around a GCP (separable parabola)."""
    r, c = gcp.row, gcp.col
    dr = dc = 0.0
    if 0 < r < amp.shape[0] - 1:
        dr = _parabolic_offset(amp[r - 1, c], amp[r, c], amp[r + 1, c])
    if 0 < c < amp.shape[1] - 1:
        dc = _parabolic_offset(amp[r, c - 1], amp[r, c], amp[r, c + 1])
    return Vec3(
        grid.x_start + (c + dc) * grid.x_step,
        grid.y_start + (r + dr) * grid.y_step,
        grid.q,
    )


def _differential_doppler(center: Vec3, pixel_pos: Vec3, true_pos: Vec3,
                          velocity: Vec3, wavelength: float) -> float:
    """Doppler difference (rad/s) between reading a series at pixel_pos
    while the scatterer actually sits at true_pos: (4pi/lambda)(u_p - u_t) . v."""
    up = unit_vector(center, pixel_pos)
    ut = unit_vector(center, true_pos)
    dv = (up.x - ut.x) * velocity.x + (up.y - ut.y) * velocity.y + (up.z - ut.z) * velocity.z
    return (4.0 * math.pi / wavelength) * dv


def autofocus_refine(
    cube: DataCube,
    nav: Trajectory,
    arr: ArrayConfig,
    grid: GroundGrid,
    radar: RadarConfig,
    iterations: int = 3,
    threads: int = 1,
    interp: str = "linear",
    gcp_count: int = 25,
    min_separation: int = 5,
    pad_factor: int = 8,
    margin: float = 1.5,
    weighting: str = "amplitude",
    drop_z: bool = True,
    drop_y: bool = False,
    tol: float = 2e-3,
    refine_at: float = 0.02,
    initial_stack: ImageStack | None = None,
):
    """Iterative autofocus: estimate, correct the trajectory, refocus.

    A single pass underestimates the velocity error because a defocused
    stack places its bright blobs displaced along iso-range arcs, so a
    GCP pixel reads an extra differential Doppler (u(pixel) - u(target)) . v
    on top of the wanted k . dv.  Raw passes simply fold each estimate into
    the trajectory and re-backproject: the blob displacement shrinks with
    the remaining error, so the fixed point is the true velocity.  Raw
    passes stall at the pixel quantisation floor, so once an increment
    falls below refine_at (m/s) — or on the last allowed pass — the GCPs
    are additionally refined to the sub-pixel apex of their blob on the
    incoherent mean and the pixel-to-apex differential Doppler is
    subtracted.  (That correction is only valid near focus, where the apex
    coincides with the scatterer; applied early it would cancel the very
    cross-range signal being estimated.)  Stops once a refined increment
    falls below tol (m/s).

    initial_stack, when given, must be the back-projection of cube with
    nav on grid and is used for the first pass instead of recomputing it.

    Returns (report, stack): the report carries the accumulated estimate
    (per-iteration diagnostics come from the final pass), and the stack
    is the last backprojection with the final increment compensated via
    its phase screens — ready for a coherent sum.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    current = nav
    total = Vec3(0.0, 0.0, 0.0)
    report = None
    refine = iterations == 1
    for it in range(iterations):
        if it == 0 and initial_stack is not None:
            stack = initial_stack
        else:
            stack = backproject_stack(cube, current, arr, grid, threads=threads, interp=interp)
        amp = incoherent_mean(stack)
        gcps = select_gcp(amp, grid, gcp_count, min_separation)
        center = current.position + arr.offset
        for g in gcps:
            g.omega, g.prominence = estimate_gcp_frequency(stack, g, pad_factor)
            if refine:
                refined = _refine_gcp_position(amp, grid, g)
                g.omega -= _differential_doppler(center, g.position, refined,
                                                 current.velocity, radar.wavelength)
                g.position = refined
        reject_outliers(gcps, radar.nav_accuracy, radar.wavelength, margin)
        report = solve_wls(gcps, radar.wavelength, center,
                           drop_z=drop_z, drop_y=drop_y, weighting=weighting)
        step = report.delta_v
        total = total + step
        current = integrate_residual_velocity(current, step)
        if refine and step.norm() < tol:
            break
        if step.norm() < refine_at or it == iterations - 2:
            refine = True

    screens = phase_screens(grid, report.delta_v, stack.tau, radar.wavelength,
                            current.position + arr.offset)
    compensated = compensate(stack, screens)
    final = MocoReport(
        delta_v=total,
        accuracy=report.accuracy,
        condition_number=report.condition_number,
        dropped_z=report.dropped_z,
        dropped_y=report.dropped_y,
        n_used=report.n_used,
        gcps=report.gcps,
    )
    return final, compensated


def write_report_json(path, report: MocoReport) -> None:
    with open(path, "w") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def write_gcp_csv(path, report: MocoReport) -> None:
    fields = ["row", "col", "x", "y", "z", "amplitude", "omega", "prominence", "weight", "outlier"]
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fields)
        writer.writeheader()
        for g in report.to_dict()["gcps"]:
            writer.writerow(g)
