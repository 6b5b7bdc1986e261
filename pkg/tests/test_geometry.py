import math

import numpy as np
import pytest

from mimosar import ArrayConfig, GroundGrid, Trajectory, Vec3
from mimosar.geometry import range_history, unit_vector, vpc_positions, wavevector


def test_vec3_arithmetic():
    a = Vec3(1.0, 2.0, 3.0)
    b = Vec3(-4.0, 0.5, 2.0)
    assert a + b == Vec3(-3.0, 2.5, 5.0)
    assert a - b == Vec3(5.0, 1.5, 1.0)
    assert a.scaled(2.0) == Vec3(2.0, 4.0, 6.0)
    assert a.dot(b) == 1.0 * -4.0 + 2.0 * 0.5 + 3.0 * 2.0
    assert Vec3(3.0, 4.0, 0.0).norm() == 5.0
    assert np.array_equal(a.as_array(), np.array([1.0, 2.0, 3.0]))


def test_trajectory_tau_is_centered():
    traj = Trajectory(Vec3(0, 0, 0), Vec3(1, 0, 0), n_pulses=5, pri=1e-3)
    taus = [traj.tau(m) for m in range(5)]
    assert taus == [-2e-3, -1e-3, 0.0, 1e-3, 2e-3]


def test_trajectory_tau_sums_to_zero():
    # centered slow time: the mean pulse time is the aperture center
    traj = Trajectory(Vec3(0, 0, 0), Vec3(6.94, 0, 0), n_pulses=200, pri=1e-3)
    total = math.fsum(traj.tau(m) for m in range(200))
    assert abs(total) < 1e-12 * 200 * 1e-3


def test_position_at_moves_linearly():
    traj = Trajectory(Vec3(1.0, 2.0, 0.5), Vec3(6.94, 0.0, 0.0), n_pulses=200, pri=1e-3)
    p = traj.position_at(traj.tau(199))
    # last pulse sits +99.5 PRI from center
    assert p.x == pytest.approx(1.0 + 6.94 * 99.5e-3, abs=1e-12)
    assert p.y == 2.0 and p.z == 0.5


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory(Vec3(0, 0, 0), Vec3(1, 0, 0), n_pulses=0, pri=1e-3)
    with pytest.raises(ValueError):
        Trajectory(Vec3(0, 0, 0), Vec3(1, 0, 0), n_pulses=10, pri=0.0)


def test_vpc_offsets_centered():
    arr = ArrayConfig(n_vpc=8, spacing=0.001)
    offs = arr.centered_offsets()
    assert offs[0] == pytest.approx(-3.5e-3)
    assert offs[-1] == pytest.approx(3.5e-3)
    assert abs(sum(offs)) < 1e-18
    assert np.allclose(np.diff(offs), 0.001)


def test_vpc_positions_follow_platform_and_offset():
    arr = ArrayConfig(n_vpc=2, spacing=0.004, offset=Vec3(0.1, 0.0, 0.25))
    traj = Trajectory(Vec3(0, 0, 0), Vec3(10.0, 0, 0), n_pulses=3, pri=1e-2)
    p0 = vpc_positions(traj, arr, 0)  # tau = -1e-2
    assert p0[0].x == pytest.approx(-0.1 + 0.1)
    assert p0[0].y == pytest.approx(-0.002)
    assert p0[1].y == pytest.approx(+0.002)
    assert p0[0].z == 0.25


def test_unit_vector_345():
    u = unit_vector(Vec3(0, 0, 0), Vec3(3.0, 4.0, 0.0))
    assert u.x == pytest.approx(0.6)
    assert u.y == pytest.approx(0.8)
    assert u.norm() == pytest.approx(1.0)


def test_wavevector_values():
    lam = 0.004
    theta = math.radians(87.0)
    u = Vec3(math.sin(theta), 0.0, math.cos(theta))
    k = wavevector(u, lam)
    assert k.x == pytest.approx(3137.287210042762, rel=1e-12)
    assert k.y == 0.0
    assert k.z == pytest.approx(164.41825565142963, rel=1e-12)
    assert k.norm() == pytest.approx(4.0 * math.pi / lam, rel=1e-12)


def test_wavevector_rejects_non_unit_direction():
    with pytest.raises(ValueError):
        wavevector(Vec3(1.0, 1.0, 0.0), 0.004)


def test_range_history_exact_single_pulse():
    traj = Trajectory(Vec3(0, 0, 0), Vec3(5.0, 0, 0), n_pulses=1, pri=1e-3)
    arr = ArrayConfig(n_vpc=1, spacing=0.001)
    r = range_history(0, 0, Vec3(20.0, 0.0, 0.0), traj, arr)
    assert r == pytest.approx(20.0, abs=1e-12)


def test_range_history_plane_wave_approximation():
    traj = Trajectory(Vec3(0, 0, 0), Vec3(6.94, 0, 0), n_pulses=1, pri=1e-3)
    arr = ArrayConfig(n_vpc=8, spacing=0.001)
    target = Vec3(30.0, 8.0, 0.0)
    exact = range_history(7, 0, target, traj, arr, mode="exact")
    plane = range_history(7, 0, target, traj, arr, mode="plane-wave")
    # quadratic wavefront term d^2/(2 r) with d = 3.5 mm offset
    assert abs(exact - plane) < (3.5e-3) ** 2 / (2 * 31.0) * 1.5
    assert exact != plane
    with pytest.raises(ValueError):
        range_history(0, 0, target, traj, arr, mode="spherical")


def test_grid_from_extent_and_pixel_positions():
    grid = GroundGrid.from_extent(10.0, 12.0, 0.5, -1.0, 1.0, 0.5, q=0.3)
    assert grid.nx == 5 and grid.ny == 5
    assert np.allclose(grid.x_axis, [10.0, 10.5, 11.0, 11.5, 12.0])
    assert np.allclose(grid.y_axis, [-1.0, -0.5, 0.0, 0.5, 1.0])
    p = grid.pixel_position(2, 3)
    assert (p.x, p.y, p.z) == (11.5, 0.0, 0.3)
    assert grid.shape == (5, 5)


def test_grid_validation():
    with pytest.raises(ValueError):
        GroundGrid.from_extent(10.0, 9.0, 0.5, -1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        GroundGrid.from_extent(10.0, 12.0, -0.5, -1.0, 1.0, 0.5)
