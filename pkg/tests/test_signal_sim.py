import math

import numpy as np
import pytest

from mimosar import (
    ArrayConfig,
    DataCube,
    RadarConfig,
    Scatterer,
    Scene,
    Trajectory,
    Vec3,
    apply_velocity_error,
    read_cube,
    simulate_range_compressed,
    write_cube,
)

from conftest import make_radar


def still_platform(n_pulses=1):
    # zero-velocity trajectory so ranges stay put across pulses
    return Trajectory(Vec3(0, 0, 0), Vec3(0.0, 0.0, 0.0), n_pulses=n_pulses, pri=1e-3)


def single_vpc():
    return ArrayConfig(n_vpc=1, spacing=0.001)


def test_envelope_peaks_at_target_range_bin():
    # target exactly on bin 480: r = 8 + 480 * 0.025 = 20 m
    radar = make_radar(n_bins=900, range_start=8.0)
    scene = Scene([Scatterer(Vec3(20.0, 0.0, 0.0))])
    cube = simulate_range_compressed(scene, still_platform(), single_vpc(), radar)
    mag = np.abs(cube.samples[:, 0, 0])
    assert mag.argmax() == 480
    assert mag[480] == pytest.approx(1.0, abs=1e-6)
    # sinc envelope: first sidelobes around 21.7% two resolution cells out
    assert mag[480 + 2] < 1e-6  # exact null at one resolution cell (2 bins)


def test_phase_matches_two_way_carrier():
    # r = 20 m is an integer number of wavelengths: exp(-j 4 pi r / lambda) = 1
    radar = make_radar(n_bins=900, range_start=8.0)
    scene = Scene([Scatterer(Vec3(20.0, 0.0, 0.0))])
    cube = simulate_range_compressed(scene, still_platform(), single_vpc(), radar)
    peak = cube.samples[480, 0, 0]
    assert peak.real == pytest.approx(1.0, abs=1e-6)
    assert peak.imag == pytest.approx(0.0, abs=1e-6)


def test_half_bin_offset_splits_envelope():
    # target half a bin off: the two neighbours each carry |sinc(0.25)|... the
    # sum of their magnitudes is the frozen constant 2*sinc(0.5/2)... checked
    # against the envelope evaluated directly.
    radar = make_radar(n_bins=900, range_start=8.0)
    r = 8.0 + 480.5 * 0.025
    scene = Scene([Scatterer(Vec3(r, 0.0, 0.0))])
    cube = simulate_range_compressed(scene, still_platform(), single_vpc(), radar)
    mag = np.abs(cube.samples[:, 0, 0])
    expected = abs(np.sinc(0.5 * 0.025 / 0.05))
    assert mag[480] == pytest.approx(expected, abs=1e-6)
    assert mag[481] == pytest.approx(expected, abs=1e-6)


def test_superposition_of_two_scatterers():
    radar = make_radar(n_bins=900, range_start=8.0)
    a = Scatterer(Vec3(15.0, 2.0, 0.0))
    b = Scatterer(Vec3(19.0, -3.0, 0.0), reflectivity=0.5 + 0.25j)
    traj = Trajectory(Vec3(0, 0, 0), Vec3(6.94, 0, 0), n_pulses=4, pri=1e-3)
    arr = ArrayConfig(n_vpc=2, spacing=0.001)
    both = simulate_range_compressed(Scene([a, b]), traj, arr, radar)
    only_a = simulate_range_compressed(Scene([a]), traj, arr, radar)
    only_b = simulate_range_compressed(Scene([b]), traj, arr, radar)
    assert np.allclose(
        both.samples, only_a.samples + only_b.samples, atol=2e-6, rtol=0
    )


def test_reflectivity_scales_linearly():
    radar = make_radar(n_bins=400, range_start=8.0)
    unit = simulate_range_compressed(
        Scene([Scatterer(Vec3(12.0, 0.0, 0.0))]), still_platform(), single_vpc(), radar
    )
    doubled = simulate_range_compressed(
        Scene([Scatterer(Vec3(12.0, 0.0, 0.0), reflectivity=2.0)]),
        still_platform(), single_vpc(), radar,
    )
    assert np.allclose(doubled.samples, 2.0 * unit.samples, atol=1e-6)


def test_moving_scatterer_advances_with_slow_time():
    # radial 0.5 m/s toward a still platform: peak bin walks inward pulse by pulse
    radar = make_radar(n_bins=900, range_start=8.0)
    traj = still_platform(n_pulses=201)
    mover = Scatterer(Vec3(20.0, 0.0, 0.0), velocity=Vec3(-0.5, 0.0, 0.0))
    cube = simulate_range_compressed(Scene([mover]), traj, single_vpc(), radar)
    first = np.abs(cube.samples[:, 0, 0]).argmax()
    mid = np.abs(cube.samples[:, 0, 100]).argmax()
    last = np.abs(cube.samples[:, 0, 200]).argmax()
    assert mid == 480  # at tau=0 the mover sits at its nominal position
    assert first == 480 + 2  # 0.1 s earlier it was 0.05 m farther = 2 bins
    assert last == 480 - 2
    # phase rate: d(phase)/d(tau) = +4 pi / wavelength * closing speed
    series = cube.samples[480, 0, 99:102].astype(np.complex128)
    step = np.angle(series[1:] / series[:-1])
    assert np.allclose(step, 4 * math.pi / 0.004 * 0.5 * 1e-3, rtol=1e-3)


def test_noise_is_seeded_and_reproducible():
    radar = make_radar(n_bins=300, range_start=8.0)
    scene = Scene([Scatterer(Vec3(10.0, 0.0, 0.0))], noise_power=0.1, noise_seed=42)
    traj = Trajectory(Vec3(0, 0, 0), Vec3(6.94, 0, 0), n_pulses=8, pri=1e-3)
    arr = ArrayConfig(n_vpc=4, spacing=0.001)
    c1 = simulate_range_compressed(scene, traj, arr, radar)
    c2 = simulate_range_compressed(scene, traj, arr, radar)
    assert np.array_equal(c1.samples, c2.samples)
    other = Scene([Scatterer(Vec3(10.0, 0.0, 0.0))], noise_power=0.1, noise_seed=43)
    c3 = simulate_range_compressed(other, traj, arr, radar)
    assert not np.array_equal(c1.samples, c3.samples)


def test_noise_power_matches_request():
    radar = make_radar(n_bins=2000, range_start=8.0)
    scene = Scene([], noise_power=0.04, noise_seed=7)
    traj = Trajectory(Vec3(0, 0, 0), Vec3(6.94, 0, 0), n_pulses=16, pri=1e-3)
    arr = ArrayConfig(n_vpc=8, spacing=0.001)
    cube = simulate_range_compressed(scene, traj, arr, radar)
    measured = np.mean(np.abs(cube.samples.astype(np.complex128)) ** 2)
    assert measured == pytest.approx(0.04, rel=0.01)


def test_scene_and_config_validation():
    with pytest.raises(ValueError):
        Scene([], noise_power=-1.0)
    with pytest.raises(ValueError):
        Scatterer(Vec3(1, 0, 0), reflectivity=0.0)
    with pytest.raises(ValueError):
        RadarConfig(0.004, 0.05, 0.030, 100, 8.0, 1e-3)  # bins coarser than half the resolution
    with pytest.raises(ValueError):
        RadarConfig(0.004, 0.05, 0.025, 0, 8.0, 1e-3)
    with pytest.raises(ValueError):
        RadarConfig(-0.004, 0.05, 0.025, 100, 8.0, 1e-3)


def test_cube_round_trip(tmp_path):
    radar = make_radar(n_bins=250, range_start=8.0)
    scene = Scene([Scatterer(Vec3(11.0, 1.0, 0.0))], noise_power=0.01, noise_seed=5)
    traj = Trajectory(Vec3(0, 0, 0), Vec3(6.94, 0, 0), n_pulses=6, pri=1e-3)
    arr = ArrayConfig(n_vpc=3, spacing=0.001)
    cube = simulate_range_compressed(scene, traj, arr, radar)
    path = tmp_path / "cube.srcc"
    write_cube(path, cube)
    back = read_cube(path)
    assert np.array_equal(back.samples, cube.samples)
    assert back.range_start == cube.range_start
    assert back.range_step == cube.range_step
    assert back.pri == cube.pri
    assert back.wavelength == cube.wavelength


def test_cube_read_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.srcc"
    bad.write_bytes(b"NOPE" + b"\x00" * 60)
    with pytest.raises(ValueError):
        read_cube(bad)
    short = tmp_path / "short.srcc"
    short.write_bytes(b"SRCC")
    with pytest.raises(ValueError):
        read_cube(short)


def test_cube_rejects_non_finite_samples():
    s = np.ones((4, 2, 3), dtype=np.complex64)
    s[1, 0, 2] = np.nan
    with pytest.raises(ValueError):
        DataCube(samples=s, range_start=8.0, range_step=0.025, pri=1e-3, wavelength=0.004)


def test_apply_velocity_error_offsets_velocity_only():
    traj = Trajectory(Vec3(1, 2, 3), Vec3(6.94, 0, 0), n_pulses=10, pri=1e-3)
    nav = apply_velocity_error(traj, Vec3(0.26, -0.01, 0.0))
    assert nav.velocity == Vec3(6.94 + 0.26, -0.01, 0.0)
    assert nav.position == traj.position
    assert nav.n_pulses == traj.n_pulses and nav.pri == traj.pri
