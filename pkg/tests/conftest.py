"""Shared builders and the acceptance-criteria summary hook."""

import numpy as np
import pytest

from mimosar import ArrayConfig, RadarConfig, Scatterer, Scene, Trajectory, Vec3

# Results recorded by tests/test_acceptance.py; printed in the terminal
# summary so there is one PASS/FAIL line per criterion even under -q.
_CRITERIA = {}


def record_criterion(num, name, ok, detail=""):
    _CRITERIA[num] = (name, bool(ok), detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        name, ok, detail = _CRITERIA[num]
        line = f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)


def make_array():
    # 8 virtual phase centers, quarter-wavelength spacing along y
    return ArrayConfig(n_vpc=8, spacing=0.001)


def make_trajectory(n_pulses=200, pri=1e-3, velocity=(6.94, 0.0, 0.0)):
    return Trajectory(
        position=Vec3(0.0, 0.0, 0.0),
        velocity=Vec3(*velocity),
        n_pulses=n_pulses,
        pri=pri,
    )


def make_radar(n_bins, range_start, pri=1e-3):
    return RadarConfig(
        wavelength=0.004,
        range_resolution=0.05,
        range_bin_spacing=0.025,
        n_bins=n_bins,
        range_start=range_start,
        pri=pri,
    )


def scene_from_xy(targets, noise_power=0.0, noise_seed=None):
    scatterers = [Scatterer(position=Vec3(x, y, 0.0)) for x, y in targets]
    return Scene(scatterers=scatterers, noise_power=noise_power, noise_seed=noise_seed)


def wide_area_targets():
    """25 point targets spread over x in [10, 45], y in [-12, 12].

    Ranges are laddered 1.33 m apart and the sin-azimuth ladder (+-0.45,
    steps of 0.0375) is assigned largest-|s|-first to the nearest ranges,
    so every pair of targets is well separated both in range (sinc tails
    stay ~1% at each other's arcs) and in azimuth (their differential
    Doppler sweeps many cycles over the aperture and averages out of the
    incoherent mean).  Deterministic: seeds only ever vary the noise.
    """
    s_vals = np.linspace(-0.45, 0.45, 25)
    order = np.argsort(-np.abs(s_vals), kind="stable")
    r_vals = 12.0 + 32.0 * np.arange(25) / 24.0
    targets = []
    for r, s in zip(r_vals, s_vals[order]):
        targets.append((float(r * np.sqrt(1.0 - s * s)), float(r * s)))
    xs = np.array([t[0] for t in targets])
    ys = np.array([t[1] for t in targets])
    assert xs.min() >= 10.0 and xs.max() <= 45.0 and np.abs(ys).max() <= 12.0
    return targets


@pytest.fixture(scope="session")
def array():
    return make_array()
