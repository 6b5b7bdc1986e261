"""Command-line pipeline: simulate -> focus (with optional autofocus) -> report.

Configs are JSON with strict validation: unknown or missing fields are
rejected with the offending field path.  All outputs (cube, image,
report, quick-look) are deterministic for a given config and seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayConfig, GroundGrid, Trajectory, Vec3
from .metrics import compute_focus_metrics
from .moco import (
    MocoError,
    autofocus,
    autofocus_refine,
    compensate,
    integrate_residual_velocity,
    phase_screens,
    write_gcp_csv,
    write_report_json,
)
from .signal_sim import (
    RadarConfig,
    Scatterer,
    Scene,
    apply_velocity_error,
    read_cube,
    simulate_range_compressed,
    write_cube,
)
from .tdbp import backproject_stack, coherent_sum, write_image

__all__ = ["ConfigError", "RunConfig", "load_config", "write_quicklook", "main"]


class ConfigError(ValueError):
    pass


@dataclass
class MocoParams:
    gcp_count: int = 25
    min_separation: int = 5
    pad_factor: int = 8
    margin: float = 1.5
    weighting: str = "amplitude"
    drop_z: bool = True
    drop_y: bool = False
    interp: str = "linear"
    gcp_source: str = "detect"
    iterations: int = 3


@dataclass
class RunConfig:
    radar: RadarConfig
    trajectory: Trajectory
    array: ArrayConfig
    grid: GroundGrid
    scene: Scene
    delta_v: Vec3
    moco: MocoParams


# --- strict JSON walking ----------------------------------------------------

def _check_fields(d, path, allowed, required):
    if not isinstance(d, dict):
        raise ConfigError(f"{path or 'config'}: expected an object")
    for key in d:
        if key not in allowed:
            raise ConfigError(f"{_join(path, key)}: unknown field")
    for key in required:
        if key not in d:
            raise ConfigError(f"{_join(path, key)}: missing required field")


def _join(path, key):
    return f"{path}.{key}" if path else key


def _num(d, key, path, default=None):
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{_join(path, key)}: expected a number, got {v!r}")
    return float(v)


def _int(d, key, path, default=None):
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{_join(path, key)}: expected an integer, got {v!r}")
    return v


def _bool(d, key, path, default=None):
    if key not in d:
        return default
    v = d[key]
    if not isinstance(v, bool):
        raise ConfigError(f"{_join(path, key)}: expected true/false, got {v!r}")
    return v


def _str(d, key, path, default=None, choices=None):
    if key not in d:
        return default
    v = d[key]
    if not isinstance(v, str):
        raise ConfigError(f"{_join(path, key)}: expected a string, got {v!r}")
    if choices is not None and v not in choices:
        raise ConfigError(f"{_join(path, key)}: expected one of {sorted(choices)}, got {v!r}")
    return v


def _vec3(d, key, path, default=None):
    if key not in d:
        return default
    v = d[key]
    fp = _join(path, key)
    if not (isinstance(v, list) and len(v) == 3):
        raise ConfigError(f"{fp}: expected [x, y, z]")
    for c in v:
        if isinstance(c, bool) or not isinstance(c, (int, float)):
            raise ConfigError(f"{fp}: expected numeric components, got {c!r}")
    return Vec3(float(v[0]), float(v[1]), float(v[2]))


def _triplet(d, key, path):
    v = d.get(key)
    fp = _join(path, key)
    if not (isinstance(v, list) and len(v) == 3):
        raise ConfigError(f"{fp}: expected [start, stop, step]")
    start, stop, step = (float(c) for c in v)
    if step <= 0 or stop < start:
        raise ConfigError(f"{fp}: need stop >= start and step > 0")
    return start, stop, step


def _scatterer(d, path):
    _check_fields(d, path, {"position", "reflectivity", "velocity"}, {"position"})
    pos = _vec3(d, "position", path)
    refl = 1.0 + 0.0j
    if "reflectivity" in d:
        v = d["reflectivity"]
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            refl = complex(float(v), 0.0)
        elif isinstance(v, list) and len(v) == 2:
            refl = complex(float(v[0]), float(v[1]))
        else:
            raise ConfigError(f"{_join(path, 'reflectivity')}: expected a number or [re, im]")
    vel = _vec3(d, "velocity", path)
    return Scatterer(position=pos, reflectivity=refl, velocity=vel)


def _grid_targets(d, path):
    _check_fields(
        d, path,
        {"x", "y", "count_x", "count_y", "jitter", "seed", "reflectivity"},
        {"x", "y", "count_x", "count_y"},
    )
    xr, yr = d["x"], d["y"]
    for key, v in (("x", xr), ("y", yr)):
        if not (isinstance(v, list) and len(v) == 2):
            raise ConfigError(f"{_join(path, key)}: expected [lo, hi]")
    cx = _int(d, "count_x", path)
    cy = _int(d, "count_y", path)
    if cx < 1 or cy < 1:
        raise ConfigError(f"{path}: target counts must be >= 1")
    jitter = _num(d, "jitter", path, 0.0)
    seed = _int(d, "seed", path, 0)
    refl = _num(d, "reflectivity", path, 1.0)
    xs = np.linspace(xr[0], xr[1], cx) if cx > 1 else np.array([(xr[0] + xr[1]) / 2])
    ys = np.linspace(yr[0], yr[1], cy) if cy > 1 else np.array([(yr[0] + yr[1]) / 2])
    rng = np.random.default_rng(seed)
    out = []
    for y in ys:
        for x in xs:
            jx, jy = (rng.uniform(-jitter, jitter, 2) if jitter > 0 else (0.0, 0.0))
            px = float(np.clip(x + jx, xr[0], xr[1]))
            py = float(np.clip(y + jy, yr[0], yr[1]))
            out.append(Scatterer(position=Vec3(px, py, 0.0), reflectivity=complex(refl, 0.0)))
    return out


def parse_config(cfg: dict) -> RunConfig:
    _check_fields(
        cfg, "",
        {"radar", "trajectory", "array", "grid", "scene", "delta_v", "moco"},
        {"radar", "trajectory", "array", "grid", "scene"},
    )

    r = cfg["radar"]
    _check_fields(
        r, "radar",
        {"wavelength", "range_resolution", "range_bin_spacing", "n_bins", "range_start",
         "pri", "nav_accuracy"},
        {"wavelength", "range_resolution", "range_bin_spacing", "n_bins", "range_start", "pri"},
    )
    try:
        radar = RadarConfig(
            wavelength=_num(r, "wavelength", "radar"),
            range_resolution=_num(r, "range_resolution", "radar"),
            range_bin_spacing=_num(r, "range_bin_spacing", "radar"),
            n_bins=_int(r, "n_bins", "radar"),
            range_start=_num(r, "range_start", "radar"),
            pri=_num(r, "pri", "radar"),
            nav_accuracy=_num(r, "nav_accuracy", "radar", 0.2),
        )
    except ValueError as e:
        raise ConfigError(f"radar: {e}") from e

    t = cfg["trajectory"]
    _check_fields(t, "trajectory", {"position", "velocity", "n_pulses"}, {"velocity", "n_pulses"})
    try:
        trajectory = Trajectory(
            position=_vec3(t, "position", "trajectory", Vec3(0.0, 0.0, 0.0)),
            velocity=_vec3(t, "velocity", "trajectory"),
            n_pulses=_int(t, "n_pulses", "trajectory"),
            pri=radar.pri,
        )
    except ValueError as e:
        raise ConfigError(f"trajectory: {e}") from e

    a = cfg["array"]
    _check_fields(a, "array", {"n_vpc", "spacing", "offset"}, {"n_vpc", "spacing"})
    try:
        array = ArrayConfig(
            n_vpc=_int(a, "n_vpc", "array"),
            spacing=_num(a, "spacing", "array"),
            offset=_vec3(a, "offset", "array", Vec3(0.0, 0.0, 0.0)),
        )
    except ValueError as e:
        raise ConfigError(f"array: {e}") from e

    g = cfg["grid"]
    _check_fields(g, "grid", {"x", "y", "q"}, {"x", "y"})
    x0, x1, dx = _triplet(g, "x", "grid")
    y0, y1, dy = _triplet(g, "y", "grid")
    grid = GroundGrid.from_extent(x0, x1, dx, y0, y1, dy, q=_num(g, "q", "grid", 0.0))

    s = cfg["scene"]
    _check_fields(s, "scene", {"scatterers", "grid_targets", "noise_power", "noise_seed"}, set())
    if ("scatterers" in s) == ("grid_targets" in s):
        raise ConfigError("scene: provide exactly one of 'scatterers' or 'grid_targets'")
    if "scatterers" in s:
        if not isinstance(s["scatterers"], list):
            raise ConfigError("scene.scatterers: expected a list")
        scatterers = [
            _scatterer(sc, f"scene.scatterers[{i}]") for i, sc in enumerate(s["scatterers"])
        ]
    else:
        scatterers = _grid_targets(s["grid_targets"], "scene.grid_targets")
    noise_seed = s.get("noise_seed")
    if noise_seed is not None and (isinstance(noise_seed, bool) or not isinstance(noise_seed, int)):
        raise ConfigError(f"scene.noise_seed: expected an integer or null, got {noise_seed!r}")
    try:
        scene = Scene(
            scatterers=scatterers,
            noise_power=_num(s, "noise_power", "scene", 0.0),
            noise_seed=noise_seed,
        )
    except ValueError as e:
        raise ConfigError(f"scene: {e}") from e

    delta_v = _vec3(cfg, "delta_v", "", Vec3(0.0, 0.0, 0.0))

    mp = cfg.get("moco", {})
    _check_fields(
        mp, "moco",
        {"gcp_count", "min_separation", "pad_factor", "margin", "weighting",
         "drop_z", "drop_y", "interp", "gcp_source", "iterations"},
        set(),
    )
    moco = MocoParams(
        gcp_count=_int(mp, "gcp_count", "moco", 25),
        min_separation=_int(mp, "min_separation", "moco", 5),
        pad_factor=_int(mp, "pad_factor", "moco", 8),
        margin=_num(mp, "margin", "moco", 1.5),
        weighting=_str(mp, "weighting", "moco", "amplitude",
                       choices={"amplitude", "prominence", "uniform"}),
        drop_z=_bool(mp, "drop_z", "moco", True),
        drop_y=_bool(mp, "drop_y", "moco", False),
        interp=_str(mp, "interp", "moco", "linear", choices={"linear", "sinc8"}),
        gcp_source=_str(mp, "gcp_source", "moco", "detect",
                        choices={"detect", "reference"}),
        iterations=_int(mp, "iterations", "moco", 3),
    )
    if moco.gcp_count < 1:
        raise ConfigError("moco.gcp_count: must be >= 1")
    if moco.iterations < 1:
        raise ConfigError("moco.iterations: must be >= 1")

    return RunConfig(radar=radar, trajectory=trajectory, array=array, grid=grid,
                     scene=scene, delta_v=delta_v, moco=moco)


def load_config(path) -> RunConfig:
    try:
        with open(path) as f:
            cfg = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    return parse_config(cfg)


# --- outputs ----------------------------------------------------------------

def write_quicklook(path, img, dynamic_range_db: float = 40.0) -> None:
    """8-bit PGM (P5) of the magnitude in dB below the peak."""
    if dynamic_range_db <= 0:
        raise ValueError("dynamic range must be > 0 dB")
    mag = np.abs(img.pixels.astype(np.complex128))
    top = mag.max()
    if top == 0:
        levels = np.zeros(mag.shape, dtype=np.uint8)
    else:
        db = 20.0 * np.log10(np.maximum(mag / top, 1e-30))
        db = np.clip(db, -dynamic_range_db, 0.0)
        levels = np.round((db + dynamic_range_db) / dynamic_range_db * 255.0).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P5\n{img.pixels.shape[1]} {img.pixels.shape[0]}\n255\n".encode())
        f.write(levels.tobytes())


def _focus_report(path, mode, cfg, moco_report, corrected, img, clipped_total):
    doc = {
        "mode": mode,
        "delta_v_injected": [cfg.delta_v.x, cfg.delta_v.y, cfg.delta_v.z],
        "moco": moco_report.to_dict() if moco_report is not None else None,
        "corrected_velocity": (
            [corrected.velocity.x, corrected.velocity.y, corrected.velocity.z]
            if corrected is not None else None
        ),
        "metrics": compute_focus_metrics(img).to_dict(),
        "clipped_total": int(clipped_total),
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


# --- commands ---------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    scene = cfg.scene
    if args.seed is not None:
        scene = Scene(scene.scatterers, scene.noise_power, args.seed)
    cube = simulate_range_compressed(scene, cfg.trajectory, cfg.array, cfg.radar)
    write_cube(args.out, cube)
    print(f"wrote {args.out}: {cube.n_bins} bins x {cube.n_vpc} VPC x {cube.n_pulses} pulses")
    return 0


def cmd_focus(args) -> int:
    import os

    cfg = load_config(args.config)
    cube = read_cube(args.cube)
    if cube.n_vpc != cfg.array.n_vpc or cube.n_pulses != cfg.trajectory.n_pulses:
        raise ConfigError(
            f"cube dimensions ({cube.n_vpc} VPC, {cube.n_pulses} pulses) do not match "
            f"the config ({cfg.array.n_vpc} VPC, {cfg.trajectory.n_pulses} pulses)"
        )
    os.makedirs(args.out, exist_ok=True)

    mode = "moco"
    if args.no_moco:
        mode = "no-moco"
    elif args.oracle_moco:
        mode = "oracle-moco"

    nav = apply_velocity_error(cfg.trajectory, cfg.delta_v)
    stack = backproject_stack(cube, nav, cfg.array, cfg.grid,
                              threads=args.threads, interp=cfg.moco.interp)
    clipped_total = int(stack.clipped.sum())

    report = None
    corrected = None
    if mode == "no-moco":
        img = coherent_sum(stack)
    elif mode == "oracle-moco":
        center = nav.position + cfg.array.offset
        screens = phase_screens(cfg.grid, cfg.delta_v, stack.tau, cfg.radar.wavelength, center)
        img = coherent_sum(compensate(stack, screens))
    elif cfg.moco.gcp_source == "reference":
        # Control points with known coordinates: single-pass estimate on the
        # defocused stack, then refocus with the corrected trajectory so the
        # range-envelope migration is repaired along with the phase.
        refs = [sc.position for sc in cfg.scene.scatterers]
        report, _screens = autofocus(
            stack, cfg.radar, nav, cfg.array,
            pad_factor=cfg.moco.pad_factor,
            margin=cfg.moco.margin,
            weighting=cfg.moco.weighting,
            drop_z=cfg.moco.drop_z,
            drop_y=cfg.moco.drop_y,
            references=refs,
        )
        corrected = integrate_residual_velocity(nav, report.delta_v)
        refocused = backproject_stack(cube, corrected, cfg.array, cfg.grid,
                                      threads=args.threads, interp=cfg.moco.interp)
        clipped_total = int(refocused.clipped.sum())
        img = coherent_sum(refocused)
    else:
        report, comp = autofocus_refine(
            cube, nav, cfg.array, cfg.grid, cfg.radar,
            iterations=cfg.moco.iterations,
            threads=args.threads,
            interp=cfg.moco.interp,
            gcp_count=cfg.moco.gcp_count,
            min_separation=cfg.moco.min_separation,
            pad_factor=cfg.moco.pad_factor,
            margin=cfg.moco.margin,
            weighting=cfg.moco.weighting,
            drop_z=cfg.moco.drop_z,
            drop_y=cfg.moco.drop_y,
            initial_stack=stack,
        )
        clipped_total = int(comp.clipped.sum())
        img = coherent_sum(comp)
        corrected = integrate_residual_velocity(nav, report.delta_v)

    out = args.out
    write_image(os.path.join(out, "image.simg"), img)
    write_quicklook(os.path.join(out, "quicklook.pgm"), img, args.dynamic_range_db)
    _focus_report(os.path.join(out, "report.json"), mode, cfg, report, corrected, img, clipped_total)
    if report is not None:
        write_report_json(os.path.join(out, "moco.json"), report)
        write_gcp_csv(os.path.join(out, "gcps.csv"), report)
        dv = report.delta_v
        print(f"estimated delta_v = ({dv.x:+.4f}, {dv.y:+.4f}, {dv.z:+.4f}) m/s "
              f"from {report.n_used} GCPs")
    print(f"wrote {out}/image.simg, report.json, quicklook.pgm")
    return 0


_REPORT_COLUMNS = [
    ("mode", lambda d: d["mode"]),
    ("dvx_est", lambda d: _fmt(_moco_field(d, "x"))),
    ("dvy_est", lambda d: _fmt(_moco_field(d, "y"))),
    ("acc_x", lambda d: _fmt(_acc_field(d, "x"))),
    ("acc_y", lambda d: _fmt(_acc_field(d, "y"))),
    ("entropy", lambda d: _fmt(d["metrics"]["entropy"])),
    ("peak", lambda d: _fmt(d["metrics"]["peak_magnitude"])),
    ("contrast", lambda d: _fmt(d["metrics"]["contrast"])),
]


def _moco_field(d, axis):
    return d["moco"]["delta_v"][axis] if d.get("moco") else None


def _acc_field(d, axis):
    if not d.get("moco"):
        return None
    return d["moco"]["accuracy"].get(axis)


def _fmt(v):
    return "-" if v is None else f"{v:.6g}"


def cmd_report(args) -> int:
    docs = []
    for path in args.reports:
        try:
            with open(path) as f:
                doc = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read report {path}: {e}") from e
        if "metrics" not in doc or "mode" not in doc:
            raise ConfigError(f"{path}: not a focus report (missing 'mode'/'metrics')")
        docs.append((path, doc))

    names = [p for p, _ in docs]
    rows = [[fn(d) for _, fn in _REPORT_COLUMNS] for _, d in docs]
    headers = ["report"] + [name for name, _ in _REPORT_COLUMNS]
    if len(docs) > 1:  # deltas vs the first run
        headers += ["d_entropy", "d_peak"]
        base_e = docs[0][1]["metrics"]["entropy"]
        base_p = docs[0][1]["metrics"]["peak_magnitude"]
        for row, (_, d) in zip(rows, docs):
            row.append(_fmt(d["metrics"]["entropy"] - base_e))
            row.append(_fmt(d["metrics"]["peak_magnitude"] - base_p))

    table = [headers] + [[name] + row for name, row in zip(names, rows)]
    if args.format == "csv":
        text = "\n".join(",".join(cells) for cells in table) + "\n"
    else:
        widths = [max(len(r[i]) for r in table) for i in range(len(headers))]
        lines = ["| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |" for r in table]
        lines.insert(1, "|" + "|".join("-" * (w + 2) for w in widths) + "|")
        text = "\n".join(lines) + "\n"

    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mimosar",
        description="MIMO SAR simulation, backprojection focusing, and residual "
                    "motion compensation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="simulate a range-compressed data cube")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--seed", type=int, default=None, help="override the noise seed")
    p_sim.set_defaults(fn=cmd_simulate)

    p_foc = sub.add_parser("focus", help="backproject a cube and optionally autofocus")
    p_foc.add_argument("--cube", required=True)
    p_foc.add_argument("--config", required=True)
    p_foc.add_argument("--out", required=True, help="output directory")
    group = p_foc.add_mutually_exclusive_group()
    group.add_argument("--moco", action="store_true", help="estimate and compensate (default)")
    group.add_argument("--no-moco", action="store_true", help="plain coherent sum")
    group.add_argument("--oracle-moco", action="store_true",
                       help="compensate with the injected delta_v (regression baseline)")
    p_foc.add_argument("--threads", type=int, default=1)
    p_foc.add_argument("--dynamic-range-db", type=float, default=40.0)
    p_foc.set_defaults(fn=cmd_focus)

    p_rep = sub.add_parser("report", help="tabulate focus reports side by side")
    p_rep.add_argument("reports", nargs="+")
    p_rep.add_argument("--out", default=None)
    p_rep.add_argument("--format", choices=["md", "csv"], default="md")
    p_rep.set_defaults(fn=cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (MocoError, np.linalg.LinAlgError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
