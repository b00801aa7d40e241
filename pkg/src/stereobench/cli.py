"""Command-line pipelines: scene synthesis, matching, evaluation,
resampling, auto-calibration, and point-cloud export.

Every run echoes its fully resolved configuration to <out>/config.json;
re-running from that file reproduces the outputs bit-identically (SVGs
modulo the generation-time comment, which --no-timestamp suppresses).
Exit codes: 0 success, 2 validation error, 1 runtime error.
"""

import argparse
import glob
import json
import os
import sys

import numpy as np

from . import _backend, autocalib, evaluate, fileio, svgplot, synth
from .errors import (
    EstimationError,
    FormatError,
    InvalidInputError,
    SceneValidationError,
    StereobenchError,
)
from .geometry import (
    DepthMap,
    Intrinsics,
    StereoRig,
    disparity_map_to_cloud,
)
from .matcher import MATCHERS, MatchParams
from .resample import downsample_disparity, resize_half

PROG = "stereobench"


def _add_common(p):
    p.add_argument("--config", help="JSON config file; explicit flags override it")
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--seed", type=int, help="seed for synthetic content (default 7)")
    p.add_argument("--threads", type=int, help="worker threads (speed only; results never change)")
    p.add_argument("--no-timestamp", action="store_true", default=None,
                   help="omit the generation-time comment from SVG outputs")


def _add_rig(p, rotation=True):
    p.add_argument("--width", type=int, help="image width in pixels")
    p.add_argument("--height", type=int, help="image height in pixels")
    p.add_argument("--focal-px", type=float, help="focal length in pixels")
    p.add_argument("--cx", type=float, help="principal point x (default: width/2)")
    p.add_argument("--cy", type=float, help="principal point y (default: height/2)")
    p.add_argument("--baseline-m", type=float, help="baseline in meters")
    if rotation:
        p.add_argument("--roll-deg", type=float, help="right-camera roll (degrees)")
        p.add_argument("--pitch-deg", type=float, help="right-camera pitch (degrees)")
        p.add_argument("--yaw-deg", type=float, help="right-camera yaw (degrees)")


def _add_intrinsics_only(p):
    """Rig flags for commands whose image size comes from the input map."""
    p.add_argument("--focal-px", type=float, help="focal length in pixels")
    p.add_argument("--cx", type=float, help="principal point x (default: width/2)")
    p.add_argument("--cy", type=float, help="principal point y (default: height/2)")
    p.add_argument("--baseline-m", type=float, help="baseline in meters")


def _add_match_params(p):
    p.add_argument("--algo", choices=("fast", "accurate"), help="matcher (default fast)")
    p.add_argument("--max-disparity", type=int)
    p.add_argument("--min-disparity", type=int)
    p.add_argument("--lr-threshold", type=float)
    p.add_argument("--p1", type=int)
    p.add_argument("--p2", type=int)
    p.add_argument("--census-window", help="census window as WxH (default 9x7)")
    p.add_argument("--block-window", help="block window as WxH (default 9x9)")
    p.add_argument("--no-subpixel", action="store_true", default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Stereo depth-quality toolkit: synthetic scenes, matchers, "
        "binned error evaluation, and online extrinsic auto-calibration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render a synthetic stereo pair with ground truth")
    p.add_argument("--preset", help="scene preset: outdoor, calib-wall, board@<z>m")
    p.add_argument("--scene", help="scene description file (JSON)")
    _add_rig(p)
    _add_common(p)

    p = sub.add_parser("match", help="compute a disparity map from an image pair")
    p.add_argument("--left", help="left image (PNG or PGM)")
    p.add_argument("--right", help="right image (PNG or PGM)")
    _add_match_params(p)
    _add_common(p)

    p = sub.add_parser("eval", help="binned error report of a test map vs a reference")
    p.add_argument("--test", help="test disparity map (PFM)")
    p.add_argument("--ref", help="reference disparity map (PFM)")
    p.add_argument("--bins", help="comma-separated bin edges in meters")
    p.add_argument("--noise-floor-ref",
                   help="full-resolution reference map for the noise-floor series "
                   "(the rig flags then describe the half-resolution geometry)")
    p.add_argument("--linear-y", action="store_true", default=None,
                   help="linear instead of log error axis in the SVG")
    _add_intrinsics_only(p)
    _add_common(p)

    p = sub.add_parser("resize", help="half-resolution images and/or disparity maps")
    p.add_argument("--image", action="append", help="image to downsample (repeatable)")
    p.add_argument("--disparity", action="append",
                   help="disparity map to downsample (repeatable)")
    p.add_argument("--no-rescale", action="store_true", default=None,
                   help="keep disparity values in original-grid pixels")
    _add_common(p)

    p = sub.add_parser("calib", help="estimate relative roll/pitch/yaw per frame")
    p.add_argument("--left", help="left image path or glob (sorted)")
    p.add_argument("--right", help="right image path or glob (sorted)")
    p.add_argument("--focal-px", type=float, help="focal length in pixels")
    p.add_argument("--cx", type=float)
    p.add_argument("--cy", type=float)
    p.add_argument("--grid-step", type=int)
    p.add_argument("--search-h", type=int)
    p.add_argument("--search-v", type=int)
    p.add_argument("--gradient-threshold", type=float)
    p.add_argument("--smooth", type=float,
                   help="EMA coefficient in (0,1]; default: no smoothing")
    _add_common(p)

    p = sub.add_parser("cloud", help="triangulate a disparity map to a PLY cloud")
    p.add_argument("--disparity", help="disparity map (PFM)")
    p.add_argument("--color", help="optional color image for per-point RGB")
    p.add_argument("--ply-format", choices=("binary_little_endian", "ascii"))
    p.add_argument("--birdseye", action="store_true", default=None,
                   help="also write a top-down (x, z) SVG projection")
    p.add_argument("--grid-spacing", type=float,
                   help="bird's-eye grid spacing in meters (1.0 or 2.5)")
    p.add_argument("--birdseye-max-points", type=int,
                   help="deterministic stride subsampling cap (default 20000)")
    _add_intrinsics_only(p)
    _add_common(p)
    return parser


def _merge_config(args, defaults):
    """flag > config file > default, echoed as a flat dict."""
    cfg = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(
                f"config {args.config}: line {exc.lineno}: {exc.msg}"
            ) from exc
        if not isinstance(cfg, dict):
            raise InvalidInputError("config file must hold a JSON object")
    resolved = {}
    for key, default in defaults.items():
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            resolved[key] = cli_val
        elif key in cfg:
            resolved[key] = cfg[key]
        else:
            resolved[key] = default
    unknown = set(cfg) - set(defaults) - {"command"}
    if unknown:
        raise InvalidInputError(f"unknown config fields: {sorted(unknown)}")
    return resolved


_COMMON_DEFAULTS = {"out": ".", "seed": 7, "threads": None, "no_timestamp": False}

_RIG_DEFAULTS = {
    "width": 2560,
    "height": 1984,
    "focal_px": 1180.0,
    "cx": None,
    "cy": None,
    "baseline_m": 0.15,
}

_ROT_DEFAULTS = {"roll_deg": 0.0, "pitch_deg": 0.0, "yaw_deg": 0.0}


def _rig_from(resolved, rotation=True):
    cx = resolved["cx"] if resolved["cx"] is not None else resolved["width"] / 2.0
    cy = resolved["cy"] if resolved["cy"] is not None else resolved["height"] / 2.0
    intr = Intrinsics(
        resolved["focal_px"], (cx, cy), resolved["width"], resolved["height"]
    )
    rot = (
        (resolved["roll_deg"], resolved["pitch_deg"], resolved["yaw_deg"])
        if rotation
        else (0.0, 0.0, 0.0)
    )
    return StereoRig(intr, resolved["baseline_m"], rot)


def _prepare(resolved, command):
    outdir = resolved["out"]
    os.makedirs(outdir, exist_ok=True)
    _backend.set_threads(_backend.thread_count(resolved["threads"]))
    echo = dict(resolved)
    echo["command"] = command
    with open(os.path.join(outdir, "config.json"), "w", encoding="utf-8") as fh:
        json.dump(echo, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return outdir


def _parse_window(text, fallback):
    if text is None:
        return fallback
    try:
        w, h = text.lower().split("x")
        return (int(w), int(h))
    except ValueError:
        raise InvalidInputError(
            f"bad window {text!r}; expected WxH like 9x7"
        ) from None


def _match_params_from(resolved):
    kwargs = {}
    if resolved["max_disparity"] is not None:
        kwargs["max_disparity"] = resolved["max_disparity"]
    if resolved["min_disparity"] is not None:
        kwargs["min_disparity"] = resolved["min_disparity"]
    if resolved["lr_threshold"] is not None:
        kwargs["lr_threshold"] = resolved["lr_threshold"]
    if resolved["p1"] is not None:
        kwargs["p1"] = resolved["p1"]
    if resolved["p2"] is not None:
        kwargs["p2"] = resolved["p2"]
    kwargs["census_window"] = _parse_window(resolved["census_window"], (9, 7))
    kwargs["block_window"] = _parse_window(resolved["block_window"], (9, 9))
    kwargs["subpixel"] = not resolved["no_subpixel"]
    return MatchParams(**kwargs)


def cmd_synth(args):
    defaults = {
        "preset": None,
        "scene": None,
        **_RIG_DEFAULTS,
        **_ROT_DEFAULTS,
        **_COMMON_DEFAULTS,
    }
    resolved = _merge_config(args, defaults)
    if bool(resolved["preset"]) == bool(resolved["scene"]):
        raise InvalidInputError("exactly one of --preset / --scene is required")
    outdir = _prepare(resolved, "synth")
    rig = _rig_from(resolved)
    if resolved["preset"]:
        scene = synth.preset_scene(resolved["preset"], seed=resolved["seed"])
    else:
        scene = synth.load_scene(resolved["scene"])
    out = synth.render(scene, rig)
    fileio.write_image(out.left, os.path.join(outdir, "left.png"))
    fileio.write_image(out.right, os.path.join(outdir, "right.png"))
    fileio.write_pfm(out.gt_disparity, os.path.join(outdir, "gt.pfm"))
    fileio.write_pfm(out.gt_depth, os.path.join(outdir, "gt_depth.pfm"))
    synth.save_scene(scene, os.path.join(outdir, "scene.json"))
    print(f"synth: wrote left.png right.png gt.pfm gt_depth.pfm scene.json -> {outdir}")
    return 0


def cmd_match(args):
    defaults = {
        "left": None,
        "right": None,
        "algo": "fast",
        "max_disparity": None,
        "min_disparity": None,
        "lr_threshold": None,
        "p1": None,
        "p2": None,
        "census_window": None,
        "block_window": None,
        "no_subpixel": False,
        **_COMMON_DEFAULTS,
    }
    resolved = _merge_config(args, defaults)
    if not resolved["left"] or not resolved["right"]:
        raise InvalidInputError("--left and --right images are required")
    outdir = _prepare(resolved, "match")
    params = _match_params_from(resolved)
    left = fileio.read_image(resolved["left"])
    right = fileio.read_image(resolved["right"])
    disp = MATCHERS[resolved["algo"]](left, right, params)
    fileio.write_pfm(disp, os.path.join(outdir, "disp.pfm"))
    print(
        f"match[{resolved['algo']}]: {disp.valid_count()} valid px "
        f"of {disp.width * disp.height} -> {outdir}/disp.pfm"
    )
    return 0


def _bins_from(resolved):
    if resolved["bins"]:
        edges = [float(e) for e in str(resolved["bins"]).split(",")]
        return evaluate.DepthBinSpec.from_edges(edges)
    return evaluate.DepthBinSpec.default()


def _eval_series(report, label, color, dash):
    pts = [(b.z_center, b.median_abs_depth_err_m) for b in report.bins if b.count > 0]
    return svgplot.Series(
        x=[p[0] for p in pts],
        y=[p[1] for p in pts],
        label=label,
        color=color,
        dash=dash,
        marker="circle",
    )


def _rig_for_map(resolved, width, height):
    """Rig whose image dimensions come from the map being processed."""
    cx = resolved["cx"] if resolved["cx"] is not None else width / 2.0
    cy = resolved["cy"] if resolved["cy"] is not None else height / 2.0
    intr = Intrinsics(resolved["focal_px"], (cx, cy), width, height)
    return StereoRig(intr, resolved["baseline_m"])


def cmd_eval(args):
    defaults = {
        "test": None,
        "ref": None,
        "bins": None,
        "noise_floor_ref": None,
        "linear_y": False,
        "focal_px": 1180.0,
        "cx": None,
        "cy": None,
        "baseline_m": 0.15,
        **_COMMON_DEFAULTS,
    }
    resolved = _merge_config(args, defaults)
    if not resolved["test"] or not resolved["ref"]:
        raise InvalidInputError("--test and --ref disparity maps are required")
    outdir = _prepare(resolved, "eval")
    bins = _bins_from(resolved)
    test = fileio.read_pfm(resolved["test"])
    ref = fileio.read_pfm(resolved["ref"])
    rig = _rig_for_map(resolved, ref.width, ref.height)
    report = evaluate.binned_error_report(test, ref, rig, bins, label="measured")
    fileio.write_csv_report(report, os.path.join(outdir, "report.csv"))

    fig = svgplot.Figure(
        title="depth error vs range",
        xlabel="depth (m)",
        ylabel="median abs depth error (m)",
        logy=not resolved["linear_y"],
    )
    fig.add(_eval_series(report, "measured", svgplot.PALETTE[0], None))
    try:
        delta_d = evaluate.fit_delta_d(report, rig)
        zs = np.linspace(bins.bins[0][0] + 1e-6, bins.bins[-1][1], 80)
        fb = rig.fb
        fig.add(
            svgplot.Series(
                x=list(zs),
                y=[z * z * delta_d / fb for z in zs],
                label=f"fit: z^2 * {delta_d:.3g} px / (f B)",
                color="#888888",
            )
        )
        print(f"eval: fitted disparity resolution {delta_d:.4g} px")
    except EstimationError:
        print("eval: too few populated bins for a quadratic fit; skipping curve")
    if resolved["noise_floor_ref"]:
        full_ref = fileio.read_pfm(resolved["noise_floor_ref"])
        floor = evaluate.noise_floor(full_ref, ref, rig, bins)
        fileio.write_csv_report(floor, os.path.join(outdir, "noise_floor.csv"))
        fig.add(_eval_series(floor, "noise floor", "#333333", "5,4"))
    svg = svgplot.render_figure(fig, timestamp=not resolved["no_timestamp"])
    with open(os.path.join(outdir, "error_vs_depth.svg"), "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"eval: wrote report.csv error_vs_depth.svg -> {outdir}")
    return 0


def cmd_resize(args):
    defaults = {
        "image": None,
        "disparity": None,
        "no_rescale": False,
        **_COMMON_DEFAULTS,
    }
    resolved = _merge_config(args, defaults)
    images = resolved["image"] or []
    disparities = resolved["disparity"] or []
    if not images and not disparities:
        raise InvalidInputError("nothing to resize: pass --image and/or --disparity")
    outdir = _prepare(resolved, "resize")
    for src in images:
        img = fileio.read_image(src)
        half = resize_half(img)
        stem, ext = os.path.splitext(os.path.basename(src))
        dst = os.path.join(outdir, f"{stem}_half{ext}")
        fileio.write_image(half, dst)
        print(f"resize: {src} ({img.width}x{img.height}) -> {dst} "
              f"({half.width}x{half.height})")
    for src in disparities:
        disp = fileio.read_pfm(src)
        half = downsample_disparity(disp, rescale=not resolved["no_rescale"])
        stem = os.path.splitext(os.path.basename(src))[0]
        dst = os.path.join(outdir, f"{stem}_half.pfm")
        fileio.write_pfm(half, dst)
        print(f"resize: {src} -> {dst}")
    return 0


def _expand_frames(pattern):
    paths = sorted(glob.glob(pattern))
    if not paths:
        if os.path.exists(pattern):
            return [pattern]
        raise InvalidInputError(f"no files match {pattern!r}")
    return paths


def cmd_calib(args):
    defaults = {
        "left": None,
        "right": None,
        "focal_px": 1180.0,
        "cx": None,
        "cy": None,
        "grid_step": 8,
        "search_h": 64,
        "search_v": 4,
        "gradient_threshold": 0.03,
        "smooth": None,
        **_COMMON_DEFAULTS,
    }
    resolved = _merge_config(args, defaults)
    if not resolved["left"] or not resolved["right"]:
        raise InvalidInputError("--left and --right (file or glob) are required")
    outdir = _prepare(resolved, "calib")
    lefts = _expand_frames(resolved["left"])
    rights = _expand_frames(resolved["right"])
    if len(lefts) != len(rights):
        raise InvalidInputError(
            f"frame count mismatch: {len(lefts)} left vs {len(rights)} right"
        )
    first = fileio.read_image(lefts[0])
    cx = resolved["cx"] if resolved["cx"] is not None else first.width / 2.0
    cy = resolved["cy"] if resolved["cy"] is not None else first.height / 2.0
    intr = Intrinsics(resolved["focal_px"], (cx, cy), first.width, first.height)

    def frames():
        for lp, rp in zip(lefts, rights):
            yield fileio.read_image(lp), fileio.read_image(rp)

    estimates = autocalib.track_sequence(
        frames(),
        intr,
        smoothing=resolved["smooth"],
        grid_step=resolved["grid_step"],
        search=(resolved["search_h"], resolved["search_v"]),
        gradient_threshold=resolved["gradient_threshold"],
    )
    autocalib.write_trace_csv(estimates, os.path.join(outdir, "trace.csv"))

    fig = svgplot.Figure(
        title="relative rotation per frame",
        xlabel="frame",
        ylabel="angle (deg)",
    )
    axes = ("roll_deg", "pitch_deg", "yaw_deg")
    for i, name in enumerate(axes):
        pts = [
            (k, getattr(e, name)) for k, e in enumerate(estimates) if e is not None
        ]
        fig.add(
            svgplot.Series(
                x=[p[0] for p in pts],
                y=[p[1] for p in pts],
                label=name.replace("_deg", ""),
                color=svgplot.PALETTE[i],
            )
        )
    svg = svgplot.render_figure(fig, timestamp=not resolved["no_timestamp"])
    with open(os.path.join(outdir, "trace.svg"), "w", encoding="utf-8") as fh:
        fh.write(svg)
    good = sum(1 for e in estimates if e is not None)
    print(f"calib: {good}/{len(estimates)} frames estimated -> {outdir}/trace.csv")
    return 0


def cmd_cloud(args):
    defaults = {
        "disparity": None,
        "color": None,
        "ply_format": "binary_little_endian",
        "birdseye": False,
        "grid_spacing": 1.0,
        "birdseye_max_points": 20000,
        "focal_px": 1180.0,
        "cx": None,
        "cy": None,
        "baseline_m": 0.15,
        **_COMMON_DEFAULTS,
    }
    resolved = _merge_config(args, defaults)
    if not resolved["disparity"]:
        raise InvalidInputError("--disparity map is required")
    outdir = _prepare(resolved, "cloud")
    disp = fileio.read_pfm(resolved["disparity"])
    rig = _rig_for_map(resolved, disp.width, disp.height)
    color = None
    if resolved["color"]:
        color = fileio.read_image(resolved["color"]).data
    cloud = disparity_map_to_cloud(disp, rig, color)
    fileio.write_ply(cloud, os.path.join(outdir, "cloud.ply"), fmt=resolved["ply_format"])
    print(f"cloud: {len(cloud)} points -> {outdir}/cloud.ply")
    if resolved["birdseye"]:
        stride = max(1, -(-len(cloud) // resolved["birdseye_max_points"]))
        pts = [(float(p[0]), float(p[2])) for p in cloud.points[::stride]]
        svg = svgplot.birdseye_svg(
            pts,
            grid_spacing=resolved["grid_spacing"],
            title="bird's-eye view",
            timestamp=not resolved["no_timestamp"],
        )
        with open(os.path.join(outdir, "birdseye.svg"), "w", encoding="utf-8") as fh:
            fh.write(svg)
        print(f"cloud: wrote birdseye.svg (grid {resolved['grid_spacing']} m)")
    return 0


_COMMANDS = {
    "synth": cmd_synth,
    "match": cmd_match,
    "eval": cmd_eval,
    "resize": cmd_resize,
    "calib": cmd_calib,
    "cloud": cmd_cloud,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (InvalidInputError, SceneValidationError, FormatError) as exc:
        print(f"{PROG} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (StereobenchError, OSError) as exc:
        print(f"{PROG} {args.command}: runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
