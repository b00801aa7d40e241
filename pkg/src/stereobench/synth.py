"""Deterministic synthetic stereo scene renderer with exact ground truth.

Scenes are textured planes and boxes at known depths.  The left camera
sits at the origin looking along +z; the right camera sits at (B, 0, 0)
and may carry a small residual rotation (the rig's relative roll, pitch,
yaw).  Ground-truth disparity is geometric (d = f*B/z from the left
view), so matcher output can be scored against an error-free reference.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidInputError, SceneValidationError
from .fileio import ImageBuffer
from .geometry import ROTATION_BOUND_DEG, DepthMap, DisparityMap, StereoRig

MIN_PRIMITIVE_DEPTH = 0.1


@dataclass(frozen=True)
class Rectangle:
    """Fronto-parallel textured rectangle at depth center[2]."""

    center: tuple
    extent: tuple  # (width_m, height_m)
    texture_seed: int = 0
    texture_scale: float = 0.05
    octaves: int = 3


@dataclass(frozen=True)
class TiltedPlane:
    """Bounded plane with a linear depth gradient (dz/dx, dz/dy per meter)."""

    center: tuple
    extent: tuple  # (width_m, height_m); either may be inf
    gradient: tuple = (0.0, 0.0)
    texture_seed: int = 0
    texture_scale: float = 0.05
    octaves: int = 3


@dataclass(frozen=True)
class Box:
    """Axis-aligned textured box."""

    center: tuple
    extent: tuple  # (ex, ey, ez) meters
    texture_seed: int = 0
    texture_scale: float = 0.05
    octaves: int = 3


@dataclass(frozen=True)
class GroundPlane:
    """Unbounded ground y = height + slope * z (y points down).

    ``slope`` > 0 drops away from the camera; 0.05 is one meter of
    elevation change per 20 meters of range.
    """

    height: float = 1.0
    slope: float = 0.05
    texture_seed: int = 0
    texture_scale: float = 0.35
    octaves: int = 6


@dataclass
class SceneSpec:
    """Declarative scene: textured primitives plus an optional background."""

    primitives: list = field(default_factory=list)
    background: GroundPlane = None
    noise_sigma: float = 0.0
    noise_seed: int = 0

    def validate(self):
        if not self.primitives and self.background is None:
            raise SceneValidationError("scene has no primitives and no background")
        for i, prim in enumerate(self.primitives):
            z = prim.center[2]
            if isinstance(prim, Box):
                z = prim.center[2] - prim.extent[2] * 0.5
            if not (math.isfinite(z) and z > MIN_PRIMITIVE_DEPTH):
                raise SceneValidationError(
                    f"primitive {i}: nearest depth {z} m must exceed "
                    f"{MIN_PRIMITIVE_DEPTH} m (field 'center')"
                )
            if prim.texture_scale <= 0:
                raise SceneValidationError(
                    f"primitive {i}: field 'texture_scale' must be > 0"
                )
        if self.noise_sigma < 0:
            raise SceneValidationError("field 'noise_sigma' must be >= 0")


@dataclass
class RenderOutput:
    left: ImageBuffer
    right: ImageBuffer
    gt_disparity: DisparityMap
    gt_depth: DepthMap


def _pack_scene(scene):
    prims = list(scene.primitives)
    if scene.background is not None:
        prims.append(scene.background)
    n = len(prims)
    ptype = np.zeros(n, np.int32)
    pgeom = np.zeros((n, 8), np.float64)
    pscale = np.zeros(n, np.float64)
    poct = np.zeros(n, np.int64)
    pseed = np.zeros(n, np.uint64)
    for i, prim in enumerate(prims):
        pscale[i] = prim.texture_scale
        poct[i] = prim.octaves
        pseed[i] = np.uint64(np.int64(prim.texture_seed))
        if isinstance(prim, Rectangle):
            x0, y0, z0 = prim.center
            ptype[i] = kernels.numpy_impl.PRIM_PLANE
            pgeom[i] = (0.0, 0.0, 1.0, z0, x0, y0, prim.extent[0], prim.extent[1])
        elif isinstance(prim, TiltedPlane):
            x0, y0, z0 = prim.center
            gx, gy = prim.gradient
            c = z0 - gx * x0 - gy * y0
            ptype[i] = kernels.numpy_impl.PRIM_PLANE
            pgeom[i] = (-gx, -gy, 1.0, c, x0, y0, prim.extent[0], prim.extent[1])
        elif isinstance(prim, Box):
            x0, y0, z0 = prim.center
            ex, ey, ez = prim.extent
            ptype[i] = kernels.numpy_impl.PRIM_BOX
            pgeom[i, :6] = (
                x0 - ex * 0.5,
                y0 - ey * 0.5,
                z0 - ez * 0.5,
                x0 + ex * 0.5,
                y0 + ey * 0.5,
                z0 + ez * 0.5,
            )
        elif isinstance(prim, GroundPlane):
            ptype[i] = kernels.numpy_impl.PRIM_PLANE
            pgeom[i] = (0.0, 1.0, -prim.slope, prim.height, 0.0, 0.0, np.inf, np.inf)
        else:
            raise SceneValidationError(f"unknown primitive type {type(prim).__name__}")
    return ptype, pgeom, pscale, poct, pseed


def _apply_pixel_noise(img, sigma, seed, tag):
    if sigma <= 0:
        return img
    rng = np.random.default_rng(np.random.SeedSequence([seed, tag]))
    noisy = img + sigma * rng.standard_normal(img.shape).astype(np.float32)
    return np.clip(noisy, 0.0, 1.0).astype(np.float32)


def render(scene, rig):
    """Render a stereo pair plus exact left-referenced ground truth.

    The right camera is displaced by the baseline and rotated by the
    rig's relative rotation about its own optical center; ground truth is
    geometric, so pixels occluded in the right view stay valid.
    """
    scene.validate()
    intr = rig.intrinsics
    ptype, pgeom, pscale, poct, pseed = _pack_scene(scene)
    eye = np.eye(3)
    left_img, depth, valid = kernels.render_view(
        intr.height,
        intr.width,
        float(intr.focal_length_px),
        float(intr.cx),
        float(intr.cy),
        eye,
        np.zeros(3),
        ptype,
        pgeom,
        pscale,
        poct,
        pseed,
    )
    rot = rig.right_rotation_matrix()
    right_img, _, _ = kernels.render_view(
        intr.height,
        intr.width,
        float(intr.focal_length_px),
        float(intr.cx),
        float(intr.cy),
        rot,
        np.array([rig.baseline_m, 0.0, 0.0]),
        ptype,
        pgeom,
        pscale,
        poct,
        pseed,
    )
    ok = (valid != 0) & (depth > 0)
    disp = np.zeros(depth.shape, np.float32)
    np.divide(rig.fb, depth, out=disp, where=ok, casting="unsafe")
    zmap = np.where(ok, depth, 0.0).astype(np.float32)
    left_img = _apply_pixel_noise(left_img, scene.noise_sigma, scene.noise_seed, 0)
    right_img = _apply_pixel_noise(right_img, scene.noise_sigma, scene.noise_seed, 1)
    return RenderOutput(
        left=ImageBuffer(left_img),
        right=ImageBuffer(right_img),
        gt_disparity=DisparityMap(disp, ok),
        gt_depth=DepthMap(zmap, ok),
    )


def render_sequence(scene, rig, perturbations):
    """Render one frame per (roll, pitch, yaw) perturbation in degrees.

    Frame k uses the rig's base rotation plus perturbations[k]; ground
    truth always reflects the perturbed geometry.
    """
    if len(perturbations) == 0:
        raise InvalidInputError("perturbation list must be non-empty")
    base = rig.relative_rotation_deg
    outputs = []
    for k, pert in enumerate(perturbations):
        for name, ang in zip(("roll", "pitch", "yaw"), pert):
            if not (math.isfinite(ang) and abs(ang) < ROTATION_BOUND_DEG):
                raise InvalidInputError(
                    f"frame {k}: {name} perturbation {ang} deg outside "
                    f"the small-angle bound"
                )
        frame_rig = StereoRig(
            rig.intrinsics,
            rig.baseline_m,
            tuple(b + p for b, p in zip(base, pert)),
        )
        outputs.append(render(scene, frame_rig))
    return outputs


def vibration_trace(frames, seed, amplitude_deg):
    """Band-limited per-frame rotation noise: 4 seeded sinusoids per axis,
    normalized so the per-axis peak equals the requested amplitude."""
    if frames < 1:
        raise InvalidInputError("frames must be >= 1")
    trace = np.zeros((frames, 3))
    t = np.arange(frames)
    for axis in range(3):
        amp = float(amplitude_deg[axis])
        if amp == 0.0:
            continue
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), axis]))
        freqs = rng.uniform(0.02, 0.22, size=4)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=4)
        weights = rng.uniform(0.5, 1.0, size=4)
        sig = np.zeros(frames)
        for f, p, wgt in zip(freqs, phases, weights):
            sig += wgt * np.sin(2.0 * np.pi * f * t + p)
        peak = np.abs(sig).max()
        if peak > 0:
            sig *= amp / peak
        trace[:, axis] = sig
    return [tuple(row) for row in trace]


# ---------------------------------------------------------------------------
# scene presets and serialization

_PRIM_KINDS = {"rect": Rectangle, "tilted_plane": TiltedPlane, "box": Box}


def _prim_to_dict(prim):
    d = {"center": list(prim.center), "texture_seed": prim.texture_seed,
         "texture_scale": prim.texture_scale, "octaves": prim.octaves}
    if isinstance(prim, Rectangle):
        d["kind"] = "rect"
        d["extent"] = list(prim.extent)
    elif isinstance(prim, TiltedPlane):
        d["kind"] = "tilted_plane"
        d["extent"] = list(prim.extent)
        d["gradient"] = list(prim.gradient)
    else:
        d["kind"] = "box"
        d["extent"] = list(prim.extent)
    return d


def scene_to_dict(scene):
    out = {
        "primitives": [_prim_to_dict(p) for p in scene.primitives],
        "noise_sigma": scene.noise_sigma,
        "noise_seed": scene.noise_seed,
    }
    if scene.background is not None:
        bg = scene.background
        out["background"] = {
            "kind": "ground",
            "height": bg.height,
            "slope": bg.slope,
            "texture_seed": bg.texture_seed,
            "texture_scale": bg.texture_scale,
            "octaves": bg.octaves,
        }
    else:
        out["background"] = None
    return out


def _require(d, key, idx=None):
    if key not in d:
        where = f"primitive {idx}: " if idx is not None else ""
        raise SceneValidationError(f"{where}missing field '{key}'")
    return d[key]


def scene_from_dict(data):
    prims = []
    for i, pd in enumerate(data.get("primitives", [])):
        kind = _require(pd, "kind", i)
        if kind not in _PRIM_KINDS:
            raise SceneValidationError(f"primitive {i}: unknown kind {kind!r}")
        cls = _PRIM_KINDS[kind]
        kwargs = {
            "center": tuple(_require(pd, "center", i)),
            "extent": tuple(_require(pd, "extent", i)),
            "texture_seed": int(pd.get("texture_seed", 0)),
            "texture_scale": float(pd.get("texture_scale", 0.05)),
            "octaves": int(pd.get("octaves", 3)),
        }
        if kind == "tilted_plane":
            kwargs["gradient"] = tuple(pd.get("gradient", (0.0, 0.0)))
        prims.append(cls(**kwargs))
    background = None
    bg = data.get("background")
    if bg is not None:
        background = GroundPlane(
            height=float(bg.get("height", 1.0)),
            slope=float(bg.get("slope", 0.05)),
            texture_seed=int(bg.get("texture_seed", 0)),
            texture_scale=float(bg.get("texture_scale", 0.35)),
            octaves=int(bg.get("octaves", 6)),
        )
    scene = SceneSpec(
        primitives=prims,
        background=background,
        noise_sigma=float(data.get("noise_sigma", 0.0)),
        noise_seed=int(data.get("noise_seed", 0)),
    )
    scene.validate()
    return scene


def load_scene(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneValidationError(
                f"scene file {path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    return scene_from_dict(data)


def save_scene(scene, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scene_to_dict(scene), fh, indent=2, sort_keys=True)
        fh.write("\n")


def board_scene(depth_m, seed=1, feature_px=7.0, focal_px=1180.0, fill=0.9):
    """Single fronto-parallel textured board sized to fill most of a view.

    ``feature_px`` fixes the texture's apparent base feature size in
    pixels at the given focal length, so boards at different depths carry
    comparable pixel-level texture.
    """
    if depth_m <= MIN_PRIMITIVE_DEPTH:
        raise SceneValidationError(f"board depth must exceed {MIN_PRIMITIVE_DEPTH} m")
    extent = (2.2 * depth_m * fill, 1.7 * depth_m * fill)
    scale = feature_px * depth_m / focal_px
    board = Rectangle(
        center=(0.0, 0.0, depth_m),
        extent=extent,
        texture_seed=seed,
        texture_scale=scale,
        octaves=3,
    )
    return SceneSpec(primitives=[board])


def outdoor_scene(seed=7):
    """Grassy-field stand-in: sloped textured ground plus three textured
    boxes at near / intermediate / far depths (0.71, 4.50, 20.93 m)."""
    ground = GroundPlane(
        height=1.0, slope=0.05, texture_seed=seed, texture_scale=0.45, octaves=6
    )

    def standing_box(x, z, w, hgt, th, scale, s):
        ground_y = 1.0 + 0.05 * z
        return Box(
            center=(x, ground_y - hgt * 0.5, z),
            extent=(w, hgt, th),
            texture_seed=s,
            texture_scale=scale,
            octaves=3,
        )

    # near box sits right of center so its right-view projection stays
    # inside the frame at ~250 px disparity
    boxes = [
        standing_box(0.10, 0.71, 0.45, 1.30, 0.25, 0.012, seed + 1),
        standing_box(1.20, 4.50, 0.50, 1.60, 0.30, 0.055, seed + 2),
        standing_box(-2.60, 20.93, 0.60, 1.70, 0.35, 0.26, seed + 3),
    ]
    return SceneSpec(primitives=boxes, background=ground)


def wall_scene(depth_m=12.0, seed=3, focal_px=900.0, feature_px=5.0):
    """Large gently tilted textured wall for auto-calibration sequences.

    The tilt keeps the texture lattice from aligning with the pixel grid,
    which would otherwise skew subpixel vertical matching; the distance
    keeps scene disparity small so the rotation signal dominates.
    """
    scale = feature_px * depth_m / focal_px
    wall = TiltedPlane(
        center=(0.0, 0.0, depth_m),
        extent=(4.0 * depth_m, 3.2 * depth_m),
        gradient=(0.21, 0.13),
        texture_seed=seed,
        texture_scale=scale,
        octaves=3,
    )
    return SceneSpec(primitives=[wall])


def preset_scene(name, seed=7):
    """Named presets accepted by the CLI: 'outdoor', 'calib-wall', or
    'board@<depth>m' (e.g. board@2m, board@6.5m)."""
    if name == "outdoor":
        return outdoor_scene(seed=seed)
    if name == "calib-wall":
        return wall_scene(seed=seed)
    if name.startswith("board@") and name.endswith("m"):
        try:
            depth = float(name[len("board@") : -1])
        except ValueError:
            raise SceneValidationError(f"bad board preset {name!r}") from None
        return board_scene(depth, seed=seed)
    raise SceneValidationError(
        f"unknown preset {name!r}; expected 'outdoor', 'calib-wall', or 'board@<z>m'"
    )
