"""Pinhole stereo-rig model, triangulation, and depth-error scaling laws.

Coordinate convention: right-handed, x right, y down, z forward, origin at
the left camera's optical center.  Angles are stored in degrees and
converted to radians only at computation boundaries.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

ROTATION_BOUND_DEG = 5.0


@dataclass(frozen=True)
class Intrinsics:
    """Shared post-rectification pinhole intrinsics."""

    focal_length_px: float
    principal_point: tuple
    width: int
    height: int

    def __post_init__(self):
        if not (math.isfinite(self.focal_length_px) and self.focal_length_px > 0):
            raise InvalidInputError("focal_length_px must be finite and > 0")
        if self.width < 2 or self.height < 2:
            raise InvalidInputError("image dimensions must be at least 2x2")
        cx, cy = self.principal_point
        if not (0 <= cx < self.width and 0 <= cy < self.height):
            raise InvalidInputError("principal point must lie inside the image")

    @property
    def cx(self):
        return self.principal_point[0]

    @property
    def cy(self):
        return self.principal_point[1]

    @property
    def pixel_count(self):
        return self.width * self.height

    def half_resolution(self):
        """Intrinsics after a factor-2 downsample in both axes."""
        return Intrinsics(
            self.focal_length_px / 2.0,
            (self.cx / 2.0, self.cy / 2.0),
            self.width // 2,
            self.height // 2,
        )


@dataclass(frozen=True)
class StereoRig:
    """Rectified stereo pair: shared intrinsics, baseline, and the small
    residual rotation of the right camera (roll, pitch, yaw in degrees)."""

    intrinsics: Intrinsics
    baseline_m: float
    relative_rotation_deg: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not (math.isfinite(self.baseline_m) and self.baseline_m > 0):
            raise InvalidInputError("baseline_m must be finite and > 0")
        for name, ang in zip(("roll", "pitch", "yaw"), self.relative_rotation_deg):
            if not (math.isfinite(ang) and abs(ang) < ROTATION_BOUND_DEG):
                raise InvalidInputError(
                    f"{name} = {ang} deg outside the small-angle bound "
                    f"(+/-{ROTATION_BOUND_DEG} deg)"
                )

    @property
    def fb(self):
        return self.intrinsics.focal_length_px * self.baseline_m

    def half_resolution(self):
        return StereoRig(
            self.intrinsics.half_resolution(),
            self.baseline_m,
            self.relative_rotation_deg,
        )

    def right_rotation_matrix(self):
        """World-to-right-camera rotation: Rx(pitch) @ Ry(yaw) @ Rz(roll).

        Chosen so a positive pitch moves right-image content up by about
        f * pitch pixels at the image center (y points down).
        """
        roll, pitch, yaw = (math.radians(a) for a in self.relative_rotation_deg)
        cr, sr = math.cos(roll), math.sin(roll)
        cp, sp = math.cos(pitch), math.sin(pitch)
        cy_, sy = math.cos(yaw), math.sin(yaw)
        rz = np.array([[cr, -sr, 0.0], [sr, cr, 0.0], [0.0, 0.0, 1.0]])
        ry = np.array([[cy_, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy_]])
        rx = np.array([[1.0, 0.0, 0.0], [0.0, cp, -sp], [0.0, sp, cp]])
        return rx @ ry @ rz


class DisparityMap:
    """Per-pixel horizontal disparity in pixels with an explicit validity
    mask.  Valid entries are finite and >= 0; files encode invalid pixels
    as +inf (see fileio.read_pfm/write_pfm)."""

    def __init__(self, values, valid=None):
        values = np.asarray(values, np.float32)
        if values.ndim != 2:
            raise InvalidInputError("disparity values must be a 2D array")
        if valid is None:
            valid = np.isfinite(values) & (values >= 0)
        valid = np.asarray(valid, bool)
        if valid.shape != values.shape:
            raise InvalidInputError("validity mask shape mismatch")
        bad = valid & ~(np.isfinite(values) & (values >= 0))
        if bad.any():
            raise InvalidInputError("valid disparities must be finite and >= 0")
        self.values = values
        self.valid = valid

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def shape(self):
        return self.values.shape

    def valid_count(self):
        return int(self.valid.sum())


class DepthMap:
    """Per-pixel depth in meters; valid entries are finite and > 0."""

    def __init__(self, values, valid=None):
        values = np.asarray(values, np.float32)
        if values.ndim != 2:
            raise InvalidInputError("depth values must be a 2D array")
        if valid is None:
            valid = np.isfinite(values) & (values > 0)
        valid = np.asarray(valid, bool)
        if valid.shape != values.shape:
            raise InvalidInputError("validity mask shape mismatch")
        bad = valid & ~(np.isfinite(values) & (values > 0))
        if bad.any():
            raise InvalidInputError("valid depths must be finite and > 0")
        self.values = values
        self.valid = valid

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def shape(self):
        return self.values.shape


@dataclass
class PointCloud:
    """Triangulated 3D points with optional per-point color in [0, 1]."""

    points: np.ndarray
    colors: np.ndarray = field(default=None)

    def __post_init__(self):
        self.points = np.asarray(self.points, np.float32).reshape(-1, 3)
        if not np.isfinite(self.points).all():
            raise InvalidInputError("point coordinates must be finite")
        if self.colors is not None:
            self.colors = np.asarray(self.colors, np.float32).reshape(-1, 3)
            if len(self.colors) != len(self.points):
                raise InvalidInputError("color count must match point count")

    def __len__(self):
        return len(self.points)


def _check_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise InvalidInputError(f"{name} must be finite and > 0, got {value}")


def disparity_to_depth(d, rig):
    """Depth z = f*B/d in meters for a disparity in pixels."""
    _check_positive("disparity", d)
    return rig.fb / d


def depth_to_disparity(z, rig):
    """Disparity d = f*B/z in pixels for a depth in meters."""
    _check_positive("depth", z)
    return rig.fb / z


def theoretical_depth_error(z, rig, delta_d):
    """Best-case depth resolution z**2 * delta_d / (f*B).

    Quadratic in z; delta_d is the disparity resolution in pixels.
    Returns 0 for z == 0 (the law passes through the origin).
    """
    if z == 0:
        return 0.0
    _check_positive("depth", z)
    _check_positive("delta_d", delta_d)
    return z * z * delta_d / rig.fb


def range_scaling_factor(npix_ratio):
    """Range gain from multiplying the pixel count by ``npix_ratio``.

    Usable range grows (equivalently, depth error at fixed range shrinks)
    with the square root of the pixel count.
    """
    _check_positive("npix_ratio", npix_ratio)
    return math.sqrt(npix_ratio)


def baseline_sensitivity_ratio(length_a, length_b):
    """Relative tip-deflection sensitivity of two cantilevered baselines.

    End-load bending angle grows with the square of beam length, so a
    baseline ``a`` is (a/b)**2 times more vibration-sensitive than ``b``.
    """
    _check_positive("length_a", length_a)
    _check_positive("length_b", length_b)
    return (length_a / length_b) ** 2


def triangulate_pixel(u, v, d, rig):
    """Back-project rectified pixel (u, v) with disparity d to (x, y, z)."""
    _check_positive("disparity", d)
    intr = rig.intrinsics
    if not (0 <= u < intr.width and 0 <= v < intr.height):
        raise InvalidInputError(f"pixel ({u}, {v}) outside image bounds")
    z = rig.fb / d
    x = (u - intr.cx) * z / intr.focal_length_px
    y = (v - intr.cy) * z / intr.focal_length_px
    return (x, y, z)


def depth_map_from_disparity(disp, rig):
    """Convert a DisparityMap to a DepthMap; d <= 0 pixels become invalid."""
    valid = disp.valid & (disp.values > 0)
    z = np.zeros_like(disp.values)
    np.divide(np.float32(rig.fb), disp.values, out=z, where=valid)
    return DepthMap(z, valid)


def disparity_map_to_cloud(disp, rig, color=None):
    """One 3D point per valid pixel; invalid pixels are omitted.

    ``color`` is an optional image (grayscale (h, w) or RGB (h, w, 3) in
    [0, 1]) of the same dimensions supplying per-point colors.
    """
    intr = rig.intrinsics
    if (disp.height, disp.width) != (intr.height, intr.width):
        raise InvalidInputError("disparity dimensions do not match intrinsics")
    if color is not None and color.shape[:2] != (disp.height, disp.width):
        raise InvalidInputError("color image dimensions do not match disparity")
    valid = disp.valid & (disp.values > 0)
    vs, us = np.nonzero(valid)
    d = disp.values[vs, us].astype(np.float64)
    z = rig.fb / d
    f = intr.focal_length_px
    x = (us - intr.cx) * z / f
    y = (vs - intr.cy) * z / f
    pts = np.stack([x, y, z], axis=1).astype(np.float32)
    colors = None
    if color is not None:
        if color.ndim == 2:
            g = color[vs, us].astype(np.float32)
            colors = np.stack([g, g, g], axis=1)
        else:
            colors = color[vs, us].astype(np.float32)
    return PointCloud(pts, colors)
