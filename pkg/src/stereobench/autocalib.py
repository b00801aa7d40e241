"""Dense, keypoint-free estimation of the relative rotation between two
rectified cameras from residual vertical disparity.

Measurement sites cover the whole frame on a regular grid rather than a
sparse keypoint set; each textured site contributes one vertical
displacement sample from a 2D census search.  A first-order model of the
rotation homography K R K^-1 predicts that displacement as

    dv(u, v) = -f * pitch + roll * (u - cx) + yaw * (u - cx) * (v - cy) / f

(angles in radians, x right / y down / z forward; see
docs/calibration_model.md for the derivation and sign conventions), so a
robust linear fit of the samples recovers (pitch, roll, yaw) directly.
No inertial data is used anywhere.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateGeometryError, EstimationError, InvalidInputError
from .matcher import _as_gray

MIN_SAMPLES = 50
HUBER_SCALE = 1.345
IRLS_ITERATIONS = 3


@dataclass(frozen=True)
class VerticalSample:
    """One dense-grid measurement: left pixel (u, v) whose best right-image
    match sits dv pixels below its rectified position."""

    u: float
    v: float
    dv: float
    weight: float = 1.0


@dataclass(frozen=True)
class CalibrationEstimate:
    roll_deg: float
    pitch_deg: float
    yaw_deg: float
    residual_rms_px: float
    sample_count: int
    inlier_fraction: float


def _gradient_mask(gray, threshold):
    h, w = gray.shape
    mask = np.zeros((h, w), bool)
    gx = np.abs(gray[1:-1, 2:] - gray[1:-1, :-2])
    gy = np.abs(gray[2:, 1:-1] - gray[:-2, 1:-1])
    mask[1:-1, 1:-1] = (gx + gy) >= threshold
    return mask


def collect_vertical_samples(
    left,
    right,
    grid_step=8,
    search=(64, 4),
    census_window=(9, 7),
    block_window=(9, 9),
    gradient_threshold=0.03,
):
    """Measure vertical displacement on a regular grid of textured sites.

    Each site is matched by an exhaustive 2D census block search over
    +/-search[0] horizontal x +/-search[1] vertical pixels; the vertical
    coordinate of the minimum is refined to subpixel from the vertical
    cost slice.  Low-gradient, boundary, and vertically ambiguous sites
    are dropped.  The horizontal offset is scene disparity and is
    discarded as a nuisance.  Blank images yield an empty list.
    """
    gl = _as_gray(left)
    gr = _as_gray(right)
    if gl.shape != gr.shape:
        raise InvalidInputError("image dimensions differ")
    hx, hv = int(search[0]), int(search[1])
    if hx < 1 or hv < 1:
        raise InvalidInputError("search radii must be >= 1")
    cw, ch = census_window
    bw, bh = block_window
    cl = kernels.census_transform(gl, ch // 2, cw // 2)
    cr = kernels.census_transform(gr, ch // 2, cw // 2)

    h, w = gl.shape
    mu = hx + bw // 2 + 1
    mv = hv + bh // 2 + 1
    if w <= 2 * mu or h <= 2 * mv:
        return []
    grad = _gradient_mask(gl, gradient_threshold)
    us, vs = [], []
    for v in range(mv, h - mv, grid_step):
        for u in range(mu, w - mu, grid_step):
            if grad[v, u]:
                us.append(u)
                vs.append(v)
    if not us:
        return []
    us = np.asarray(us, np.int64)
    vs = np.asarray(vs, np.int64)
    dx, dy, c0, cup, cdn, ok = kernels.vertical_search(
        cl, cr, us, vs, bh // 2, bw // 2, hx, hv
    )
    samples = []
    for i in range(len(us)):
        if not ok[i]:
            continue
        hi = max(cup[i], cdn[i])
        denom = hi - c0[i]
        delta = 0.0
        if denom > 0:
            # two-line (equiangular) interpolation: exact for the locally
            # linear cost profiles census matching produces
            delta = (float(cup[i]) - float(cdn[i])) / (2.0 * float(denom))
            delta = min(0.5, max(-0.5, delta))
        samples.append(
            VerticalSample(float(us[i]), float(vs[i]), float(dy[i]) + delta, 1.0)
        )
    return samples


def _design_matrix(samples, intr):
    u = np.array([s.u for s in samples])
    v = np.array([s.v for s in samples])
    f = intr.focal_length_px
    du = u - intr.cx
    dvv = v - intr.cy
    return np.stack([np.full_like(du, -f), du, du * dvv / f], axis=1)


def fit_rotation(samples, intr):
    """Robust linear fit of (pitch, roll, yaw) from vertical samples.

    Weighted least squares iteratively reweighted with Huber weights
    (cutoff 1.345 * MAD of the residuals, 3 iterations, deterministic).
    """
    if len(samples) < MIN_SAMPLES:
        raise EstimationError(
            f"need at least {MIN_SAMPLES} samples, got {len(samples)}"
        )
    A = _design_matrix(samples, intr)
    y = np.array([s.dv for s in samples])
    w = np.array([s.weight for s in samples])

    def solve(weights):
        aw = A * weights[:, None]
        N = A.T @ aw
        if not np.isfinite(N).all() or np.linalg.cond(N) > 1e12:
            raise DegenerateGeometryError(
                "sample geometry does not constrain roll/pitch/yaw "
                "(are all samples on one line?)"
            )
        return np.linalg.solve(N, aw.T @ y)

    theta = solve(w)
    cutoff = 0.0
    for _ in range(IRLS_ITERATIONS):
        r = A @ theta - y
        mad = float(np.median(np.abs(r - np.median(r))))
        cutoff = HUBER_SCALE * mad
        if cutoff <= 0:
            break
        hub = np.minimum(1.0, cutoff / np.maximum(np.abs(r), 1e-300))
        theta = solve(w * hub)

    r = A @ theta - y
    if cutoff > 0:
        inliers = np.abs(r) <= cutoff
        if not inliers.any():
            inliers = np.ones(len(r), bool)
    else:
        inliers = np.ones(len(r), bool)
    rms = float(np.sqrt(np.mean(r[inliers] ** 2)))
    pitch, roll, yaw = theta
    return CalibrationEstimate(
        roll_deg=math.degrees(roll),
        pitch_deg=math.degrees(pitch),
        yaw_deg=math.degrees(yaw),
        residual_rms_px=rms,
        sample_count=len(samples),
        inlier_fraction=float(inliers.mean()),
    )


def track_sequence(frames, intr, smoothing=None, **collect_kwargs):
    """Independent per-frame estimates for a sequence of stereo pairs.

    Frames that fail (too few samples, degenerate geometry) become None
    gaps rather than aborting the run.  ``smoothing`` applies an optional
    exponential moving average with the given coefficient in (0, 1].
    """
    estimates = []
    for left, right in frames:
        try:
            samples = collect_vertical_samples(left, right, **collect_kwargs)
            estimates.append(fit_rotation(samples, intr))
        except (EstimationError, InvalidInputError):
            estimates.append(None)
    if smoothing is not None:
        if not (0 < smoothing <= 1):
            raise InvalidInputError("smoothing coefficient must be in (0, 1]")
        state = None
        smoothed = []
        for est in estimates:
            if est is None:
                smoothed.append(None)
                continue
            cur = np.array([est.roll_deg, est.pitch_deg, est.yaw_deg])
            state = cur if state is None else smoothing * cur + (1 - smoothing) * state
            smoothed.append(
                CalibrationEstimate(
                    roll_deg=float(state[0]),
                    pitch_deg=float(state[1]),
                    yaw_deg=float(state[2]),
                    residual_rms_px=est.residual_rms_px,
                    sample_count=est.sample_count,
                    inlier_fraction=est.inlier_fraction,
                )
            )
        estimates = smoothed
    return estimates


TRACE_HEADER = "frame,roll_deg,pitch_deg,yaw_deg,residual_rms_px,inlier_fraction"


def write_trace_csv(estimates, path):
    """Per-frame rotation trace; failed frames serialize as nan fields."""
    lines = [TRACE_HEADER]
    for k, est in enumerate(estimates):
        if est is None:
            lines.append(f"{k},nan,nan,nan,nan,nan")
        else:
            lines.append(
                f"{k},{est.roll_deg:.6g},{est.pitch_deg:.6g},{est.yaw_deg:.6g},"
                f"{est.residual_rms_px:.6g},{est.inlier_fraction:.6g}"
            )
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("utf-8"))
