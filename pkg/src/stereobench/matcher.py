"""Two stereo matchers with complementary roles.

``match_fast`` is a census block matcher built for throughput: winner
takes all over block-aggregated Hamming costs, parabolic subpixel, and a
left-right consistency check.  ``match_accurate`` is a semi-global
matcher built for reference-quality maps: 8-path aggregation with
gradient-adaptive penalties, the same subpixel and consistency stages,
plus a 3x3 validity-aware median.  Outputs are bit-identical across runs,
thread counts, and compute backends.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidInputError
from .fileio import ImageBuffer
from .geometry import DisparityMap


def _derived_penalty(scale, bits):
    return max(1, int(round(scale * bits / 64.0)))


@dataclass(frozen=True)
class MatchParams:
    """Matching configuration shared by both matchers.

    ``census_window`` and ``block_window`` are (width, height); censuses
    carry at most 64 comparison bits (center excluded).  P1/P2 default to
    8 and 32 cost units scaled by the census bit count / 64.
    """

    max_disparity: int = 256
    min_disparity: int = 0
    census_window: tuple = (9, 7)
    block_window: tuple = (9, 9)
    p1: int = None
    p2: int = None
    lr_threshold: float = 1.0
    subpixel: bool = True

    def __post_init__(self):
        cw, ch = self.census_window
        bw, bh = self.block_window
        if self.max_disparity < 1:
            raise InvalidInputError("max_disparity must be >= 1")
        if not (0 <= self.min_disparity <= self.max_disparity):
            raise InvalidInputError("min_disparity must lie in [0, max_disparity]")
        for name, (a, b) in (("census", (cw, ch)), ("block", (bw, bh))):
            if a < 1 or b < 1 or a % 2 == 0 or b % 2 == 0:
                raise InvalidInputError(f"{name} window must be odd-sized, got {a}x{b}")
        if cw * ch - 1 > 64:
            raise InvalidInputError(
                f"census window {cw}x{ch} exceeds 64 comparison bits"
            )
        if self.p1 is None:
            object.__setattr__(self, "p1", _derived_penalty(8, self.census_bits))
        if self.p2 is None:
            object.__setattr__(self, "p2", _derived_penalty(32, self.census_bits))
        if not (self.p2 > self.p1 > 0):
            raise InvalidInputError(f"need P2 > P1 > 0, got P1={self.p1} P2={self.p2}")
        if self.lr_threshold < 0.5:
            raise InvalidInputError("lr_threshold must be >= 0.5")

    @property
    def census_bits(self):
        cw, ch = self.census_window
        return cw * ch - 1

    def half_resolution(self):
        """Params for a factor-2 downsampled pair (disparity range halves)."""
        return MatchParams(
            max_disparity=max(1, self.max_disparity // 2),
            min_disparity=self.min_disparity // 2,
            census_window=self.census_window,
            block_window=self.block_window,
            p1=self.p1,
            p2=self.p2,
            lr_threshold=self.lr_threshold,
            subpixel=self.subpixel,
        )


def _as_gray(image):
    if isinstance(image, ImageBuffer):
        return image.luma()
    arr = np.asarray(image, np.float32)
    if arr.ndim == 3:
        return ImageBuffer(arr).luma()
    return arr


def census_transform(image, window=(9, 7)):
    """Census bitstring image: bit k set iff neighbor_k < center.

    Neighbors scan the window row-major (center excluded); border pixels
    use edge-clamped neighborhoods.
    """
    gray = _as_gray(image)
    cw, ch = window
    if cw % 2 == 0 or ch % 2 == 0:
        raise InvalidInputError("census window must be odd-sized")
    if cw * ch - 1 > 64:
        raise InvalidInputError("census window exceeds 64 bits")
    if cw > gray.shape[1] or ch > gray.shape[0]:
        raise InvalidInputError("census window larger than image")
    return kernels.census_transform(gray, ch // 2, cw // 2)


def _check_pair(left, right):
    gl = _as_gray(left)
    gr = _as_gray(right)
    if gl.shape != gr.shape:
        raise InvalidInputError(f"image dimensions differ: {gl.shape} vs {gr.shape}")
    return gl, gr


def _subpixel_offsets(dbest, cminus, cbest, cplus):
    """Parabola through the costs at (d-1, d, d+1), clamped to +/-0.5."""
    cm = cminus.astype(np.float64)
    c0 = cbest.astype(np.float64)
    cp = cplus.astype(np.float64)
    usable = (dbest >= 0) & (cminus >= 0) & (cplus >= 0)
    denom = cm - 2.0 * c0 + cp
    delta = np.zeros(dbest.shape, np.float64)
    np.divide(cm - cp, 2.0 * denom, out=delta, where=usable & (denom > 0))
    return np.clip(delta, -0.5, 0.5)


def _finish_disparity(dbest, cminus, cbest, cplus, amb, dright, params):
    """Subpixel + left-right consistency shared by both matchers."""
    h, w = dbest.shape
    valid = (dbest >= 0) & (amb == 0)
    if params.subpixel:
        delta = _subpixel_offsets(dbest, cminus, cbest, cplus)
    else:
        delta = np.zeros((h, w), np.float64)
    disp = dbest.astype(np.float64) + delta

    xs = np.tile(np.arange(w), (h, 1))
    xr = np.clip(xs - np.where(dbest >= 0, dbest, 0), 0, w - 1)
    dr = np.take_along_axis(dright, xr, axis=1)
    lr_ok = (dr >= 0) & (np.abs(disp - dr) <= params.lr_threshold)
    valid &= lr_ok

    values = np.where(valid, disp, np.inf).astype(np.float32)
    return DisparityMap(values, valid)


def match_fast(left, right, params=None):
    """Census block matcher: WTA over block-summed Hamming costs."""
    params = params or MatchParams()
    gl, gr = _check_pair(left, right)
    cw, ch = params.census_window
    cl = kernels.census_transform(gl, ch // 2, cw // 2)
    cr = kernels.census_transform(gr, ch // 2, cw // 2)
    bw, bh = params.block_window
    dbest, cbest, cminus, cplus, amb, dright = kernels.fast_match(
        cl, cr, params.min_disparity, params.max_disparity, bh // 2, bw // 2
    )
    return _finish_disparity(dbest, cminus, cbest, cplus, amb, dright, params)


REFINE_HALF_WINDOW = 4
REFINE_ITERATIONS = 2


def match_accurate(left, right, params=None):
    """Semi-global matcher: 8-path aggregation over census Hamming costs
    with a gradient-adaptive large-jump penalty picks the integer winner;
    Gauss-Newton refinement on image intensities supplies the fractional
    part (clamped to +/-0.5); left-right check and a 3x3 validity-aware
    median finish the map.

    The intensity-based refinement localizes far better than a parabola
    over the penalty-flattened path sums and keeps this matcher's errors
    statistically independent of match_fast's census-cost interpolation,
    which is what makes it usable as an evaluation reference.
    """
    params = params or MatchParams()
    gl, gr = _check_pair(left, right)
    cw, ch = params.census_window
    cl = kernels.census_transform(gl, ch // 2, cw // 2)
    cr = kernels.census_transform(gr, ch // 2, cw // 2)
    luma8 = np.rint(gl * 255.0).astype(np.uint8)
    ndisp = params.max_disparity - params.min_disparity + 1
    S = kernels.sgm_aggregate(
        cl, cr, luma8, params.min_disparity, ndisp, params.p1, params.p2,
        params.census_bits,
    )
    dbest, _, _, _, amb = kernels.volume_wta(S, params.min_disparity)
    dright = kernels.volume_right_wta(S, params.min_disparity)
    del S
    h, w = dbest.shape
    valid = (dbest >= 0) & (amb == 0)
    if params.subpixel:
        # pre-smoothing strips near-Nyquist energy that would bias the
        # linearized gradient matching
        delta = kernels.intensity_refine(
            kernels.binomial3x3(gl),
            kernels.binomial3x3(gr),
            dbest,
            REFINE_HALF_WINDOW,
            REFINE_ITERATIONS,
        )
    else:
        delta = np.zeros((h, w), np.float64)
    # refinement at the low search bound may step below it; disparity
    # cannot go negative (depth is finite and positive)
    disp = np.maximum(dbest.astype(np.float64) + delta, float(params.min_disparity))

    xs = np.tile(np.arange(w), (h, 1))
    xr = np.clip(xs - np.where(dbest >= 0, dbest, 0), 0, w - 1)
    dr = np.take_along_axis(dright, xr, axis=1)
    valid &= (dr >= 0) & (np.abs(disp - dr) <= params.lr_threshold)
    values = np.where(valid, disp, np.inf).astype(np.float32)

    vals, valid8 = kernels.median3x3_valid(values, valid.astype(np.uint8))
    vals = np.where(valid8 != 0, vals, np.float32(np.inf))
    return DisparityMap(vals, valid8 != 0)


MATCHERS = {"fast": match_fast, "accurate": match_accurate}


def throughput_benchmark(matcher, resolution, params=None, scene=None, rig=None):
    """Wall-clock throughput of a matcher on a synthetic pair.

    ``matcher`` is 'fast', 'accurate', or a callable; ``resolution`` is
    (width, height).  Reports points per second over valid output pixels
    plus the frame rate, labeled with the resolution (e.g. '2560x1984').
    Timing excludes rendering and one untimed warmup run (JIT compile).
    """
    from .geometry import Intrinsics, StereoRig
    from .synth import board_scene, render

    w, h = resolution
    fn = MATCHERS[matcher] if isinstance(matcher, str) else matcher
    if rig is None:
        focal = 1180.0 * w / 2560.0
        rig = StereoRig(Intrinsics(focal, (w / 2, h / 2), w, h), 0.15)
    if scene is None:
        scene = board_scene(
            4.0, seed=11, focal_px=rig.intrinsics.focal_length_px, fill=1.3
        )
    if params is None:
        params = MatchParams(max_disparity=min(256, max(16, int(rig.fb / 1.0))))
    out = render(scene, rig)
    fn(out.left, out.right, params)  # warmup / JIT
    t0 = time.perf_counter()
    disp = fn(out.left, out.right, params)
    seconds = time.perf_counter() - t0
    points = disp.valid_count()
    return {
        "matcher": matcher if isinstance(matcher, str) else fn.__name__,
        "resolution": f"{w}x{h}",
        "seconds": seconds,
        "fps": 1.0 / seconds if seconds > 0 else float("inf"),
        "pps": points / seconds if seconds > 0 else float("inf"),
        "valid_points": points,
        "pixels": w * h,
    }
