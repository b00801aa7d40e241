"""Depth-quality evaluation: range-binned error statistics against a
reference disparity map, quadratic-law curve fitting, measurement noise
floor, plane-fit RMSE, and full-vs-half resolution scaling checks."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EstimationError, InvalidInputError
from .geometry import DepthMap, depth_map_from_disparity
from .resample import downsample_disparity

# 2 m bins to 10 m, then 6 m bins to 42 m: wider far bins accumulate
# enough pixels where the image fraction per meter of range shrinks.
DEFAULT_BIN_EDGES = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 16.0, 22.0, 28.0, 36.0, 42.0)

MIN_FIT_BIN_COUNT = 100


@dataclass(frozen=True)
class DepthBinSpec:
    """Ordered, contiguous, non-overlapping depth intervals [z_min, z_max)."""

    bins: tuple

    def __post_init__(self):
        if not self.bins:
            raise InvalidInputError("bin spec must contain at least one bin")
        prev_max = None
        for zmin, zmax in self.bins:
            if not (zmin < zmax):
                raise InvalidInputError(f"bad bin ({zmin}, {zmax}): need z_min < z_max")
            if prev_max is None:
                if zmin < 0:
                    raise InvalidInputError("first z_min must be >= 0")
            elif zmin != prev_max:
                raise InvalidInputError(
                    f"bins must be contiguous: ({zmin}, {zmax}) after max {prev_max}"
                )
            prev_max = zmax

    @classmethod
    def from_edges(cls, edges):
        edges = tuple(float(e) for e in edges)
        return cls(tuple(zip(edges[:-1], edges[1:])))

    @classmethod
    def default(cls):
        return cls.from_edges(DEFAULT_BIN_EDGES)

    def centers(self):
        return [0.5 * (a + b) for a, b in self.bins]

    def __len__(self):
        return len(self.bins)


@dataclass
class BinStat:
    z_min: float
    z_max: float
    count: int
    median_abs_depth_err_m: float
    rms_depth_err_m: float
    median_abs_disp_err_px: float
    coverage_loss: int = 0

    @property
    def z_center(self):
        return 0.5 * (self.z_min + self.z_max)


@dataclass
class BinErrorReport:
    bins: list
    label: str = ""
    meta: dict = field(default_factory=dict)

    def populated(self, min_count=MIN_FIT_BIN_COUNT):
        return [b for b in self.bins if b.count >= min_count]


@dataclass
class PlaneFitResult:
    """Least-squares plane z = a*x + b*y + c over a pixel ROI."""

    a: float
    b: float
    c: float
    rmse_m: float
    roi: tuple
    mean_depth_m: float
    valid_count: int


def _as_depth(dmap, rig):
    if isinstance(dmap, DepthMap):
        return dmap
    return depth_map_from_disparity(dmap, rig)


def depth_bin_masks(ref_depth, bins):
    """Binary masks selecting valid pixels per depth bin.

    Half-open [z_min, z_max) membership: masks are pairwise disjoint and
    their union covers every valid pixel inside the total bin range.
    """
    masks = []
    z = ref_depth.values
    for zmin, zmax in bins.bins:
        masks.append(ref_depth.valid & (z >= zmin) & (z < zmax))
    return masks


def binned_error_report(test_disp, ref_disp, rig, bins=None, label=""):
    """Per-bin depth and disparity error of a test map against a reference.

    Bin membership comes from the reference depth (the reference assigns
    bins).  The median is used for the headline statistic to stay robust
    against outliers; the RMS is always computed alongside.  Pixels
    invalid in either map are excluded and counted as per-bin coverage
    loss.
    """
    if test_disp.shape != ref_disp.shape:
        raise InvalidInputError(
            f"map dimensions differ: {test_disp.shape} vs {ref_disp.shape}"
        )
    bins = bins or DepthBinSpec.default()
    ref_depth = _as_depth(ref_disp, rig)
    test_depth = _as_depth(test_disp, rig)
    both = ref_depth.valid & test_depth.valid
    zr = ref_depth.values.astype(np.float64)
    zt = test_depth.values.astype(np.float64)
    dr = ref_disp.values.astype(np.float64)
    dt = test_disp.values.astype(np.float64)

    stats = []
    for zmin, zmax in bins.bins:
        in_bin = ref_depth.valid & (zr >= zmin) & (zr < zmax)
        use = in_bin & both
        n = int(use.sum())
        lost = int((in_bin & ~both).sum())
        if n == 0:
            stats.append(
                BinStat(zmin, zmax, 0, float("nan"), float("nan"), float("nan"), lost)
            )
            continue
        dz = zt[use] - zr[use]
        dd = dt[use] - dr[use]
        stats.append(
            BinStat(
                z_min=zmin,
                z_max=zmax,
                count=n,
                median_abs_depth_err_m=float(np.median(np.abs(dz))),
                rms_depth_err_m=float(np.sqrt(np.mean(dz * dz))),
                median_abs_disp_err_px=float(np.median(np.abs(dd))),
                coverage_loss=lost,
            )
        )
    meta = {
        "focal_length_px": rig.intrinsics.focal_length_px,
        "baseline_m": rig.baseline_m,
    }
    return BinErrorReport(bins=stats, label=label, meta=meta)


def fit_delta_d(report, rig, min_count=MIN_FIT_BIN_COUNT):
    """Disparity-resolution estimate from a binned report.

    Count-weighted least squares of the per-bin median depth errors
    against the quadratic law e(z) = z**2 * delta_d / (f*B) evaluated at
    bin centers; closed form delta_d = sum(w e q) / sum(w q**2) with
    q = z_center**2 / (f*B).
    """
    used = report.populated(min_count)
    if len(used) < 3:
        raise EstimationError(
            f"need >= 3 bins with count >= {min_count}, got {len(used)}"
        )
    fb = rig.fb
    num = 0.0
    den = 0.0
    for b in used:
        q = b.z_center**2 / fb
        num += b.count * b.median_abs_depth_err_m * q
        den += b.count * q * q
    if den == 0:
        raise EstimationError("degenerate bin layout for the quadratic fit")
    return num / den


def noise_floor(ref_full, ref_half, rig_half, bins=None):
    """Methodology noise floor: the reference disparity map of the
    full-resolution pair, downsampled, differenced against the reference
    map computed from the half-resolution pair."""
    if (ref_full.height, ref_full.width) != (2 * ref_half.height, 2 * ref_half.width):
        raise InvalidInputError(
            "full-resolution map must be exactly twice the half-resolution size"
        )
    down = downsample_disparity(ref_full)
    return binned_error_report(down, ref_half, rig_half, bins, label="noise_floor")


def plane_fit_rmse(depth, rig, roi):
    """Fit z = a*x + b*y + c over a pixel ROI of a depth map.

    Pixels are back-projected to camera-frame meters first, so the fit
    captures tilted boards as exactly as fronto-parallel ones.  Requires
    at least half the ROI valid.
    """
    u0, v0, rw, rh = (int(x) for x in roi)
    intr = rig.intrinsics
    if not (
        0 <= u0 and 0 <= v0 and rw > 0 and rh > 0
        and u0 + rw <= intr.width and v0 + rh <= intr.height
    ):
        raise InvalidInputError(f"roi {roi} outside image bounds")
    sub = depth.values[v0 : v0 + rh, u0 : u0 + rw].astype(np.float64)
    val = depth.valid[v0 : v0 + rh, u0 : u0 + rw]
    n = int(val.sum())
    if n < 0.5 * rw * rh:
        raise EstimationError(
            f"only {n} of {rw * rh} roi pixels valid (need >= 50%)"
        )
    vs, us = np.nonzero(val)
    z = sub[vs, us]
    f = intr.focal_length_px
    x = (us + u0 - intr.cx) * z / f
    y = (vs + v0 - intr.cy) * z / f

    A = np.stack([x, y, np.ones_like(x)], axis=1)
    N = A.T @ A
    if np.linalg.cond(N) > 1e12:
        raise EstimationError("degenerate roi: points do not span a plane")
    coeffs = np.linalg.solve(N, A.T @ z)
    resid = A @ coeffs - z
    return PlaneFitResult(
        a=float(coeffs[0]),
        b=float(coeffs[1]),
        c=float(coeffs[2]),
        rmse_m=float(np.sqrt(np.mean(resid**2))),
        roi=(u0, v0, rw, rh),
        mean_depth_m=float(z.mean()),
        valid_count=n,
    )


@dataclass
class ScalingCheck:
    """Per-bin half/full error ratios and their weighted geometric mean."""

    ratios: list  # (z_center, ratio, weight)
    summary: float


def resolution_scaling_check(full_report, half_report, min_count=MIN_FIT_BIN_COUNT):
    """Per-bin ratio of half-resolution to full-resolution error.

    Bins qualify when both reports have at least ``min_count`` pixels and
    a nonzero full-resolution error; the summary is the count-weighted
    geometric mean of the ratios (weight = smaller of the two counts).
    """
    if [(b.z_min, b.z_max) for b in full_report.bins] != [
        (b.z_min, b.z_max) for b in half_report.bins
    ]:
        raise InvalidInputError("reports use different bin specs")
    ratios = []
    for bf, bh in zip(full_report.bins, half_report.bins):
        if bf.count < min_count or bh.count < min_count:
            continue
        if not (bf.median_abs_depth_err_m > 0):
            continue
        ratio = bh.median_abs_depth_err_m / bf.median_abs_depth_err_m
        ratios.append((bf.z_center, ratio, min(bf.count, bh.count)))
    if not ratios:
        raise EstimationError("no overlapping populated bins")
    logsum = sum(w * math.log(r) for _, r, w in ratios)
    wsum = sum(w for _, _, w in ratios)
    return ScalingCheck(ratios=ratios, summary=math.exp(logsum / wsum))
