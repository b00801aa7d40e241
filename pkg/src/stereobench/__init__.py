"""Stereo depth-quality toolkit.

Synthetic stereo scenes with exact ground truth, census/semi-global
matchers, range-binned error evaluation against a reference matcher,
resolution-scaling verification, and dense online extrinsic
auto-calibration.
"""

from . import autocalib, evaluate, fileio, geometry, kernels, matcher, resample, synth
from .errors import (
    DegenerateGeometryError,
    EstimationError,
    FormatError,
    InvalidInputError,
    SceneValidationError,
    StereobenchError,
)
from .geometry import (
    DepthMap,
    DisparityMap,
    Intrinsics,
    PointCloud,
    StereoRig,
    baseline_sensitivity_ratio,
    disparity_map_to_cloud,
    disparity_to_depth,
    depth_to_disparity,
    range_scaling_factor,
    theoretical_depth_error,
    triangulate_pixel,
)

__version__ = "0.1.0"

__all__ = [
    "autocalib",
    "evaluate",
    "fileio",
    "geometry",
    "kernels",
    "matcher",
    "resample",
    "synth",
    "DegenerateGeometryError",
    "EstimationError",
    "FormatError",
    "InvalidInputError",
    "SceneValidationError",
    "StereobenchError",
    "DepthMap",
    "DisparityMap",
    "Intrinsics",
    "PointCloud",
    "StereoRig",
    "baseline_sensitivity_ratio",
    "disparity_map_to_cloud",
    "disparity_to_depth",
    "depth_to_disparity",
    "range_scaling_factor",
    "theoretical_depth_error",
    "triangulate_pixel",
    "__version__",
]
