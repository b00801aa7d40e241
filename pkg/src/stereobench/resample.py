"""Lanczos half-resolution resampling and disparity downsampling."""

import math

import numpy as np

from . import kernels
from .errors import InvalidInputError
from .fileio import ImageBuffer
from .geometry import DisparityMap

DEFAULT_TAPS = 3


def lanczos_kernel(x, a=DEFAULT_TAPS):
    """Lanczos windowed sinc: sinc(x) * sinc(x/a) for |x| < a, else 0.

    Zero crossings at nonzero integer arguments are exact, not merely
    within float rounding of sin(pi*n).
    """
    if a not in (2, 3):
        raise InvalidInputError("lanczos taps must be 2 or 3")
    ax = abs(x)
    if ax >= a:
        return 0.0
    if x == 0.0:
        return 1.0
    if ax == math.floor(ax):
        return 0.0
    px = math.pi * x
    return a * math.sin(px) * math.sin(px / a) / (px * px)


def half_resize_taps(a=DEFAULT_TAPS):
    """Normalized filter taps for a factor-2 Lanczos downsample.

    Output pixel o samples the source at 2*o + 0.5; the kernel stretched
    by the scale factor covers 12 integer source positions (2*o - 5 ..
    2*o + 6).  Weights are normalized to sum to 1 exactly by construction.
    """
    offsets = (np.arange(12) - 5.5) / 2.0
    w = np.array([lanczos_kernel(o, a) for o in offsets], np.float64)
    w /= w.sum()
    return w.astype(np.float32)


def resize_half(img):
    """Lanczos-3 downsample to half width and half height.

    Border samples clamp to the edge, which keeps the per-pixel weight
    sum at 1 (DC is preserved).  Dimensions must be even.
    """
    if img.width % 2 or img.height % 2:
        raise InvalidInputError(
            f"resize_half requires even dimensions, got {img.width}x{img.height}"
        )
    taps = half_resize_taps()
    if img.channels == 1:
        out = kernels.resize_half_2d(img.data, taps)
    else:
        planes = [kernels.resize_half_2d(img.data[:, :, c], taps) for c in range(3)]
        out = np.stack(planes, axis=2)
    return ImageBuffer(np.clip(out, 0.0, 1.0))


def downsample_disparity(disp, rescale=True):
    """Halve a disparity map: median of the valid members of each 2x2
    block, times 0.5 (disparity is measured in pixels of the new grid).

    ``rescale=False`` skips the halving for workflows that compare raw
    pixel offsets instead.  Output pixels are invalid only when all four
    inputs are invalid.
    """
    if disp.width % 2 or disp.height % 2:
        raise InvalidInputError(
            f"downsample requires even dimensions, got {disp.width}x{disp.height}"
        )
    vals, valid = kernels.downsample_disparity_2x(
        disp.values, disp.valid.astype(np.uint8)
    )
    if not rescale:
        vals = np.where(valid != 0, vals * np.float32(2.0), vals)
    return DisparityMap(vals, valid != 0)
