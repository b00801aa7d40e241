"""Backend dispatch for the hot kernels.

``select_backend("numpy"|"numba")`` swaps the active implementation at
runtime; the default follows STEREOBENCH_NO_NUMBA (see _backend).  Both
implementations are bit-identical, so switching never changes results,
only speed.
"""

from .. import _backend
from . import numpy_impl

_IMPLS = {"numpy": numpy_impl}

if _backend.HAVE_NUMBA:
    from . import numba_impl

    _IMPLS["numba"] = numba_impl

_active = _IMPLS[_backend.default_backend()]


def select_backend(name):
    global _active
    if name not in _IMPLS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_IMPLS)}")
    _active = _IMPLS[name]


def active_backend():
    return _active.BACKEND_NAME


def available_backends():
    return sorted(_IMPLS)


def census_transform(gray, half_h, half_w):
    return _active.census_transform(gray, half_h, half_w)


def fast_match(cl, cr, d_lo, d_hi, half_bh, half_bw):
    return _active.fast_match(cl, cr, d_lo, d_hi, half_bh, half_bw)


def sgm_aggregate(cl, cr, luma, d_lo, ndisp, p1, p2, infeasible):
    return _active.sgm_aggregate(cl, cr, luma, d_lo, ndisp, p1, p2, infeasible)


def intensity_refine(gl, gr, dmap, half_win, iterations):
    return _active.intensity_refine(gl, gr, dmap, half_win, iterations)


def binomial3x3(img):
    return _active.binomial3x3(img)


def volume_wta(S, d_lo):
    return _active.volume_wta(S, d_lo)


def volume_right_wta(S, d_lo):
    return _active.volume_right_wta(S, d_lo)


def median3x3_valid(vals, valid):
    return _active.median3x3_valid(vals, valid)


def resize_half_2d(img, taps):
    return _active.resize_half_2d(img, taps)


def downsample_disparity_2x(vals, valid):
    return _active.downsample_disparity_2x(vals, valid)


def render_view(h, w, f, cx, cy, rot, origin, ptype, pgeom, pscale, poct, pseed):
    return _active.render_view(
        h, w, f, cx, cy, rot, origin, ptype, pgeom, pscale, poct, pseed
    )


def vertical_search(cl, cr, us, vs, half_bh, half_bw, hx, hv):
    return _active.vertical_search(cl, cr, us, vs, half_bh, half_bw, hx, hv)
