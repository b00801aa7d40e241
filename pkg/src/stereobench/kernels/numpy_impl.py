"""Pure-numpy builds of the hot kernels.

Reference semantics for the numba builds in numba_impl.py: every function
here must produce bit-identical output to its numba twin.  Cost arithmetic
is kept in integers (order-free), and float expressions are written in the
exact evaluation order the numba loops use.
"""

import numpy as np

BACKEND_NAME = "numpy"

_U64 = np.uint64
_MIX1 = _U64(0x9E3779B97F4A7C15)
_MIX2 = _U64(0xC2B2AE3D27D4EB4F)
_MIX3 = _U64(0x165667B19E3779F9)
_MIX4 = _U64(0xBF58476D1CE4E5B9)
_MIX5 = _U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


def popcount64(codes):
    return np.bitwise_count(codes).astype(np.int32)


# ---------------------------------------------------------------------------
# census transform


def census_transform(gray, half_h, half_w):
    """Per-pixel census bitstring: bit k set iff neighbor_k < center.

    Neighbors are scanned row-major over the (2*half_h+1, 2*half_w+1)
    window, center excluded; out-of-image neighbors clamp to the edge.
    """
    h, w = gray.shape
    rows = np.arange(h)
    cols = np.arange(w)
    code = np.zeros((h, w), np.uint64)
    k = 0
    for dy in range(-half_h, half_h + 1):
        ry = np.clip(rows + dy, 0, h - 1)
        for dx in range(-half_w, half_w + 1):
            if dy == 0 and dx == 0:
                continue
            rx = np.clip(cols + dx, 0, w - 1)
            bit = gray[ry][:, rx] < gray
            code |= bit.astype(np.uint64) << _U64(k)
            k += 1
    return code


# ---------------------------------------------------------------------------
# block-census fast matcher


def _clamped_box_cols(ham, half_w):
    """Row sums over a clamped horizontal window, per row."""
    hh, ww = ham.shape
    pref = np.zeros((hh, ww + 1), np.int64)
    np.cumsum(ham, axis=1, out=pref[:, 1:])
    xs = np.arange(ww)
    lo = np.maximum(xs - half_w, 0)
    hi = np.minimum(xs + half_w, ww - 1)
    out = pref[:, hi + 1] - pref[:, lo]
    out += np.maximum(half_w - xs, 0) * ham[:, :1]
    out += np.maximum(xs + half_w - (ww - 1), 0) * ham[:, -1:]
    return out


def _clamped_box_rows(rowsum, half_h):
    hh = rowsum.shape[0]
    pref = np.zeros((hh + 1, rowsum.shape[1]), np.int64)
    np.cumsum(rowsum, axis=0, out=pref[1:])
    ys = np.arange(hh)
    lo = np.maximum(ys - half_h, 0)
    hi = np.minimum(ys + half_h, hh - 1)
    out = pref[hi + 1] - pref[lo]
    out += (np.maximum(half_h - ys, 0))[:, None] * rowsum[:1]
    out += (np.maximum(ys + half_h - (hh - 1), 0))[:, None] * rowsum[-1:]
    return out


def fast_match(cl, cr, d_lo, d_hi, half_bh, half_bw):
    """Streaming WTA over block-aggregated census Hamming costs.

    Returns (dbest, cbest, cminus, cplus, amb, dright); dbest/dright are
    -1 where no feasible disparity exists, cminus/cplus are -1 when the
    neighboring cost slice was not visited.
    """
    h, w = cl.shape
    dbest = np.full((h, w), -1, np.int32)
    cbest = np.full((h, w), np.iinfo(np.int32).max, np.int32)
    cminus = np.full((h, w), -1, np.int32)
    cplus = np.full((h, w), -1, np.int32)
    amb = np.zeros((h, w), np.uint8)
    drbest = np.full((h, w), -1, np.int32)
    crbest = np.full((h, w), np.iinfo(np.int32).max, np.int32)
    aprev = np.full((h, w), -1, np.int32)

    for d in range(d_lo, d_hi + 1):
        if d >= w:
            break
        ham = popcount64(cl[:, d:] ^ cr[:, : w - d]).astype(np.int64)
        agg = _clamped_box_rows(_clamped_box_cols(ham, half_bw), half_bh)
        agg = agg.astype(np.int32)

        # left-image WTA over x in [d, w)
        sl = (slice(None), slice(d, w))
        better = agg < cbest[sl]
        adj = (~better) & (dbest[sl] == d - 1)
        np.copyto(cplus[sl], agg, where=adj & (cplus[sl] < 0))
        tie = (~better) & (agg == cbest[sl]) & (dbest[sl] >= 0) & (d > dbest[sl] + 1)
        amb[sl] |= tie.astype(np.uint8)
        np.copyto(cminus[sl], aprev[sl], where=better)
        np.copyto(cplus[sl], -1, where=better)
        np.copyto(amb[sl], 0, where=better)
        np.copyto(cbest[sl], agg, where=better)
        np.copyto(dbest[sl], d, where=better)
        aprev[sl] = agg

        # right-image WTA over xr in [0, w-d)
        sr = (slice(None), slice(0, w - d))
        rbetter = agg < crbest[sr]
        np.copyto(crbest[sr], agg, where=rbetter)
        np.copyto(drbest[sr], d, where=rbetter)

    return dbest, cbest, cminus, cplus, amb, drbest


def binomial3x3(img):
    """Separable 3x3 binomial smoothing with edge clamping.

    Conditions images for gradient-based refinement: near-Nyquist energy
    biases linearized matching, and a [1 2 1]/4 pass per axis removes it.
    """
    h, w = img.shape
    q = np.float32(0.25)
    half = np.float32(0.5)
    tmp = np.empty((h, w), np.float32)
    left = img[:, np.maximum(np.arange(w) - 1, 0)]
    right = img[:, np.minimum(np.arange(w) + 1, w - 1)]
    tmp[:] = img * half + (left + right) * q
    up = tmp[np.maximum(np.arange(h) - 1, 0)]
    down = tmp[np.minimum(np.arange(h) + 1, h - 1)]
    return (tmp * half + (up + down) * q).astype(np.float32)


def intensity_refine(gl, gr, dmap, half_win, iterations):
    """Slanted-support Gauss-Newton refinement of integer disparities.

    For each pixel with integer disparity d, fits a local affine
    disparity model d + delta + a*j + b*i over the window by linearized
    intensity matching (bilinear-resampled right image and gradient) and
    keeps the center offset delta.  The affine terms absorb surface
    slant, which would otherwise act as correlated noise on sloped
    scenes.  Returns float64 offsets clamped to [-0.5, 0.5]; border and
    gradient-free pixels keep 0.
    """
    h, w = gl.shape
    k = half_win
    delta = np.zeros((h, w), np.float64)
    xs_idx = np.tile(np.arange(w, dtype=np.int64), (h, 1))
    ys_idx = np.arange(h, dtype=np.int64)
    xr0 = xs_idx - dmap.astype(np.int64)
    usable = (
        (dmap >= 0)
        & (xr0 - k - 2 >= 0)
        & (xr0 + k + 2 <= w - 1)
        & (xs_idx - k >= 0)
        & (xs_idx + k <= w - 1)
    )
    usable[:k, :] = False
    usable[h - k :, :] = False
    gl64 = gl.astype(np.float64)
    gr64 = gr.astype(np.float64)
    for _ in range(iterations):
        base = xr0.astype(np.float64) - delta
        xi = np.floor(base).astype(np.int64)
        fx = base - xi
        # never alters usable pixels (their xi already sits inside)
        xi_safe = np.clip(xi, k + 1, w - k - 3)
        m11 = np.zeros((h, w), np.float64)
        m12 = np.zeros((h, w), np.float64)
        m13 = np.zeros((h, w), np.float64)
        m22 = np.zeros((h, w), np.float64)
        m23 = np.zeros((h, w), np.float64)
        m33 = np.zeros((h, w), np.float64)
        r1 = np.zeros((h, w), np.float64)
        r2 = np.zeros((h, w), np.float64)
        r3 = np.zeros((h, w), np.float64)
        for i in range(-k, k + 1):
            rows = np.clip(ys_idx + i, 0, h - 1)
            grow = gr64[rows]
            lrow = gl64[rows]
            for j in range(-k, k + 1):
                cm1 = np.take_along_axis(grow, xi_safe + (j - 1), axis=1)
                c0 = np.take_along_axis(grow, xi_safe + j, axis=1)
                c1 = np.take_along_axis(grow, xi_safe + (j + 1), axis=1)
                c2 = np.take_along_axis(grow, xi_safe + (j + 2), axis=1)
                rv = c0 + fx * (c1 - c0)
                g0 = (c1 - cm1) * 0.5
                g1 = (c2 - c0) * 0.5
                gv = g0 + fx * (g1 - g0)
                lt = np.take_along_axis(lrow, np.clip(xs_idx + j, 0, w - 1), axis=1)
                diff = lt - rv
                gj = gv * j
                gi = gv * i
                m11 += gv * gv
                m12 += gv * gj
                m13 += gv * gi
                m22 += gj * gj
                m23 += gj * gi
                m33 += gi * gi
                r1 += diff * gv
                r2 += diff * gj
                r3 += diff * gi
        det = (
            m11 * (m22 * m33 - m23 * m23)
            - m12 * (m12 * m33 - m23 * m13)
            + m13 * (m12 * m23 - m22 * m13)
        )
        det1 = (
            r1 * (m22 * m33 - m23 * m23)
            - m12 * (r2 * m33 - m23 * r3)
            + m13 * (r2 * m23 - m22 * r3)
        )
        step = np.zeros((h, w), np.float64)
        affine_ok = usable & (np.abs(det) > 1e-12)
        np.divide(-det1, det, out=step, where=affine_ok)
        simple = usable & ~affine_ok & (m11 > 1e-12)
        np.divide(-r1, m11, out=step, where=simple)
        delta = np.clip(delta + step, -0.5, 0.5)
        delta = np.where(usable, delta, 0.0)
    return delta


# ---------------------------------------------------------------------------
# semi-global aggregation

_BIG = np.int32(1 << 28)


def _sgm_step(ccur, lprev, p1, p2eff):
    """One DP step vectorized over lanes: (N, D) int32 -> (N, D)."""
    m = lprev.min(axis=1, keepdims=True)
    down = np.empty_like(lprev)
    down[:, 1:] = lprev[:, :-1]
    down[:, 0] = _BIG
    up = np.empty_like(lprev)
    up[:, :-1] = lprev[:, 1:]
    up[:, -1] = _BIG
    best = np.minimum(lprev, np.minimum(down, up) + p1)
    best = np.minimum(best, m + p2eff)
    return ccur + best - m


def _cost_column(cl, cr, x, d_lo, ndisp, infeasible):
    """Hamming costs for all rows at column x: (h, ndisp) int32."""
    h = cl.shape[0]
    out = np.full((h, ndisp), infeasible, np.int32)
    dd = d_lo + np.arange(ndisp)
    ok = x - dd >= 0
    if ok.any():
        xs = x - dd[ok]
        out[:, ok] = popcount64(cl[:, x : x + 1] ^ cr[:, xs])
    return out


def _cost_row(cl, cr, y, d_lo, ndisp, infeasible):
    """Hamming costs for all columns of row y: (w, ndisp) int32."""
    w = cl.shape[1]
    out = np.full((w, ndisp), infeasible, np.int32)
    for d in range(ndisp):
        dd = d_lo + d
        if dd < w:
            out[dd:, d] = popcount64(cl[y, dd:] ^ cr[y, : w - dd])
    return out


def _p2_eff(gdiff, p1, p2):
    """Gradient-adaptive large-jump penalty (integer math)."""
    return np.maximum(p1 + 1, p2 // (1 + gdiff.astype(np.int32) // 8))


def sgm_aggregate(cl, cr, luma, d_lo, ndisp, p1, p2, infeasible):
    """Sum of 8 directional path costs; Hamming costs computed on the fly.

    ``infeasible`` is the cost charged where x - d falls outside the right
    image (the census bit count, i.e. the worst possible match).
    """
    h, w = cl.shape
    S = np.zeros((h, w, ndisp), np.uint16)
    lum = luma.astype(np.int32)

    # horizontal passes: lanes are rows
    for step in (1, -1):
        xs = range(w) if step == 1 else range(w - 1, -1, -1)
        lprev = None
        xprev = None
        for x in xs:
            c = _cost_row_t(cl, cr, x, d_lo, ndisp, infeasible)
            if lprev is None:
                lcur = c
            else:
                g = np.abs(lum[:, x] - lum[:, xprev])
                lcur = _sgm_step(c, lprev, p1, _p2_eff(g, p1, p2)[:, None])
            S[:, x, :] += lcur.astype(np.uint16)
            lprev = lcur
            xprev = x

    # vertical and diagonal passes: lanes are columns
    for dy, dx in ((1, 0), (-1, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)):
        ys = range(h) if dy == 1 else range(h - 1, -1, -1)
        lprev = None
        yprev = None
        for y in ys:
            c = _cost_row(cl, cr, y, d_lo, ndisp, infeasible)
            if lprev is None:
                lcur = c
            else:
                shifted = np.full_like(lprev, _BIG)
                fresh = np.zeros(w, bool)
                if dx == 0:
                    shifted[:] = lprev
                elif dx == 1:
                    shifted[1:] = lprev[:-1]
                    fresh[0] = True
                else:
                    shifted[:-1] = lprev[1:]
                    fresh[-1] = True
                gprev = np.empty(w, np.int32)
                xs_idx = np.arange(w)
                src = np.clip(xs_idx - dx, 0, w - 1)
                gprev = np.abs(lum[y] - lum[yprev, src])
                lcur = _sgm_step(c, shifted, p1, _p2_eff(gprev, p1, p2)[:, None])
                if fresh.any():
                    lcur[fresh] = c[fresh]
            S[y] += lcur.astype(np.uint16)
            lprev = lcur
            yprev = y

    return S


def _cost_row_t(cl, cr, x, d_lo, ndisp, infeasible):
    return _cost_column(cl, cr, x, d_lo, ndisp, infeasible)


# ---------------------------------------------------------------------------
# WTA over an aggregated volume


def volume_wta(S, d_lo):
    """Winner-takes-all over a (h, w, D) volume with feasibility x-d >= 0.

    Ties break toward smaller disparity; an exact tie at a non-adjacent
    disparity marks the pixel ambiguous.  Returns (dbest, cminus, cbest,
    cplus, amb) with dbest holding absolute disparities (-1 if none).
    """
    h, w, ndisp = S.shape
    dbest = np.full((h, w), -1, np.int32)
    cbest = np.full((h, w), np.iinfo(np.int32).max, np.int32)
    cminus = np.full((h, w), -1, np.int32)
    cplus = np.full((h, w), -1, np.int32)
    amb = np.zeros((h, w), np.uint8)
    xs = np.arange(w)[None, :]
    sv = S.astype(np.int32)
    for d in range(ndisp):
        dd = d_lo + d
        feas = xs - dd >= 0
        val = sv[:, :, d]
        better = feas & (val < cbest)
        adj = feas & ~better & (dbest == dd - 1)
        np.copyto(cplus, val, where=adj & (cplus < 0))
        tie = feas & ~better & (val == cbest) & (dbest >= 0) & (dd > dbest + 1)
        amb |= tie.astype(np.uint8)
        if d > 0:
            np.copyto(cminus, sv[:, :, d - 1], where=better)
        else:
            np.copyto(cminus, -1, where=better)
        np.copyto(cplus, -1, where=better)
        np.copyto(amb, 0, where=better)
        np.copyto(cbest, val, where=better)
        np.copyto(dbest, dd, where=better)
    return dbest, cminus, cbest, cplus, amb


def volume_right_wta(S, d_lo):
    """Right-view WTA from the same volume: argmin_d S(y, xr + d, d)."""
    h, w, ndisp = S.shape
    dbest = np.full((h, w), -1, np.int32)
    cbest = np.full((h, w), np.iinfo(np.int32).max, np.int32)
    sv = S.astype(np.int32)
    for d in range(ndisp):
        dd = d_lo + d
        if dd >= w:
            break
        val = sv[:, dd:, d]
        sub = (slice(None), slice(0, w - dd))
        better = val < cbest[sub]
        np.copyto(cbest[sub], val, where=better)
        np.copyto(dbest[sub], dd, where=better)
    return dbest


# ---------------------------------------------------------------------------
# validity-aware 3x3 lower-median filter


def median3x3_valid(vals, valid):
    """Lower median of the valid in-bounds 3x3 neighborhood.

    Invalid centers stay invalid; the median is a pure selection (no
    averaging), so no new disparity values are invented.
    """
    h, w = vals.shape
    stack = np.full((9, h, w), np.inf, np.float32)
    k = 0
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            ys = slice(max(dy, 0), h + min(dy, 0))
            yd = slice(max(-dy, 0), h + min(-dy, 0))
            xs = slice(max(dx, 0), w + min(dx, 0))
            xd = slice(max(-dx, 0), w + min(-dx, 0))
            plane = stack[k]
            sub = np.where(valid[ys, xs] != 0, vals[ys, xs], np.float32(np.inf))
            plane[yd, xd] = sub
            k += 1
    stack.sort(axis=0)
    n = np.isfinite(stack).sum(axis=0)
    idx = np.maximum(n - 1, 0) // 2
    med = np.take_along_axis(stack, idx[None], axis=0)[0]
    out = np.where(valid != 0, med, vals).astype(np.float32)
    return out, valid.copy()


# ---------------------------------------------------------------------------
# Lanczos half-resolution resize


def _resize_half_axis1(img, taps):
    h, w = img.shape
    wo = w // 2
    out = np.zeros((h, wo), np.float32)
    base = 2 * np.arange(wo) - 5
    for k in range(12):
        idx = np.clip(base + k, 0, w - 1)
        out += taps[k] * img[:, idx]
    return out


def resize_half_2d(img, taps):
    """Separable factor-2 Lanczos resize; horizontal pass then vertical."""
    tmp = _resize_half_axis1(img, taps)
    return _resize_half_axis1(np.ascontiguousarray(tmp.T), taps).T.copy()


# ---------------------------------------------------------------------------
# disparity 2x downsample (median of valid 2x2, halved)


def downsample_disparity_2x(vals, valid):
    h, w = vals.shape
    v4 = np.stack(
        [
            np.where(valid[0::2, 0::2] != 0, vals[0::2, 0::2], np.float32(np.inf)),
            np.where(valid[0::2, 1::2] != 0, vals[0::2, 1::2], np.float32(np.inf)),
            np.where(valid[1::2, 0::2] != 0, vals[1::2, 0::2], np.float32(np.inf)),
            np.where(valid[1::2, 1::2] != 0, vals[1::2, 1::2], np.float32(np.inf)),
        ]
    )
    n = np.isfinite(v4).sum(axis=0)
    v4.sort(axis=0)
    half = np.float32(0.5)
    med = np.where(
        n == 1,
        v4[0],
        np.where(
            n == 2,
            (v4[0] + v4[1]) * half,
            np.where(n == 3, v4[1], (v4[1] + v4[2]) * half),
        ),
    )
    out_valid = (n > 0).astype(np.uint8)
    out = np.where(out_valid != 0, med * half, np.float32(0.0)).astype(np.float32)
    return out, out_valid


# ---------------------------------------------------------------------------
# procedural value-noise texture


def _hash3(ix, iy, iz, seed):
    h = ix * _MIX1
    h ^= iy * _MIX2
    h ^= iz * _MIX3
    h ^= seed
    h ^= h >> _U64(30)
    h *= _MIX4
    h ^= h >> _U64(27)
    h *= _MIX5
    h ^= h >> _U64(31)
    return h


def _corner01(ix, iy, iz, seed):
    return (_hash3(ix, iy, iz, seed) >> _U64(11)).astype(np.float64) * _INV53


def value_noise3(px, py, pz, seed):
    """Trilinear value noise on the integer lattice, smoothstep-eased."""
    x0 = np.floor(px)
    y0 = np.floor(py)
    z0 = np.floor(pz)
    fx = px - x0
    fy = py - y0
    fz = pz - z0
    ix = x0.astype(np.int64).astype(np.uint64)
    iy = y0.astype(np.int64).astype(np.uint64)
    iz = z0.astype(np.int64).astype(np.uint64)
    one = _U64(1)
    sx = fx * fx * (3.0 - 2.0 * fx)
    sy = fy * fy * (3.0 - 2.0 * fy)
    sz = fz * fz * (3.0 - 2.0 * fz)
    c000 = _corner01(ix, iy, iz, seed)
    c100 = _corner01(ix + one, iy, iz, seed)
    c010 = _corner01(ix, iy + one, iz, seed)
    c110 = _corner01(ix + one, iy + one, iz, seed)
    c001 = _corner01(ix, iy, iz + one, seed)
    c101 = _corner01(ix + one, iy, iz + one, seed)
    c011 = _corner01(ix, iy + one, iz + one, seed)
    c111 = _corner01(ix + one, iy + one, iz + one, seed)
    x00 = c000 + sx * (c100 - c000)
    x10 = c010 + sx * (c110 - c010)
    x01 = c001 + sx * (c101 - c001)
    x11 = c011 + sx * (c111 - c011)
    y0_ = x00 + sy * (x10 - x00)
    y1_ = x01 + sy * (x11 - x01)
    return y0_ + sz * (y1_ - y0_)


def fractal_texture(px, py, pz, scale, octaves, seed, footprint):
    """Band-limited fractal value noise in [0.1, 0.9].

    Octaves whose feature size falls below twice the sampling footprint
    fade out linearly (gone at one footprint), which keeps the rendered
    pair free of aliasing-induced left/right inconsistency.
    """
    total = np.zeros_like(px)
    norm = 0.0
    amp = 1.0
    feat = float(scale)
    seed_u = _U64(seed)
    for o in range(int(octaves)):
        r = feat / footprint
        wgt = np.clip(r - 1.0, 0.0, 1.0) * amp
        active = wgt > 0.0
        if np.any(active):
            n = value_noise3(px / feat, py / feat, pz / feat, seed_u + _U64(o) * _MIX1)
            total = total + wgt * (n - 0.5)
        norm += amp
        amp *= 0.5
        feat *= 0.5
    return 0.5 + 0.8 * (total / norm)


# ---------------------------------------------------------------------------
# ray-cast renderer

PRIM_PLANE = 0
PRIM_BOX = 1

_T_EPS = 1e-9

# surfaces seen at grazing angles smear one pixel across a long surface
# patch; the texture footprint grows by 1/cos(view, normal), floored so
# extreme grazing keeps a little texture instead of none
COS_FLOOR = 1.0


def _intersect_plane(ox, oy, oz, dx, dy, dz, geom):
    nx, ny, nz, c, x0, y0, ex, ey = geom
    denom = nx * dx + ny * dy + nz * dz
    t = np.where(
        np.abs(denom) < 1e-14,
        np.inf,
        (c - (nx * ox + ny * oy + nz * oz)) / np.where(np.abs(denom) < 1e-14, 1.0, denom),
    )
    px = ox + t * dx
    py = oy + t * dy
    ok = (t > _T_EPS) & np.isfinite(t)
    if np.isfinite(ex):
        ok &= np.abs(px - x0) <= ex * 0.5
    if np.isfinite(ey):
        ok &= np.abs(py - y0) <= ey * 0.5
    return np.where(ok, t, np.inf)


def _intersect_box(ox, oy, oz, dx, dy, dz, geom):
    xmin, ymin, zmin, xmax, ymax, zmax = geom[:6]
    tmin = np.full(dx.shape, -np.inf)
    tmax = np.full(dx.shape, np.inf)
    for o, dvec, lo, hi in ((ox, dx, xmin, xmax), (oy, dy, ymin, ymax), (oz, dz, zmin, zmax)):
        par = np.abs(dvec) < 1e-14
        inv = 1.0 / np.where(par, 1.0, dvec)
        t1 = (lo - o) * inv
        t2 = (hi - o) * inv
        tn = np.minimum(t1, t2)
        tf = np.maximum(t1, t2)
        tmin = np.where(par, np.where((o >= lo) & (o <= hi), tmin, np.inf), np.maximum(tmin, tn))
        tmax = np.where(par, np.where((o >= lo) & (o <= hi), tmax, -np.inf), np.minimum(tmax, tf))
    hit = (tmax >= tmin) & (tmax > _T_EPS)
    t = np.where(tmin > _T_EPS, tmin, tmax)
    return np.where(hit & (t > _T_EPS), t, np.inf)


def _box_face_cos(hx, hy, hz, geom, pp):
    """|cos| between the hit-face normal and the view direction from the
    rig origin; the face is the slab whose bound the hit point touches."""
    ds = np.stack(
        [
            np.abs(hx - geom[0]),
            np.abs(hx - geom[3]),
            np.abs(hy - geom[1]),
            np.abs(hy - geom[4]),
            np.abs(hz - geom[2]),
            np.abs(hz - geom[5]),
        ]
    )
    axis = ds.argmin(axis=0) // 2
    comp = np.where(axis == 0, hx, np.where(axis == 1, hy, hz))
    return np.abs(comp) / pp


def render_view(h, w, f, cx, cy, rot, origin, ptype, pgeom, pscale, poct, pseed):
    """Ray-cast one camera view of a packed primitive list.

    ``rot`` maps world coordinates into the camera frame; rays leave along
    rot^T @ ((u-cx)/f, (v-cy)/f, 1).  The texture footprint at a hit is
    (z/f) / max(cos(view, normal), COS_FLOOR) with the view direction
    taken from the rig origin, so it depends only on the world point and
    both cameras shade identically.  Returns (image float32 in [0,1],
    depth float64 world-z, valid uint8).
    """
    us, vs = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    a = (us - cx) / f
    b = (vs - cy) / f
    rt = rot.T
    dx = rt[0, 0] * a + rt[0, 1] * b + rt[0, 2]
    dy = rt[1, 0] * a + rt[1, 1] * b + rt[1, 2]
    dz = rt[2, 0] * a + rt[2, 1] * b + rt[2, 2]
    ox, oy, oz = origin

    tbest = np.full((h, w), np.inf)
    pid = np.full((h, w), -1, np.int32)
    for i in range(len(ptype)):
        if ptype[i] == PRIM_PLANE:
            t = _intersect_plane(ox, oy, oz, dx, dy, dz, pgeom[i])
        else:
            t = _intersect_box(ox, oy, oz, dx, dy, dz, pgeom[i])
        closer = t < tbest
        tbest = np.where(closer, t, tbest)
        pid = np.where(closer, np.int32(i), pid)

    valid = pid >= 0
    depth = np.where(valid, oz + tbest * dz, 0.0)
    img = np.zeros((h, w), np.float64)
    for i in range(len(ptype)):
        m = pid == i
        if not m.any():
            continue
        hx = ox + tbest[m] * dx[m]
        hy = oy + tbest[m] * dy[m]
        hz = oz + tbest[m] * dz[m]
        pp = np.sqrt(hx * hx + hy * hy + hz * hz)
        if ptype[i] == PRIM_PLANE:
            nx, ny, nz = pgeom[i][0], pgeom[i][1], pgeom[i][2]
            nn = np.sqrt(nx * nx + ny * ny + nz * nz)
            cosv = np.abs(nx * hx + ny * hy + nz * hz) / (nn * pp)
        else:
            cosv = _box_face_cos(hx, hy, hz, pgeom[i], pp)
        cosv = np.maximum(cosv, COS_FLOOR)
        fp = (hz / f) / cosv
        img[m] = fractal_texture(hx, hy, hz, pscale[i], poct[i], pseed[i], fp)
    return img.astype(np.float32), depth, valid.astype(np.uint8)


# ---------------------------------------------------------------------------
# dense vertical-displacement search (auto-calibration measurement)


def vertical_search(cl, cr, us, vs, half_bh, half_bw, hx, hv):
    """2D census block search around each site; full cost table per site.

    Returns (dxbest, dybest, c0, cup, cdn, ok) where dy/dx are signed
    offsets, cup/cdn are the vertical neighbors of the minimum at the best
    horizontal offset, and ok=0 flags boundary or vertically ambiguous
    sites.
    """
    n = len(us)
    ndy = 2 * hv + 1
    ndx = 2 * hx + 1
    costs = np.zeros((n, ndy, ndx), np.int32)
    for iy, dy in enumerate(range(-hv, hv + 1)):
        for ix, dx in enumerate(range(-hx, hx + 1)):
            acc = np.zeros(n, np.int32)
            for bi in range(-half_bh, half_bh + 1):
                for bj in range(-half_bw, half_bw + 1):
                    a = cl[vs + bi, us + bj]
                    b = cr[vs + dy + bi, us + dx + bj]
                    acc += popcount64(a ^ b)
            costs[:, iy, ix] = acc
    flat = costs.reshape(n, -1)
    best = flat.argmin(axis=1)
    dyb = (best // ndx).astype(np.int32)
    dxb = (best % ndx).astype(np.int32)
    c0 = flat[np.arange(n), best]
    ok = (dyb > 0) & (dyb < ndy - 1) & (dxb > 0) & (dxb < ndx - 1)
    rowmin = costs.min(axis=2)
    for i in range(n):
        if not ok[i]:
            continue
        for r in range(ndy):
            if abs(r - dyb[i]) > 1 and rowmin[i, r] == c0[i]:
                ok[i] = False
                break
    cup = np.zeros(n, np.int32)
    cdn = np.zeros(n, np.int32)
    sel = ok.nonzero()[0]
    cup[sel] = costs[sel, dyb[sel] - 1, dxb[sel]]
    cdn[sel] = costs[sel, dyb[sel] + 1, dxb[sel]]
    return (
        (dxb - hx).astype(np.int32),
        (dyb - hv).astype(np.int32),
        c0.astype(np.int32),
        cup,
        cdn,
        ok.astype(np.uint8),
    )
