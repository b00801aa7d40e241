"""Numba @njit builds of the hot kernels.

Bit-identical to numpy_impl: integer cost arithmetic is order-free, and
every float expression reproduces the numpy evaluation order (no fastmath,
so LLVM performs no FMA contraction).
"""

import numpy as np
from numba import njit, prange

BACKEND_NAME = "numba"

_U1 = np.uint64(1)
_M1 = np.uint64(0x9E3779B97F4A7C15)
_M2 = np.uint64(0xC2B2AE3D27D4EB4F)
_M3 = np.uint64(0x165667B19E3779F9)
_M4 = np.uint64(0xBF58476D1CE4E5B9)
_M5 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

_P55 = np.uint64(0x5555555555555555)
_P33 = np.uint64(0x3333333333333333)
_P0F = np.uint64(0x0F0F0F0F0F0F0F0F)
_P01 = np.uint64(0x0101010101010101)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)

_BIG = np.int32(1 << 28)
_IMAX = np.int32(np.iinfo(np.int32).max)


@njit(inline="always")
def _pop64(x):
    x = x - ((x >> _S1) & _P55)
    x = (x & _P33) + ((x >> _S2) & _P33)
    x = (x + (x >> _S4)) & _P0F
    return np.int32((x * _P01) >> _S56)


@njit(cache=True, parallel=True)
def census_transform(gray, half_h, half_w):
    h, w = gray.shape
    code = np.zeros((h, w), np.uint64)
    for y in prange(h):
        for x in range(w):
            center = gray[y, x]
            c = np.uint64(0)
            k = np.uint64(0)
            for dy in range(-half_h, half_h + 1):
                yy = min(max(y + dy, 0), h - 1)
                for dx in range(-half_w, half_w + 1):
                    if dy == 0 and dx == 0:
                        continue
                    xx = min(max(x + dx, 0), w - 1)
                    if gray[yy, xx] < center:
                        c |= _U1 << k
                    k += _U1
            code[y, x] = c
    return code


@njit(cache=True)
def _box_aggregate(ham, half_bh, half_bw):
    """Clamped-window box sum of a (h, wd) cost image."""
    h, wd = ham.shape
    rowsum = np.empty((h, wd), np.int32)
    pref = np.empty(wd + 1, np.int32)
    for y in range(h):
        pref[0] = 0
        for x in range(wd):
            pref[x + 1] = pref[x] + ham[y, x]
        for x in range(wd):
            lo = x - half_bw
            hi = x + half_bw
            s = pref[min(hi, wd - 1) + 1] - pref[max(lo, 0)]
            if lo < 0:
                s += (-lo) * ham[y, 0]
            if hi > wd - 1:
                s += (hi - (wd - 1)) * ham[y, wd - 1]
            rowsum[y, x] = s
    out = np.empty((h, wd), np.int32)
    cpref = np.empty(h + 1, np.int32)
    for x in range(wd):
        cpref[0] = 0
        for y in range(h):
            cpref[y + 1] = cpref[y] + rowsum[y, x]
        for y in range(h):
            lo = y - half_bh
            hi = y + half_bh
            s = cpref[min(hi, h - 1) + 1] - cpref[max(lo, 0)]
            if lo < 0:
                s += (-lo) * rowsum[0, x]
            if hi > h - 1:
                s += (hi - (h - 1)) * rowsum[h - 1, x]
            out[y, x] = s
    return out


@njit(cache=True)
def fast_match(cl, cr, d_lo, d_hi, half_bh, half_bw):
    h, w = cl.shape
    dbest = np.full((h, w), -1, np.int32)
    cbest = np.full((h, w), _IMAX, np.int32)
    cminus = np.full((h, w), -1, np.int32)
    cplus = np.full((h, w), -1, np.int32)
    amb = np.zeros((h, w), np.uint8)
    drbest = np.full((h, w), -1, np.int32)
    crbest = np.full((h, w), _IMAX, np.int32)
    aprev = np.full((h, w), -1, np.int32)
    ham = np.empty((h, w), np.int32)

    for d in range(d_lo, d_hi + 1):
        if d >= w:
            break
        wd = w - d
        hview = ham[:, :wd]
        for y in range(h):
            for x in range(wd):
                hview[y, x] = _pop64(cl[y, x + d] ^ cr[y, x])
        agg = _box_aggregate(hview, half_bh, half_bw)
        for y in range(h):
            for xs in range(wd):
                x = xs + d
                a = agg[y, xs]
                if a < cbest[y, x]:
                    cminus[y, x] = aprev[y, x]
                    cplus[y, x] = -1
                    amb[y, x] = 0
                    cbest[y, x] = a
                    dbest[y, x] = d
                else:
                    if dbest[y, x] == d - 1 and cplus[y, x] < 0:
                        cplus[y, x] = a
                    if a == cbest[y, x] and dbest[y, x] >= 0 and d > dbest[y, x] + 1:
                        amb[y, x] = 1
                aprev[y, x] = a
                # right-view WTA: cost of right pixel xs matching left x
                if a < crbest[y, xs]:
                    crbest[y, xs] = a
                    drbest[y, xs] = d
    return dbest, cbest, cminus, cplus, amb, drbest


@njit(cache=True, parallel=True)
def binomial3x3(img):
    h, w = img.shape
    q = np.float32(0.25)
    half = np.float32(0.5)
    tmp = np.empty((h, w), np.float32)
    out = np.empty((h, w), np.float32)
    for y in prange(h):
        for x in range(w):
            xm = x - 1 if x > 0 else 0
            xp = x + 1 if x < w - 1 else w - 1
            tmp[y, x] = img[y, x] * half + (img[y, xm] + img[y, xp]) * q
    for y in prange(h):
        ym = y - 1 if y > 0 else 0
        yp = y + 1 if y < h - 1 else h - 1
        for x in range(w):
            out[y, x] = tmp[y, x] * half + (tmp[ym, x] + tmp[yp, x]) * q
    return out


@njit(cache=True, parallel=True)
def intensity_refine(gl, gr, dmap, half_win, iterations):
    h, w = gl.shape
    k = half_win
    delta = np.zeros((h, w), np.float64)
    for y in prange(h):
        if y < k or y > h - 1 - k:
            continue
        for x in range(w):
            d0 = dmap[y, x]
            if d0 < 0:
                continue
            xr0 = x - d0
            if xr0 - k - 2 < 0 or xr0 + k + 2 > w - 1:
                continue
            if x - k < 0 or x + k > w - 1:
                continue
            dcur = 0.0
            for _ in range(iterations):
                base = np.float64(xr0) - dcur
                xi = np.int64(np.floor(base))
                fx = base - xi
                num = 0.0
                den = 0.0
                for i in range(-k, k + 1):
                    yy = y + i
                    for j in range(-k, k + 1):
                        cm1 = np.float64(gr[yy, xi + (j - 1)])
                        c0 = np.float64(gr[yy, xi + j])
                        c1 = np.float64(gr[yy, xi + (j + 1)])
                        c2 = np.float64(gr[yy, xi + (j + 2)])
                        rv = c0 + fx * (c1 - c0)
                        g0 = (c1 - cm1) * 0.5
                        g1 = (c2 - c0) * 0.5
                        gv = g0 + fx * (g1 - g0)
                        diff = np.float64(gl[yy, x + j]) - rv
                        num += diff * gv
                        den += gv * gv
                step = -num / den if den > 1e-12 else 0.0
                dcur = dcur + step
                if dcur < -0.5:
                    dcur = -0.5
                elif dcur > 0.5:
                    dcur = 0.5
            delta[y, x] = dcur
    return delta


@njit(inline="always")
def _p2_adaptive(g, p1, p2):
    v = p2 // (1 + g // 8)
    lo = p1 + 1
    return v if v > lo else lo


@njit(cache=True)
def _sgm_dir_horizontal(cl, cr, lum, S, d_lo, ndisp, p1, p2, infeasible, step):
    h, w = cl.shape
    lp = np.empty(ndisp, np.int32)
    lc = np.empty(ndisp, np.int32)
    x0 = 0 if step == 1 else w - 1
    for y in range(h):
        x = x0
        for d in range(ndisp):
            dd = d_lo + d
            c = infeasible if x - dd < 0 else _pop64(cl[y, x] ^ cr[y, x - dd])
            lp[d] = c
            S[y, x, d] += np.uint16(c)
        for _ in range(1, w):
            xprev = x
            x += step
            g = lum[y, x] - lum[y, xprev]
            if g < 0:
                g = -g
            p2e = _p2_adaptive(g, p1, p2)
            mp = lp[0]
            for d in range(1, ndisp):
                if lp[d] < mp:
                    mp = lp[d]
            for d in range(ndisp):
                dd = d_lo + d
                c = infeasible if x - dd < 0 else _pop64(cl[y, x] ^ cr[y, x - dd])
                best = lp[d]
                if d > 0 and lp[d - 1] + p1 < best:
                    best = lp[d - 1] + p1
                if d < ndisp - 1 and lp[d + 1] + p1 < best:
                    best = lp[d + 1] + p1
                if mp + p2e < best:
                    best = mp + p2e
                lc[d] = c + best - mp
                S[y, x, d] += np.uint16(lc[d])
            for d in range(ndisp):
                lp[d] = lc[d]
    return S


@njit(cache=True)
def _sgm_dir_vertical(cl, cr, lum, S, d_lo, ndisp, p1, p2, infeasible, dy, dx):
    """Sweep along rows with a per-column line buffer; covers vertical and
    diagonal directions (dy = +/-1, dx in {-1, 0, 1})."""
    h, w = cl.shape
    lprev = np.empty((w, ndisp), np.int32)
    lcur = np.empty((w, ndisp), np.int32)
    y0 = 0 if dy == 1 else h - 1
    y = y0
    for x in range(w):
        for d in range(ndisp):
            dd = d_lo + d
            c = infeasible if x - dd < 0 else _pop64(cl[y, x] ^ cr[y, x - dd])
            lprev[x, d] = c
            S[y, x, d] += np.uint16(c)
    for _ in range(1, h):
        yprev = y
        y += dy
        for x in range(w):
            xp = x - dx
            if xp < 0 or xp > w - 1:
                for d in range(ndisp):
                    dd = d_lo + d
                    c = infeasible if x - dd < 0 else _pop64(cl[y, x] ^ cr[y, x - dd])
                    lcur[x, d] = c
                    S[y, x, d] += np.uint16(c)
                continue
            g = lum[y, x] - lum[yprev, xp]
            if g < 0:
                g = -g
            p2e = _p2_adaptive(g, p1, p2)
            mp = lprev[xp, 0]
            for d in range(1, ndisp):
                if lprev[xp, d] < mp:
                    mp = lprev[xp, d]
            for d in range(ndisp):
                dd = d_lo + d
                c = infeasible if x - dd < 0 else _pop64(cl[y, x] ^ cr[y, x - dd])
                best = lprev[xp, d]
                if d > 0 and lprev[xp, d - 1] + p1 < best:
                    best = lprev[xp, d - 1] + p1
                if d < ndisp - 1 and lprev[xp, d + 1] + p1 < best:
                    best = lprev[xp, d + 1] + p1
                if mp + p2e < best:
                    best = mp + p2e
                lcur[x, d] = c + best - mp
                S[y, x, d] += np.uint16(lcur[x, d])
        tmp = lprev
        lprev = lcur
        lcur = tmp
    return S


def sgm_aggregate(cl, cr, luma, d_lo, ndisp, p1, p2, infeasible):
    h, w = cl.shape
    S = np.zeros((h, w, ndisp), np.uint16)
    lum = luma.astype(np.int32)
    _sgm_dir_horizontal(cl, cr, lum, S, d_lo, ndisp, p1, p2, infeasible, 1)
    _sgm_dir_horizontal(cl, cr, lum, S, d_lo, ndisp, p1, p2, infeasible, -1)
    for dy, dx in ((1, 0), (-1, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)):
        _sgm_dir_vertical(cl, cr, lum, S, d_lo, ndisp, p1, p2, infeasible, dy, dx)
    return S


@njit(cache=True, parallel=True)
def volume_wta(S, d_lo):
    h, w, ndisp = S.shape
    dbest = np.full((h, w), -1, np.int32)
    cbest = np.full((h, w), _IMAX, np.int32)
    cminus = np.full((h, w), -1, np.int32)
    cplus = np.full((h, w), -1, np.int32)
    amb = np.zeros((h, w), np.uint8)
    for y in prange(h):
        for x in range(w):
            for d in range(ndisp):
                dd = d_lo + d
                if x - dd < 0:
                    break
                v = np.int32(S[y, x, d])
                if v < cbest[y, x]:
                    cminus[y, x] = np.int32(S[y, x, d - 1]) if d > 0 else -1
                    cplus[y, x] = -1
                    amb[y, x] = 0
                    cbest[y, x] = v
                    dbest[y, x] = dd
                else:
                    if dbest[y, x] == dd - 1 and cplus[y, x] < 0:
                        cplus[y, x] = v
                    if v == cbest[y, x] and dbest[y, x] >= 0 and dd > dbest[y, x] + 1:
                        amb[y, x] = 1
    return dbest, cminus, cbest, cplus, amb


@njit(cache=True, parallel=True)
def volume_right_wta(S, d_lo):
    h, w, ndisp = S.shape
    dbest = np.full((h, w), -1, np.int32)
    cbest = np.full((h, w), _IMAX, np.int32)
    for y in prange(h):
        for xr in range(w):
            for d in range(ndisp):
                dd = d_lo + d
                x = xr + dd
                if x >= w:
                    break
                v = np.int32(S[y, x, d])
                if v < cbest[y, xr]:
                    cbest[y, xr] = v
                    dbest[y, xr] = dd
    return dbest


@njit(cache=True, parallel=True)
def median3x3_valid(vals, valid):
    h, w = vals.shape
    out = vals.copy()
    for y in prange(h):
        buf = np.empty(9, np.float32)
        for x in range(w):
            if valid[y, x] == 0:
                continue
            n = 0
            for dy in range(-1, 2):
                yy = y + dy
                if yy < 0 or yy >= h:
                    continue
                for dx in range(-1, 2):
                    xx = x + dx
                    if xx < 0 or xx >= w:
                        continue
                    if valid[yy, xx] != 0:
                        buf[n] = vals[yy, xx]
                        n += 1
            # insertion sort of the n collected values
            for i in range(1, n):
                key = buf[i]
                j = i - 1
                while j >= 0 and buf[j] > key:
                    buf[j + 1] = buf[j]
                    j -= 1
                buf[j + 1] = key
            out[y, x] = buf[(n - 1) // 2]
    return out, valid.copy()


@njit(cache=True, parallel=True)
def _resize_half_axis1(img, taps):
    h, w = img.shape
    wo = w // 2
    out = np.empty((h, wo), np.float32)
    for y in prange(h):
        for o in range(wo):
            base = 2 * o - 5
            acc = np.float32(0.0)
            for k in range(12):
                idx = base + k
                if idx < 0:
                    idx = 0
                elif idx > w - 1:
                    idx = w - 1
                acc = acc + taps[k] * img[y, idx]
            out[y, o] = acc
    return out


def resize_half_2d(img, taps):
    tmp = _resize_half_axis1(img, taps)
    return _resize_half_axis1(np.ascontiguousarray(tmp.T), taps).T.copy()


@njit(cache=True)
def downsample_disparity_2x(vals, valid):
    h, w = vals.shape
    h2 = h // 2
    w2 = w // 2
    out = np.zeros((h2, w2), np.float32)
    out_valid = np.zeros((h2, w2), np.uint8)
    half = np.float32(0.5)
    buf = np.empty(4, np.float32)
    for y in range(h2):
        for x in range(w2):
            n = 0
            for dy in range(2):
                for dx in range(2):
                    if valid[2 * y + dy, 2 * x + dx] != 0:
                        buf[n] = vals[2 * y + dy, 2 * x + dx]
                        n += 1
            if n == 0:
                continue
            for i in range(1, n):
                key = buf[i]
                j = i - 1
                while j >= 0 and buf[j] > key:
                    buf[j + 1] = buf[j]
                    j -= 1
                buf[j + 1] = key
            if n == 1:
                med = buf[0]
            elif n == 2:
                med = (buf[0] + buf[1]) * half
            elif n == 3:
                med = buf[1]
            else:
                med = (buf[1] + buf[2]) * half
            out[y, x] = med * half
            out_valid[y, x] = 1
    return out, out_valid


# ---------------------------------------------------------------------------
# procedural texture + renderer


@njit(inline="always")
def _hash3(ix, iy, iz, seed):
    h = ix * _M1
    h ^= iy * _M2
    h ^= iz * _M3
    h ^= seed
    h ^= h >> _S30
    h *= _M4
    h ^= h >> _S27
    h *= _M5
    h ^= h >> _S31
    return h


@njit(inline="always")
def _corner01(ix, iy, iz, seed):
    return np.float64(_hash3(ix, iy, iz, seed) >> _S11) * _INV53


@njit(inline="always")
def _value_noise3(px, py, pz, seed):
    x0 = np.floor(px)
    y0 = np.floor(py)
    z0 = np.floor(pz)
    fx = px - x0
    fy = py - y0
    fz = pz - z0
    ix = np.uint64(np.int64(x0))
    iy = np.uint64(np.int64(y0))
    iz = np.uint64(np.int64(z0))
    sx = fx * fx * (3.0 - 2.0 * fx)
    sy = fy * fy * (3.0 - 2.0 * fy)
    sz = fz * fz * (3.0 - 2.0 * fz)
    c000 = _corner01(ix, iy, iz, seed)
    c100 = _corner01(ix + _U1, iy, iz, seed)
    c010 = _corner01(ix, iy + _U1, iz, seed)
    c110 = _corner01(ix + _U1, iy + _U1, iz, seed)
    c001 = _corner01(ix, iy, iz + _U1, seed)
    c101 = _corner01(ix + _U1, iy, iz + _U1, seed)
    c011 = _corner01(ix, iy + _U1, iz + _U1, seed)
    c111 = _corner01(ix + _U1, iy + _U1, iz + _U1, seed)
    x00 = c000 + sx * (c100 - c000)
    x10 = c010 + sx * (c110 - c010)
    x01 = c001 + sx * (c101 - c001)
    x11 = c011 + sx * (c111 - c011)
    ya = x00 + sy * (x10 - x00)
    yb = x01 + sy * (x11 - x01)
    return ya + sz * (yb - ya)


_COS_FLOOR = 1.0


@njit(inline="always")
def _fractal_texture(px, py, pz, scale, octaves, seed, footprint):
    total = 0.0
    norm = 0.0
    amp = 1.0
    feat = scale
    for o in range(octaves):
        r = feat / footprint
        t = r - 1.0
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        wgt = t * amp
        if wgt > 0.0:
            n = _value_noise3(px / feat, py / feat, pz / feat, seed + np.uint64(o) * _M1)
            total = total + wgt * (n - 0.5)
        norm += amp
        amp *= 0.5
        feat *= 0.5
    return 0.5 + 0.8 * (total / norm)


@njit(inline="always")
def _intersect_plane_scalar(ox, oy, oz, dx, dy, dz, geom):
    nx = geom[0]
    ny = geom[1]
    nz = geom[2]
    c = geom[3]
    denom = nx * dx + ny * dy + nz * dz
    if abs(denom) < 1e-14:
        return np.inf
    t = (c - (nx * ox + ny * oy + nz * oz)) / denom
    if not (t > 1e-9 and np.isfinite(t)):
        return np.inf
    px = ox + t * dx
    py = oy + t * dy
    ex = geom[6]
    ey = geom[7]
    if np.isfinite(ex) and abs(px - geom[4]) > ex * 0.5:
        return np.inf
    if np.isfinite(ey) and abs(py - geom[5]) > ey * 0.5:
        return np.inf
    return t


@njit(inline="always")
def _intersect_box_scalar(ox, oy, oz, dx, dy, dz, geom):
    tmin = -np.inf
    tmax = np.inf
    for axis in range(3):
        o = ox if axis == 0 else (oy if axis == 1 else oz)
        dvec = dx if axis == 0 else (dy if axis == 1 else dz)
        lo = geom[axis]
        hi = geom[axis + 3]
        if abs(dvec) < 1e-14:
            if o >= lo and o <= hi:
                pass
            else:
                tmin = np.inf
                tmax = -np.inf
        else:
            inv = 1.0 / dvec
            t1 = (lo - o) * inv
            t2 = (hi - o) * inv
            tn = min(t1, t2)
            tf = max(t1, t2)
            tmin = max(tmin, tn)
            tmax = min(tmax, tf)
    if not (tmax >= tmin and tmax > 1e-9):
        return np.inf
    t = tmin if tmin > 1e-9 else tmax
    if t > 1e-9:
        return t
    return np.inf


@njit(cache=True, parallel=True)
def render_view(h, w, f, cx, cy, rot, origin, ptype, pgeom, pscale, poct, pseed):
    img = np.zeros((h, w), np.float32)
    depth = np.zeros((h, w), np.float64)
    valid = np.zeros((h, w), np.uint8)
    rt = rot.T.copy()
    ox = origin[0]
    oy = origin[1]
    oz = origin[2]
    nprim = len(ptype)
    for v in prange(h):
        for u in range(w):
            a = (u - cx) / f
            b = (v - cy) / f
            dx = rt[0, 0] * a + rt[0, 1] * b + rt[0, 2]
            dy = rt[1, 0] * a + rt[1, 1] * b + rt[1, 2]
            dz = rt[2, 0] * a + rt[2, 1] * b + rt[2, 2]
            tbest = np.inf
            pid = -1
            for i in range(nprim):
                if ptype[i] == 0:
                    t = _intersect_plane_scalar(ox, oy, oz, dx, dy, dz, pgeom[i])
                else:
                    t = _intersect_box_scalar(ox, oy, oz, dx, dy, dz, pgeom[i])
                if t < tbest:
                    tbest = t
                    pid = i
            if pid < 0:
                continue
            hx = ox + tbest * dx
            hy = oy + tbest * dy
            hz = oz + tbest * dz
            pp = np.sqrt(hx * hx + hy * hy + hz * hz)
            if ptype[pid] == 0:
                nx = pgeom[pid, 0]
                ny = pgeom[pid, 1]
                nz = pgeom[pid, 2]
                nn = np.sqrt(nx * nx + ny * ny + nz * nz)
                cosv = abs(nx * hx + ny * hy + nz * hz) / (nn * pp)
            else:
                d0 = abs(hx - pgeom[pid, 0])
                d1 = abs(hx - pgeom[pid, 3])
                d2 = abs(hy - pgeom[pid, 1])
                d3 = abs(hy - pgeom[pid, 4])
                d4 = abs(hz - pgeom[pid, 2])
                d5 = abs(hz - pgeom[pid, 5])
                dmin = d0
                axis = 0
                if d1 < dmin:
                    dmin = d1
                if d2 < dmin:
                    dmin = d2
                    axis = 1
                if d3 < dmin:
                    dmin = d3
                    axis = 1
                if d4 < dmin:
                    dmin = d4
                    axis = 2
                if d5 < dmin:
                    dmin = d5
                    axis = 2
                comp = hx if axis == 0 else (hy if axis == 1 else hz)
                cosv = abs(comp) / pp
            if cosv < _COS_FLOOR:
                cosv = _COS_FLOOR
            fp = (hz / f) / cosv
            img[v, u] = _fractal_texture(
                hx, hy, hz, pscale[pid], int(poct[pid]), pseed[pid], fp
            )
            depth[v, u] = hz
            valid[v, u] = 1
    return img, depth, valid


@njit(cache=True, parallel=True)
def vertical_search(cl, cr, us, vs, half_bh, half_bw, hx, hv):
    n = len(us)
    ndy = 2 * hv + 1
    ndx = 2 * hx + 1
    dxout = np.zeros(n, np.int32)
    dyout = np.zeros(n, np.int32)
    c0out = np.zeros(n, np.int32)
    cupout = np.zeros(n, np.int32)
    cdnout = np.zeros(n, np.int32)
    okout = np.zeros(n, np.uint8)
    for i in prange(n):
        u = us[i]
        v = vs[i]
        costs = np.empty((ndy, ndx), np.int32)
        for iy in range(ndy):
            dy = iy - hv
            for ix in range(ndx):
                dx = ix - hx
                acc = np.int32(0)
                for bi in range(-half_bh, half_bh + 1):
                    for bj in range(-half_bw, half_bw + 1):
                        acc += _pop64(cl[v + bi, u + bj] ^ cr[v + dy + bi, u + dx + bj])
                costs[iy, ix] = acc
        best = costs[0, 0]
        byi = 0
        bxi = 0
        for iy in range(ndy):
            for ix in range(ndx):
                if costs[iy, ix] < best:
                    best = costs[iy, ix]
                    byi = iy
                    bxi = ix
        ok = 0 < byi < ndy - 1 and 0 < bxi < ndx - 1
        if ok:
            for iy in range(ndy):
                if abs(iy - byi) > 1:
                    rm = costs[iy, 0]
                    for ix in range(1, ndx):
                        if costs[iy, ix] < rm:
                            rm = costs[iy, ix]
                    if rm == best:
                        ok = False
                        break
        dxout[i] = bxi - hx
        dyout[i] = byi - hv
        c0out[i] = best
        if ok:
            cupout[i] = costs[byi - 1, bxi]
            cdnout[i] = costs[byi + 1, bxi]
            okout[i] = 1
    return dxout, dyout, c0out, cupout, cdnout, okout
