"""Bit-exact readers and writers for images, disparity maps, clouds, and
tabular reports.

Formats: PGM (P5, 8-bit), PNG (8-bit gray/RGB via Pillow), PFM (Pf,
Middlebury convention: bottom-to-top rows, +inf marks invalid pixels,
negative scale = little-endian), PLY 1.0 (ascii or binary_little_endian),
and CSV reports (UTF-8, LF, 6-significant-digit numbers).
"""

import io
import struct
import warnings
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np

from .errors import FormatError, InvalidInputError
from .geometry import DisparityMap

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"

# Rec. 601 luma weights used whenever matching needs a single channel.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass
class ImageBuffer:
    """Row-major intensity image, float32 samples in [0, 1], 1 or 3 channels."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, np.float32)
        if self.data.ndim == 3 and self.data.shape[2] == 1:
            self.data = self.data[:, :, 0]
        if self.data.ndim not in (2, 3):
            raise InvalidInputError("image data must be (h, w) or (h, w, 3)")
        if self.data.ndim == 3 and self.data.shape[2] != 3:
            raise InvalidInputError("color images must have 3 channels")
        if self.data.size and (self.data.min() < 0 or self.data.max() > 1):
            raise InvalidInputError("samples must lie in [0, 1]")

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def channels(self):
        return 1 if self.data.ndim == 2 else 3

    def luma(self):
        """Rec. 601 grayscale view of the image."""
        if self.channels == 1:
            return self.data
        r, g, b = LUMA_WEIGHTS
        out = r * self.data[:, :, 0] + g * self.data[:, :, 1] + b * self.data[:, :, 2]
        return out.astype(np.float32)


# ---------------------------------------------------------------------------
# PGM / PNG


def _pgm_token(buf, pos):
    """Next header token of a PGM, skipping whitespace and # comments."""
    n = len(buf)
    while pos < n:
        ch = buf[pos : pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            while pos < n and buf[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    if pos >= n:
        raise FormatError("truncated PGM header", offset=pos)
    start = pos
    while pos < n and not buf[pos : pos + 1].isspace():
        pos += 1
    return buf[start:pos], start, pos


def _read_pgm_bytes(buf):
    magic, off, pos = _pgm_token(buf, 0)
    if magic != b"P5":
        raise FormatError(f"not a P5 PGM (magic {magic!r})", offset=off)
    fields = []
    for name in ("width", "height", "maxval"):
        tok, off, pos = _pgm_token(buf, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise FormatError(f"bad PGM {name} field {tok!r}", offset=off) from None
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise FormatError("non-positive PGM dimensions", offset=off)
    if maxval != 255:
        raise FormatError(
            f"unsupported PGM bit depth (maxval {maxval}; only 255 supported)",
            offset=off,
        )
    pos += 1  # single whitespace byte after maxval
    need = width * height
    raster = buf[pos : pos + need]
    if len(raster) < need:
        raise FormatError(
            f"truncated PGM payload ({len(raster)} of {need} bytes)",
            offset=pos + len(raster),
        )
    img = np.frombuffer(raster, np.uint8).reshape(height, width)
    return ImageBuffer(img.astype(np.float32) / np.float32(255.0))


def _read_png(path):
    try:
        from PIL import Image, UnidentifiedImageError
    except ImportError as exc:  # pragma: no cover
        raise FormatError(f"PNG support requires Pillow: {exc}") from exc
    try:
        with Image.open(path) as im:
            if im.mode not in ("L", "RGB"):
                raise FormatError(
                    f"unsupported PNG mode {im.mode!r} (only 8-bit L/RGB)"
                )
            arr = np.asarray(im, np.uint8)
    except UnidentifiedImageError as exc:
        raise FormatError(f"undecodable PNG: {exc}", offset=0) from exc
    except (OSError, SyntaxError) as exc:
        raise FormatError(f"malformed PNG: {exc}") from exc
    return ImageBuffer(arr.astype(np.float32) / np.float32(255.0))


def read_image(path):
    """Read a PGM (P5) or 8-bit PNG into an ImageBuffer (v / 255)."""
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head.startswith(b"P5"):
        with open(path, "rb") as fh:
            return _read_pgm_bytes(fh.read())
    if head == PNG_SIGNATURE:
        return _read_png(path)
    raise FormatError(f"unrecognized image format (magic {head[:2]!r})", offset=0)


def to_uint8(img):
    """Quantize samples to 8-bit codes by round(v * 255)."""
    data = img.data if isinstance(img, ImageBuffer) else np.asarray(img)
    return np.rint(data * 255.0).astype(np.uint8)


def write_image(img, path):
    """Write an ImageBuffer as PGM (.pgm, grayscale) or PNG (.png)."""
    path = str(path)
    if path.endswith(".pgm"):
        if img.channels != 1:
            raise InvalidInputError("PGM output supports grayscale only")
        codes = to_uint8(img)
        with open(path, "wb") as fh:
            fh.write(f"P5\n{img.width} {img.height}\n255\n".encode("ascii"))
            fh.write(codes.tobytes())
    elif path.endswith(".png"):
        from PIL import Image

        codes = to_uint8(img)
        mode = "L" if img.channels == 1 else "RGB"
        Image.fromarray(codes, mode=mode).save(path, format="PNG")
    else:
        raise InvalidInputError(f"unsupported image extension for {path!r}")


# ---------------------------------------------------------------------------
# PFM disparity interchange


def read_pfm(path):
    """Read a single-channel PFM into a DisparityMap.

    +inf pixels are invalid; NaNs are counted, warned about, and treated
    as invalid.
    """
    with open(path, "rb") as fh:
        buf = fh.read()
    magic, off, pos = _pgm_token(buf, 0)
    if magic == b"PF":
        raise FormatError("color ('PF') PFM files are unsupported", offset=off)
    if magic != b"Pf":
        raise FormatError(f"not a PFM file (magic {magic!r})", offset=off)
    tok_w, off_w, pos = _pgm_token(buf, pos)
    tok_h, off_h, pos = _pgm_token(buf, pos)
    try:
        width, height = int(tok_w), int(tok_h)
    except ValueError:
        raise FormatError("bad PFM dimensions", offset=off_w) from None
    if width <= 0 or height <= 0:
        raise FormatError("non-positive PFM dimensions", offset=off_w)
    tok_s, off_s, pos = _pgm_token(buf, pos)
    try:
        scale = float(tok_s)
    except ValueError:
        raise FormatError(f"bad PFM scale {tok_s!r}", offset=off_s) from None
    if scale == 0:
        raise FormatError("PFM scale must be nonzero", offset=off_s)
    pos += 1
    need = width * height * 4
    raster = buf[pos : pos + need]
    if len(raster) < need:
        raise FormatError(
            f"truncated PFM payload ({len(raster)} of {need} bytes)",
            offset=pos + len(raster),
        )
    dtype = "<f4" if scale < 0 else ">f4"
    rows = np.frombuffer(raster, dtype).reshape(height, width)
    values = rows[::-1].astype(np.float32)  # stored bottom-to-top
    nan_count = int(np.isnan(values).sum())
    if nan_count:
        warnings.warn(f"PFM contains {nan_count} NaN pixels; treated as invalid")
    valid = np.isfinite(values) & (values >= 0)
    clean = np.where(valid, values, np.float32(np.inf))
    return DisparityMap(clean, valid)


def write_pfm(disp, path):
    """Write a DisparityMap as little-endian Pf (scale -1.0, +inf invalid)."""
    values = np.where(disp.valid, disp.values, np.float32(np.inf)).astype("<f4")
    with open(path, "wb") as fh:
        fh.write(f"Pf\n{disp.width} {disp.height}\n-1.0\n".encode("ascii"))
        fh.write(values[::-1].tobytes())


# ---------------------------------------------------------------------------
# PLY point clouds


def _ply_header(count, colored, fmt):
    lines = [
        "ply",
        f"format {fmt} 1.0",
        f"element vertex {count}",
        "property float x",
        "property float y",
        "property float z",
    ]
    if colored:
        lines += ["property uchar red", "property uchar green", "property uchar blue"]
    lines.append("end_header")
    return "\n".join(lines) + "\n"


def write_ply(cloud, path, fmt="binary_little_endian"):
    """Write a PointCloud as PLY 1.0, ascii or binary_little_endian."""
    if fmt not in ("ascii", "binary_little_endian"):
        raise InvalidInputError(f"unsupported PLY format {fmt!r}")
    colored = cloud.colors is not None
    pts = cloud.points.astype("<f4")
    rgb = None
    if colored:
        rgb = np.rint(np.clip(cloud.colors, 0.0, 1.0) * 255.0).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(_ply_header(len(cloud), colored, fmt).encode("ascii"))
        if fmt == "ascii":
            out = io.StringIO()
            for i in range(len(cloud)):
                x, y, z = pts[i]
                if colored:
                    r, g, b = rgb[i]
                    out.write(f"{x:.9g} {y:.9g} {z:.9g} {r} {g} {b}\n")
                else:
                    out.write(f"{x:.9g} {y:.9g} {z:.9g}\n")
            fh.write(out.getvalue().encode("ascii"))
        else:
            if colored:
                rec = struct.Struct("<fffBBB")
                for i in range(len(cloud)):
                    x, y, z = pts[i]
                    r, g, b = rgb[i]
                    fh.write(rec.pack(x, y, z, r, g, b))
            else:
                fh.write(pts.tobytes())


# ---------------------------------------------------------------------------
# CSV error reports

CSV_HEADER = "z_min,z_max,count,median_abs_err_m,rms_err_m"


def _fmt6(x):
    """Deterministic 6-significant-digit decimal."""
    return f"{float(x):.6g}"


def write_csv_report(report, path):
    """Serialize a binned error report: one row per bin, LF endings."""
    lines = [CSV_HEADER]
    for b in report.bins:
        lines.append(
            f"{_fmt6(b.z_min)},{_fmt6(b.z_max)},{int(b.count)},"
            f"{_fmt6(b.median_abs_depth_err_m)},{_fmt6(b.rms_depth_err_m)}"
        )
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("utf-8"))


def read_csv_report(path):
    """Parse a report CSV back into a lightweight report object."""
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise FormatError(f"bad report header {lines[0] if lines else ''!r}", offset=0)
    bins = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 5:
            raise FormatError(f"bad report row {ln!r}")
        bins.append(
            SimpleNamespace(
                z_min=float(parts[0]),
                z_max=float(parts[1]),
                count=int(parts[2]),
                median_abs_depth_err_m=float(parts[3]),
                rms_depth_err_m=float(parts[4]),
            )
        )
    return SimpleNamespace(bins=bins, label="")
