"""Binary raster/dictionary formats, CSV profiles, and phase rendering.

Complex rasters ("CIMG") and dictionaries ("CDIC") use a fixed little-endian
layout so files are bit-exact across platforms:

    CIMG: magic b"CIMG" | u32 version | u64 rows | u64 cols
          | rows*cols (re, im) float64 pairs, row-major
    CDIC: magic b"CDIC" | u32 version | u64 num_filters | u64 filter_size
          | M*L*L (re, im) float64 pairs, row-major per filter

Writes go through a temporary file in the destination directory followed by
an atomic rename.
"""

import os
import struct
import tempfile
import warnings

import numpy as np

FORMAT_VERSION = 1
_CIMG_MAGIC = b"CIMG"
_CDIC_MAGIC = b"CDIC"
_HEADER = struct.Struct("<4sIQQ")


class FormatError(Exception):
    """File exists but is not a readable raster/dictionary."""


def _atomic_write(path, payload):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_header(data, magic, path):
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    tag, version, dim1, dim2 = _HEADER.unpack_from(data)
    if tag != magic:
        raise FormatError(f"{path}: bad magic {tag!r}, expected {magic!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    return dim1, dim2


def write_cimg(path, image):
    """Write a 2-D complex array as a CIMG raster."""
    image = np.ascontiguousarray(image, dtype="<c16")
    if image.ndim != 2:
        raise ValueError(f"raster must be 2-D, got shape {image.shape}")
    header = _HEADER.pack(_CIMG_MAGIC, FORMAT_VERSION, image.shape[0], image.shape[1])
    _atomic_write(path, header + image.tobytes())


def read_cimg(path):
    """Read a CIMG raster into a (rows, cols) complex128 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    rows, cols = _read_header(data, _CIMG_MAGIC, path)
    expected = 16 * rows * cols
    payload = data[_HEADER.size :]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    flat = np.frombuffer(payload, dtype="<c16")
    return flat.reshape(rows, cols).astype(np.complex128)


def write_cdic(path, bank):
    """Write an (M, L, L) filter bank as a CDIC dictionary."""
    bank = np.ascontiguousarray(bank, dtype="<c16")
    if bank.ndim != 3 or bank.shape[1] != bank.shape[2]:
        raise ValueError(f"dictionary must be (M, L, L), got shape {bank.shape}")
    header = _HEADER.pack(_CDIC_MAGIC, FORMAT_VERSION, bank.shape[0], bank.shape[1])
    _atomic_write(path, header + bank.tobytes())


def read_cdic(path):
    """Read a CDIC dictionary; warns when stored filters are not unit-norm."""
    with open(path, "rb") as fh:
        data = fh.read()
    m, ell = _read_header(data, _CDIC_MAGIC, path)
    expected = 16 * m * ell * ell
    payload = data[_HEADER.size :]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    bank = np.frombuffer(payload, dtype="<c16").reshape(m, ell, ell)
    bank = bank.astype(np.complex128)
    norms = np.sqrt(np.sum(np.abs(bank) ** 2, axis=(1, 2)))
    off = np.abs(norms - 1.0)
    if np.any(off > 1e-8):
        warnings.warn(
            f"{path}: {int(np.sum(off > 1e-8))} filter(s) deviate from unit norm "
            f"by up to {off.max():.3e}",
            RuntimeWarning,
            stacklevel=2,
        )
    return bank


def _hsv_to_rgb(h, s, v):
    # vectorized standard HSV -> RGB on arrays in [0, 1]
    i = np.floor(h * 6.0).astype(int) % 6
    f = h * 6.0 - np.floor(h * 6.0)
    p = v * (1.0 - s)
    q = v * (1.0 - f * s)
    t = v * (1.0 - (1.0 - f) * s)
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def render_phase_png(path, image):
    """Render phase as cyclic hue with log-amplitude value; a pure view.

    Hue wraps so -pi and +pi meet seamlessly; saturation is 1; value is the
    log-amplitude normalized to [0, 1] (constant-amplitude images render at
    full value).
    """
    from PIL import Image

    image = np.asarray(image, dtype=np.complex128)
    hue = (np.angle(image) + np.pi) / (2.0 * np.pi) % 1.0
    logamp = np.log1p(np.abs(image))
    span = logamp.max() - logamp.min()
    value = (logamp - logamp.min()) / span if span > 0 else np.ones_like(logamp)
    rgb = _hsv_to_rgb(hue, np.ones_like(hue), value)
    Image.fromarray((np.clip(rgb, 0, 1) * 255).round().astype(np.uint8)).save(
        path, format="PNG"
    )


def write_profile_csv(path, mean, std):
    """Write per-column (index, mean, std) rows; one row per profile entry."""
    mean = np.asarray(mean, dtype=np.float64)
    std = np.asarray(std, dtype=np.float64)
    if mean.shape != std.shape or mean.ndim != 1:
        raise ValueError("mean and std must be equal-length 1-D profiles")
    lines = [
        f"{i},{m:.12g},{s:.12g}" for i, (m, s) in enumerate(zip(mean, std))
    ]
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


def write_trace_txt(path, trace):
    """Plain-text per-iteration objective trace: 'iter objective' lines."""
    lines = [
        f"{it} {obj:.12g}" for it, obj in zip(trace.iterations, trace.objective)
    ]
    _atomic_write(path, ("\n".join(lines) + "\n").encode())
