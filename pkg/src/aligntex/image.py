"""RGBA image carrier: validation, PNG i/o, bilinear sampling.

An image is a float64 array of shape (height, width, 4) holding straight
(non-premultiplied) RGBA with every channel in [0, 1]. Pixel centers sit on
the integer grid: pixel (row y, column x) samples the continuous point (x, y).

Color math happens in linear [0, 1] RGB; PNG files are treated as already
linear (no gamma handling).
"""

from __future__ import annotations

import numpy as np
from PIL import Image as _PILImage
from PIL import UnidentifiedImageError

from .errors import DecodeError

__all__ = [
    "new_image",
    "validate_image",
    "validate_color",
    "load_png",
    "save_png",
    "bilinear_rgba",
    "resize_max_dim",
]


def new_image(width: int, height: int, color=(0.0, 0.0, 0.0, 0.0)) -> np.ndarray:
    """Create a (height, width, 4) image filled with a constant RGBA color."""
    if width < 1 or height < 1:
        raise ValueError(f"image dimensions must be >= 1, got {width}x{height}")
    img = np.empty((height, width, 4), dtype=np.float64)
    img[:] = np.asarray(color, dtype=np.float64)
    return img


def validate_image(img) -> np.ndarray:
    """Coerce to float64 and check the RGBA carrier invariants."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 4:
        raise ValueError(f"expected (H, W, 4) RGBA array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image must be at least 1x1")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("image channels must lie in [0, 1]")
    return arr


def validate_color(color, channels: int = 3) -> np.ndarray:
    """Check an RGB(A) tuple: correct arity, every channel in [0, 1]."""
    c = np.asarray(color, dtype=np.float64)
    if c.shape != (channels,):
        raise ValueError(f"expected {channels}-channel color, got {color!r}")
    if not np.all(np.isfinite(c)) or c.min() < 0.0 or c.max() > 1.0:
        raise ValueError(f"color channels must lie in [0, 1], got {color!r}")
    return c


def load_png(path) -> np.ndarray:
    """Load an 8-bit PNG as a straight-alpha RGBA image in [0, 1].

    Raises OSError for i/o failures and DecodeError for undecodable files.
    """
    try:
        with _PILImage.open(path) as im:
            rgba = im.convert("RGBA")
            arr = np.asarray(rgba, dtype=np.float64) / 255.0
    except UnidentifiedImageError as exc:
        raise DecodeError(f"not a decodable image: {path}") from exc
    return arr


def save_png(img, path) -> None:
    """Save as 8-bit RGBA PNG; channel quantization error is at most 1/510."""
    arr = validate_image(img)
    data = np.round(arr * 255.0).astype(np.uint8)
    _PILImage.fromarray(data, mode="RGBA").save(path, format="PNG")


def bilinear_rgba(img: np.ndarray, xs: np.ndarray, ys: np.ndarray, clamp_edges: bool = False) -> np.ndarray:
    """Sample a straight-alpha RGBA image at float coordinates.

    Interpolation runs on premultiplied channels so transparent texels do not
    bleed color into their neighbours; the result is converted back to
    straight alpha. Samples that land exactly on a texel center return that
    texel bitwise. With clamp_edges=False, samples outside the source extent
    are fully transparent; with clamp_edges=True they clamp to the border.
    """
    h, w = img.shape[:2]
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if clamp_edges:
        inside = np.ones(xs.shape, dtype=bool)
    else:
        # tolerate sub-nanopixel excursions (e.g. sin(pi) != 0 under rotation)
        eps = 1e-9
        inside = (xs >= -eps) & (ys >= -eps) & (xs <= w - 1 + eps) & (ys <= h - 1 + eps)
    xs = np.clip(xs, 0.0, float(w - 1))
    ys = np.clip(ys, 0.0, float(h - 1))

    x0 = np.floor(xs)
    y0 = np.floor(ys)
    fx = xs - x0
    fy = ys - y0
    x0i = np.clip(x0.astype(np.int64), 0, w - 1)
    y0i = np.clip(y0.astype(np.int64), 0, h - 1)
    x1i = np.clip(x0i + 1, 0, w - 1)
    y1i = np.clip(y0i + 1, 0, h - 1)

    pm = img.copy()
    pm[..., :3] *= pm[..., 3:4]

    c00 = pm[y0i, x0i]
    c10 = pm[y0i, x1i]
    c01 = pm[y1i, x0i]
    c11 = pm[y1i, x1i]
    wx = fx[..., None]
    wy = fy[..., None]
    blended = (
        c00 * (1.0 - wx) * (1.0 - wy)
        + c10 * wx * (1.0 - wy)
        + c01 * (1.0 - wx) * wy
        + c11 * wx * wy
    )
    alpha = blended[..., 3:4]
    with np.errstate(invalid="ignore", divide="ignore"):
        rgb = np.where(alpha > 0.0, blended[..., :3] / np.where(alpha > 0.0, alpha, 1.0), 0.0)
    out = np.concatenate([rgb, alpha], axis=-1)

    exact = (fx == 0.0) & (fy == 0.0) & inside
    if np.any(exact):
        direct = img[y0i, x0i]
        out = np.where(exact[..., None], direct, out)
    out = np.where(inside[..., None], out, 0.0)
    return np.clip(out, 0.0, 1.0)


def resize_max_dim(img: np.ndarray, max_dim: int) -> np.ndarray:
    """Bilinear-resize so the larger image dimension equals max_dim.

    Aspect ratio is preserved (rounded); a no-op resize returns the input
    bitwise. Uses the pixel-area mapping x_src = (x_dst + 0.5) * W / W' - 0.5
    with border clamping.
    """
    if max_dim < 1:
        raise ValueError("max_dim must be >= 1")
    h, w = img.shape[:2]
    scale = max_dim / max(w, h)
    new_w = max(1, int(round(w * scale)))
    new_h = max(1, int(round(h * scale)))
    if w >= h:
        new_w = max_dim
    else:
        new_h = max_dim
    if (new_w, new_h) == (w, h):
        return img
    xs = (np.arange(new_w, dtype=np.float64) + 0.5) * (w / new_w) - 0.5
    ys = (np.arange(new_h, dtype=np.float64) + 0.5) * (h / new_h) - 0.5
    gx, gy = np.meshgrid(xs, ys)
    return bilinear_rgba(img, gx, gy, clamp_edges=True)
