"""Photometric texture complements.

Three flavours of complement for a source texture:

* additive inversion against a target color, for optical see-through
  displays where real and virtual light add up;
* predominant-color masking, for video see-through displays that occlude
  the real object (pixels near the predominant color become transparent,
  everything else is painted over with it);
* region patch replacement, swapping the texture inside a mask for a new
  patch while the rest turns transparent.

All operations are pure: same inputs give bitwise-identical outputs.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, EmptyImageError
from .image import validate_color, validate_image

__all__ = [
    "invert_complement",
    "predominant_color",
    "vst_complement",
    "patch_complement",
]

WHITE = (1.0, 1.0, 1.0)


def invert_complement(tex, target=WHITE) -> np.ndarray:
    """Per-pixel additive inversion: out = clamp(target - color, 0, 1).

    Alpha is copied unchanged. Colors that exceed the target on some channel
    clamp to zero instead of erroring; with the default white target the sum
    of a color and its complement is exactly white wherever no clamping
    occurred, which is what makes the additive overlay cancel at alignment.
    """
    arr = validate_image(tex)
    t = validate_color(target)
    out = arr.copy()
    out[..., :3] = np.clip(t - arr[..., :3], 0.0, 1.0)
    return out


def predominant_color(tex, bins_per_channel: int = 8) -> tuple[float, float, float]:
    """Most populated RGB histogram bin, returned as the bin's center.

    Counts are alpha-weighted and fully transparent pixels are excluded. Ties
    resolve to the bin with the smaller (r, g, b) lexicographic index.
    """
    arr = validate_image(tex)
    if bins_per_channel < 2:
        raise ValueError("bins_per_channel must be >= 2")
    alpha = arr[..., 3].ravel()
    if not np.any(alpha > 0.0):
        raise EmptyImageError("cannot pick a predominant color: image is fully transparent")
    b = int(bins_per_channel)
    idx = np.minimum((arr[..., :3] * b).astype(np.int64), b - 1)
    flat = (idx[..., 0] * b + idx[..., 1]) * b + idx[..., 2]
    counts = np.bincount(flat.ravel(), weights=alpha, minlength=b**3)
    winner = int(np.argmax(counts))  # argmax takes the first max: lexicographically smallest bin
    ri, rem = divmod(winner, b * b)
    gi, bi = divmod(rem, b)
    return ((ri + 0.5) / b, (gi + 0.5) / b, (bi + 0.5) / b)


def vst_complement(tex, predominant, tol: float = 0.1) -> np.ndarray:
    """Predominant-color occlusion mask for video see-through compositing.

    Pixels whose RGB distance to the predominant color exceeds tol are
    painted (predominant, alpha=1); pixels within tol become fully
    transparent so the real surface shows through. Output alpha is binary.
    """
    arr = validate_image(tex)
    p = validate_color(predominant)
    if tol < 0:
        raise ValueError("tol must be >= 0")
    d2 = np.sum((arr[..., :3] - p) ** 2, axis=-1)
    differs = d2 > tol * tol
    out = arr.copy()
    out[..., :3] = np.where(differs[..., None], p, arr[..., :3])
    out[..., 3] = np.where(differs, 1.0, 0.0)
    return out


def patch_complement(tex, roi, patch) -> np.ndarray:
    """Replace the texture inside a mask with a patch; outside turns transparent.

    Composited over the real object this visualizes the patch only where the
    mask says so, the real texture showing through everywhere else.
    """
    arr = validate_image(tex)
    pat = validate_image(patch)
    mask = np.asarray(roi, dtype=bool)
    if mask.shape != arr.shape[:2] or pat.shape != arr.shape:
        raise DimensionMismatchError(
            f"roi {mask.shape} and patch {pat.shape[:2]} must match texture {arr.shape[:2]}"
        )
    out = arr.copy()
    out[..., 3] = 0.0
    out[mask] = pat[mask]
    return out
