"""Composites of the static real object and the posed virtual replica.

The replica asset is placed with a similarity transform (rotation and scale
about the object center, then translation) and blended either additively
(optical see-through: light adds up, the base keeps its alpha) or with
source-over (video see-through: the replica occludes).
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError
from .image import bilinear_rgba, new_image, validate_image
from .scene import BlendMode, Pose2D, Scene, VisMode

__all__ = ["warp", "render_virtual", "blend", "compose"]


def warp(img: np.ndarray, pose: Pose2D, frame: tuple[int, int]) -> np.ndarray:
    """Place an asset into a frame under a replica pose.

    The asset's center maps to the frame center; the pose rotates and scales
    about that pivot and then translates by (tx, ty). Bilinear sampling,
    fully transparent outside the source. An identity pose whose asset/frame
    size difference is even lands texels exactly on pixels (bitwise copy).
    """
    src = validate_image(img)
    fw, fh = frame
    sh, sw = src.shape[:2]
    cx_f = (fw - 1) / 2.0
    cy_f = (fh - 1) / 2.0
    cx_a = (sw - 1) / 2.0
    cy_a = (sh - 1) / 2.0

    gx, gy = np.meshgrid(np.arange(fw, dtype=np.float64), np.arange(fh, dtype=np.float64))
    u = gx - cx_f - pose.tx
    v = gy - cy_f - pose.ty
    cos_t = np.cos(pose.theta)
    sin_t = np.sin(pose.theta)
    xs = (cos_t * u + sin_t * v) / pose.scale + cx_a
    ys = (-sin_t * u + cos_t * v) / pose.scale + cy_a
    return bilinear_rgba(src, xs, ys)


def render_virtual(scene: Scene, mode: VisMode, pose: Pose2D, alpha: float = 1.0) -> np.ndarray:
    """The posed replica overlay for a visualization mode, alpha-scaled."""
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    asset = scene.asset(mode)
    out = warp(asset, pose, scene.frame)
    out[..., 3] *= alpha
    return out


def blend(base: np.ndarray, overlay: np.ndarray, mode: BlendMode) -> np.ndarray:
    """Combine base and overlay under a see-through model.

    additive: out = clamp(base + a_o * overlay), alpha kept from the base
    (an optical combiner only ever adds light). over: plain source-over.
    """
    b = validate_image(base)
    o = validate_image(overlay)
    if b.shape != o.shape:
        raise DimensionMismatchError(f"blend shapes differ: {b.shape} vs {o.shape}")
    a_o = o[..., 3:4]
    out = np.empty_like(b)
    if BlendMode(mode) is BlendMode.ADDITIVE_OST:
        out[..., :3] = np.clip(b[..., :3] + a_o * o[..., :3], 0.0, 1.0)
        out[..., 3] = b[..., 3]
    else:
        out[..., :3] = a_o * o[..., :3] + (1.0 - a_o) * b[..., :3]
        out[..., 3] = o[..., 3] + (1.0 - o[..., 3]) * b[..., 3]
    return out


def _real_only(scene: Scene) -> np.ndarray:
    base = new_image(*scene.frame, color=(*scene.background, 1.0))
    placed = warp(scene.real_texture, Pose2D(), scene.frame)
    a = placed[..., 3:4]
    out = np.empty_like(base)
    out[..., :3] = a * placed[..., :3] + (1.0 - a) * base[..., :3]
    out[..., 3] = 1.0
    return out


def compose(
    scene: Scene,
    mode: VisMode,
    pose: Pose2D,
    blend_mode: BlendMode = BlendMode.ADDITIVE_OST,
    alpha: float | None = None,
) -> np.ndarray:
    """Full composite: background, static real object, posed replica overlay.

    alpha=None uses the scene's per-blend-mode default.
    """
    blend_mode = BlendMode(blend_mode)
    if alpha is None:
        alpha = scene.default_alpha[blend_mode]
    base = _real_only(scene)
    overlay = render_virtual(scene, mode, pose, alpha)
    return blend(base, overlay, blend_mode)
