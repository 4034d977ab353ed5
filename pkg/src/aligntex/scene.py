"""Alignment scenes: the static real object, its replica assets, and poses.

A scene is a planar stand-in for the paper-scale alignment setup: a frame
with a background color, a textured rectangle ("the real object") centered
in it, and one pre-built overlay asset per visualization mode. Depth
misalignment is modeled as uniform scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import geometry, textures
from .errors import MissingAssetError
from .geometry import GeometryConfig, PrimitiveSet, Segment, geometric_complement, rasterize
from .image import bilinear_rgba, load_png, validate_color, validate_image

__all__ = [
    "VisMode",
    "BlendMode",
    "Pose2D",
    "IDENTITY_POSE",
    "Scene",
    "build_scene",
    "checker_texture",
    "triangles_texture",
    "checker_scene",
    "triangles_scene",
    "builtin_scenes",
    "load_scene_manifest",
    "resolve_scene",
    "fresnel_field",
]

SCALE_MIN = 0.1
SCALE_MAX = 10.0


class VisMode(str, Enum):
    COMPLEMENTARY_PHOTOMETRIC = "complementary_photometric"
    COMPLEMENTARY_GEOMETRIC = "complementary_geometric"
    SILHOUETTE = "silhouette"
    WIREFRAME = "wireframe"
    FRESNEL = "fresnel"


class BlendMode(str, Enum):
    ADDITIVE_OST = "additive"
    OVER_VST = "over"


def _normalize_theta(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    t = math.remainder(theta, 2.0 * math.pi)
    if t <= -math.pi:
        t += 2.0 * math.pi
    return t


@dataclass(frozen=True)
class Pose2D:
    """Similarity misalignment of the replica: translation (px), rotation (rad), scale."""

    tx: float = 0.0
    ty: float = 0.0
    theta: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        for name in ("tx", "ty", "theta", "scale"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"pose component {name} must be finite")
        if not (SCALE_MIN <= self.scale <= SCALE_MAX):
            raise ValueError(f"scale must lie in [{SCALE_MIN}, {SCALE_MAX}], got {self.scale}")
        object.__setattr__(self, "theta", _normalize_theta(self.theta))


IDENTITY_POSE = Pose2D()


@dataclass
class Scene:
    scene_id: str
    name: str
    frame: tuple[int, int]  # (width, height)
    background: tuple[float, float, float]
    real_texture: np.ndarray  # (obj_h, obj_w, 4), the object at its placed resolution
    silhouette: np.ndarray  # object outline polygon in frame coordinates
    assets: dict[VisMode, np.ndarray]
    default_alpha: dict[BlendMode, float] = field(
        default_factory=lambda: {BlendMode.ADDITIVE_OST: 1.0, BlendMode.OVER_VST: 0.6}
    )
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def object_size(self) -> tuple[int, int]:
        h, w = self.real_texture.shape[:2]
        return (w, h)

    def asset(self, mode: VisMode) -> np.ndarray:
        try:
            return self.assets[VisMode(mode)]
        except KeyError:
            raise MissingAssetError(f"scene {self.scene_id!r} has no asset for mode {mode}") from None


# ---------------------------------------------------------------------------
# Fresnel rim field
# ---------------------------------------------------------------------------

def fresnel_field(silhouette, frame: tuple[int, int], band_w: float = 8.0, power: float = 2.0,
                  tint=(1.0, 1.0, 1.0)) -> np.ndarray:
    """Interior rim-band falloff approximating a fresnel look on a flat object.

    Interior pixels within band_w of the boundary get intensity
    (1 - d/band_w)**power; color is tint * intensity and alpha equals the
    intensity. Everything else is transparent.
    """
    if band_w < 1:
        raise ValueError("band_w must be >= 1")
    if power <= 0:
        raise ValueError("power must be > 0")
    tint = validate_color(tint)
    w, h = frame
    poly = geometry.as_polygon(silhouette)
    gx, gy = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    d = geometry.distance_to_boundary(poly, gx, gy)
    inside = geometry.polygon_contains(poly, gx, gy)
    intensity = np.where(inside & (d <= band_w), (1.0 - np.minimum(d, band_w) / band_w) ** power, 0.0)
    img = np.zeros((h, w, 4), dtype=np.float64)
    img[..., :3] = tint * intensity[..., None]
    img[..., 3] = intensity
    return img


# ---------------------------------------------------------------------------
# Built-in textures
# ---------------------------------------------------------------------------

def checker_texture(cells: int = 8, cell_px: int = 8) -> np.ndarray:
    """Black/white checkerboard, (cells*cell_px)^2, top-left cell black."""
    n = cells * cell_px
    iy, ix = np.mgrid[0:n, 0:n]
    v = ((ix // cell_px + iy // cell_px) % 2).astype(np.float64)
    img = np.empty((n, n, 4), dtype=np.float64)
    img[..., 0] = v
    img[..., 1] = v
    img[..., 2] = v
    img[..., 3] = 1.0
    return img


def triangles_texture(size: int = 64) -> np.ndarray:
    """Black triangles of assorted sizes on white, echoing the demo cube faces."""
    img = np.ones((size, size, 4), dtype=np.float64)
    gx, gy = np.meshgrid(np.arange(size, dtype=np.float64), np.arange(size, dtype=np.float64))

    def fill_triangle(a, b, c):
        def half_plane(p, q):
            return (q[0] - p[0]) * (gy - p[1]) - (q[1] - p[1]) * (gx - p[0])

        s1, s2, s3 = half_plane(a, b), half_plane(b, c), half_plane(c, a)
        mask = ((s1 >= 0) & (s2 >= 0) & (s3 >= 0)) | ((s1 <= 0) & (s2 <= 0) & (s3 <= 0))
        img[mask, 0:3] = 0.0

    # three bands of triangles, size shrinking downwards, alternating orientation
    specs = [(0, 22, 20), (24, 40, 12), (42, 56, 7)]
    for y0, y1, base in specs:
        x = 2
        up = True
        while x + base < size:
            if up:
                fill_triangle((x, y1), (x + base, y1), (x + base / 2.0, y0))
            else:
                fill_triangle((x, y0), (x + base, y0), (x + base / 2.0, y1))
            up = not up
            x += base + 3
    return img


# ---------------------------------------------------------------------------
# Scene construction
# ---------------------------------------------------------------------------

def _rect_outline(w: int, h: int) -> np.ndarray:
    # positive shoelace order in image coordinates
    return np.array([(0.0, 0.0), (w - 1.0, 0.0), (w - 1.0, h - 1.0), (0.0, h - 1.0)])


def build_scene(
    scene_id: str,
    texture: np.ndarray,
    frame: tuple[int, int] = (128, 128),
    background=(0.5, 0.5, 0.5),
    name: str | None = None,
    invert_target=(1.0, 1.0, 1.0),
    photometric: str = "invert",  # "invert" or "vst"
    vst_tol: float = 0.1,
    silhouette_width: float = 2.0,
    silhouette_color=(1.0, 1.0, 1.0),
    geometry_config: GeometryConfig | None = None,
    wireframe_grid: int = 8,
    wireframe_color=(1.0, 1.0, 1.0),
    fresnel_band: float = 8.0,
    fresnel_power: float = 2.0,
    fresnel_tint=(1.0, 1.0, 1.0),
    alpha_additive: float = 1.0,
    alpha_over: float = 0.6,
    metadata: dict[str, str] | None = None,
) -> Scene:
    """Build a scene and precompute every per-mode overlay asset.

    Assets live at the object's own resolution; the compositor places them
    with the replica pose. The object is centered in the frame and must fit.
    """
    tex = validate_image(texture)
    obj_h, obj_w = tex.shape[:2]
    fw, fh = frame
    if obj_w > fw or obj_h > fh:
        raise ValueError(f"object {obj_w}x{obj_h} does not fit frame {fw}x{fh}")
    background = tuple(validate_color(background))

    local_poly = _rect_outline(obj_w, obj_h)
    cx = (fw - obj_w) / 2.0
    cy = (fh - obj_h) / 2.0
    frame_poly = local_poly + np.array([cx, cy])

    if photometric == "invert":
        photo = textures.invert_complement(tex, invert_target)
    elif photometric == "vst":
        pred = textures.predominant_color(tex)
        photo = textures.vst_complement(tex, pred, vst_tol)
    else:
        raise ValueError(f"unknown photometric complement kind {photometric!r}")

    geo_cfg = geometry_config or GeometryConfig(
        stroke_width=1.0, stroke_color=tuple(validate_color(silhouette_color))
    )
    geo_asset = rasterize(geometric_complement(local_poly, geo_cfg), obj_w, obj_h)

    sil_prims = PrimitiveSet(
        segments=[
            Segment(tuple(local_poly[i]), tuple(local_poly[(i + 1) % 4])) for i in range(4)
        ],
        stroke_width=silhouette_width,
        stroke_color=tuple(validate_color(silhouette_color)),
    )
    sil_asset = rasterize(sil_prims, obj_w, obj_h)

    wf_points = np.vstack([local_poly, geometry.interior_grid(local_poly, wireframe_grid)])
    wf_tri = geometry.delaunay(wf_points)
    wf_prims = PrimitiveSet(
        segments=[
            Segment(tuple(wf_tri.points[i]), tuple(wf_tri.points[j])) for i, j in wf_tri.edges()
        ],
        stroke_width=1.0,
        stroke_color=tuple(validate_color(wireframe_color)),
    )
    wf_asset = rasterize(wf_prims, obj_w, obj_h)

    fresnel_asset = fresnel_field(local_poly, (obj_w, obj_h), fresnel_band, fresnel_power, fresnel_tint)

    return Scene(
        scene_id=scene_id,
        name=name or scene_id,
        frame=(fw, fh),
        background=background,
        real_texture=tex,
        silhouette=frame_poly,
        assets={
            VisMode.COMPLEMENTARY_PHOTOMETRIC: photo,
            VisMode.COMPLEMENTARY_GEOMETRIC: geo_asset,
            VisMode.SILHOUETTE: sil_asset,
            VisMode.WIREFRAME: wf_asset,
            VisMode.FRESNEL: fresnel_asset,
        },
        default_alpha={BlendMode.ADDITIVE_OST: alpha_additive, BlendMode.OVER_VST: alpha_over},
        metadata=dict(metadata or {}),
    )


def checker_scene() -> Scene:
    return build_scene(
        "checker",
        checker_texture(),
        frame=(128, 128),
        name="8x8 black/white checker, 64px object in a 128px frame",
    )


def triangles_scene() -> Scene:
    return build_scene(
        "triangles",
        triangles_texture(),
        frame=(128, 128),
        name="black/white triangles of varying size (demo-cube face)",
        metadata={"physical_edge_cm": "9.1"},
    )


def builtin_scenes() -> dict[str, Scene]:
    return {"checker": checker_scene(), "triangles": triangles_scene()}


# ---------------------------------------------------------------------------
# Scene manifest files: "key = value" lines
# ---------------------------------------------------------------------------

def _parse_floats(text: str, n: int) -> tuple:
    parts = text.split()
    if len(parts) != n:
        raise ValueError(f"expected {n} numbers, got {text!r}")
    return tuple(float(p) for p in parts)


def load_scene_manifest(path) -> Scene:
    """Load a scene from a key=value manifest; texture path is manifest-relative."""
    path = Path(path)
    kv: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad manifest line (need key = value): {line!r}")
            key, value = line.split("=", 1)
            kv[key.strip()] = value.strip()

    for required in ("id", "texture", "frame"):
        if required not in kv:
            raise ValueError(f"scene manifest missing required key {required!r}")

    tex = load_png(path.parent / kv["texture"])
    fw, fh = (int(x) for x in _parse_floats(kv["frame"], 2))
    kwargs = {}
    if "object" in kv:
        ow, oh = (int(x) for x in _parse_floats(kv["object"], 2))
        th, tw = tex.shape[:2]
        if (tw, th) != (ow, oh):
            # resample the texture onto the placed object resolution
            xs = (np.arange(ow, dtype=np.float64) + 0.5) * (tw / ow) - 0.5
            ys = (np.arange(oh, dtype=np.float64) + 0.5) * (th / oh) - 0.5
            gx, gy = np.meshgrid(xs, ys)
            tex = bilinear_rgba(tex, gx, gy, clamp_edges=True)
    if "background" in kv:
        kwargs["background"] = _parse_floats(kv["background"], 3)
    if "name" in kv:
        kwargs["name"] = kv["name"]
    if "invert_target" in kv:
        kwargs["invert_target"] = _parse_floats(kv["invert_target"], 3)
    if "photometric" in kv:
        kwargs["photometric"] = kv["photometric"]
    if "vst_tol" in kv:
        kwargs["vst_tol"] = float(kv["vst_tol"])
    if "silhouette_width" in kv:
        kwargs["silhouette_width"] = float(kv["silhouette_width"])
    if "silhouette_color" in kv:
        kwargs["silhouette_color"] = _parse_floats(kv["silhouette_color"], 3)
    if "wireframe_grid" in kv:
        kwargs["wireframe_grid"] = int(kv["wireframe_grid"])
    if "wireframe_color" in kv:
        kwargs["wireframe_color"] = _parse_floats(kv["wireframe_color"], 3)
    if "fresnel_band" in kv:
        kwargs["fresnel_band"] = float(kv["fresnel_band"])
    if "fresnel_power" in kv:
        kwargs["fresnel_power"] = float(kv["fresnel_power"])
    if "fresnel_tint" in kv:
        kwargs["fresnel_tint"] = _parse_floats(kv["fresnel_tint"], 3)
    if "alpha_additive" in kv:
        kwargs["alpha_additive"] = float(kv["alpha_additive"])
    if "alpha_over" in kv:
        kwargs["alpha_over"] = float(kv["alpha_over"])
    meta = {k[5:]: v for k, v in kv.items() if k.startswith("meta_")}
    if meta:
        kwargs["metadata"] = meta
    return build_scene(kv["id"], tex, frame=(fw, fh), **kwargs)


def resolve_scene(name_or_path: str, scenes_dir=None) -> Scene:
    """Find a scene by builtin id, manifest path, or id within a scenes dir."""
    builtins = builtin_scenes()
    if name_or_path in builtins:
        return builtins[name_or_path]
    p = Path(name_or_path)
    if p.is_file():
        return load_scene_manifest(p)
    if scenes_dir is not None:
        candidate = Path(scenes_dir) / f"{name_or_path}.scene"
        if candidate.is_file():
            return load_scene_manifest(candidate)
    raise FileNotFoundError(f"unknown scene {name_or_path!r}")
