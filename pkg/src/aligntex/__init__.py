"""Complementary-texture alignment engine.

Generates photometric and geometric complementary textures for a virtual
replica of a real object, composites the pair under simulated misalignment,
and quantifies the visual salience of the mismatch with a quaternion
phase-spectrum pipeline. A CLI and a small HTTP service expose the pieces;
see README.md.
"""

from .compose import blend, compose, render_virtual, warp
from .errors import (
    AligntexError,
    DecodeError,
    DegenerateInputError,
    DimensionMismatchError,
    EmptyImageError,
    MissingAssetError,
    NonConvexPolygonError,
)
from .geometry import (
    Circle,
    GeometryConfig,
    PrimitiveSet,
    Segment,
    Triangulation,
    angle_bisectors,
    delaunay,
    geometric_complement,
    incircle,
    min_enclosing_circle,
    polygon_diagonals,
    rasterize,
)
from .image import load_png, new_image, save_png
from .saliency import (
    SaliencyMetrics,
    SaliencyParams,
    eigen_axis,
    iqdft,
    metrics,
    phase_only,
    qdft,
    saliency_map,
    to_quaternion_image,
)
from .scene import (
    IDENTITY_POSE,
    BlendMode,
    Pose2D,
    Scene,
    VisMode,
    build_scene,
    builtin_scenes,
    checker_scene,
    fresnel_field,
    load_scene_manifest,
    triangles_scene,
)
from .sweep import SweepAxis, SweepResult, SweepSpec, export_csv, import_csv, plot_curves, run_sweep
from .textures import invert_complement, patch_complement, predominant_color, vst_complement

__version__ = "0.1.0"
