"""Command-line entry point.

Subcommands: complement, geometry, render, saliency, sweep, serve.
Exit codes: 0 ok, 1 usage, 2 input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import geometry, textures
from .compose import compose
from .errors import AligntexError
from .image import load_png, save_png
from .saliency import SaliencyParams, heatmap_u8, metrics, saliency_map
from .scene import BlendMode, Pose2D, VisMode, resolve_scene
from .sweep import SweepAxis, SweepSpec, export_csv, plot_curves, run_sweep

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

DEFAULT_PORT = 8765
PORT_ENV_VAR = "ALIGNTEX_PORT"


class _Parser(argparse.ArgumentParser):
    """argparse's usage failures exit 2; this artifact reserves 2 for input errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _color(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.replace(",", " ").split()]
    if len(parts) != 3:
        raise ValueError(f"expected three channel values, got {text!r}")
    return tuple(parts)


def _pose_args(p: argparse.ArgumentParser):
    p.add_argument("--tx", type=float, default=0.0)
    p.add_argument("--ty", type=float, default=0.0)
    p.add_argument("--theta", type=float, default=0.0, help="rotation in radians")
    p.add_argument("--scale", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aligntex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complement", parents=[], help="photometric complement of a texture PNG")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--target", type=_color, default=(1.0, 1.0, 1.0),
                   help="inversion target color, e.g. '1 1 1'")
    p.add_argument("--vst", action="store_true",
                   help="predominant-color masking instead of inversion")
    p.add_argument("--tol", type=float, default=0.1, help="vst color distance tolerance")
    p.add_argument("--patch", help="patch PNG for region replacement")
    p.add_argument("--mask", help="mask PNG (alpha > 0.5 marks the region) for --patch")

    p = sub.add_parser("geometry", help="geometric complement raster of a polygon")
    p.add_argument("polygon", help="text file, one 'x y' vertex per line, counter-clockwise")
    p.add_argument("output")
    p.add_argument("--size", default=None, help="raster size WxH (default: bounding box)")
    p.add_argument("--stroke-width", type=float, default=1.0)
    p.add_argument("--stroke-color", type=_color, default=(1.0, 1.0, 1.0))
    p.add_argument("--grid", type=int, default=0, help="interior grid n for the triangulation")
    for flag in ("edges", "diagonals", "bisectors", "incircle", "circumcircle"):
        p.add_argument(f"--no-{flag}", action="store_true")
    p.add_argument("--delaunay", action="store_true")
    p.add_argument("--list", action="store_true", help="print the primitive listing to stdout")

    p = sub.add_parser("render", help="composite of a scene at a replica pose")
    p.add_argument("output")
    p.add_argument("--scene", default="checker", help="builtin id or manifest path")
    p.add_argument("--scenes-dir")
    p.add_argument("--mode", default=VisMode.COMPLEMENTARY_PHOTOMETRIC.value,
                   choices=[m.value for m in VisMode])
    p.add_argument("--blend", default=BlendMode.ADDITIVE_OST.value,
                   choices=[b.value for b in BlendMode])
    p.add_argument("--alpha", type=float, default=None)
    _pose_args(p)

    p = sub.add_parser("saliency", help="saliency heatmap and metrics of a PNG")
    p.add_argument("input")
    p.add_argument("--heatmap", help="write the normalized grayscale heatmap PNG here")
    p.add_argument("--work-max-dim", type=int, default=128)
    p.add_argument("--sigma", type=float, default=3.0)

    p = sub.add_parser("sweep", help="pose-error sweep with CSV (and optional plot) output")
    p.add_argument("--scene", default="checker")
    p.add_argument("--scenes-dir")
    p.add_argument("--axis", default=SweepAxis.TRANSLATION_X.value,
                   choices=[a.value for a in SweepAxis])
    p.add_argument("--offsets", default="0,2,4,6,8",
                   help="comma-separated offsets (px/radians/scale); must include the identity")
    p.add_argument("--modes", default=",".join(m.value for m in VisMode))
    p.add_argument("--blend", default=BlendMode.ADDITIVE_OST.value,
                   choices=[b.value for b in BlendMode])
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--work-max-dim", type=int, default=128)
    p.add_argument("--sigma", type=float, default=3.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", required=True)
    p.add_argument("--plot")

    p = sub.add_parser("serve", help="start the alignment HTTP service")
    p.add_argument("--port", type=int, default=None,
                   help=f"default {DEFAULT_PORT}, or ${PORT_ENV_VAR} when set")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--scenes-dir", help="directory of *.scene manifests to serve")
    p.add_argument("--log", help="JSON-lines trial log path")

    return parser


# ---------------------------------------------------------------------------
# Subcommand bodies
# ---------------------------------------------------------------------------

def _cmd_complement(args) -> int:
    tex = load_png(args.input)
    if args.patch or args.mask:
        if not (args.patch and args.mask):
            print("aligntex: --patch and --mask must be given together", file=sys.stderr)
            return EXIT_USAGE
        patch = load_png(args.patch)
        roi = load_png(args.mask)[..., 3] > 0.5
        out = textures.patch_complement(tex, roi, patch)
    elif args.vst:
        predominant = textures.predominant_color(tex)
        out = textures.vst_complement(tex, predominant, args.tol)
    else:
        out = textures.invert_complement(tex, args.target)
    save_png(out, args.output)
    return EXIT_OK


def _cmd_geometry(args) -> int:
    poly = geometry.load_polygon_txt(args.polygon)
    cfg = geometry.GeometryConfig(
        edges=not args.no_edges,
        diagonals=not args.no_diagonals,
        bisectors=not args.no_bisectors,
        incircle=not args.no_incircle,
        circumcircle=not args.no_circumcircle,
        delaunay=args.delaunay,
        delaunay_grid=args.grid,
        stroke_width=args.stroke_width,
        stroke_color=args.stroke_color,
    )
    prims = geometry.geometric_complement(poly, cfg)
    if args.size:
        w, h = (int(v) for v in args.size.lower().split("x"))
    else:
        hi = poly.max(axis=0)
        w, h = int(math.ceil(hi[0])) + 2, int(math.ceil(hi[1])) + 2
    save_png(geometry.rasterize(prims, w, h), args.output)
    if args.list:
        for s in prims.segments:
            print(f"segment {s.a[0]:.9g} {s.a[1]:.9g} {s.b[0]:.9g} {s.b[1]:.9g}")
        for c in prims.circles:
            print(f"circle {c.center[0]:.9g} {c.center[1]:.9g} {c.radius:.9g}")
    return EXIT_OK


def _cmd_render(args) -> int:
    scene = resolve_scene(args.scene, args.scenes_dir)
    pose = Pose2D(tx=args.tx, ty=args.ty, theta=args.theta, scale=args.scale)
    img = compose(scene, VisMode(args.mode), pose, BlendMode(args.blend), args.alpha)
    save_png(img, args.output)
    return EXIT_OK


def _cmd_saliency(args) -> int:
    img = load_png(args.input)
    m = saliency_map(img, SaliencyParams(args.work_max_dim, args.sigma))
    mm = metrics(m)
    if args.heatmap:
        gray = heatmap_u8(m)
        rgba = np.stack([gray, gray, gray, np.full_like(gray, 255)], axis=-1)
        save_png(rgba.astype(np.float64) / 255.0, args.heatmap)
    print(json.dumps({
        "width": m.shape[1],
        "height": m.shape[0],
        "integral": mm.integral,
        "max": mm.max,
        "min": float(m.min()),
        "mean": float(m.mean()),
    }))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    scene = resolve_scene(args.scene, args.scenes_dir)
    spec = SweepSpec(
        axis=SweepAxis(args.axis),
        offsets=tuple(float(v) for v in args.offsets.split(",")),
        modes=tuple(VisMode(m) for m in args.modes.split(",")),
        blend=BlendMode(args.blend),
        alpha=args.alpha,
        saliency=SaliencyParams(args.work_max_dim, args.sigma),
    )
    result = run_sweep(scene, spec, workers=args.workers)
    export_csv(result, args.csv)
    if args.plot:
        plot_curves(result, args.plot)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = args.port
    if port is None:
        port = int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
    app = create_app(scenes_dir=args.scenes_dir, log_path=args.log)
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return EXIT_OK


_COMMANDS = {
    "complement": _cmd_complement,
    "geometry": _cmd_geometry,
    "render": _cmd_render,
    "saliency": _cmd_saliency,
    "sweep": _cmd_sweep,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (AligntexError, OSError, ValueError) as exc:
        print(f"aligntex: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"aligntex: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
