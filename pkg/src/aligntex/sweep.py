"""Pose-error sweeps: salience metrics as a function of misalignment.

One axis (translation x/y, rotation, or scale) is varied at a time; every
(mode, offset) cell composes the scene, computes the saliency map, and
records its integral and maximum. Cells are pure, so they may be evaluated
concurrently; rows are always emitted in spec order.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .compose import compose
from .saliency import SaliencyParams, metrics, saliency_map
from .scene import BlendMode, Pose2D, Scene, VisMode

__all__ = ["SweepAxis", "SweepSpec", "SweepRow", "SweepResult", "pose_from_offset",
           "run_sweep", "export_csv", "import_csv", "plot_curves"]


class SweepAxis(str, Enum):
    TRANSLATION_X = "translation_x"
    TRANSLATION_Y = "translation_y"
    ROTATION = "rotation"
    SCALE = "scale"


def _identity_offset(axis: SweepAxis) -> float:
    return 1.0 if axis is SweepAxis.SCALE else 0.0


@dataclass(frozen=True)
class SweepSpec:
    axis: SweepAxis
    offsets: tuple[float, ...]  # px, px, radians, or unitless depending on axis
    modes: tuple[VisMode, ...]
    blend: BlendMode = BlendMode.ADDITIVE_OST
    alpha: float = 1.0
    saliency: SaliencyParams = SaliencyParams()

    def __post_init__(self):
        object.__setattr__(self, "axis", SweepAxis(self.axis))
        object.__setattr__(self, "offsets", tuple(float(o) for o in self.offsets))
        object.__setattr__(self, "modes", tuple(VisMode(m) for m in self.modes))
        object.__setattr__(self, "blend", BlendMode(self.blend))
        if not self.offsets:
            raise ValueError("offsets must be non-empty")
        if any(b <= a for a, b in zip(self.offsets, self.offsets[1:])):
            raise ValueError("offsets must be strictly increasing")
        ident = _identity_offset(self.axis)
        if ident not in self.offsets:
            raise ValueError(f"offsets must contain the identity value {ident}")
        if not self.modes:
            raise ValueError("modes must be non-empty")


@dataclass(frozen=True)
class SweepRow:
    mode: VisMode
    axis: SweepAxis
    offset: float
    integral: float
    max: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    scene_id: str
    params_hash: str
    axis: SweepAxis
    blend: BlendMode
    alpha: float

    def row(self, mode: VisMode, offset: float) -> SweepRow:
        for r in self.rows:
            if r.mode is VisMode(mode) and r.offset == offset:
                return r
        raise KeyError(f"no row for ({mode}, {offset})")


def pose_from_offset(axis: SweepAxis, offset: float) -> Pose2D:
    axis = SweepAxis(axis)
    if axis is SweepAxis.TRANSLATION_X:
        return Pose2D(tx=offset)
    if axis is SweepAxis.TRANSLATION_Y:
        return Pose2D(ty=offset)
    if axis is SweepAxis.ROTATION:
        return Pose2D(theta=offset)
    return Pose2D(scale=offset)


def _spec_hash(scene: Scene, spec: SweepSpec) -> str:
    payload = repr((
        scene.scene_id,
        spec.axis.value,
        spec.offsets,
        tuple(m.value for m in spec.modes),
        spec.blend.value,
        spec.alpha,
        spec.saliency.work_max_dim,
        spec.saliency.sigma,
    )).encode()
    return hashlib.sha256(payload).hexdigest()[:12]


def run_sweep(scene: Scene, spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate every (mode, offset) cell; deterministic, rows in spec order."""
    for mode in spec.modes:
        scene.asset(mode)  # fail fast with MissingAssetError

    cells = [(mode, offset) for mode in spec.modes for offset in spec.offsets]

    def evaluate(cell):
        mode, offset = cell
        frame = compose(scene, mode, pose_from_offset(spec.axis, offset), spec.blend, spec.alpha)
        m = metrics(saliency_map(frame, spec.saliency))
        return SweepRow(mode=mode, axis=spec.axis, offset=offset, integral=m.integral, max=m.max)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, cells))
    else:
        rows = [evaluate(cell) for cell in cells]

    return SweepResult(
        rows=rows,
        scene_id=scene.scene_id,
        params_hash=_spec_hash(scene, spec),
        axis=spec.axis,
        blend=spec.blend,
        alpha=spec.alpha,
    )


# ---------------------------------------------------------------------------
# CSV round trip
# ---------------------------------------------------------------------------

CSV_HEADER = "mode,axis,offset,integral,max"


def export_csv(result: SweepResult, path) -> None:
    """Write rows (9 significant digits) with the run manifest as # comments."""
    lines = [
        f"# scene={result.scene_id}",
        f"# params_hash={result.params_hash}",
        f"# axis={result.axis.value}",
        f"# blend={result.blend.value}",
        f"# alpha={result.alpha:.9g}",
        CSV_HEADER,
    ]
    for r in result.rows:
        lines.append(
            f"{r.mode.value},{r.axis.value},{r.offset:.9g},{r.integral:.9g},{r.max:.9g}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def import_csv(path) -> SweepResult:
    meta: dict[str, str] = {}
    rows: list[SweepRow] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
                continue
            if line == CSV_HEADER:
                continue
            mode, axis, offset, integral, mx = line.split(",")
            rows.append(
                SweepRow(
                    mode=VisMode(mode),
                    axis=SweepAxis(axis),
                    offset=float(offset),
                    integral=float(integral),
                    max=float(mx),
                )
            )
    axis = SweepAxis(meta.get("axis", rows[0].axis.value if rows else "translation_x"))
    return SweepResult(
        rows=rows,
        scene_id=meta.get("scene", ""),
        params_hash=meta.get("params_hash", ""),
        axis=axis,
        blend=BlendMode(meta.get("blend", "additive")),
        alpha=float(meta.get("alpha", "1")),
    )


# ---------------------------------------------------------------------------
# Curve plots: one panel per metric, one polyline per mode
# ---------------------------------------------------------------------------

_AXIS_LABEL = {
    SweepAxis.TRANSLATION_X: "translation x [px]",
    SweepAxis.TRANSLATION_Y: "translation y [px]",
    SweepAxis.ROTATION: "rotation [rad]",
    SweepAxis.SCALE: "scale",
}


def build_figure(result: SweepResult):
    modes = []
    for r in result.rows:
        if r.mode not in modes:
            modes.append(r.mode)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, attr, title in zip(axes, ("integral", "max"), ("salience integral", "salience max")):
        for mode in modes:
            pts = [(r.offset, getattr(r, attr)) for r in result.rows if r.mode is mode]
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=mode.value)
        ax.set_xlabel(_AXIS_LABEL[result.axis])
        ax.set_ylabel(title)
        ax.legend(fontsize=7)
    fig.suptitle(f"scene={result.scene_id} blend={result.blend.value} alpha={result.alpha:g}")
    fig.tight_layout()
    return fig


def plot_curves(result: SweepResult, path) -> None:
    """Deterministic PNG of the metric curves."""
    if not result.rows:
        raise ValueError("cannot plot an empty sweep result")
    fig = build_figure(result)
    try:
        fig.savefig(path, format="png", dpi=100)
    finally:
        plt.close(fig)
