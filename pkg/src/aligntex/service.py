"""Local HTTP/JSON service backing the interactive alignment playground.

Frames are rendered statelessly from query poses; sessions only carry the
hidden ground truth (always the identity pose), the scene/mode choice, and
the one-shot commit with its error scores. Trials append to a JSON-lines
log so a run can be replayed later.
"""

from __future__ import annotations

import io
import json
import math
import threading
import time
import uuid
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse, Response
from PIL import Image as _PILImage
from pydantic import BaseModel

from .compose import compose
from .saliency import SaliencyParams, heatmap_u8, metrics, saliency_map
from .scene import BlendMode, Pose2D, Scene, VisMode, builtin_scenes, load_scene_manifest

JITTER_TX = 24.0
JITTER_THETA = 0.5
JITTER_LOG_SCALE = 0.2


@dataclass
class Session:
    session_id: str
    scene_id: str
    mode: VisMode
    blend: BlendMode
    alpha: float
    truth: Pose2D
    start_time_ms: int
    seed: int | None = None
    committed: dict | None = None


@dataclass
class TrialRecord:
    session: str
    scene: str
    mode: str
    elapsed_ms: int
    translation_err: float  # px, Euclidean
    rotation_err: float  # degrees, absolute and wrapped
    scale_err: float  # |log ratio|


class SessionRequest(BaseModel):
    scene: str
    mode: str = VisMode.COMPLEMENTARY_PHOTOMETRIC.value
    blend: str = BlendMode.ADDITIVE_OST.value
    alpha: float | None = None
    jitter: bool = False
    seed: int | None = None


class CommitRequest(BaseModel):
    session: str
    pose: dict


def jitter_pose(seed: int) -> Pose2D:
    gen = np.random.default_rng(seed)
    return Pose2D(
        tx=float(gen.uniform(-JITTER_TX, JITTER_TX)),
        ty=float(gen.uniform(-JITTER_TX, JITTER_TX)),
        theta=float(gen.uniform(-JITTER_THETA, JITTER_THETA)),
        scale=float(math.exp(gen.uniform(-JITTER_LOG_SCALE, JITTER_LOG_SCALE))),
    )


def pose_errors(pose: Pose2D, truth: Pose2D) -> tuple[float, float, float]:
    terr = math.hypot(pose.tx - truth.tx, pose.ty - truth.ty)
    dtheta = math.remainder(pose.theta - truth.theta, 2.0 * math.pi)
    rerr = abs(math.degrees(dtheta))
    serr = abs(math.log(pose.scale / truth.scale))
    return terr, rerr, serr


def _png_bytes(img: np.ndarray) -> bytes:
    data = np.round(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    buf = io.BytesIO()
    _PILImage.fromarray(data, mode="RGBA").save(buf, format="PNG")
    return buf.getvalue()


def _gray_png_bytes(gray_u8: np.ndarray) -> bytes:
    buf = io.BytesIO()
    _PILImage.fromarray(gray_u8, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def create_app(
    scenes: dict[str, Scene] | None = None,
    scenes_dir: str | None = None,
    log_path: str | None = None,
    saliency_params: SaliencyParams = SaliencyParams(),
) -> FastAPI:
    """Build the service app; scenes default to the builtin fixtures."""
    catalog: dict[str, Scene] = dict(scenes) if scenes is not None else builtin_scenes()
    if scenes_dir:
        for manifest in sorted(Path(scenes_dir).glob("*.scene")):
            scene = load_scene_manifest(manifest)
            catalog[scene.scene_id] = scene

    app = FastAPI(title="aligntex alignment service")
    sessions: dict[str, Session] = {}
    trials: list[TrialRecord] = []
    lock = threading.Lock()
    log_file = Path(log_path) if log_path else None

    frontend_index = Path(__file__).resolve().parents[2] / "frontend" / "dist" / "index.html"

    @app.exception_handler(RequestValidationError)
    async def _validation_to_400(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def _error(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"detail": message})

    def _get_scene(scene_id: str) -> Scene | None:
        return catalog.get(scene_id)

    def _parse_pose(tx, ty, theta, scale) -> Pose2D:
        return Pose2D(tx=float(tx), ty=float(ty), theta=float(theta), scale=float(scale))

    @app.get("/")
    async def index():
        if frontend_index.is_file():
            return FileResponse(frontend_index, media_type="text/html")
        return JSONResponse({"service": "aligntex", "api": "/api/scenes"})

    @app.get("/api/scenes")
    async def list_scenes():
        return [
            {
                "id": s.scene_id,
                "name": s.name,
                "modes": sorted(m.value for m in s.assets),
                "frame": {"width": s.frame[0], "height": s.frame[1]},
            }
            for s in catalog.values()
        ]

    @app.post("/api/session")
    async def create_session(req: SessionRequest):
        scene = _get_scene(req.scene)
        if scene is None:
            return _error(404, f"unknown scene {req.scene!r}")
        try:
            mode = VisMode(req.mode)
            blend = BlendMode(req.blend)
        except ValueError as exc:
            return _error(400, str(exc))
        if mode not in scene.assets:
            return _error(404, f"scene {req.scene!r} has no asset for mode {req.mode!r}")
        alpha = scene.default_alpha[blend] if req.alpha is None else req.alpha
        if not (0.0 <= alpha <= 1.0):
            return _error(400, f"alpha must lie in [0, 1], got {alpha}")
        seed = None
        initial = Pose2D()
        if req.jitter:
            seed = req.seed if req.seed is not None else uuid.uuid4().int & 0x7FFFFFFF
            initial = jitter_pose(seed)
        session = Session(
            session_id=uuid.uuid4().hex,
            scene_id=scene.scene_id,
            mode=mode,
            blend=blend,
            alpha=alpha,
            truth=Pose2D(),
            start_time_ms=int(time.time() * 1000),
            seed=seed,
        )
        with lock:
            sessions[session.session_id] = session
        return {
            "session_id": session.session_id,
            "frame": {"width": scene.frame[0], "height": scene.frame[1]},
            "initial_pose": asdict(initial),
            "seed": seed,
        }

    @app.get("/api/frame")
    async def frame(session: str, tx: float = 0.0, ty: float = 0.0,
                    theta: float = 0.0, scale: float = 1.0):
        sess = sessions.get(session)
        if sess is None:
            return _error(404, f"unknown session {session!r}")
        try:
            pose = _parse_pose(tx, ty, theta, scale)
        except ValueError as exc:
            return _error(400, str(exc))
        scene = catalog[sess.scene_id]
        img = compose(scene, sess.mode, pose, sess.blend, sess.alpha)
        m = metrics(saliency_map(img, saliency_params))
        return Response(
            content=_png_bytes(img),
            media_type="image/png",
            headers={
                "X-Salience-Integral": repr(m.integral),
                "X-Salience-Max": repr(m.max),
            },
        )

    @app.get("/api/saliency")
    async def saliency_view(session: str, tx: float = 0.0, ty: float = 0.0,
                            theta: float = 0.0, scale: float = 1.0):
        sess = sessions.get(session)
        if sess is None:
            return _error(404, f"unknown session {session!r}")
        try:
            pose = _parse_pose(tx, ty, theta, scale)
        except ValueError as exc:
            return _error(400, str(exc))
        scene = catalog[sess.scene_id]
        img = compose(scene, sess.mode, pose, sess.blend, sess.alpha)
        gray = heatmap_u8(saliency_map(img, saliency_params))
        return Response(content=_gray_png_bytes(gray), media_type="image/png")

    @app.post("/api/commit")
    async def commit(req: CommitRequest):
        sess = sessions.get(req.session)
        if sess is None:
            return _error(404, f"unknown session {req.session!r}")
        try:
            pose = Pose2D(**{k: float(req.pose[k]) for k in ("tx", "ty", "theta", "scale")})
        except (KeyError, TypeError, ValueError) as exc:
            return _error(400, f"malformed pose: {exc}")
        with lock:
            if sess.committed is not None:
                return _error(409, "session already committed")
            terr, rerr, serr = pose_errors(pose, sess.truth)
            record = TrialRecord(
                session=sess.session_id,
                scene=sess.scene_id,
                mode=sess.mode.value,
                elapsed_ms=int(time.time() * 1000) - sess.start_time_ms,
                translation_err=terr,
                rotation_err=rerr,
                scale_err=serr,
            )
            sess.committed = asdict(record)
            trials.append(record)
            if log_file is not None:
                with open(log_file, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(asdict(record)) + "\n")
        return asdict(record)

    @app.get("/api/trials")
    async def list_trials():
        return [asdict(t) for t in trials]

    return app
