import json
import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from aligntex.saliency import SaliencyParams
from aligntex.scene import BlendMode, VisMode, checker_scene
from aligntex.service import create_app, jitter_pose, pose_errors
from aligntex.sweep import SweepAxis, SweepSpec, run_sweep

FAST = SaliencyParams(work_max_dim=64, sigma=2.0)


@pytest.fixture
def client(tmp_path):
    app = create_app(log_path=str(tmp_path / "trials.jsonl"))
    with TestClient(app) as c:
        c.log_path = tmp_path / "trials.jsonl"
        yield c


def new_session(client, **kw):
    payload = {"scene": "checker", "mode": "complementary_photometric",
               "blend": "additive", "alpha": 1.0}
    payload.update(kw)
    r = client.post("/api/session", json=payload)
    assert r.status_code == 200, r.text
    return r.json()


class TestScenes:
    def test_list_scenes(self, client):
        r = client.get("/api/scenes")
        assert r.status_code == 200
        ids = {s["id"] for s in r.json()}
        assert {"checker", "triangles"} <= ids
        checker = next(s for s in r.json() if s["id"] == "checker")
        assert checker["frame"] == {"width": 128, "height": 128}
        assert "silhouette" in checker["modes"]


class TestSession:
    def test_create_returns_identity_without_jitter(self, client):
        s = new_session(client)
        assert s["initial_pose"] == {"tx": 0.0, "ty": 0.0, "theta": 0.0, "scale": 1.0}
        assert s["seed"] is None

    def test_jitter_is_seed_reproducible(self, client):
        s1 = new_session(client, jitter=True, seed=1234)
        s2 = new_session(client, jitter=True, seed=1234)
        assert s1["seed"] == s2["seed"] == 1234
        assert s1["initial_pose"] == s2["initial_pose"]
        assert s1["initial_pose"] != {"tx": 0.0, "ty": 0.0, "theta": 0.0, "scale": 1.0}
        p = jitter_pose(1234)
        assert s1["initial_pose"]["tx"] == p.tx

    def test_unknown_scene_404(self, client):
        r = client.post("/api/session", json={"scene": "nope"})
        assert r.status_code == 404

    def test_bad_mode_400(self, client):
        r = client.post("/api/session", json={"scene": "checker", "mode": "sparkles"})
        assert r.status_code == 400


class TestFrame:
    def test_png_with_metric_headers(self, client):
        s = new_session(client)
        r = client.get("/api/frame", params={"session": s["session_id"], "tx": 4})
        assert r.status_code == 200
        assert r.headers["content-type"] == "image/png"
        assert r.content[:8] == b"\x89PNG\r\n\x1a\n"
        assert float(r.headers["X-Salience-Integral"]) > 0
        assert float(r.headers["X-Salience-Max"]) > 0

    def test_identical_query_identical_bytes(self, client):
        s = new_session(client)
        q = {"session": s["session_id"], "tx": 3, "ty": -2, "theta": 0.1, "scale": 1.05}
        a = client.get("/api/frame", params=q)
        b = client.get("/api/frame", params=q)
        assert a.content == b.content
        assert a.headers["X-Salience-Integral"] == b.headers["X-Salience-Integral"]

    def test_header_matches_sweep_row_exactly(self, client):
        s = new_session(client)
        r = client.get("/api/frame", params={"session": s["session_id"]})
        sweep = run_sweep(
            checker_scene(),
            SweepSpec(axis=SweepAxis.TRANSLATION_X, offsets=(0.0,),
                      modes=(VisMode.COMPLEMENTARY_PHOTOMETRIC,),
                      blend=BlendMode.ADDITIVE_OST, alpha=1.0),
        )
        assert float(r.headers["X-Salience-Integral"]) == sweep.rows[0].integral
        assert float(r.headers["X-Salience-Max"]) == sweep.rows[0].max

    def test_unknown_session_404(self, client):
        assert client.get("/api/frame", params={"session": "ghost"}).status_code == 404

    def test_malformed_pose_400(self, client):
        s = new_session(client)
        r = client.get("/api/frame", params={"session": s["session_id"], "tx": "wide"})
        assert r.status_code == 400
        r = client.get("/api/frame", params={"session": s["session_id"], "scale": 99})
        assert r.status_code == 400


class TestSaliencyEndpoint:
    def test_grayscale_heatmap(self, client):
        s = new_session(client)
        r = client.get("/api/saliency", params={"session": s["session_id"], "tx": 8})
        assert r.status_code == 200
        assert r.content[:8] == b"\x89PNG\r\n\x1a\n"


class TestCommit:
    def test_commit_at_truth_zero_errors(self, client):
        s = new_session(client)
        r = client.post("/api/commit", json={
            "session": s["session_id"],
            "pose": {"tx": 0, "ty": 0, "theta": 0, "scale": 1},
        })
        assert r.status_code == 200
        rec = r.json()
        assert rec["translation_err"] <= 1e-6
        assert rec["rotation_err"] <= 1e-6
        assert rec["scale_err"] <= 1e-6
        assert rec["elapsed_ms"] >= 0

    def test_three_four_five(self, client):
        s = new_session(client)
        r = client.post("/api/commit", json={
            "session": s["session_id"],
            "pose": {"tx": 3, "ty": 4, "theta": 0, "scale": 1},
        })
        assert r.json()["translation_err"] == pytest.approx(5.0)

    def test_rotation_wrap_and_scale_log(self):
        from aligntex.scene import Pose2D

        terr, rerr, serr = pose_errors(Pose2D(theta=math.pi - 0.01, scale=2.0), Pose2D())
        assert rerr == pytest.approx(math.degrees(math.pi - 0.01))
        terr, rerr, _ = pose_errors(Pose2D(theta=-0.1), Pose2D())
        assert rerr == pytest.approx(math.degrees(0.1))
        _, _, serr = pose_errors(Pose2D(scale=0.5), Pose2D())
        assert serr == pytest.approx(math.log(2.0))

    def test_double_commit_409(self, client):
        s = new_session(client)
        body = {"session": s["session_id"], "pose": {"tx": 0, "ty": 0, "theta": 0, "scale": 1}}
        assert client.post("/api/commit", json=body).status_code == 200
        assert client.post("/api/commit", json=body).status_code == 409

    def test_commit_malformed_pose_400(self, client):
        s = new_session(client)
        r = client.post("/api/commit", json={"session": s["session_id"], "pose": {"tx": 1}})
        assert r.status_code == 400

    def test_trials_listing_and_log_file(self, client):
        s1 = new_session(client)
        s2 = new_session(client, mode="silhouette")
        client.post("/api/commit", json={
            "session": s1["session_id"], "pose": {"tx": 1, "ty": 0, "theta": 0, "scale": 1}})
        client.post("/api/commit", json={
            "session": s2["session_id"], "pose": {"tx": 0, "ty": 2, "theta": 0, "scale": 1}})
        trials = client.get("/api/trials").json()
        assert len(trials) == 2
        assert trials[0]["session"] == s1["session_id"]
        lines = [json.loads(l) for l in client.log_path.read_text().strip().split("\n")]
        assert lines == trials

    def test_sessions_isolated(self, client):
        s1 = new_session(client)
        s2 = new_session(client)
        client.post("/api/commit", json={
            "session": s1["session_id"], "pose": {"tx": 0, "ty": 0, "theta": 0, "scale": 1}})
        # second session is unaffected: its frame still renders, its commit still open
        r = client.get("/api/frame", params={"session": s2["session_id"]})
        assert r.status_code == 200
        r = client.post("/api/commit", json={
            "session": s2["session_id"], "pose": {"tx": 0, "ty": 0, "theta": 0, "scale": 1}})
        assert r.status_code == 200
