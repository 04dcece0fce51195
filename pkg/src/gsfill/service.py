"""Local HTTP service wrapping the pipeline for the studio UI.

A session owns a loaded scene, its cameras, uploaded masks and reference
images, and an append-only history of scene snapshots (undo pops the last
one). Mutating endpoints serialize on a per-session lock; renders of
committed states are lock-free reads of immutable snapshots.

The service is a thin adapter: every endpoint's effect is reproducible with
the same library calls, and the deterministic session state hash makes that
checkable.
"""

from __future__ import annotations

import tempfile
import threading
import uuid
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np
from fastapi import Body, FastAPI, HTTPException, Query, Request, Response

from . import imgio
from .camera import load_cameras
from .depth.complete import HarmonicBackend
from .errors import GsfillError
from .masks import MaskImage, dilate_mask
from .pipeline import (
    InpaintConfig,
    ReferenceView,
    StageFailure,
    count_uncovered,
    inpaint_single_view,
)
from .ply import load_scene_ply
from .pointcloud import pointcloud_ply_text
from .render import render
from .scene import GaussianScene

SNAPSHOT_CACHE_LIMIT = 4


def _error(status: int, code: str, message: str):
    raise HTTPException(status_code=status, detail={"code": code, "message": message})


class SceneHistory:
    """Append-only snapshots with a RAM cap; older states spill to disk
    losslessly (float64 npz) so undo hashes stay bit-exact."""

    def __init__(self, initial: GaussianScene, spill_dir: Path,
                 cache_limit: int = SNAPSHOT_CACHE_LIMIT):
        self._spill_dir = spill_dir
        self._cache_limit = cache_limit
        self._entries: list[dict] = []
        self.append(initial)

    def __len__(self) -> int:
        return len(self._entries)

    def append(self, scene: GaussianScene) -> None:
        self._entries.append({"scene": scene, "path": None})
        cached = [e for e in self._entries if e["scene"] is not None]
        while len(cached) > self._cache_limit:
            entry = cached.pop(0)
            path = self._spill_dir / f"state{id(entry):x}.npz"
            s = entry["scene"]
            np.savez(
                path,
                positions=s.positions, rotations=s.rotations,
                log_scales=s.log_scales, opacities=s.opacities,
                sh=s.sh, sh_degree=np.array(s.sh_degree),
            )
            entry["path"] = path
            entry["scene"] = None

    def undo(self) -> bool:
        if len(self._entries) <= 1:
            return False
        dropped = self._entries.pop()
        if dropped["path"] is not None:
            dropped["path"].unlink(missing_ok=True)
        return True

    @property
    def current(self) -> GaussianScene:
        entry = self._entries[-1]
        if entry["scene"] is None:
            data = np.load(entry["path"])
            entry["scene"] = GaussianScene(
                positions=data["positions"], rotations=data["rotations"],
                log_scales=data["log_scales"], opacities=data["opacities"],
                sh=data["sh"], sh_degree=int(data["sh_degree"]),
            )
        return entry["scene"]


class Session:
    def __init__(self, scene: GaussianScene, poses, cfg: InpaintConfig):
        self.id = uuid.uuid4().hex[:12]
        self.poses = poses
        self.cfg = cfg
        self.dir = Path(tempfile.mkdtemp(prefix=f"gsfill-{self.id}-"))
        self.history = SceneHistory(scene, self.dir)
        self.masks: dict[str, MaskImage] = {}
        self.images: dict[str, np.ndarray] = {}
        self.reports: list[dict] = []
        self.clouds: list = []
        self.thumbnails: dict[str, bytes] = {}
        self.lock = threading.Lock()

    def pose(self, view: str):
        for p in self.poses:
            if p.name == view or Path(p.name).stem == view:
                return p
        try:
            return self.poses[int(view)]
        except (ValueError, IndexError):
            _error(404, "unknown_view", f"view {view!r} not found")


def create_app(frontend_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="gsfill service", version="0.1.0")
    sessions: dict[str, Session] = {}

    def get_session(session_id: str) -> Session:
        if session_id not in sessions:
            _error(404, "unknown_session", f"no session {session_id!r}")
        return sessions[session_id]

    @app.post("/sessions")
    def create_session(payload: dict = Body(...)):
        scene_path = payload.get("scene")
        cameras_path = payload.get("cameras")
        if not scene_path or not cameras_path:
            _error(400, "missing_field", "payload needs 'scene' and 'cameras' paths")
        try:
            scene = load_scene_ply(scene_path)
            poses = load_cameras(cameras_path)
        except (OSError, GsfillError) as e:
            _error(400, "load_failed", str(e))
        try:
            cfg = InpaintConfig.from_dict(payload.get("config", {}))
        except (GsfillError, TypeError) as e:
            _error(400, "bad_config", str(e))
        session = Session(scene, poses, cfg)
        sessions[session.id] = session
        return {
            "session": session.id,
            "gaussians": len(scene),
            "views": [p.name for p in poses],
            "state_hash": scene.state_hash(),
        }

    @app.get("/sessions/{session_id}")
    def session_info(session_id: str):
        session = get_session(session_id)
        scene = session.history.current
        return {
            "session": session.id,
            "gaussians": len(scene),
            "steps": len(session.reports),
            "state_hash": scene.state_hash(),
            "views": [p.name for p in session.poses],
        }

    @app.get("/sessions/{session_id}/views")
    def list_views(session_id: str, thumb: int = Query(48, ge=8, le=256)):
        import base64

        session = get_session(session_id)
        scene = session.history.current
        out = []
        for pose in session.poses:
            if pose.name not in session.thumbnails:
                scale = thumb / max(pose.width, pose.height)
                small = type(pose)(
                    fx=pose.fx * scale, fy=pose.fy * scale,
                    cx=pose.cx * scale, cy=pose.cy * scale,
                    width=max(int(round(pose.width * scale)), 1),
                    height=max(int(round(pose.height * scale)), 1),
                    world_to_camera=pose.world_to_camera, name=pose.name,
                )
                png = imgio.image_to_png_bytes(render(scene, small).color)
                session.thumbnails[pose.name] = png
            out.append(
                {
                    "view": pose.name,
                    "width": pose.width,
                    "height": pose.height,
                    "thumbnail": "data:image/png;base64,"
                    + base64.b64encode(session.thumbnails[pose.name]).decode(),
                }
            )
        return {"views": out}

    @app.get("/sessions/{session_id}/render")
    def render_view(session_id: str, view: str, mode: str = "color"):
        session = get_session(session_id)
        pose = session.pose(view)
        if mode not in ("color", "depth", "alpha"):
            _error(400, "bad_mode", f"mode {mode!r} not in color|depth|alpha")
        out = render(
            session.history.current, pose,
            background=session.cfg.background,
            normalize_by_alpha=(mode == "depth"),
            validity_threshold=session.cfg.validity_threshold,
        )
        if mode == "color":
            return Response(imgio.image_to_png_bytes(out.color), media_type="image/png")
        if mode == "alpha":
            return Response(imgio.image_to_png_bytes(out.alpha_acc), media_type="image/png")
        return Response(imgio.depth_to_tiff_bytes(out.depth), media_type="image/tiff")

    @app.post("/sessions/{session_id}/mask")
    async def upload_mask(session_id: str, view: str, request: Request):
        session = get_session(session_id)
        pose = session.pose(view)
        body = await request.body()
        try:
            mask = imgio.mask_from_png_bytes(body)
        except Exception as e:
            _error(400, "bad_mask", f"not a readable PNG: {e}")
        if (mask.width, mask.height) != (pose.width, pose.height):
            _error(400, "size_mismatch",
                   f"mask {mask.width}x{mask.height} vs view "
                   f"{pose.width}x{pose.height}")
        if session.cfg.dilation_radius > 0:
            mask = dilate_mask(mask, session.cfg.dilation_radius)
        mask_id = f"mask-{uuid.uuid4().hex[:8]}"
        session.masks[mask_id] = mask
        return {"mask": mask_id, "pixels": mask.count,
                "dilation_radius": session.cfg.dilation_radius}

    @app.get("/sessions/{session_id}/mask/{mask_id}")
    def fetch_mask(session_id: str, mask_id: str):
        session = get_session(session_id)
        if mask_id not in session.masks:
            _error(404, "unknown_mask", f"no mask {mask_id!r}")
        return Response(
            imgio.mask_to_png_bytes(session.masks[mask_id]), media_type="image/png"
        )

    @app.post("/sessions/{session_id}/image")
    async def upload_image(session_id: str, view: str, request: Request):
        session = get_session(session_id)
        pose = session.pose(view)
        body = await request.body()
        try:
            import io

            from PIL import Image

            arr = np.asarray(
                Image.open(io.BytesIO(body)).convert("RGB"), dtype=np.float64
            ) / 255.0
        except Exception as e:
            _error(400, "bad_image", f"not a readable image: {e}")
        if arr.shape[:2] != (pose.height, pose.width):
            _error(400, "size_mismatch",
                   f"image {arr.shape[1]}x{arr.shape[0]} vs view "
                   f"{pose.width}x{pose.height}")
        image_id = f"img-{uuid.uuid4().hex[:8]}"
        session.images[image_id] = arr
        return {"image": image_id}

    @app.post("/sessions/{session_id}/step")
    def run_step(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        view = payload.get("view")
        mask_id = payload.get("mask")
        image_id = payload.get("image")
        if not view or not mask_id or not image_id:
            _error(400, "missing_field", "step needs 'view', 'mask', 'image'")
        pose = session.pose(view)
        if mask_id not in session.masks:
            _error(404, "unknown_mask", f"no mask {mask_id!r}")
        if image_id not in session.images:
            _error(404, "unknown_image", f"no image {image_id!r}")
        if payload.get("backend", "harmonic") != "harmonic":
            _error(400, "bad_backend", "service runs the harmonic backend only")
        overrides = payload.get("config", {})
        try:
            merged = {**{f.name: getattr(session.cfg, f.name)
                         for f in fields(InpaintConfig)}, **overrides}
            cfg = InpaintConfig.from_dict(merged)
        except (GsfillError, TypeError) as e:
            _error(400, "bad_config", str(e))
        seed = int(payload.get("seed", cfg.seed))

        with session.lock:
            scene = session.history.current
            mask = session.masks[mask_id]
            # progressive rule: from the second step on, only still-uncovered
            # pixels of the mask are inpainted (overridable per request)
            shrink_default = len(session.reports) > 0
            if payload.get("shrink_to_uncovered", shrink_default):
                uncovered = render(
                    scene, pose, background=cfg.background,
                    validity_threshold=cfg.validity_threshold,
                ).alpha_acc < cfg.validity_threshold
                mask = MaskImage(mask.bits & uncovered)
            ref = ReferenceView(pose=pose, mask=mask,
                                image=session.images[image_id])
            try:
                result, report = inpaint_single_view(
                    scene, ref, cfg, np.random.default_rng(seed), HarmonicBackend()
                )
            except StageFailure as e:
                _error(500, "stage_failure", str(e))
            except GsfillError as e:
                _error(400, "pipeline_error", str(e))
            # no-op steps append the same scene object, keeping history rows
            # one-to-one with step records so undo stays aligned
            session.history.append(result)
            if not report.no_op:
                session.thumbnails.clear()
            session.reports.append(report.to_dict())
            session.clouds.append(report.cloud)
            return {
                "step": len(session.reports),
                "report": report.to_dict(),
                "state_hash": session.history.current.state_hash(),
            }

    @app.get("/sessions/{session_id}/scene")
    def download_scene(session_id: str):
        from .ply import save_scene_ply

        session = get_session(session_id)
        path = session.dir / "export.ply"
        save_scene_ply(session.history.current, path)
        return Response(
            path.read_bytes(),
            media_type="application/octet-stream",
            headers={"content-disposition": "attachment; filename=scene.ply"},
        )

    @app.get("/sessions/{session_id}/pointcloud")
    def step_pointcloud(session_id: str, step: int = Query(..., ge=1)):
        session = get_session(session_id)
        if step > len(session.clouds):
            _error(404, "unknown_step", f"session has {len(session.clouds)} steps")
        cloud = session.clouds[step - 1]
        if cloud is None or len(cloud) == 0:
            _error(404, "no_cloud", f"step {step} produced no point cloud")
        return Response(pointcloud_ply_text(cloud), media_type="text/plain")

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = get_session(session_id)
        with session.lock:
            if not session.history.undo():
                _error(409, "nothing_to_undo", "session is at its initial state")
            if session.reports:
                session.reports.pop()
                session.clouds.pop()
            session.thumbnails.clear()
            return {
                "steps": len(session.reports),
                "state_hash": session.history.current.state_hash(),
            }

    if frontend_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="studio")

    return app
