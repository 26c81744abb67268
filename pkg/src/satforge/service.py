"""HTTP service backing the interactive mask-studio workflow.

Scenes are uploaded and tiled in memory; checkpoints live on disk under the
configured checkpoint directory and are loaded through a small LRU cache.
Removals are synchronous (the interactive path); training runs as a
background job polled via /jobs/{id}. A per-(scene, tile) lock makes
genuinely concurrent removals on the same tile return 409.
"""

from __future__ import annotations

import io
import threading
import uuid
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from fastapi import FastAPI, File, Header, HTTPException, UploadFile
from fastapi.responses import Response
from fastapi.staticfiles import StaticFiles
from PIL import Image

from satforge import errors
from satforge.config import ServiceConfig
from satforge.features import CannyParams, batch_extract, extract_cfi
from satforge.imaging import load_scene, slice_tiles
from satforge.masks import RemovalMask
from satforge.metrics import degradation_report
from satforge.removal import remove_object
from satforge.translator import (
    DiscriminatorSpec,
    GeneratorSpec,
    TrainConfig,
    TranslatorCheckpoint,
    train_translator,
)

_BAD_REQUEST = (
    errors.MaskOutOfBounds,
    errors.DegeneratePolygon,
    errors.InvalidParams,
    errors.InvalidTileSize,
    errors.OutOfBounds,
    errors.WrongFeatureKind,
    errors.UnreadableFile,
    errors.UnsupportedFormat,
)


def _png_bytes(array: np.ndarray, mode: str) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(array, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def _png_response(array: np.ndarray, mode: str = "RGB") -> Response:
    return Response(content=_png_bytes(array, mode), media_type="image/png")


def _http_error(exc: errors.SatforgeError, status: int) -> HTTPException:
    return HTTPException(status_code=status, detail=exc.to_json())


class CheckpointCache:
    """LRU cache of loaded checkpoints keyed by id (directory name)."""

    def __init__(self, root: Path, capacity: int):
        self.root = root
        self.capacity = max(1, capacity)
        self._cache: OrderedDict[str, TranslatorCheckpoint] = OrderedDict()
        self._lock = threading.Lock()

    def list_ids(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir() if (p / "meta.json").is_file())

    def get(self, checkpoint_id: str) -> TranslatorCheckpoint:
        with self._lock:
            if checkpoint_id in self._cache:
                self._cache.move_to_end(checkpoint_id)
                return self._cache[checkpoint_id]
        path = self.root / checkpoint_id
        if not (path / "meta.json").is_file():
            raise KeyError(checkpoint_id)
        ckpt = TranslatorCheckpoint.load(path)
        with self._lock:
            self._cache[checkpoint_id] = ckpt
            self._cache.move_to_end(checkpoint_id)
            while len(self._cache) > self.capacity:
                self._cache.popitem(last=False)
        return ckpt


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    config.ensure_dirs()
    app = FastAPI(title="satforge", version="1.0")

    scenes: dict[str, dict] = {}
    removals: dict[str, dict] = {}
    jobs: dict[str, dict] = {}
    idempotency: dict[str, str] = {}
    tile_locks: dict[tuple, threading.Lock] = {}
    state_lock = threading.Lock()
    trainer = ThreadPoolExecutor(max_workers=1)  # one training job at a time
    cache = CheckpointCache(Path(config.checkpoint_dir), config.checkpoint_cache_size)

    app.state.config = config
    app.state.checkpoint_cache = cache

    def _scene(scene_id: str) -> dict:
        try:
            return scenes[scene_id]
        except KeyError:
            raise HTTPException(status_code=404, detail={"code": "not_found", "message": f"scene {scene_id}", "details": {}})

    def _tile(entry: dict, row: int, col: int):
        try:
            return entry["grid"].tile_at(row, col)
        except errors.OutOfBounds as exc:
            raise _http_error(exc, 404)

    @app.post("/scenes")
    async def upload_scene(file: UploadFile = File(...), tile_size: int | None = None):
        data = await file.read()
        ts = tile_size or config.tile_size
        tmp = Path(config.data_dir) / f"upload-{uuid.uuid4().hex}.img"
        tmp.write_bytes(data)
        try:
            scene = load_scene(tmp)
        except errors.SatforgeError as exc:
            raise _http_error(exc, 400)
        finally:
            tmp.unlink(missing_ok=True)
        try:
            grid = slice_tiles(scene, tile_size=ts)
        except errors.SatforgeError as exc:
            raise _http_error(exc, 400)
        scene_id = uuid.uuid4().hex[:12]
        scene.id = scene_id
        grid.scene_id = scene_id
        scenes[scene_id] = {"scene": scene, "grid": grid, "canny": CannyParams()}
        return {"scene_id": scene_id, "rows": grid.rows, "cols": grid.cols, "tile_size": ts}

    @app.get("/scenes/{scene_id}")
    def scene_meta(scene_id: str):
        entry = _scene(scene_id)
        return entry["grid"].meta()

    @app.get("/scenes/{scene_id}/tiles/{row}/{col}")
    def tile_png(scene_id: str, row: int, col: int):
        return _png_response(_tile(_scene(scene_id), row, col).pixels)

    @app.get("/scenes/{scene_id}/tiles/{row}/{col}/cfi")
    def tile_cfi_png(scene_id: str, row: int, col: int):
        entry = _scene(scene_id)
        cfi = extract_cfi(_tile(entry, row, col), entry["canny"])
        return _png_response(cfi.data, mode="L")

    @app.get("/checkpoints")
    def list_checkpoints():
        return {"checkpoints": cache.list_ids()}

    @app.post("/checkpoints/train")
    def train_checkpoint(body: dict):
        scene_id = body.get("scene_id")
        entry = _scene(scene_id)
        checkpoint_id = body.get("checkpoint_id") or f"ckpt-{uuid.uuid4().hex[:8]}"
        try:
            g_spec = GeneratorSpec.from_json(body.get("generator", {})) if body.get("generator") else GeneratorSpec()
            d_spec = DiscriminatorSpec.from_json(body.get("discriminator", {})) if body.get("discriminator") else DiscriminatorSpec()
            train_cfg = TrainConfig.from_json(body.get("train", {})) if body.get("train") else TrainConfig()
            train_cfg.validate()
            g_spec.validate()
        except (TypeError, ValueError, errors.InvalidSpec) as exc:
            raise HTTPException(status_code=400, detail={"code": "invalid_params", "message": str(exc), "details": {}})

        job_id = uuid.uuid4().hex[:12]
        jobs[job_id] = {"job_id": job_id, "kind": "train", "state": "queued", "progress": 0.0,
                        "message": "", "checkpoint_id": checkpoint_id}

        def progress(step, total):
            jobs[job_id]["progress"] = step / total

        def run():
            jobs[job_id]["state"] = "running"
            try:
                pairs = [(cfi, tile) for tile, cfi in batch_extract(entry["grid"], entry["canny"])]
                ckpt = train_translator(
                    pairs, g_spec, d_spec, train_cfg,
                    provenance={"scene_id": scene_id, "canny_params": entry["canny"].to_json()},
                    progress_cb=progress,
                )
                ckpt.save(Path(config.checkpoint_dir) / checkpoint_id)
                jobs[job_id]["state"] = "done"
                jobs[job_id]["progress"] = 1.0
            except Exception as exc:  # noqa: BLE001 - reported through JobStatus
                jobs[job_id]["state"] = "failed"
                jobs[job_id]["message"] = str(exc)

        trainer.submit(run)
        return jobs[job_id]

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        if job_id not in jobs:
            raise HTTPException(status_code=404, detail={"code": "not_found", "message": f"job {job_id}", "details": {}})
        return jobs[job_id]

    @app.post("/scenes/{scene_id}/removals")
    def create_removal(scene_id: str, body: dict, idempotency_key: str | None = Header(default=None)):
        entry = _scene(scene_id)
        if idempotency_key is not None:
            key = f"{scene_id}:{idempotency_key}"
            with state_lock:
                if key in idempotency:
                    return removals[idempotency[key]]["response"]

        try:
            mask = RemovalMask.from_json(body["mask"])
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail={"code": "invalid_mask", "message": str(exc), "details": {}})
        except errors.SatforgeError as exc:
            raise _http_error(exc, 400)

        checkpoint_id = body.get("checkpoint_id", "")
        try:
            ckpt = cache.get(checkpoint_id)
        except KeyError:
            raise HTTPException(status_code=404, detail={"code": "not_found", "message": f"checkpoint {checkpoint_id!r}", "details": {}})

        lock_key = (scene_id, tuple(mask.tile_coord))
        with state_lock:
            lock = tile_locks.setdefault(lock_key, threading.Lock())
        if not lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail={
                "code": "removal_in_progress",
                "message": f"a removal is already running on tile {mask.tile_coord}",
                "details": {"tile": list(mask.tile_coord)},
            })
        try:
            try:
                result = remove_object(entry["scene"], entry["grid"], mask, ckpt,
                                       entry["canny"], checkpoint_id=checkpoint_id)
            except errors.CheckpointMismatch as exc:
                raise _http_error(exc, 422)
            except _BAD_REQUEST as exc:
                raise _http_error(exc, 400)

            removal_id = uuid.uuid4().hex[:12]
            report = degradation_report(entry["scene"], result.forged_scene)
            response = {"removal_id": removal_id, "scene_id": scene_id,
                        "tile": list(mask.tile_coord), "checkpoint_id": checkpoint_id}
            removals[removal_id] = {
                "result": result,
                "source": entry["scene"],
                "metrics": report.to_json(),
                "response": response,
            }
            if idempotency_key is not None:
                with state_lock:
                    idempotency[f"{scene_id}:{idempotency_key}"] = removal_id
            return response
        finally:
            lock.release()

    def _removal(removal_id: str) -> dict:
        if removal_id not in removals:
            raise HTTPException(status_code=404, detail={"code": "not_found", "message": f"removal {removal_id}", "details": {}})
        return removals[removal_id]

    @app.get("/removals/{removal_id}/result")
    def removal_result(removal_id: str, artifact: str = "scene"):
        entry = _removal(removal_id)
        result = entry["result"]
        if artifact == "scene":
            return _png_response(result.forged_scene.pixels)
        if artifact == "tile":
            return _png_response(result.output_tile.pixels)
        if artifact == "cfi":
            return _png_response(result.edited_cfi.data, mode="L")
        raise HTTPException(status_code=400, detail={
            "code": "invalid_params", "message": f"unknown artifact {artifact!r}",
            "details": {"choices": ["scene", "tile", "cfi"]},
        })

    @app.get("/removals/{removal_id}/metrics")
    def removal_metrics(removal_id: str):
        return _removal(removal_id)["metrics"]

    ui_dir = Path(config.ui_dir)
    if ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def main() -> None:
    import uvicorn

    from satforge.config import load_config

    config = load_config()
    uvicorn.run(create_app(config), host=config.host, port=config.port)
