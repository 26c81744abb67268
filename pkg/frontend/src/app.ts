/**
 * mask-studio application shell.
 *
 * Wires the DOM to the pure modules: scene upload, tile navigation,
 * CFI overlay, mask drafting with a live pixel preview, removal
 * submission, and before/after comparison. All pixel math lives in
 * raster.ts / mask.ts / viewstate.ts / compare.ts so it can be tested
 * without a browser.
 */

import { ApiClient, ApiError, SceneMeta, RemovalResponse } from "./api.js";
import {
  MaskDraft,
  validateDraft,
  draftToRemovalMask,
  previewPixels,
} from "./mask.js";
import {
  ViewState,
  initialViewState,
  withScene,
  selectTile,
  setLayer,
  setComparison,
  zoomBy,
  panBy,
  toTileCoords,
  Layer,
} from "./viewstate.js";
import { swipeLayout } from "./compare.js";
import { Vertex } from "./raster.js";

interface AppState {
  view: ViewState;
  scene: SceneMeta | null;
  draft: MaskDraft | null;
  checkpointId: string;
  removal: RemovalResponse | null;
  swipe: number;
  status: string;
}

const state: AppState = {
  view: initialViewState(),
  scene: null,
  draft: null,
  checkpointId: "",
  removal: null,
  swipe: 0.5,
  status: "upload a scene to begin",
};

const api = new ApiClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(message: string): void {
  state.status = message;
  el<HTMLElement>("status").textContent = message;
}

function describeError(error: unknown): string {
  const apiError = error as ApiError;
  if (apiError && typeof apiError.status === "number") {
    if (apiError.status === 409) {
      return "a removal is already running on this tile; wait for it to finish";
    }
    if (apiError.status === 422) {
      return `checkpoint rejected the tile: ${apiError.message}`;
    }
    return `${apiError.code}: ${apiError.message}`;
  }
  return String(error);
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

const tileImages = new Map<string, HTMLImageElement>();

function loadImage(url: string): Promise<HTMLImageElement> {
  const cached = tileImages.get(url);
  if (cached) return Promise.resolve(cached);
  return new Promise((resolve, reject) => {
    const image = new Image();
    image.onload = () => {
      tileImages.set(url, image);
      resolve(image);
    };
    image.onerror = () => reject(new Error(`failed to load ${url}`));
    image.src = url;
  });
}

function canvasContext(id: string): CanvasRenderingContext2D {
  const canvas = el<HTMLCanvasElement>(id);
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");
  ctx.imageSmoothingEnabled = false;
  return ctx;
}

function applyTransform(ctx: CanvasRenderingContext2D): void {
  const { zoom, panX, panY } = state.view.transform;
  ctx.setTransform(zoom, 0, 0, zoom, panX, panY);
}

async function drawTilePane(): Promise<void> {
  if (!state.scene) return;
  const [row, col] = state.view.selected;
  const size = state.scene.tile_size;
  const ctx = canvasContext("tile-canvas");
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  applyTransform(ctx);

  const layer: Layer = state.view.layer;
  if (layer === "image" || layer === "overlay") {
    const image = await loadImage(api.tileUrl(state.scene.scene_id, row, col));
    ctx.drawImage(image, 0, 0);
  }
  if (layer === "cfi" || layer === "overlay") {
    const cfi = await loadImage(api.cfiUrl(state.scene.scene_id, row, col));
    if (layer === "overlay") {
      ctx.globalAlpha = 0.45;
      ctx.drawImage(cfi, 0, 0);
      ctx.globalAlpha = 1.0;
    } else {
      ctx.drawImage(cfi, 0, 0);
    }
  }
  drawDraftPreview(ctx, size);
}

/** Tint every pixel the current draft would erase. */
function drawDraftPreview(ctx: CanvasRenderingContext2D, size: number): void {
  if (!state.draft || state.draft.vertices.length === 0) return;
  const vertices = state.draft.vertices;
  ctx.strokeStyle = "#ff5252";
  ctx.lineWidth = 1 / state.view.transform.zoom;
  ctx.beginPath();
  ctx.moveTo(vertices[0][0], vertices[0][1]);
  for (const [x, y] of vertices.slice(1)) ctx.lineTo(x, y);
  if (state.draft.closed) ctx.closePath();
  ctx.stroke();

  if (validateDraft(state.draft, size).length > 0) return;
  const mask = previewPixels(state.draft, size);
  ctx.fillStyle = "rgba(255, 82, 82, 0.35)";
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      if (mask[y * size + x]) ctx.fillRect(x, y, 1, 1);
    }
  }
}

async function drawComparison(): Promise<void> {
  const pane = el<HTMLElement>("compare-pane");
  if (!state.removal || !state.scene) {
    pane.hidden = true;
    return;
  }
  pane.hidden = false;
  const [row, col] = state.view.selected;
  const original = await loadImage(api.tileUrl(state.scene.scene_id, row, col));
  const forged = await loadImage(api.removalArtifactUrl(state.removal.removal_id, "tile"));

  if (state.view.comparison === "side_by_side") {
    el<HTMLElement>("swipe-controls").hidden = true;
    const left = canvasContext("compare-left");
    const right = canvasContext("compare-right");
    el<HTMLCanvasElement>("compare-right").hidden = false;
    for (const [ctx, image] of [
      [left, original],
      [right, forged],
    ] as const) {
      ctx.setTransform(1, 0, 0, 1, 0, 0);
      ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
      applyTransform(ctx);
      ctx.drawImage(image, 0, 0);
    }
  } else {
    el<HTMLElement>("swipe-controls").hidden = false;
    el<HTMLCanvasElement>("compare-right").hidden = true;
    const ctx = canvasContext("compare-left");
    ctx.setTransform(1, 0, 0, 1, 0, 0);
    ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
    ctx.drawImage(original, 0, 0);
    const { forgedWidth, dividerX } = swipeLayout(state.swipe, original.width);
    if (forgedWidth > 0) {
      ctx.drawImage(forged, 0, 0, forgedWidth, forged.height, 0, 0, forgedWidth, forged.height);
    }
    ctx.strokeStyle = "#ffd740";
    ctx.beginPath();
    ctx.moveTo(dividerX + 0.5, 0);
    ctx.lineTo(dividerX + 0.5, original.height);
    ctx.stroke();
  }
}

function renderTileGrid(): void {
  const grid = el<HTMLElement>("tile-grid");
  grid.innerHTML = "";
  if (!state.scene) return;
  grid.style.gridTemplateColumns = `repeat(${state.scene.cols}, 1.6rem)`;
  for (let r = 0; r < state.scene.rows; r++) {
    for (let c = 0; c < state.scene.cols; c++) {
      const cell = document.createElement("button");
      cell.textContent = `${r},${c}`;
      cell.className = "tile-cell";
      const [sr, sc] = state.view.selected;
      if (sr === r && sc === c) {
        cell.classList.add("selected");
      }
      cell.addEventListener("click", () => {
        state.view = selectTile(state.view, r, c);
        state.draft = null;
        state.removal = null;
        void render();
      });
      grid.appendChild(cell);
    }
  }
}

function renderMetrics(): void {
  const panel = el<HTMLElement>("metrics");
  if (!state.removal) {
    panel.textContent = "";
    return;
  }
  api
    .removalMetrics(state.removal.removal_id)
    .then((report) => {
      panel.textContent =
        `MSE ${report.mse_reported.toFixed(4)} · ` +
        `PSNR ${report.psnr_db.toFixed(2)} dB · ` +
        `SSIM ${report.ssim.toFixed(4)} · region ${report.region}`;
    })
    .catch((error) => {
      panel.textContent = describeError(error);
    });
}

async function render(): Promise<void> {
  renderTileGrid();
  await drawTilePane();
  await drawComparison();
  renderMetrics();
  el<HTMLElement>("status").textContent = state.status;
}

// ---------------------------------------------------------------------------
// Event wiring
// ---------------------------------------------------------------------------

async function onUpload(event: Event): Promise<void> {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  setStatus("uploading scene…");
  try {
    const meta = await api.uploadScene(file);
    state.scene = meta;
    state.view = withScene(initialViewState(), meta.scene_id, meta.rows, meta.cols);
    state.view = selectTile(state.view, 0, 0);
    state.draft = null;
    state.removal = null;
    const canvas = el<HTMLCanvasElement>("tile-canvas");
    canvas.width = meta.tile_size;
    canvas.height = meta.tile_size;
    for (const id of ["compare-left", "compare-right"]) {
      const c = el<HTMLCanvasElement>(id);
      c.width = meta.tile_size;
      c.height = meta.tile_size;
    }
    setStatus(`scene ${meta.scene_id}: ${meta.rows}×${meta.cols} tiles of ${meta.tile_size}px`);
    await refreshCheckpoints();
  } catch (error) {
    setStatus(describeError(error));
  }
  await render();
}

async function refreshCheckpoints(): Promise<void> {
  try {
    const { checkpoints } = await api.listCheckpoints();
    const select = el<HTMLSelectElement>("checkpoint");
    select.innerHTML = "";
    for (const id of checkpoints) {
      const option = document.createElement("option");
      option.value = id;
      option.textContent = id;
      select.appendChild(option);
    }
    if (checkpoints.length > 0) state.checkpointId = checkpoints[0];
  } catch (error) {
    setStatus(describeError(error));
  }
}

function canvasToTile(event: MouseEvent): Vertex | null {
  if (!state.scene) return null;
  const canvas = el<HTMLCanvasElement>("tile-canvas");
  const rect = canvas.getBoundingClientRect();
  const cx = ((event.clientX - rect.left) * canvas.width) / rect.width;
  const cy = ((event.clientY - rect.top) * canvas.height) / rect.height;
  const coords = toTileCoords(state.view, cx, cy, state.scene.tile_size);
  if (!coords) return null;
  return [coords[0], coords[1]];
}

function onCanvasClick(event: MouseEvent): void {
  if (!state.scene) return;
  const point = canvasToTile(event);
  if (!point) return;
  const shape = el<HTMLSelectElement>("shape").value as "rectangle" | "polygon";
  if (!state.draft || state.draft.shape !== shape || state.draft.closed) {
    state.draft = { shape, vertices: [], closed: false };
  }
  state.draft.vertices.push(point);
  if (shape === "rectangle" && state.draft.vertices.length === 2) {
    state.draft.closed = true;
  }
  setStatus(
    `${shape} draft: ${state.draft.vertices.length} point(s)` +
      (state.draft.closed ? " (closed)" : ""),
  );
  void render();
}

function onCloseDraft(): void {
  if (state.draft && state.draft.shape === "polygon") {
    state.draft.closed = true;
    void render();
  }
}

function onClearDraft(): void {
  state.draft = null;
  setStatus("draft cleared");
  void render();
}

async function onSubmit(): Promise<void> {
  if (!state.scene || !state.draft) {
    setStatus("draw a mask first");
    return;
  }
  const problems = validateDraft(state.draft, state.scene.tile_size);
  if (problems.length > 0) {
    setStatus(problems.map((p) => p.message).join("; "));
    return;
  }
  if (!state.checkpointId) {
    setStatus("train or pick a checkpoint first");
    return;
  }
  const mask = draftToRemovalMask(state.draft, state.view.selected);
  setStatus("removing object…");
  try {
    state.removal = await api.submitRemoval(
      state.scene.scene_id,
      mask,
      state.checkpointId,
      crypto.randomUUID(),
    );
    setStatus(`removal ${state.removal.removal_id} complete`);
  } catch (error) {
    // Keep the draft so the user can retry after a 409/422 without
    // redrawing the region.
    setStatus(describeError(error));
  }
  await render();
}

export function main(): void {
  el<HTMLInputElement>("scene-file").addEventListener("change", (e) => void onUpload(e));
  el<HTMLCanvasElement>("tile-canvas").addEventListener("click", onCanvasClick);
  el<HTMLButtonElement>("close-draft").addEventListener("click", onCloseDraft);
  el<HTMLButtonElement>("clear-draft").addEventListener("click", onClearDraft);
  el<HTMLButtonElement>("submit").addEventListener("click", () => void onSubmit());
  el<HTMLSelectElement>("checkpoint").addEventListener("change", (e) => {
    state.checkpointId = (e.target as HTMLSelectElement).value;
  });
  el<HTMLSelectElement>("layer").addEventListener("change", (e) => {
    state.view = setLayer(state.view, (e.target as HTMLSelectElement).value as Layer);
    void render();
  });
  el<HTMLSelectElement>("comparison").addEventListener("change", (e) => {
    const mode = (e.target as HTMLSelectElement).value as "side_by_side" | "swipe";
    state.view = setComparison(state.view, mode);
    void render();
  });
  el<HTMLInputElement>("swipe").addEventListener("input", (e) => {
    state.swipe = Number((e.target as HTMLInputElement).value);
    void drawComparison();
  });
  el<HTMLButtonElement>("zoom-in").addEventListener("click", () => {
    state.view = zoomBy(state.view, 2);
    void render();
  });
  el<HTMLButtonElement>("zoom-out").addEventListener("click", () => {
    state.view = zoomBy(state.view, 0.5);
    void render();
  });
  el<HTMLButtonElement>("pan-reset").addEventListener("click", () => {
    state.view = panBy(zoomBy(state.view, 1), -state.view.transform.panX, -state.view.transform.panY);
    void render();
  });
  setStatus(state.status);
}

if (typeof document !== "undefined" && document.getElementById("status")) {
  main();
}
