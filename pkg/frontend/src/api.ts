/**
 * Thin client for the workbench HTTP API. The UI never touches pixels
 * except through these endpoints.
 */

import { RemovalMaskJson } from "./mask.js";

export interface SceneMeta {
  scene_id: string;
  rows: number;
  cols: number;
  tile_size: number;
}

export interface RemovalResponse {
  removal_id: string;
  scene_id: string;
  tile: [number, number];
  checkpoint_id: string;
}

export interface SimilarityReport {
  mse_unit: number;
  mse_reported: number;
  psnr_db: number;
  ssim: number;
  region: string;
}

export interface ApiError {
  status: number;
  code: string;
  message: string;
}

async function raise(response: Response): Promise<never> {
  let code = "error";
  let message = response.statusText;
  try {
    const body = await response.json();
    const detail = body.detail ?? body;
    code = detail.code ?? code;
    message = detail.message ?? message;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw { status: response.status, code, message } satisfies ApiError;
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) await raise(response);
    return response.json() as Promise<T>;
  }

  uploadScene(file: Blob, tileSize?: number): Promise<SceneMeta> {
    const form = new FormData();
    form.append("file", file, "scene.png");
    const query = tileSize ? `?tile_size=${tileSize}` : "";
    return this.json(`/scenes${query}`, { method: "POST", body: form });
  }

  tileUrl(sceneId: string, row: number, col: number): string {
    return `${this.baseUrl}/scenes/${sceneId}/tiles/${row}/${col}`;
  }

  cfiUrl(sceneId: string, row: number, col: number): string {
    return this.tileUrl(sceneId, row, col) + "/cfi";
  }

  listCheckpoints(): Promise<{ checkpoints: string[] }> {
    return this.json("/checkpoints");
  }

  submitRemoval(
    sceneId: string,
    mask: RemovalMaskJson,
    checkpointId: string,
    idempotencyKey?: string,
  ): Promise<RemovalResponse> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (idempotencyKey) headers["Idempotency-Key"] = idempotencyKey;
    return this.json(`/scenes/${sceneId}/removals`, {
      method: "POST",
      headers,
      body: JSON.stringify({ mask, checkpoint_id: checkpointId }),
    });
  }

  removalArtifactUrl(removalId: string, artifact: "scene" | "tile" | "cfi"): string {
    return `${this.baseUrl}/removals/${removalId}/result?artifact=${artifact}`;
  }

  removalMetrics(removalId: string): Promise<SimilarityReport> {
    return this.json(`/removals/${removalId}/metrics`);
  }
}
