/**
 * Mask drafts: what the user is drawing, before it becomes a removal
 * request. Serialization matches the server's RemovalMask JSON schema.
 */

import { rasterizePolygon, rasterizeRectangle, Vertex } from "./raster.js";

export interface MaskDraft {
  shape: "rectangle" | "polygon";
  /** Tile pixel coordinates; for rectangles exactly two corners. */
  vertices: Vertex[];
  closed: boolean;
}

export interface RemovalMaskJson {
  shape: "rectangle" | "polygon";
  geometry: number[] | number[][];
  tile: [number, number];
}

export interface DraftError {
  field: string;
  message: string;
}

export function validateDraft(draft: MaskDraft, tileSize: number): DraftError[] {
  const errors: DraftError[] = [];
  if (draft.shape === "rectangle") {
    if (draft.vertices.length !== 2) {
      errors.push({ field: "vertices", message: "rectangle needs exactly two corners" });
    }
  } else {
    if (draft.vertices.length < 3) {
      errors.push({ field: "vertices", message: "polygon needs at least 3 vertices" });
    }
    if (!draft.closed) {
      errors.push({ field: "closed", message: "close the polygon before submitting" });
    }
  }
  for (const [x, y] of draft.vertices) {
    if (x < 0 || y < 0 || x >= tileSize || y >= tileSize) {
      errors.push({ field: "vertices", message: `vertex (${x}, ${y}) outside the ${tileSize}px tile` });
      break;
    }
  }
  return errors;
}

/** Server schema: rectangle geometry is inclusive [x0, y0, x1, y1]. */
export function draftToRemovalMask(draft: MaskDraft, tile: [number, number]): RemovalMaskJson {
  if (draft.shape === "rectangle") {
    const [[ax, ay], [bx, by]] = draft.vertices;
    return {
      shape: "rectangle",
      geometry: [Math.min(ax, bx), Math.min(ay, by), Math.max(ax, bx), Math.max(ay, by)],
      tile,
    };
  }
  return {
    shape: "polygon",
    geometry: draft.vertices.map(([x, y]) => [x, y]),
    tile,
  };
}

/** The exact pixel set the server will erase: used for the live preview. */
export function previewPixels(draft: MaskDraft, tileSize: number): Uint8Array {
  if (draft.shape === "rectangle") {
    const mask = draftToRemovalMask(draft, [0, 0]);
    return rasterizeRectangle(mask.geometry as [number, number, number, number], tileSize);
  }
  return rasterizePolygon(draft.vertices, tileSize);
}
