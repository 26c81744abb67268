/**
 * Client-side mask rasterization.
 *
 * This must stay pixel-identical to the server's rasterizer: even-odd
 * (crossing number) rule evaluated at pixel centers (x + 0.5, y + 0.5),
 * and inclusive rectangle coordinates. The preview the user sees is the
 * exact pixel set the server will zero out of the CFI.
 */

export type Vertex = [number, number];

/** Inclusive rectangle (x0, y0, x1, y1) within a size x size tile. */
export function rasterizeRectangle(
  geometry: [number, number, number, number],
  size: number,
): Uint8Array {
  const [x0, y0, x1, y1] = geometry;
  const out = new Uint8Array(size * size);
  for (let y = y0; y <= y1; y++) {
    for (let x = x0; x <= x1; x++) {
      out[y * size + x] = 1;
    }
  }
  return out;
}

/**
 * Even-odd polygon fill at pixel centers. The crossing test mirrors the
 * server expression exactly:
 *   (y1 > py) !== (y2 > py) && px < (x2 - x1) * (py - y1) / (y2 - y1) + x1
 */
export function rasterizePolygon(vertices: Vertex[], size: number): Uint8Array {
  const out = new Uint8Array(size * size);
  const n = vertices.length;
  for (let y = 0; y < size; y++) {
    const py = y + 0.5;
    for (let x = 0; x < size; x++) {
      const px = x + 0.5;
      let inside = false;
      let j = n - 1;
      for (let i = 0; i < n; i++) {
        const [x1, y1] = vertices[i];
        const [x2, y2] = vertices[j];
        if (y1 > py !== y2 > py && px < ((x2 - x1) * (py - y1)) / (y2 - y1) + x1) {
          inside = !inside;
        }
        j = i;
      }
      if (inside) out[y * size + x] = 1;
    }
  }
  return out;
}

export function countPixels(mask: Uint8Array): number {
  let total = 0;
  for (const v of mask) total += v;
  return total;
}
