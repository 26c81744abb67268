import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import {
  MaskDraft,
  RemovalMaskJson,
  validateDraft,
  draftToRemovalMask,
  previewPixels,
} from "../src/mask.js";
import { countPixels } from "../src/raster.js";

const golden: RemovalMaskJson[] = JSON.parse(
  readFileSync(join(__dirname, "fixtures", "mask_golden.json"), "utf8"),
);

describe("removal mask schema", () => {
  it("rectangle drafts serialize exactly like the server's schema", () => {
    // Corners drawn in "wrong" order must normalize to x0<=x1, y0<=y1.
    const draft: MaskDraft = {
      shape: "rectangle",
      vertices: [
        [20, 22],
        [4, 5],
      ],
      closed: true,
    };
    expect(draftToRemovalMask(draft, [1, 2])).toEqual(golden[0]);
  });

  it("polygon drafts serialize exactly like the server's schema", () => {
    const draft: MaskDraft = {
      shape: "polygon",
      vertices: [
        [3, 4],
        [10, 4],
        [10, 11],
        [3, 11],
      ],
      closed: true,
    };
    expect(draftToRemovalMask(draft, [0, 3])).toEqual(golden[1]);
  });
});

describe("validateDraft", () => {
  const ok: MaskDraft = {
    shape: "polygon",
    vertices: [
      [1, 1],
      [5, 1],
      [3, 5],
    ],
    closed: true,
  };

  it("accepts a closed triangle", () => {
    expect(validateDraft(ok, 16)).toEqual([]);
  });

  it("rejects a two-point polygon", () => {
    const draft: MaskDraft = { ...ok, vertices: ok.vertices.slice(0, 2) };
    const errors = validateDraft(draft, 16);
    expect(errors.some((e) => e.message.includes("at least 3"))).toBe(true);
  });

  it("rejects an open polygon", () => {
    const errors = validateDraft({ ...ok, closed: false }, 16);
    expect(errors.some((e) => e.field === "closed")).toBe(true);
  });

  it("rejects rectangles without exactly two corners", () => {
    const draft: MaskDraft = { shape: "rectangle", vertices: [[1, 1]], closed: false };
    expect(validateDraft(draft, 16)).not.toEqual([]);
  });

  it("rejects out-of-bounds vertices", () => {
    const draft: MaskDraft = {
      ...ok,
      vertices: [
        [1, 1],
        [16, 1],
        [3, 5],
      ],
    };
    const errors = validateDraft(draft, 16);
    expect(errors.some((e) => e.message.includes("outside"))).toBe(true);
  });
});

describe("previewPixels", () => {
  it("matches the rectangle raster regardless of corner order", () => {
    const a: MaskDraft = {
      shape: "rectangle",
      vertices: [
        [2, 3],
        [6, 5],
      ],
      closed: true,
    };
    const b: MaskDraft = {
      shape: "rectangle",
      vertices: [
        [6, 5],
        [2, 3],
      ],
      closed: true,
    };
    expect(Array.from(previewPixels(a, 16))).toEqual(Array.from(previewPixels(b, 16)));
    expect(countPixels(previewPixels(a, 16))).toBe(5 * 3);
  });
});
