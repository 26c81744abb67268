/**
 * UI view state and its (pure) transitions. Keeping this free of DOM
 * access makes the invariants unit-testable: selected tile stays inside
 * the grid, zoom stays positive, layer/comparison toggles are total.
 */

export type Layer = "image" | "cfi" | "overlay";
export type ComparisonMode = "side_by_side" | "swipe";

export interface Transform {
  zoom: number;
  panX: number;
  panY: number;
}

export interface ViewState {
  sceneId: string | null;
  rows: number;
  cols: number;
  selected: [number, number];
  layer: Layer;
  transform: Transform;
  comparison: ComparisonMode;
}

export const MIN_ZOOM = 0.25;
export const MAX_ZOOM = 16;

export function initialViewState(): ViewState {
  return {
    sceneId: null,
    rows: 0,
    cols: 0,
    selected: [0, 0],
    layer: "image",
    transform: { zoom: 1, panX: 0, panY: 0 },
    comparison: "side_by_side",
  };
}

export function withScene(state: ViewState, sceneId: string, rows: number, cols: number): ViewState {
  return { ...initialViewState(), sceneId, rows, cols, comparison: state.comparison };
}

export function selectTile(state: ViewState, row: number, col: number): ViewState {
  if (row < 0 || col < 0 || row >= state.rows || col >= state.cols) {
    return state; // out-of-grid clicks are ignored, never stored
  }
  return { ...state, selected: [row, col] };
}

export function setLayer(state: ViewState, layer: Layer): ViewState {
  return { ...state, layer };
}

export function setComparison(state: ViewState, comparison: ComparisonMode): ViewState {
  return { ...state, comparison };
}

export function zoomBy(state: ViewState, factor: number): ViewState {
  const zoom = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, state.transform.zoom * factor));
  return { ...state, transform: { ...state.transform, zoom } };
}

export function panBy(state: ViewState, dx: number, dy: number): ViewState {
  const { transform } = state;
  return { ...state, transform: { ...transform, panX: transform.panX + dx, panY: transform.panY + dy } };
}

/**
 * Canvas pixel -> tile pixel coordinate, inverting zoom/pan. Returns null
 * outside the tile raster so stray clicks don't produce bogus vertices.
 */
export function toTileCoords(
  state: ViewState,
  canvasX: number,
  canvasY: number,
  tileSize: number,
): [number, number] | null {
  const { zoom, panX, panY } = state.transform;
  const x = Math.floor((canvasX - panX) / zoom);
  const y = Math.floor((canvasY - panY) / zoom);
  if (x < 0 || y < 0 || x >= tileSize || y >= tileSize) return null;
  return [x, y];
}
