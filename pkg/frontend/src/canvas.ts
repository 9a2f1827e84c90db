/** Drawing surface state: pen/eraser tools, bounded undo, stroke capture.
 *
 * Pure state transitions only; the browser bootstrap feeds pointer events
 * in and paints the stroke list out. Strokes use canvas-unit coordinates
 * so they serialize 1:1 into the storyboard schema.
 */

import type { Point, Rgba, Stroke } from "./types.js";

export type Tool = "pen" | "eraser";

export interface CanvasToolState {
  tool: Tool;
  color: Rgba;
  width: number;
}

export const UNDO_DEPTH = 100; // contract: at least 50 steps retained

export interface CanvasState {
  tool: CanvasToolState;
  strokes: Stroke[];
  draft: Point[] | null;
  nextSeq: number;
  undoStack: Stroke[][];
}

export function createCanvas(): CanvasState {
  return {
    tool: { tool: "pen", color: [0, 0, 0, 1], width: 3 },
    strokes: [],
    draft: null,
    nextSeq: 0,
    undoStack: [],
  };
}

function pushUndo(state: CanvasState): void {
  state.undoStack.push(state.strokes.map((s) => ({ ...s, points: [...s.points] })));
  if (state.undoStack.length > UNDO_DEPTH) {
    state.undoStack.shift();
  }
}

export function setTool(state: CanvasState, tool: Tool): void {
  state.tool.tool = tool;
}

export function setPen(state: CanvasState, color: Rgba, width: number): void {
  state.tool.color = color;
  state.tool.width = width;
}

export function pointerDown(state: CanvasState, p: Point): void {
  if (state.tool.tool === "pen") {
    state.draft = [p];
  } else {
    eraseAt(state, p);
  }
}

export function pointerMove(state: CanvasState, p: Point): void {
  if (state.tool.tool === "pen" && state.draft) {
    state.draft.push(p);
  } else if (state.tool.tool === "eraser") {
    eraseAt(state, p);
  }
}

export function pointerUp(state: CanvasState): Stroke | null {
  if (!state.draft) return null;
  const points = state.draft;
  state.draft = null;
  if (points.length < 2) return null; // degenerate tap, not a stroke
  pushUndo(state);
  const stroke: Stroke = {
    points,
    color: [...state.tool.color] as Rgba,
    width: state.tool.width,
    seq: state.nextSeq,
  };
  state.nextSeq += 1;
  state.strokes.push(stroke);
  return stroke;
}

const ERASE_RADIUS = 12;

function eraseAt(state: CanvasState, p: Point): void {
  const hit = state.strokes.filter((s) => strokeHits(s, p, ERASE_RADIUS));
  if (hit.length === 0) return;
  pushUndo(state);
  state.strokes = state.strokes.filter((s) => !hit.includes(s));
}

export function strokeHits(stroke: Stroke, p: Point, radius: number): boolean {
  for (let i = 0; i + 1 < stroke.points.length; i += 1) {
    if (segmentDistance(stroke.points[i], stroke.points[i + 1], p) <= radius) {
      return true;
    }
  }
  return false;
}

function segmentDistance(a: Point, b: Point, p: Point): number {
  const dx = b[0] - a[0];
  const dy = b[1] - a[1];
  const lengthSq = dx * dx + dy * dy;
  let t = 0;
  if (lengthSq > 0) {
    t = Math.max(0, Math.min(1, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / lengthSq));
  }
  const cx = a[0] + t * dx;
  const cy = a[1] + t * dy;
  return Math.hypot(p[0] - cx, p[1] - cy);
}

export function undo(state: CanvasState): boolean {
  const previous = state.undoStack.pop();
  if (previous === undefined) return false;
  state.strokes = previous;
  return true;
}

export function clear(state: CanvasState): void {
  if (state.strokes.length === 0) return;
  pushUndo(state);
  state.strokes = [];
}
