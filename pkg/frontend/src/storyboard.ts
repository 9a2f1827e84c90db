/** Storyboard editing model and exact (de)serialization of `.sdproj`.
 *
 * The server is the source of truth for validation; this module only
 * guarantees that what the canvas produced serializes byte-compatibly
 * with the published schema and survives a save/load round trip.
 */

import type { SketchFrame, Storyboard, Stroke } from "./types.js";

export const CANVAS_WIDTH = 1600;
export const CANVAS_HEIGHT = 900;

export function emptyStoryboard(id: string): Storyboard {
  return {
    id,
    canvasSize: [CANVAS_WIDTH, CANVAS_HEIGHT],
    frames: [emptyFrame(0)],
    assets: [],
  };
}

export function emptyFrame(index: number): SketchFrame {
  return { index, script: "", strokes: [] };
}

export function addFrame(board: Storyboard): SketchFrame {
  const frame = emptyFrame(board.frames.length);
  board.frames.push(frame);
  return frame;
}

export function removeFrame(board: Storyboard, index: number): void {
  board.frames.splice(index, 1);
  board.frames.forEach((frame, i) => {
    frame.index = i; // indices stay contiguous from 0
  });
}

export function setScript(board: Storyboard, index: number, script: string): void {
  board.frames[index].script = script.slice(0, 500);
}

export function setStrokes(board: Storyboard, index: number, strokes: Stroke[]): void {
  board.frames[index].strokes = strokes;
}

/** Serialize for PUT /projects/{id}/storyboard (sdproj.v1 schema). */
export function serializeStoryboard(board: Storyboard): string {
  const payload = {
    id: board.id,
    canvasSize: board.canvasSize,
    frames: board.frames.map((frame) => ({
      index: frame.index,
      script: frame.script,
      strokes: frame.strokes.map((s) => ({
        points: s.points.map((p) => [p[0], p[1]]),
        color: [...s.color],
        width: s.width,
        seq: s.seq,
      })),
    })),
    assets: board.assets.map((a) => ({ ...a })),
  };
  return JSON.stringify(payload, null, 2);
}

export function loadStoryboard(text: string): Storyboard {
  const raw = JSON.parse(text) as Storyboard;
  if (!Array.isArray(raw.frames)) {
    throw new Error("storyboard has no frames array");
  }
  return {
    id: raw.id ?? "storyboard",
    canvasSize: raw.canvasSize ?? [CANVAS_WIDTH, CANVAS_HEIGHT],
    frames: raw.frames.map((frame, i) => ({
      index: frame.index ?? i,
      script: frame.script ?? "",
      strokes: (frame.strokes ?? []).map((s, j) => ({
        points: s.points.map((p) => [p[0], p[1]] as [number, number]),
        color: (s.color ?? [0, 0, 0, 1]) as Stroke["color"],
        width: s.width ?? 3,
        seq: s.seq ?? j,
      })),
    })),
    assets: raw.assets ?? [],
  };
}
