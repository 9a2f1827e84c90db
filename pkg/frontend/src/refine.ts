/** Keyframe refinement view model: pick an anchor, draw an overlay or
 * type a cue, choose the window, submit, and map a locality report back
 * onto the timeline strip. */

import type {
  KeyframeAnchor,
  LocalityReport,
  RefinementRequestBody,
  Stroke,
} from "./types.js";

export interface RefinementViewState {
  anchors: KeyframeAnchor[];
  selected: number | null;
  overlay: Stroke[];
  text: string;
  windowHalfWidth: number;
  strict: boolean;
  baseProgramVersion: number;
}

export const DEFAULT_WINDOW_HALF_WIDTH = 2.0;

export function createRefinementView(anchors: KeyframeAnchor[],
                                     baseProgramVersion: number): RefinementViewState {
  return {
    anchors,
    selected: null,
    overlay: [],
    text: "",
    windowHalfWidth: DEFAULT_WINDOW_HALF_WIDTH,
    strict: false,
    baseProgramVersion,
  };
}

export function selectAnchor(view: RefinementViewState, index: number): void {
  if (index < 0 || index >= view.anchors.length) {
    throw new Error(`no anchor at index ${index}`);
  }
  view.selected = index;
  view.overlay = []; // overlay strokes belong to one frame
}

export function windowFor(view: RefinementViewState): [number, number] {
  if (view.selected === null) throw new Error("no anchor selected");
  const ts = view.anchors[view.selected].timestamp;
  return [Math.max(0, ts - view.windowHalfWidth), ts + view.windowHalfWidth];
}

/** The request body for POST /sessions/{sid}/refine, or null while the
 * view is incomplete (no anchor, or neither overlay nor text). */
export function buildRefinementRequest(view: RefinementViewState): RefinementRequestBody | null {
  if (view.selected === null) return null;
  const hasOverlay = view.overlay.length > 0;
  const hasText = view.text.trim().length > 0;
  if (!hasOverlay && !hasText) return null;
  const body: RefinementRequestBody = {
    baseProgramVersion: view.baseProgramVersion,
    anchor: { timestamp: view.anchors[view.selected].timestamp },
    window: windowFor(view),
    strict: view.strict,
  };
  if (hasOverlay) {
    body.overlayStrokes = view.overlay.map((s) => ({
      points: s.points.map((p) => [p[0], p[1]] as [number, number]),
      color: [...s.color] as Stroke["color"],
      width: s.width,
      seq: s.seq,
    }));
  }
  if (hasText) {
    body.text = view.text.trim();
  }
  return body;
}

/** Anchor indices to highlight when a strict refinement was rejected:
 * every anchor whose source actions include an offender. */
export function offendingAnchorIndices(view: RefinementViewState,
                                       report: LocalityReport): number[] {
  const offenders = new Set(report.offenders);
  const out: number[] = [];
  view.anchors.forEach((anchor, index) => {
    if (anchor.sourceActionIds.some((id) => offenders.has(id))) {
      out.push(index);
    }
  });
  return out;
}
