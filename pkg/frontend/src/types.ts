/** Wire types mirroring the versioned schemas under ../schema/. */

export type Point = [number, number];
export type Rgba = [number, number, number, number];

export interface Stroke {
  points: Point[];
  color: Rgba;
  width: number;
  seq: number;
}

export interface SketchFrame {
  index: number;
  script: string;
  strokes: Stroke[];
}

export interface AssetRef {
  id: string;
  name: string;
  sha256: string;
  svg: string;
}

export interface Storyboard {
  id: string;
  canvasSize: [number, number];
  frames: SketchFrame[];
  assets: AssetRef[];
}

export type CueLevel =
  | "quick_confirm"
  | "multiple_choice"
  | "fill_value"
  | "text_or_upload";

export interface CueOption {
  label: string;
  patchDescription: string;
}

export interface CueParameter {
  name: string;
  unit: string;
  min?: number;
  max?: number;
  default?: number;
}

export interface Cue {
  id: string;
  level: CueLevel;
  question: string;
  memoryKey: string;
  frameIndex: number;
  payload: {
    defaultGuess?: boolean;
    options?: CueOption[];
    parameter?: CueParameter;
    assetHint?: string;
    allowText?: boolean;
  };
}

export type CueAnswer =
  | { confirmed: boolean }
  | { chosenOptionIndex: number }
  | { value: number; unit?: string }
  | { text?: string; assetRef?: string };

export interface CueResolution {
  cueId: string;
  answer: CueAnswer;
}

export interface GenerateResponse {
  sessionId: string;
  status: "ready" | "needs_clarification" | "failed";
  cues: Cue[];
  programVersion?: number;
  failure?: string;
}

export interface KeyframeAnchor {
  timestamp: number;
  reasons: string[];
  sourceActionIds: string[];
  frameUrl: string;
}

export interface KeyframesResponse {
  programVersion: number;
  anchors: KeyframeAnchor[];
}

export interface RenderManifest {
  fps: number;
  frameCount: number;
  files: string[];
}

export interface RenderJob {
  id: string;
  sessionId: string;
  programVersion: number;
  fps: number;
  state: "queued" | "running" | "done" | "failed";
  error?: string;
  manifest?: RenderManifest;
}

export interface RefinementRequestBody {
  baseProgramVersion?: number;
  anchor: { timestamp: number };
  window?: [number, number];
  windowHalfWidth?: number;
  overlayStrokes?: Stroke[];
  text?: string;
  strict?: boolean;
}

export interface LocalityReport {
  verdict: "pass" | "warn" | "reject";
  offenders: string[];
  diff: {
    added: Record<string, unknown>;
    removed: Record<string, unknown>;
    modified: Record<string, unknown>;
    entityChanges: { added: string[]; removed: string[] };
  };
}

export interface RefineResponse {
  programVersion: number;
  localityReport: LocalityReport;
}
