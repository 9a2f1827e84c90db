/** Clarification panel models: one widget state per cue level.
 *
 * Mirrors the server's answer-variant rules so the submit button can be
 * gated client-side; the server remains the authority.
 */

import type { Cue, CueAnswer, CueResolution } from "./types.js";

export interface QuickConfirmState {
  kind: "quick_confirm";
  choice: boolean | null;
}

export interface MultipleChoiceState {
  kind: "multiple_choice";
  chosen: number | null;
}

export interface FillValueState {
  kind: "fill_value";
  raw: string;
}

export interface TextOrUploadState {
  kind: "text_or_upload";
  text: string;
  assetRef: string;
}

export type WidgetState =
  | QuickConfirmState
  | MultipleChoiceState
  | FillValueState
  | TextOrUploadState;

export function initialWidgetState(cue: Cue): WidgetState {
  switch (cue.level) {
    case "quick_confirm":
      return { kind: "quick_confirm", choice: null };
    case "multiple_choice":
      return { kind: "multiple_choice", chosen: null };
    case "fill_value":
      return { kind: "fill_value", raw: "" };
    case "text_or_upload":
      return { kind: "text_or_upload", text: "", assetRef: "" };
  }
}

/** The answer this widget would submit, or null while it is incomplete. */
export function buildAnswer(cue: Cue, state: WidgetState): CueAnswer | null {
  switch (state.kind) {
    case "quick_confirm":
      return state.choice === null ? null : { confirmed: state.choice };
    case "multiple_choice": {
      const options = cue.payload.options ?? [];
      if (state.chosen === null) return null;
      if (state.chosen < 0 || state.chosen >= options.length) return null;
      return { chosenOptionIndex: state.chosen };
    }
    case "fill_value": {
      const value = parseNumeric(state.raw);
      if (value === null) return null;
      const parameter = cue.payload.parameter;
      if (parameter?.min !== undefined && value < parameter.min) return null;
      if (parameter?.max !== undefined && value > parameter.max) return null;
      return { value, unit: parameter?.unit ?? "" };
    }
    case "text_or_upload": {
      if (state.assetRef) return { assetRef: state.assetRef };
      if (state.text.trim()) return { text: state.text.trim() };
      return null;
    }
  }
}

export function parseNumeric(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "" || !/^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/.test(trimmed)) {
    return null;
  }
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : null;
}

export function submitEnabled(cue: Cue, state: WidgetState): boolean {
  return buildAnswer(cue, state) !== null;
}

export interface CuePanelModel {
  cues: Cue[];
  widgets: Map<string, WidgetState>;
  skipped: Set<string>;
}

export function createPanel(cues: Cue[]): CuePanelModel {
  return {
    cues,
    widgets: new Map(cues.map((cue) => [cue.id, initialWidgetState(cue)])),
    skipped: new Set(),
  };
}

export function markSkipped(panel: CuePanelModel, cueId: string): void {
  panel.skipped.add(cueId);
}

/** Resolutions for every answered (not skipped) cue; null until each
 * remaining widget is variant-valid. */
export function collectResolutions(panel: CuePanelModel): CueResolution[] | null {
  const out: CueResolution[] = [];
  for (const cue of panel.cues) {
    if (panel.skipped.has(cue.id)) continue;
    const state = panel.widgets.get(cue.id);
    if (!state) continue;
    const answer = buildAnswer(cue, state);
    if (answer === null) return null;
    out.push({ cueId: cue.id, answer });
  }
  return out;
}
