/** Pure HTML builders for the studio views. Keeping these as string
 * functions (no DOM dependency) is what lets the contract tests run in
 * plain node. */

import type { Cue, KeyframeAnchor, LocalityReport, SketchFrame } from "./types.js";
import type { WidgetState } from "./cues.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderCueWidget(cue: Cue, state: WidgetState, enabled: boolean): string {
  const body = widgetBody(cue, state);
  const submit = `<button class="cue-submit" data-cue="${escapeHtml(cue.id)}"` +
    `${enabled ? "" : " disabled"}>Apply</button>`;
  const skip = `<button class="cue-skip" data-cue="${escapeHtml(cue.id)}">Skip</button>`;
  return (
    `<section class="cue cue-${cue.level}" data-cue="${escapeHtml(cue.id)}">` +
    `<p class="cue-question">${escapeHtml(cue.question)}</p>` +
    body +
    `<footer>${submit}${skip}</footer>` +
    `</section>`
  );
}

function widgetBody(cue: Cue, state: WidgetState): string {
  switch (cue.level) {
    case "quick_confirm": {
      const guess = cue.payload.defaultGuess === false ? "no" : "yes";
      return (
        `<div class="confirm-buttons" data-default="${guess}">` +
        `<button data-answer="yes">Yes</button>` +
        `<button data-answer="no">No</button>` +
        `</div>`
      );
    }
    case "multiple_choice": {
      const options = cue.payload.options ?? [];
      const cards = options
        .map((option, i) =>
          `<label class="option-card"><input type="radio" name="${escapeHtml(cue.id)}" ` +
          `value="${i}"/><strong>${escapeHtml(option.label)}</strong>` +
          `<span>${escapeHtml(option.patchDescription)}</span></label>`)
        .join("");
      return `<div class="option-cards">${cards}</div>`;
    }
    case "fill_value": {
      const parameter = cue.payload.parameter;
      const bounds =
        (parameter?.min !== undefined ? ` min="${parameter.min}"` : "") +
        (parameter?.max !== undefined ? ` max="${parameter.max}"` : "");
      const placeholder = parameter?.default !== undefined ? ` placeholder="${parameter.default}"` : "";
      return (
        `<label class="fill-value">${escapeHtml(parameter?.name ?? "value")} ` +
        `<input type="number" inputmode="decimal"${bounds}${placeholder}/>` +
        `<span class="unit">${escapeHtml(parameter?.unit ?? "")}</span></label>`
      );
    }
    case "text_or_upload": {
      const hint = cue.payload.assetHint ? escapeHtml(cue.payload.assetHint) : "";
      return (
        `<div class="text-or-upload">` +
        `<textarea placeholder="Describe what you meant"></textarea>` +
        `<div class="file-drop" data-hint="${hint}">Drop an SVG asset${hint ? ` (${hint})` : ""}</div>` +
        `</div>`
      );
    }
  }
}

export function renderThumbnailStrip(frames: SketchFrame[], active: number): string {
  return frames
    .map((frame) =>
      `<button class="thumb${frame.index === active ? " active" : ""}" ` +
      `data-frame="${frame.index}">Frame ${frame.index + 1}` +
      `<small>${frame.strokes.length} strokes</small></button>`)
    .join("");
}

export function renderAnchorStrip(anchors: KeyframeAnchor[], selected: number | null,
                                  offenders: number[] = []): string {
  const bad = new Set(offenders);
  return anchors
    .map((anchor, i) =>
      `<button class="anchor${i === selected ? " selected" : ""}` +
      `${bad.has(i) ? " offending" : ""}" data-anchor="${i}">` +
      `<img src="${escapeHtml(anchor.frameUrl)}" alt="keyframe at ${anchor.timestamp}s"/>` +
      `<span>${anchor.timestamp.toFixed(2)} s</span></button>`)
    .join("");
}

export function renderLocalityReport(report: LocalityReport): string {
  const lines = report.offenders
    .map((id) => `<li class="offender">${escapeHtml(id)}</li>`)
    .join("");
  return (
    `<div class="locality-report verdict-${report.verdict}">` +
    `<strong>${report.verdict}</strong>` +
    (lines ? `<ul>${lines}</ul>` : "") +
    `</div>`
  );
}
