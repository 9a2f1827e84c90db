/** Browser bootstrap: wires DOM events to the view models. Everything
 * interesting lives in the imported modules; this file only shuttles
 * events in and HTML out. */

import * as api from "./api.js";
import {
  CanvasState,
  clear,
  createCanvas,
  pointerDown,
  pointerMove,
  pointerUp,
  setPen,
  setTool,
  undo,
} from "./canvas.js";
import {
  CuePanelModel,
  collectResolutions,
  createPanel,
  markSkipped,
  submitEnabled,
} from "./cues.js";
import { createPlayer, frameAt, frameFile, play } from "./player.js";
import {
  buildRefinementRequest,
  createRefinementView,
  offendingAnchorIndices,
  RefinementViewState,
  selectAnchor,
} from "./refine.js";
import {
  renderAnchorStrip,
  renderCueWidget,
  renderLocalityReport,
  renderThumbnailStrip,
} from "./render.js";
import {
  addFrame,
  emptyStoryboard,
  loadStoryboard,
  serializeStoryboard,
  setScript,
  setStrokes,
} from "./storyboard.js";
import type { GenerateResponse, Point, Rgba, Storyboard } from "./types.js";

interface Studio {
  projectId: string | null;
  sessionId: string | null;
  board: Storyboard;
  activeFrame: number;
  canvas: CanvasState;
  panel: CuePanelModel | null;
  refinement: RefinementViewState | null;
}

const studio: Studio = {
  projectId: null,
  sessionId: null,
  board: emptyStoryboard("untitled"),
  activeFrame: 0,
  canvas: createCanvas(),
  panel: null,
  refinement: null,
};

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function toast(message: string): void {
  const el = byId<HTMLDivElement>("toast");
  el.textContent = message;
  el.classList.add("visible");
  setTimeout(() => el.classList.remove("visible"), 4000);
}

// --- sketch canvas -----------------------------------------------------------

function canvasPoint(event: MouseEvent, surface: HTMLCanvasElement): Point {
  const rect = surface.getBoundingClientRect();
  return [
    ((event.clientX - rect.left) / rect.width) * 1600,
    ((event.clientY - rect.top) / rect.height) * 900,
  ];
}

function repaint(surface: HTMLCanvasElement): void {
  const ctx = surface.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, surface.width, surface.height);
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  const sx = surface.width / 1600;
  const sy = surface.height / 900;
  const paint = (points: Point[], color: Rgba, width: number) => {
    ctx.strokeStyle = `rgba(${color[0] * 255},${color[1] * 255},${color[2] * 255},${color[3]})`;
    ctx.lineWidth = width * sx;
    ctx.beginPath();
    points.forEach(([x, y], i) => {
      if (i === 0) ctx.moveTo(x * sx, y * sy);
      else ctx.lineTo(x * sx, y * sy);
    });
    ctx.stroke();
  };
  for (const stroke of studio.canvas.strokes) {
    paint(stroke.points, stroke.color, stroke.width);
  }
  if (studio.canvas.draft && studio.canvas.draft.length > 1) {
    paint(studio.canvas.draft, studio.canvas.tool.color, studio.canvas.tool.width);
  }
}

function syncFrameFromCanvas(): void {
  setStrokes(studio.board, studio.activeFrame, studio.canvas.strokes);
  byId<HTMLDivElement>("thumbs").innerHTML =
    renderThumbnailStrip(studio.board.frames, studio.activeFrame);
}

function switchFrame(index: number): void {
  syncFrameFromCanvas();
  studio.activeFrame = index;
  studio.canvas = createCanvas();
  studio.canvas.strokes = studio.board.frames[index].strokes.map((s) => ({
    ...s,
    points: [...s.points],
  }));
  studio.canvas.nextSeq =
    1 + studio.canvas.strokes.reduce((max, s) => Math.max(max, s.seq), -1);
  byId<HTMLTextAreaElement>("script").value = studio.board.frames[index].script;
  repaint(byId<HTMLCanvasElement>("sketch"));
  syncFrameFromCanvas();
}

function wireSketchView(): void {
  const surface = byId<HTMLCanvasElement>("sketch");
  surface.addEventListener("mousedown", (e) => {
    pointerDown(studio.canvas, canvasPoint(e, surface));
    repaint(surface);
  });
  surface.addEventListener("mousemove", (e) => {
    if (e.buttons & 1) {
      pointerMove(studio.canvas, canvasPoint(e, surface));
      repaint(surface);
    }
  });
  window.addEventListener("mouseup", () => {
    pointerUp(studio.canvas);
    repaint(surface);
    syncFrameFromCanvas();
  });

  byId<HTMLButtonElement>("tool-pen").addEventListener("click", () =>
    setTool(studio.canvas, "pen"));
  byId<HTMLButtonElement>("tool-eraser").addEventListener("click", () =>
    setTool(studio.canvas, "eraser"));
  byId<HTMLInputElement>("pen-color").addEventListener("change", (e) => {
    const hex = (e.target as HTMLInputElement).value;
    const rgba: Rgba = [
      parseInt(hex.slice(1, 3), 16) / 255,
      parseInt(hex.slice(3, 5), 16) / 255,
      parseInt(hex.slice(5, 7), 16) / 255,
      1,
    ];
    setPen(studio.canvas, rgba, studio.canvas.tool.width);
  });
  byId<HTMLInputElement>("pen-width").addEventListener("change", (e) => {
    setPen(studio.canvas, studio.canvas.tool.color,
           Number((e.target as HTMLInputElement).value));
  });
  byId<HTMLButtonElement>("undo").addEventListener("click", () => {
    undo(studio.canvas);
    repaint(surface);
    syncFrameFromCanvas();
  });
  byId<HTMLButtonElement>("clear").addEventListener("click", () => {
    clear(studio.canvas);
    repaint(surface);
    syncFrameFromCanvas();
  });
  byId<HTMLButtonElement>("add-frame").addEventListener("click", () => {
    syncFrameFromCanvas();
    const frame = addFrame(studio.board);
    switchFrame(frame.index);
  });
  byId<HTMLDivElement>("thumbs").addEventListener("click", (e) => {
    const target = (e.target as HTMLElement).closest("[data-frame]");
    if (target) switchFrame(Number(target.getAttribute("data-frame")));
  });
  byId<HTMLTextAreaElement>("script").addEventListener("input", (e) => {
    setScript(studio.board, studio.activeFrame,
              (e.target as HTMLTextAreaElement).value);
  });
  byId<HTMLButtonElement>("save").addEventListener("click", () => void saveBoard());
  byId<HTMLInputElement>("import").addEventListener("change", async (e) => {
    const file = (e.target as HTMLInputElement).files?.[0];
    if (!file) return;
    studio.board = loadStoryboard(await file.text());
    switchFrame(0);
  });
  byId<HTMLButtonElement>("export").addEventListener("click", () => {
    syncFrameFromCanvas();
    const blob = new Blob([serializeStoryboard(studio.board)],
                          { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `${studio.board.id}.sdproj`;
    link.click();
  });
}

async function saveBoard(): Promise<void> {
  try {
    syncFrameFromCanvas();
    if (!studio.projectId) {
      const project = await api.createProject(studio.board.id);
      studio.projectId = project.id;
    }
    await api.putStoryboard(studio.projectId, serializeStoryboard(studio.board));
    toast("storyboard saved");
  } catch (err) {
    toast(`save failed: ${(err as Error).message}`);
  }
}

// --- generation + clarification ------------------------------------------------

function showCues(response: GenerateResponse): void {
  studio.panel = createPanel(response.cues);
  const host = byId<HTMLDivElement>("cue-panel");
  host.innerHTML = response.cues
    .map((cue) => renderCueWidget(cue, studio.panel!.widgets.get(cue.id)!,
                                  submitEnabled(cue, studio.panel!.widgets.get(cue.id)!)))
    .join("");
  host.classList.toggle("visible", response.cues.length > 0);
}

async function handleGenerateOutcome(response: GenerateResponse): Promise<void> {
  studio.sessionId = response.sessionId;
  if (response.status === "needs_clarification") {
    showCues(response);
    toast(`the interpreter needs ${response.cues.length} clarification(s)`);
    return;
  }
  if (response.status === "ready" && response.programVersion) {
    byId<HTMLDivElement>("cue-panel").classList.remove("visible");
    await previewVersion(response.programVersion);
    await loadKeyframes();
    return;
  }
  toast(`generation failed: ${response.failure ?? "unknown"}`);
}

async function previewVersion(version: number): Promise<void> {
  if (!studio.sessionId) return;
  const job = await api.startRender(studio.sessionId, 30);
  const finished = await api.pollRenderJob(job.id);
  if (finished.state !== "done" || !finished.manifest) {
    toast(`render failed: ${finished.error ?? "unknown"}`);
    return;
  }
  const player = createPlayer(finished.manifest);
  play(player, performance.now());
  const img = byId<HTMLImageElement>("preview");
  const tick = () => {
    const frame = frameAt(player, performance.now());
    img.src = `/render-jobs/${finished.id}/frames/${frameFile(player, frame)}`;
    if (player.playing) requestAnimationFrame(tick);
  };
  requestAnimationFrame(tick);
  toast(`previewing version ${version}`);
}

function wireGeneration(): void {
  byId<HTMLButtonElement>("generate").addEventListener("click", async () => {
    try {
      await saveBoard();
      if (!studio.projectId) return;
      await handleGenerateOutcome(await api.generate(studio.projectId));
    } catch (err) {
      toast(`generate failed: ${(err as Error).message}`);
    }
  });

  byId<HTMLDivElement>("cue-panel").addEventListener("click", async (e) => {
    const target = e.target as HTMLElement;
    const cueId = target.getAttribute("data-cue") ??
      target.closest("[data-cue]")?.getAttribute("data-cue");
    if (!cueId || !studio.panel || !studio.sessionId) return;
    if (target.classList.contains("cue-skip")) {
      markSkipped(studio.panel, cueId);
      await handleGenerateOutcome(await api.skipCue(studio.sessionId, cueId));
      return;
    }
    if (target.classList.contains("cue-submit")) {
      const resolutions = collectResolutions(studio.panel);
      if (resolutions === null) {
        toast("answer the remaining cues (or skip them) first");
        return;
      }
      await handleGenerateOutcome(
        await api.postResolutions(studio.sessionId, resolutions));
    }
  });
}

// --- refinement ------------------------------------------------------------------

async function loadKeyframes(): Promise<void> {
  if (!studio.sessionId) return;
  const response = await api.getKeyframes(studio.sessionId);
  studio.refinement = createRefinementView(response.anchors, response.programVersion);
  byId<HTMLDivElement>("anchor-strip").innerHTML =
    renderAnchorStrip(response.anchors, null);
}

function wireRefinement(): void {
  byId<HTMLDivElement>("anchor-strip").addEventListener("click", (e) => {
    const target = (e.target as HTMLElement).closest("[data-anchor]");
    if (!target || !studio.refinement) return;
    selectAnchor(studio.refinement, Number(target.getAttribute("data-anchor")));
    byId<HTMLDivElement>("anchor-strip").innerHTML =
      renderAnchorStrip(studio.refinement.anchors, studio.refinement.selected);
    const anchor = studio.refinement.anchors[studio.refinement.selected!];
    byId<HTMLImageElement>("refine-frame").src = anchor.frameUrl;
  });
  byId<HTMLInputElement>("window-slider").addEventListener("change", (e) => {
    if (studio.refinement) {
      studio.refinement.windowHalfWidth = Number((e.target as HTMLInputElement).value);
    }
  });
  byId<HTMLInputElement>("strict-toggle").addEventListener("change", (e) => {
    if (studio.refinement) {
      studio.refinement.strict = (e.target as HTMLInputElement).checked;
    }
  });
  byId<HTMLTextAreaElement>("refine-text").addEventListener("input", (e) => {
    if (studio.refinement) {
      studio.refinement.text = (e.target as HTMLTextAreaElement).value;
    }
  });
  byId<HTMLButtonElement>("refine-submit").addEventListener("click", async () => {
    if (!studio.refinement || !studio.sessionId) return;
    const body = buildRefinementRequest(studio.refinement);
    if (body === null) {
      toast("pick a keyframe and sketch or describe the change first");
      return;
    }
    try {
      const response = await api.refine(studio.sessionId, body);
      byId<HTMLDivElement>("locality").innerHTML =
        renderLocalityReport(response.localityReport);
      await previewVersion(response.programVersion);
      await loadKeyframes();
    } catch (err) {
      const apiErr = err as api.ApiError;
      const report = (apiErr.body as { localityReport?: never })?.localityReport;
      if (apiErr.status === 409 && report && studio.refinement) {
        byId<HTMLDivElement>("locality").innerHTML = renderLocalityReport(report);
        byId<HTMLDivElement>("anchor-strip").innerHTML = renderAnchorStrip(
          studio.refinement.anchors, studio.refinement.selected,
          offendingAnchorIndices(studio.refinement, report));
        toast("rejected: the change leaks outside its window");
      } else {
        toast(`refine failed: ${apiErr.message}`);
      }
    }
  });
}

export function boot(): void {
  wireSketchView();
  wireGeneration();
  wireRefinement();
  switchFrame(0);
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  boot();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
