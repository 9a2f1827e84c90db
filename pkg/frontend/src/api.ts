/** Thin typed client over the session-service HTTP API. All business
 * logic stays server-side; these are direct endpoint mappings. */

import type {
  GenerateResponse,
  KeyframesResponse,
  CueResolution,
  RefinementRequestBody,
  RefineResponse,
  RenderJob,
  Storyboard,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string, public body: unknown = null) {
    super(message);
  }
}

async function request<T>(method: string, path: string, body?: unknown): Promise<T> {
  const response = await fetch(path, {
    method,
    headers: body === undefined ? {} : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const text = await response.text();
  const parsed = text ? JSON.parse(text) : null;
  if (!response.ok) {
    const message = (parsed && (parsed as { error?: string }).error) || response.statusText;
    throw new ApiError(response.status, message, parsed);
  }
  return parsed as T;
}

export function createProject(name: string): Promise<{ id: string; name: string }> {
  return request("POST", "/projects", { name });
}

export function getStoryboard(projectId: string): Promise<Storyboard> {
  return request("GET", `/projects/${projectId}/storyboard`);
}

export async function putStoryboard(projectId: string, serialized: string): Promise<void> {
  const response = await fetch(`/projects/${projectId}/storyboard`, {
    method: "PUT",
    headers: { "Content-Type": "application/json" },
    body: serialized,
  });
  if (!response.ok) {
    throw new ApiError(response.status, await response.text());
  }
}

export function uploadAsset(projectId: string, id: string, name: string,
                            svg: string): Promise<{ id: string; sha256: string }> {
  return request("POST", `/projects/${projectId}/assets`, { id, name, svg });
}

export function generate(projectId: string): Promise<GenerateResponse> {
  return request("POST", `/projects/${projectId}/generate`, {});
}

export function postResolutions(sessionId: string,
                                resolutions: CueResolution[]): Promise<GenerateResponse> {
  return request("POST", `/sessions/${sessionId}/resolutions`, resolutions);
}

export function skipCue(sessionId: string, cueId: string): Promise<GenerateResponse> {
  return request("POST", `/sessions/${sessionId}/cues/${cueId}/skip`);
}

export async function getProgramText(sessionId: string, version?: number): Promise<string> {
  const suffix = version === undefined ? "" : `?version=${version}`;
  const response = await fetch(`/sessions/${sessionId}/program${suffix}`);
  if (!response.ok) {
    throw new ApiError(response.status, await response.text());
  }
  return response.text();
}

export function startRender(sessionId: string, fps: number): Promise<RenderJob> {
  return request("POST", `/sessions/${sessionId}/render`, { fps });
}

export function getRenderJob(jobId: string): Promise<RenderJob> {
  return request("GET", `/render-jobs/${jobId}`);
}

export function getKeyframes(sessionId: string): Promise<KeyframesResponse> {
  return request("GET", `/sessions/${sessionId}/keyframes`);
}

export function refine(sessionId: string,
                       body: RefinementRequestBody): Promise<RefineResponse> {
  return request("POST", `/sessions/${sessionId}/refine`, body);
}

export async function pollRenderJob(jobId: string, intervalMs = 250,
                                    timeoutMs = 120_000): Promise<RenderJob> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const job = await getRenderJob(jobId);
    if (job.state === "done" || job.state === "failed") return job;
    if (Date.now() > deadline) throw new ApiError(408, "render job timed out");
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}
