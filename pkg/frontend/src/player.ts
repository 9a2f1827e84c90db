/** Frame-sequence preview player: steps through rendered SVG frames at
 * the manifest fps. No codecs; just index arithmetic. */

import type { RenderManifest } from "./types.js";

export interface PlayerState {
  manifest: RenderManifest;
  playing: boolean;
  startedAtMs: number | null;
  pausedFrame: number;
  loop: boolean;
}

export function createPlayer(manifest: RenderManifest): PlayerState {
  return { manifest, playing: false, startedAtMs: null, pausedFrame: 0, loop: true };
}

export function play(player: PlayerState, nowMs: number): void {
  player.playing = true;
  player.startedAtMs = nowMs - (player.pausedFrame / player.manifest.fps) * 1000;
}

export function pause(player: PlayerState, nowMs: number): void {
  player.pausedFrame = frameAt(player, nowMs);
  player.playing = false;
  player.startedAtMs = null;
}

export function seek(player: PlayerState, frame: number): void {
  player.pausedFrame = clampFrame(player, frame);
  if (player.playing) {
    player.playing = false;
    player.startedAtMs = null;
  }
}

export function frameAt(player: PlayerState, nowMs: number): number {
  if (!player.playing || player.startedAtMs === null) {
    return player.pausedFrame;
  }
  const elapsed = ((nowMs - player.startedAtMs) / 1000) * player.manifest.fps;
  const raw = Math.floor(elapsed);
  if (player.loop) {
    return player.manifest.frameCount === 0 ? 0 : raw % player.manifest.frameCount;
  }
  return clampFrame(player, raw);
}

function clampFrame(player: PlayerState, frame: number): number {
  return Math.max(0, Math.min(player.manifest.frameCount - 1, frame));
}

export function frameFile(player: PlayerState, frame: number): string {
  return player.manifest.files[clampFrame(player, frame)];
}
