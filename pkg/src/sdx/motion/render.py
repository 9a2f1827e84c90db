"""Frame-sequence rendering.

Total duration D is the greatest effective action end (0 for an empty
timeline, so every program yields at least the t=0 frame). Frames are
sampled at i/fps for i = 0..floor(D*fps) and serialized per frame; the
manifest records fps, count and file names.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from ..errors import FpsOutOfRange
from ..jsoncanon import dumps_canonical
from .model import MotionProgram
from .svg import AssetResolver, frame_svg

MIN_FPS = 1
MAX_FPS = 120
DEFAULT_FPS = 30

FRAME_NAME = "frame_%05d.svg"
MANIFEST_NAME = "manifest.json"

# floor() guard: D and fps are exact to 6 decimals, so any true non-integer
# product is at least 1e-6 away from an integer; 1e-9 only absorbs binary
# representation error.
_FLOOR_EPS = 1e-9


@dataclass(frozen=True)
class FrameSet:
    fps: int
    frames: tuple[str, ...]  # SVG documents, index i at time i/fps

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    def manifest(self) -> dict:
        return {
            "fps": self.fps,
            "frameCount": self.frame_count,
            "files": [FRAME_NAME % i for i in range(self.frame_count)],
        }


def frame_count_for(duration: float, fps: int) -> int:
    return int(math.floor(duration * fps + _FLOOR_EPS)) + 1


def render_sequence(program: MotionProgram, fps: int = DEFAULT_FPS,
                    assets: Optional[AssetResolver] = None,
                    workers: int = 1) -> FrameSet:
    """Render every frame of the program. Byte-deterministic; frames are
    independent, so rendering may fan out across a small worker pool."""
    if not isinstance(fps, int) or isinstance(fps, bool) or not (MIN_FPS <= fps <= MAX_FPS):
        raise FpsOutOfRange(f"fps must be an integer in [{MIN_FPS}, {MAX_FPS}], got {fps!r}")
    count = frame_count_for(program.total_duration(), fps)
    times = [i / fps for i in range(count)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            frames = list(pool.map(lambda t: frame_svg(program, t, assets), times))
    else:
        frames = [frame_svg(program, t, assets) for t in times]
    return FrameSet(fps=fps, frames=tuple(frames))


def write_frameset(frameset: FrameSet, out_dir) -> dict:
    """Write frames plus manifest.json into out_dir; returns the manifest."""
    os.makedirs(out_dir, exist_ok=True)
    for i, svg in enumerate(frameset.frames):
        path = os.path.join(out_dir, FRAME_NAME % i)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(svg)
    manifest = frameset.manifest()
    with open(os.path.join(out_dir, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(manifest))
    return manifest


def stitch_video(frames_dir, fps: int, command_template: str) -> None:
    """Hand the rendered frames to an external encoder.

    The template may use {frames}, {pattern} and {fps}; no encoder is
    bundled, frames + manifest stay the canonical output. Example:

        ffmpeg -r {fps} -i {pattern} {frames}/preview.mp4
    """
    import shlex
    import subprocess

    command = command_template.format(
        frames=str(frames_dir),
        pattern=os.path.join(str(frames_dir), FRAME_NAME),
        fps=fps,
    )
    subprocess.run(shlex.split(command), check=True)
