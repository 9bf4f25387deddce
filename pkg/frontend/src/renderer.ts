/** Flat wireframe/points canvas renderer.
 *
 * Draws the latest frame only (latest-wins slot); springs as lines from the
 * cached index pairs, particles as dots, plus a prominent banner when the
 * simulation has diverged. Works against a minimal 2D-context surface so the
 * drawing logic is testable without a browser.
 */

import { OrbitCamera } from "./camera.js";
import { FrameStore } from "./frames.js";

export interface DrawSurface {
  clear(width: number, height: number): void;
  line(x0: number, y0: number, x1: number, y1: number): void;
  dot(x: number, y: number, radius: number): void;
  banner(text: string): void;
}

export class CanvasSurface implements DrawSurface {
  constructor(private ctx: CanvasRenderingContext2D) {}

  clear(width: number, height: number): void {
    this.ctx.fillStyle = "#10141a";
    this.ctx.fillRect(0, 0, width, height);
  }

  line(x0: number, y0: number, x1: number, y1: number): void {
    this.ctx.strokeStyle = "#5fa8d3";
    this.ctx.lineWidth = 1;
    this.ctx.beginPath();
    this.ctx.moveTo(x0, y0);
    this.ctx.lineTo(x1, y1);
    this.ctx.stroke();
  }

  dot(x: number, y: number, radius: number): void {
    this.ctx.fillStyle = "#e8f1f2";
    this.ctx.beginPath();
    this.ctx.arc(x, y, radius, 0, 2 * Math.PI);
    this.ctx.fill();
  }

  banner(text: string): void {
    const { width, height } = this.ctx.canvas;
    this.ctx.fillStyle = "rgba(160, 30, 30, 0.85)";
    this.ctx.fillRect(0, height / 2 - 30, width, 60);
    this.ctx.fillStyle = "#ffffff";
    this.ctx.font = "bold 24px sans-serif";
    this.ctx.textAlign = "center";
    this.ctx.fillText(text, width / 2, height / 2 + 8);
  }
}

export interface DrawCounts {
  vertices: number;
  lines: number;
}

export function drawScene(
  store: FrameStore,
  camera: OrbitCamera,
  surface: DrawSurface,
): DrawCounts {
  surface.clear(camera.width, camera.height);
  const frame = store.current();
  if (frame === null) {
    return { vertices: 0, lines: 0 };
  }
  const pos = frame.positions;
  const projected = [];
  for (let i = 0; i * 3 < pos.length; i++) {
    projected.push(
      camera.project({ x: pos[i * 3], y: pos[i * 3 + 1], z: pos[i * 3 + 2] }),
    );
  }
  let lines = 0;
  for (const [a, b] of store.springPairs()) {
    const pa = projected[a];
    const pb = projected[b];
    if (pa.depth > 0 && pb.depth > 0) {
      surface.line(pa.sx, pa.sy, pb.sx, pb.sy);
      lines += 1;
    }
  }
  let vertices = 0;
  for (const p of projected) {
    if (p.depth > 0) {
      surface.dot(p.sx, p.sy, 3);
      vertices += 1;
    }
  }
  if (frame.diverged) {
    surface.banner("SIMULATION DIVERGED");
  }
  return { vertices, lines };
}
