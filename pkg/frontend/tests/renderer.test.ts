import { describe, expect, it } from "vitest";

import { OrbitCamera } from "../src/camera.js";
import { FpsMeter } from "../src/fps.js";
import { FrameStore } from "../src/frames.js";
import { DrawSurface, drawScene } from "../src/renderer.js";
import { circlePositions, makeFrame } from "./helpers.js";

class CountingSurface implements DrawSurface {
  cleared = 0;
  lines = 0;
  dots = 0;
  banners: string[] = [];

  clear(): void {
    this.cleared += 1;
  }

  line(): void {
    this.lines += 1;
  }

  dot(): void {
    this.dots += 1;
  }

  banner(text: string): void {
    this.banners.push(text);
  }
}

describe("drawScene", () => {
  it("draws one dot per particle and one line per cached spring", () => {
    const store = new FrameStore();
    store.push(
      makeFrame({
        positions: circlePositions(6),
        spring_index_pairs: [[0, 1], [1, 2], [2, 3]],
      }),
    );
    const surface = new CountingSurface();
    const counts = drawScene(store, new OrbitCamera(800, 600), surface);
    expect(counts.vertices).toBe(6);
    expect(counts.lines).toBe(3);
    expect(surface.dots).toBe(6);
    expect(surface.lines).toBe(3);
    expect(surface.banners).toEqual([]);
  });

  it("vertex count follows a lod change from 18 to 66", () => {
    const store = new FrameStore();
    const cam = new OrbitCamera(800, 600);
    cam.distance = 50; // keep everything in front of the camera
    store.push(makeFrame({ positions: circlePositions(18), topology_version: 0 }));
    expect(drawScene(store, cam, new CountingSurface()).vertices).toBe(18);
    store.push(makeFrame({ positions: circlePositions(66), topology_version: 1 }));
    expect(drawScene(store, cam, new CountingSurface()).vertices).toBe(66);
  });

  it("shows a banner when the simulation diverged", () => {
    const store = new FrameStore();
    store.push(makeFrame({ positions: [0, 0, 0], diverged: true }));
    const surface = new CountingSurface();
    drawScene(store, new OrbitCamera(800, 600), surface);
    expect(surface.banners).toHaveLength(1);
    expect(surface.banners[0]).toContain("DIVERGED");
  });

  it("draws nothing before the first frame", () => {
    const surface = new CountingSurface();
    const counts = drawScene(new FrameStore(), new OrbitCamera(800, 600), surface);
    expect(counts).toEqual({ vertices: 0, lines: 0 });
    expect(surface.cleared).toBe(1);
  });
});

describe("FpsMeter", () => {
  it("reports the draw rate over the last second", () => {
    const fps = new FpsMeter();
    for (let t = 0; t <= 1000; t += 20) {
      fps.tick(t);
    }
    expect(fps.fps()).toBeGreaterThan(45);
    expect(fps.fps()).toBeLessThan(55);
  });

  it("is zero before two frames and after clear", () => {
    const fps = new FpsMeter();
    expect(fps.fps()).toBe(0);
    fps.tick(0);
    expect(fps.fps()).toBe(0);
    fps.tick(16);
    expect(fps.fps()).toBeGreaterThan(0);
    fps.clear();
    expect(fps.fps()).toBe(0);
  });
});
