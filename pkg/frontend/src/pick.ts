/** Nearest-particle picking in screen space. */

import { OrbitCamera } from "./camera.js";

export const PICK_RADIUS_PX = 14;

export interface Pick {
  particleId: number;
  /** Camera-space depth of the picked particle, kept so drag targets stay in
   * the particle's depth plane while the pointer moves. */
  depth: number;
}

/** Find the particle whose projection is closest to (sx, sy) within the pick
 * radius; positions are flat xyz triplets; particle id equals its index in
 * the frame stream. Returns null when nothing is close enough. */
export function pickParticle(
  positions: number[],
  camera: OrbitCamera,
  sx: number,
  sy: number,
  radiusPx: number = PICK_RADIUS_PX,
): Pick | null {
  let best: Pick | null = null;
  let bestDist = radiusPx;
  for (let i = 0; i * 3 < positions.length; i++) {
    const p = camera.project({
      x: positions[i * 3],
      y: positions[i * 3 + 1],
      z: positions[i * 3 + 2],
    });
    if (p.depth <= 0) {
      continue;
    }
    const dist = Math.hypot(p.sx - sx, p.sy - sy);
    if (dist <= bestDist) {
      bestDist = dist;
      best = { particleId: i, depth: p.depth };
    }
  }
  return best;
}

/** World-space drag target: the point under the pointer at the picked depth. */
export function dragTarget(
  camera: OrbitCamera,
  sx: number,
  sy: number,
  depth: number,
): { x: number; y: number; z: number } {
  return camera.unproject(sx, sy, depth);
}
