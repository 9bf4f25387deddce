/** Fixed orbitable camera: yaw/pitch orbit around a target point with a
 * simple perspective projection. Pure math, no canvas dependency, so the
 * projection and the picking that builds on it are unit-testable.
 */

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}

export interface Projected {
  /** Screen x in pixels. */
  sx: number;
  /** Screen y in pixels (down-positive, canvas convention). */
  sy: number;
  /** Camera-space depth; points with depth <= 0 are behind the camera. */
  depth: number;
}

export class OrbitCamera {
  yaw = 0.5;
  pitch = 0.3;
  distance = 4;
  target: Vec3 = { x: 0, y: 0, z: 0 };
  fov = Math.PI / 4;

  constructor(
    public width: number,
    public height: number,
  ) {}

  rotate(dYaw: number, dPitch: number): void {
    this.yaw += dYaw;
    const limit = Math.PI / 2 - 0.01;
    this.pitch = Math.max(-limit, Math.min(limit, this.pitch + dPitch));
  }

  zoom(factor: number): void {
    this.distance = Math.max(0.5, Math.min(100, this.distance * factor));
  }

  /** World point to camera space (x right, y up, z into the scene). */
  toCamera(p: Vec3): Vec3 {
    const cy = Math.cos(this.yaw);
    const sy = Math.sin(this.yaw);
    const cp = Math.cos(this.pitch);
    const sp = Math.sin(this.pitch);
    const dx = p.x - this.target.x;
    const dy = p.y - this.target.y;
    const dz = p.z - this.target.z;
    const x1 = cy * dx - sy * dz;
    const z1 = sy * dx + cy * dz;
    const y2 = cp * dy - sp * z1;
    const z2 = sp * dy + cp * z1;
    return { x: x1, y: y2, z: this.distance - z2 };
  }

  project(p: Vec3): Projected {
    const c = this.toCamera(p);
    const scale = this.height / 2 / Math.tan(this.fov / 2);
    return {
      sx: this.width / 2 + (c.x / c.z) * scale,
      sy: this.height / 2 - (c.y / c.z) * scale,
      depth: c.z,
    };
  }

  /** World-space ray through a screen pixel (unit direction from the eye).
   * Used to place drag targets at a picked particle's depth. */
  rayThrough(sx: number, sy: number): { origin: Vec3; dir: Vec3 } {
    const scale = this.height / 2 / Math.tan(this.fov / 2);
    const cx = (sx - this.width / 2) / scale;
    const cyy = (this.height / 2 - sy) / scale;
    const d = this.cameraDirToWorld({ x: cx, y: cyy, z: 1 });
    const n = Math.hypot(d.x, d.y, d.z);
    return {
      origin: this.position(),
      dir: { x: d.x / n, y: d.y / n, z: d.z / n },
    };
  }

  /** Inverse of project at a known camera-space depth: the world point under
   * screen pixel (sx, sy) whose projected depth equals `depth`. */
  unproject(sx: number, sy: number, depth: number): Vec3 {
    const scale = this.height / 2 / Math.tan(this.fov / 2);
    const cx = ((sx - this.width / 2) / scale) * depth;
    const cyy = ((this.height / 2 - sy) / scale) * depth;
    const eye = this.position();
    const d = this.cameraDirToWorld({ x: cx, y: cyy, z: depth });
    return { x: eye.x + d.x, y: eye.y + d.y, z: eye.z + d.z };
  }

  /** Eye position in world space. */
  position(): Vec3 {
    const cy = Math.cos(this.yaw);
    const sy = Math.sin(this.yaw);
    const cp = Math.cos(this.pitch);
    const sp = Math.sin(this.pitch);
    return {
      x: this.target.x + sy * cp * this.distance,
      y: this.target.y + sp * this.distance,
      z: this.target.z + cy * cp * this.distance,
    };
  }

  /** Camera-space direction (z = into the scene, i.e. increasing projected
   * depth) to world space; inverse of the rotation in toCamera. */
  private cameraDirToWorld(d: Vec3): Vec3 {
    const cy = Math.cos(this.yaw);
    const sy = Math.sin(this.yaw);
    const cp = Math.cos(this.pitch);
    const sp = Math.sin(this.pitch);
    const vx = d.x;
    const vy = d.y;
    const vz = -d.z;
    const t = -sp * vy + cp * vz;
    return {
      x: cy * vx + sy * t,
      y: cp * vy + sp * vz,
      z: -sy * vx + cy * t,
    };
  }
}
