/** Maps widget edits and pointer gestures to control messages.
 *
 * All outgoing commands go through here so that every edit is staged against
 * its seq and only lands in the panel mirror once the server acks it.
 */

import { OrbitCamera } from "./camera.js";
import { FrameStore } from "./frames.js";
import { Pick, dragTarget, pickParticle } from "./pick.js";
import { ServiceSocket } from "./socket.js";
import { PanelState } from "./state.js";

export class PanelController {
  private activePick: Pick | null = null;

  constructor(
    private socket: ServiceSocket,
    private state: PanelState,
    private frames: FrameStore,
    private camera: OrbitCamera,
  ) {}

  editParam(field: string, value: number | boolean): void {
    const seq = this.socket.send({ type: "set_param", field, value });
    if (seq !== null) {
      this.state.stageParamEdit(seq, field, value);
    }
  }

  chooseIntegrator(kind: "euler_explicit" | "euler_semi_implicit" | "midpoint" | "rk4"): void {
    const seq = this.socket.send({ type: "set_integrator", kind });
    if (seq !== null) {
      this.state.stageIntegratorEdit(seq, kind);
    }
  }

  setLod(level: number): void {
    const seq = this.socket.send({ type: "set_lod", level });
    if (seq !== null) {
      this.state.stageLodEdit(seq, level);
    }
  }

  pause(): void {
    this.socket.send({ type: "pause" });
  }

  resume(): void {
    this.socket.send({ type: "resume" });
  }

  /** Exactly one reset message; the panel re-syncs from the ack and frames. */
  reset(): void {
    this.socket.send({ type: "reset" });
  }

  startRecording(intervalSteps: number): void {
    const seq = this.socket.send({ type: "record_start", interval_steps: intervalSteps });
    if (seq !== null) {
      this.state.stageRecordingEdit(seq, true);
    }
  }

  stopRecording(): void {
    const seq = this.socket.send({ type: "record_stop" });
    if (seq !== null) {
      this.state.stageRecordingEdit(seq, false);
    }
  }

  /** Pointer press over the canvas: picks the nearest particle within the
   * pick radius and starts a drag; far presses send nothing. */
  pointerDown(sx: number, sy: number): boolean {
    const frame = this.frames.current();
    if (frame === null) {
      return false;
    }
    const pick = pickParticle(frame.positions, this.camera, sx, sy);
    if (pick === null) {
      return false;
    }
    this.activePick = pick;
    this.sendDrag(sx, sy, true);
    return true;
  }

  pointerMove(sx: number, sy: number): void {
    if (this.activePick !== null) {
      this.sendDrag(sx, sy, true);
    }
  }

  pointerUp(sx: number, sy: number): void {
    if (this.activePick !== null) {
      this.sendDrag(sx, sy, false);
      this.activePick = null;
    }
  }

  dragging(): boolean {
    return this.activePick !== null;
  }

  private sendDrag(sx: number, sy: number, active: boolean): void {
    const pick = this.activePick;
    if (pick === null) {
      return;
    }
    this.socket.send({
      type: "drag_force",
      particle_id: pick.particleId,
      target: dragTarget(this.camera, sx, sy, pick.depth),
      active,
    });
  }
}
